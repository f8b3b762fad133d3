//! The triangle between elliptic zeta functions, weight-2 forms and
//! equivariant functions.
//!
//! An elliptic zeta function is kept in canonical form `Z = Φ·z + Ψ·ζ(z)`;
//! the elliptic remainder never affects quasi-periods and is dropped. From
//! `Z` one gets the weight-2 form `f = Φ/Ψ` and the equivariant function
//! `h = H(τ)/H(1)`, where `H(ω) = Φω + Ψη(ω)`. Forms and equivariant
//! functions are related by the Möbius map with matrix
//! `[[τ, η(τ)], [1, η(1)]]`, whose determinant is `τη(1) − η(τ) = 2πi`.
//!
//! An equivariant function is rational exactly when its poles are simple
//! with rational residues. That criterion needs a global pole census and is
//! not decided here.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eisenstein;
use crate::gamma::{self, CongruenceGroup, GroupError};
use crate::lattice::{Extended, ModularPoint, Unimodular, C64};
use crate::weierstrass::{self, EvalConfig};
use crate::zeta_algebra::{self, WhPoly};

pub type FormEval = Arc<dyn Fn(ModularPoint) -> Extended + Send + Sync>;

/// Step of the central-difference derivative fallback.
pub const FD_STEP: f64 = 1e-5;

/// Seed and size of the probe deciding "not identically zero".
pub const PROBE_SEED: u64 = 0x00c0_ffee;
pub const PROBE_POINTS: usize = 8;
pub const PROBE_THRESHOLD: f64 = 1e-12;

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrespondenceError {
    #[error("{0}: Psi vanishes identically, no modular form attached")]
    VanishingPsi(String),
    #[error("{0}: H(1) vanishes identically, no equivariant function attached")]
    VanishingH1(String),
    #[error("{0}: the trivial equivariant function tau has no preimage")]
    Trivial(String),
    #[error("{name}: expected weight {expected}, declared {found}")]
    Weight { name: String, expected: i32, found: i32 },
    #[error("{0}: weight 0 gives no equivariant function")]
    ZeroWeight(String),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn finite(z: C64) -> Extended {
    Extended::Finite(z)
}

fn constant(v: C64) -> FormEval {
    Arc::new(move |_| finite(v))
}

/// A (meromorphic) modular form with its declared weight and group.
#[derive(Clone)]
pub struct FormDescriptor {
    name: String,
    weight: i32,
    group: CongruenceGroup,
    evaluator: FormEval,
    derivative: Option<FormEval>,
}

impl FormDescriptor {
    pub fn new(
        name: impl Into<String>,
        weight: i32,
        group: CongruenceGroup,
        evaluator: FormEval,
        derivative: Option<FormEval>,
    ) -> Self {
        FormDescriptor {
            name: name.into(),
            weight,
            group,
            evaluator,
            derivative,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn group(&self) -> CongruenceGroup {
        self.group
    }

    pub fn evaluator(&self) -> FormEval {
        self.evaluator.clone()
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, tau: ModularPoint) -> Extended {
        (self.evaluator)(tau)
    }

    /// `f′(τ)`, analytic when registered, else a central difference in `τ`.
    pub fn derivative_at(&self, tau: ModularPoint) -> Extended {
        if let Some(d) = &self.derivative {
            return d(tau);
        }
        let t = tau.tau();
        let at = |s: f64| ModularPoint::new(t + s).map(|p| self.eval(p));
        match (at(FD_STEP), at(-FD_STEP)) {
            (Ok(Extended::Finite(a)), Ok(Extended::Finite(b))) => finite((a - b) / (2.0 * FD_STEP)),
            _ => Extended::Infinity,
        }
    }
}

impl fmt::Debug for FormDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormDescriptor")
            .field("name", &self.name)
            .field("weight", &self.weight)
            .field("group", &self.group)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// `Z = Φ·z + Ψ·ζ(z)` with `Z(αΛ, αz) = α^k Z(Λ, z)`.
#[derive(Clone)]
pub struct EllipticZetaSpec {
    pub name: String,
    pub weight_k: i32,
    pub group: CongruenceGroup,
    pub phi: FormEval,
    pub psi: FormEval,
}

impl EllipticZetaSpec {
    /// Weierstrass `ζ` itself.
    pub fn zeta() -> Self {
        EllipticZetaSpec {
            name: "zeta".into(),
            weight_k: -1,
            group: CongruenceGroup::FULL,
            phi: constant(C64::new(0.0, 0.0)),
            psi: constant(C64::new(1.0, 0.0)),
        }
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        EllipticZetaSpec {
            name: "identity".into(),
            weight_k: 0,
            group: CongruenceGroup::FULL,
            phi: constant(C64::new(1.0, 0.0)),
            psi: constant(C64::new(0.0, 0.0)),
        }
    }

    /// The primitive `Zₙ = Φₙz + Ψₙζ` of `℘ⁿ` (modulo elliptic functions).
    pub fn z_n(n: i64, cfg: EvalConfig) -> Self {
        assert!(n >= 1, "Z_n needs n >= 1");
        let (phi, psi) = zeta_algebra::phi_psi(n);
        let poly = |p: WhPoly| -> FormEval {
            Arc::new(move |tau| finite(zeta_algebra::eval_whpoly(&p, tau, &cfg)))
        };
        EllipticZetaSpec {
            name: format!("Z_n:{n}"),
            weight_k: 1 - 2 * n as i32,
            group: CongruenceGroup::FULL,
            phi: poly(phi),
            psi: poly(psi),
        }
    }
}

impl fmt::Debug for EllipticZetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticZetaSpec")
            .field("name", &self.name)
            .field("weight_k", &self.weight_k)
            .field("group", &self.group)
            .finish()
    }
}

/// A function `h` on the upper half-plane expected to satisfy
/// `h(γτ) = γ·h(τ)` on its group.
#[derive(Clone)]
pub struct EquivariantFn {
    name: String,
    group: CongruenceGroup,
    evaluator: FormEval,
    trivial: bool,
}

impl EquivariantFn {
    pub fn new(name: impl Into<String>, group: CongruenceGroup, evaluator: FormEval) -> Self {
        EquivariantFn {
            name: name.into(),
            group,
            evaluator,
            trivial: false,
        }
    }

    /// `h(τ) = τ`.
    pub fn tau() -> Self {
        EquivariantFn {
            name: "tau".into(),
            group: CongruenceGroup::FULL,
            evaluator: Arc::new(|tau: ModularPoint| finite(tau.tau())),
            trivial: true,
        }
    }

    /// `h(τ) = η(τ)/η(1)`.
    pub fn eta_ratio(cfg: EvalConfig) -> Self {
        EquivariantFn::new(
            "eta_ratio",
            CongruenceGroup::FULL,
            Arc::new(move |tau| {
                let p = weierstrass::eta_pair(tau, &cfg);
                Extended::ratio(p.eta2, p.eta1)
            }),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> CongruenceGroup {
        self.group
    }

    /// Whether this is known to be the function `τ`.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn eval(&self, tau: ModularPoint) -> Extended {
        (self.evaluator)(tau)
    }

    /// The same function with `x ↦ x + shift` applied to its values.
    pub fn shifted(&self, shift: C64) -> Self {
        let inner = self.evaluator.clone();
        EquivariantFn::new(
            format!("{}+{}", self.name, finite(shift)),
            self.group,
            Arc::new(move |tau| match inner(tau) {
                Extended::Finite(v) => finite(v + shift),
                Extended::Infinity => Extended::Infinity,
            }),
        )
    }

    pub fn with_group(mut self, group: CongruenceGroup) -> Self {
        self.group = group;
        self
    }
}

impl fmt::Debug for EquivariantFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivariantFn")
            .field("name", &self.name)
            .field("group", &self.group)
            .field("trivial", &self.trivial)
            .finish()
    }
}

/// `Φ(τ)·z + Ψ(τ)·ζ(z)` on `ℤ + τℤ`.
pub fn zeta_eval(zeta: &EllipticZetaSpec, tau: ModularPoint, z: C64, cfg: &EvalConfig) -> Extended {
    let (Extended::Finite(phi), Extended::Finite(psi)) = ((zeta.phi)(tau), (zeta.psi)(tau)) else {
        return Extended::Infinity;
    };
    if psi == C64::new(0.0, 0.0) {
        return finite(phi * z);
    }
    match weierstrass::zeta_w(tau, z, cfg) {
        Extended::Finite(w) => finite(phi * z + psi * w),
        Extended::Infinity => Extended::Infinity,
    }
}

/// `(H(1), H(τ))` with `H(ω) = Φω + Ψη(ω)`.
pub fn quasi_periods(zeta: &EllipticZetaSpec, tau: ModularPoint, cfg: &EvalConfig) -> (Extended, Extended) {
    let (Extended::Finite(phi), Extended::Finite(psi)) = ((zeta.phi)(tau), (zeta.psi)(tau)) else {
        return (Extended::Infinity, Extended::Infinity);
    };
    let eta = weierstrass::eta_pair(tau, cfg);
    (finite(phi + psi * eta.eta1), finite(phi * tau.tau() + psi * eta.eta2))
}

/// Recovers `(Φ, Ψ)` from `(H(1), H(τ))` by inverting
/// `[[1, η(1)], [τ, η(τ)]]`, whose determinant is `η(τ) − τη(1) = −2πi`.
pub fn phi_psi_from_h(h1: C64, htau: C64, tau: ModularPoint, cfg: &EvalConfig) -> (C64, C64) {
    let eta = weierstrass::eta_pair(tau, cfg);
    let det = -TWO_PI_I;
    (
        (eta.eta2 * h1 - eta.eta1 * htau) / det,
        (htau - tau.tau() * h1) / det,
    )
}

/// Fixed probe points in the fundamental domain.
pub fn probe_points() -> Vec<ModularPoint> {
    random_fundamental_points(PROBE_POINTS, PROBE_SEED)
}

fn vanishes_identically(f: &FormEval) -> bool {
    probe_points().into_iter().all(|tau| match f(tau) {
        Extended::Finite(v) => v.norm() < PROBE_THRESHOLD,
        Extended::Infinity => false,
    })
}

/// `f = Φ/Ψ`, a weight-2 form on the group of `Z`.
pub fn modular_from_zeta(zeta: &EllipticZetaSpec) -> Result<FormDescriptor, CorrespondenceError> {
    if vanishes_identically(&zeta.psi) {
        return Err(CorrespondenceError::VanishingPsi(zeta.name.clone()));
    }
    let (phi, psi) = (zeta.phi.clone(), zeta.psi.clone());
    let eval: FormEval = Arc::new(move |tau| match (phi(tau), psi(tau)) {
        (Extended::Finite(p), Extended::Finite(q)) => Extended::ratio(p, q),
        _ => Extended::Infinity,
    });
    Ok(FormDescriptor::new(
        format!("Phi/Psi[{}]", zeta.name),
        2,
        zeta.group,
        eval,
        None,
    ))
}

/// `h = H(τ)/H(1)`.
pub fn equivariant_from_zeta(
    zeta: &EllipticZetaSpec,
    cfg: &EvalConfig,
) -> Result<EquivariantFn, CorrespondenceError> {
    let cfg = *cfg;
    let z = zeta.clone();
    let h1: FormEval = Arc::new(move |tau| quasi_periods(&z, tau, &cfg).0);
    if vanishes_identically(&h1) {
        return Err(CorrespondenceError::VanishingH1(zeta.name.clone()));
    }
    let z = zeta.clone();
    let eval: FormEval = Arc::new(move |tau| match quasi_periods(&z, tau, &cfg) {
        (Extended::Finite(a), Extended::Finite(b)) => Extended::ratio(b, a),
        _ => Extended::Infinity,
    });
    Ok(EquivariantFn {
        name: format!("H(tau)/H(1)[{}]", zeta.name),
        group: zeta.group,
        evaluator: eval,
        trivial: vanishes_identically(&zeta.psi),
    })
}

fn require_weight(f: &FormDescriptor, expected: i32) -> Result<(), CorrespondenceError> {
    if f.weight != expected {
        return Err(CorrespondenceError::Weight {
            name: f.name.clone(),
            expected,
            found: f.weight,
        });
    }
    Ok(())
}

/// `h = (τf + η(τ))/(f + η(1))`.
pub fn m_transform(f: &FormDescriptor, cfg: &EvalConfig) -> Result<EquivariantFn, CorrespondenceError> {
    require_weight(f, 2)?;
    let cfg = *cfg;
    let form = f.evaluator.clone();
    let eval: FormEval = Arc::new(move |tau| {
        let t = tau.tau();
        match form(tau) {
            Extended::Infinity => finite(t),
            Extended::Finite(v) => {
                let eta = weierstrass::eta_pair(tau, &cfg);
                Extended::ratio(t * v + eta.eta2, v + eta.eta1)
            }
        }
    });
    Ok(EquivariantFn::new(format!("M[{}]", f.name), f.group, eval))
}

/// `f = (η(1)h − η(τ))/(τ − h)`, the inverse Möbius map.
pub fn m_inverse(h: &EquivariantFn, cfg: &EvalConfig) -> Result<FormDescriptor, CorrespondenceError> {
    let inner = h.evaluator.clone();
    let offset: FormEval = Arc::new(move |tau| match inner(tau) {
        Extended::Finite(v) => finite(v - tau.tau()),
        Extended::Infinity => Extended::Infinity,
    });
    if h.trivial || vanishes_identically(&offset) {
        return Err(CorrespondenceError::Trivial(h.name.clone()));
    }
    let cfg = *cfg;
    let inner = h.evaluator.clone();
    let eval: FormEval = Arc::new(move |tau| {
        let eta = weierstrass::eta_pair(tau, &cfg);
        match inner(tau) {
            Extended::Infinity => finite(-eta.eta1),
            Extended::Finite(v) => Extended::ratio(eta.eta1 * v - eta.eta2, tau.tau() - v),
        }
    });
    Ok(FormDescriptor::new(format!("Minv[{}]", h.name), 2, h.group, eval, None))
}

/// `h_f = τ + k·f/f′`.
pub fn h_from_form(f: &FormDescriptor) -> Result<EquivariantFn, CorrespondenceError> {
    if f.weight == 0 {
        return Err(CorrespondenceError::ZeroWeight(f.name.clone()));
    }
    let k = f.weight as f64;
    let form = f.clone();
    let eval: FormEval = Arc::new(move |tau| {
        let t = tau.tau();
        match (form.eval(tau), form.derivative_at(tau)) {
            (Extended::Finite(v), Extended::Finite(d)) => match Extended::ratio(v * k, d) {
                Extended::Finite(r) => finite(t + r),
                Extended::Infinity => Extended::Infinity,
            },
            _ => finite(t),
        }
    });
    Ok(EquivariantFn::new(format!("h[{}]", f.name), f.group, eval))
}

/// `Z(Λ, z) = f(ω₂/ω₁)/ω₁²·z + ζ(z)`, of weight `−1`.
pub fn lift_form_to_zeta(f: &FormDescriptor) -> Result<EllipticZetaSpec, CorrespondenceError> {
    require_weight(f, 2)?;
    Ok(EllipticZetaSpec {
        name: format!("lift[{}]", f.name),
        weight_k: -1,
        group: f.group,
        phi: f.evaluator.clone(),
        psi: constant(C64::new(1.0, 0.0)),
    })
}

/// `count` points drawn uniformly from the box `|Re τ| ≤ 1/2`,
/// `√3/2 ≤ Im τ ≤ 2`, keeping those with `|τ| ≥ 1`.
pub fn random_fundamental_points(count: usize, seed: u64) -> Vec<ModularPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let re = rng.gen_range(-0.5..=0.5);
        let im = rng.gen_range(0.75f64.sqrt()..=2.0);
        if re * re + im * im >= 1.0 {
            out.push(ModularPoint::from_parts(re, im).expect("im > 0"));
        }
    }
    out
}

/// One sampled check and the two sides it compared.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub gamma: Unimodular,
    pub tau: ModularPoint,
    pub lhs: Extended,
    pub rhs: Extended,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub subject: String,
    pub checked: usize,
    pub skipped: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub passed: bool,
    pub worst: Option<Witness>,
}

impl VerificationReport {
    fn from_witnesses(subject: String, tol: f64, items: impl IntoIterator<Item = Option<Witness>>) -> Self {
        let mut report = VerificationReport {
            subject,
            checked: 0,
            skipped: 0,
            max_defect: 0.0,
            tol,
            passed: true,
            worst: None,
        };
        for item in items {
            let Some(w) = item else {
                report.skipped += 1;
                continue;
            };
            report.checked += 1;
            // NaN defects count as failures
            let defect = if w.defect.is_nan() { f64::INFINITY } else { w.defect };
            if report.worst.is_none() || defect > report.max_defect {
                report.max_defect = defect;
                report.worst = Some(w);
            }
        }
        report.passed = report.max_defect <= tol;
        report
    }
}

/// `(γ, τ)` pairs: `γ` from the group sampler, `τ` from the fundamental
/// domain box, both seeded.
pub fn sample_pairs(group: CongruenceGroup, samples: usize, seed: u64) -> Vec<(Unimodular, ModularPoint)> {
    let gammas = group.sample_elements(samples, seed);
    let taus = random_fundamental_points(samples, seed.wrapping_add(1));
    gammas.into_iter().zip(taus).collect()
}

fn equivariance_witness(h: &EquivariantFn, gamma: &Unimodular, tau: ModularPoint) -> Witness {
    let lhs = h.eval(gamma.act(tau));
    let rhs = gamma.mobius(h.eval(tau));
    Witness {
        gamma: gamma.clone(),
        tau,
        lhs,
        rhs,
        defect: lhs.defect(&rhs),
    }
}

/// Max `∞`-aware defect of `h(γτ) = γ·h(τ)` over explicit pairs.
pub fn verify_equivariance_on(
    h: &EquivariantFn,
    pairs: &[(Unimodular, ModularPoint)],
    tol: f64,
) -> VerificationReport {
    VerificationReport::from_witnesses(
        format!("equivariance of {}", h.name),
        tol,
        pairs.iter().map(|(g, t)| Some(equivariance_witness(h, g, *t))),
    )
}

/// Equivariance of `h` under samples from its declared group.
pub fn verify_equivariance(h: &EquivariantFn, samples: usize, seed: u64, tol: f64) -> VerificationReport {
    verify_equivariance_on(h, &sample_pairs(h.group, samples.max(1), seed), tol)
}

fn weight_witness(f: &FormDescriptor, gamma: &Unimodular, tau: ModularPoint) -> Option<Witness> {
    let lhs = f.eval(gamma.act(tau));
    let factor = gamma.automorphy(tau.tau()).powi(f.weight);
    let rhs = match f.eval(tau) {
        Extended::Finite(v) if v == C64::new(0.0, 0.0) => return None,
        Extended::Finite(v) => finite(v * factor),
        Extended::Infinity => Extended::Infinity,
    };
    let defect = match (lhs, rhs) {
        (Extended::Finite(a), Extended::Finite(b)) => (a / b - 1.0).norm(),
        (Extended::Infinity, Extended::Infinity) => 0.0,
        _ => f64::INFINITY,
    };
    Some(Witness {
        gamma: gamma.clone(),
        tau,
        lhs,
        rhs,
        defect,
    })
}

/// Max relative defect of `f(γτ) = (cτ + d)^k f(τ)` over explicit pairs;
/// points where `f(τ) = 0` are skipped.
pub fn verify_weight_on(f: &FormDescriptor, pairs: &[(Unimodular, ModularPoint)], tol: f64) -> VerificationReport {
    VerificationReport::from_witnesses(
        format!("weight {} of {}", f.weight, f.name),
        tol,
        pairs.iter().map(|(g, t)| weight_witness(f, g, *t)),
    )
}

pub fn verify_weight(f: &FormDescriptor, samples: usize, seed: u64, tol: f64) -> VerificationReport {
    verify_weight_on(f, &sample_pairs(f.group, samples.max(1), seed), tol)
}

fn parse_index(name: &str, prefix: &str) -> Option<i64> {
    name.strip_prefix(prefix)?.parse().ok()
}

/// Named forms: `zero`, `delta`, `g2`, `g3`, `E2`, `f_n:<n>`, `gamma0_stock:<N>`.
pub fn form_by_name(name: &str, cfg: &EvalConfig) -> Result<FormDescriptor, CorrespondenceError> {
    let q = cfg.qseries;
    let full = CongruenceGroup::FULL;
    let unknown = || CorrespondenceError::UnknownName(name.to_string());
    let wrap = |f: fn(ModularPoint, eisenstein::QSeriesConfig) -> C64| -> FormEval {
        Arc::new(move |tau| finite(f(tau, q)))
    };
    let form = match name {
        "zero" => FormDescriptor::new(
            "zero",
            2,
            full,
            constant(C64::new(0.0, 0.0)),
            Some(constant(C64::new(0.0, 0.0))),
        ),
        "delta" => FormDescriptor::new("delta", 12, full, wrap(eisenstein::delta), Some(wrap(eisenstein::delta_prime))),
        "g2" => FormDescriptor::new(
            "g2",
            4,
            full,
            Arc::new(move |tau| finite(eisenstein::g2_g3(tau, q).0)),
            Some(wrap(eisenstein::g2_prime)),
        ),
        "g3" => FormDescriptor::new(
            "g3",
            6,
            full,
            Arc::new(move |tau| finite(eisenstein::g2_g3(tau, q).1)),
            Some(wrap(eisenstein::g3_prime)),
        ),
        "E2" => FormDescriptor::new("E2", 2, full, wrap(eisenstein::e2), Some(wrap(eisenstein::e2_prime))),
        _ => {
            if let Some(n) = parse_index(name, "f_n:") {
                if n < 1 {
                    return Err(unknown());
                }
                let f = zeta_algebra::f_n(n).ok_or_else(unknown)?;
                let eval: FormEval = Arc::new(move |tau| {
                    let (g2, g3) = eisenstein::g2_g3(tau, q);
                    f.eval(g2, g3)
                });
                FormDescriptor::new(name, 2, full, eval, None)
            } else if let Some(n) = parse_index(name, "gamma0_stock:") {
                if n < 2 {
                    return Err(unknown());
                }
                gamma::stock_weight2_form(n as u64, *cfg)
            } else {
                return Err(unknown());
            }
        }
    };
    Ok(form)
}

/// Named elliptic zetas: `zeta`, `identity`, `Z_n:<n>`.
pub fn zeta_by_name(name: &str, cfg: &EvalConfig) -> Result<EllipticZetaSpec, CorrespondenceError> {
    match name {
        "zeta" => Ok(EllipticZetaSpec::zeta()),
        "identity" => Ok(EllipticZetaSpec::identity()),
        _ => match parse_index(name, "Z_n:") {
            Some(n) if n >= 1 => Ok(EllipticZetaSpec::z_n(n, *cfg)),
            _ => Err(CorrespondenceError::UnknownName(name.to_string())),
        },
    }
}

/// Named equivariant functions: `tau`, `eta_ratio`, `h_n:<n>`.
pub fn equivariant_by_name(name: &str, cfg: &EvalConfig) -> Result<EquivariantFn, CorrespondenceError> {
    match name {
        "tau" => Ok(EquivariantFn::tau()),
        "eta_ratio" => Ok(EquivariantFn::eta_ratio(*cfg)),
        _ => match parse_index(name, "h_n:") {
            Some(n) if n >= 1 => {
                let cfg = *cfg;
                let mut h = EquivariantFn::new(
                    name,
                    CongruenceGroup::FULL,
                    Arc::new(move |tau| zeta_algebra::h_n_eval(n, tau, &cfg)),
                );
                h.trivial = zeta_algebra::f_n(n).is_none();
                Ok(h)
            }
            _ => Err(CorrespondenceError::UnknownName(name.to_string())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn points() -> Vec<ModularPoint> {
        random_fundamental_points(20, 99)
    }

    fn tau0() -> ModularPoint {
        ModularPoint::from_parts(0.13, 1.21).unwrap()
    }

    #[test]
    fn zeta_eval_trivial_cases() {
        let (t, z) = (tau0(), C64::new(0.31, 0.17));
        let w = weierstrass::zeta_w(t, z, &cfg()).unwrap();
        assert!((zeta_eval(&EllipticZetaSpec::zeta(), t, z, &cfg()).unwrap() - w).norm() < 1e-14);
        assert_eq!(zeta_eval(&EllipticZetaSpec::identity(), t, z, &cfg()).unwrap(), z);
        assert!(zeta_eval(&EllipticZetaSpec::zeta(), t, C64::new(1.0, 0.0), &cfg()).is_infinite());
    }

    #[test]
    fn zeta_eval_is_quasi_periodic_with_h() {
        let (t, z) = (tau0(), C64::new(0.21, 0.33));
        let z3 = EllipticZetaSpec::z_n(3, cfg());
        let (h1, ht) = quasi_periods(&z3, t, &cfg());
        let at = |w: C64| zeta_eval(&z3, t, w, &cfg()).unwrap();
        assert!((at(z + 1.0) - at(z) - h1.unwrap()).norm() < 1e-9 * (1.0 + h1.unwrap().norm()));
        assert!((at(z + t.tau()) - at(z) - ht.unwrap()).norm() < 1e-9 * (1.0 + ht.unwrap().norm()));
    }

    #[test]
    fn quasi_periods_examples() {
        let t = tau0();
        let eta = weierstrass::eta_pair(t, &cfg());
        let (a, b) = quasi_periods(&EllipticZetaSpec::identity(), t, &cfg());
        assert_eq!((a.unwrap(), b.unwrap()), (C64::new(1.0, 0.0), t.tau()));
        let (a, b) = quasi_periods(&EllipticZetaSpec::zeta(), t, &cfg());
        assert_eq!((a.unwrap(), b.unwrap()), (eta.eta1, eta.eta2));
        let (a, b) = quasi_periods(&EllipticZetaSpec::z_n(1, cfg()), t, &cfg());
        assert!((a.unwrap() + eta.eta1).norm() < 1e-14 && (b.unwrap() + eta.eta2).norm() < 1e-14);
    }

    #[test]
    fn quasi_periods_of_z3_match_period_integrals() {
        let t = tau0();
        let z3 = EllipticZetaSpec::z_n(3, cfg());
        let (h1, ht) = quasi_periods(&z3, t, &cfg());
        for (period, h) in [((1, 0), h1), ((0, 1), ht)] {
            let z0 = weierstrass::default_path_start(t, period);
            let integral = weierstrass::period_integral_wp_power(3, t, period, z0, &cfg()).unwrap();
            let h = h.unwrap();
            assert!((integral - h).norm() <= 1e-5 * (1.0 + h.norm()), "{integral} vs {h}");
        }
    }

    #[test]
    fn phi_psi_from_h_roundtrips() {
        let t = tau0();
        let eta = weierstrass::eta_pair(t, &cfg());
        let (phi, psi) = phi_psi_from_h(C64::new(1.0, 0.0), t.tau(), t, &cfg());
        assert!((phi - 1.0).norm() < 1e-12 && psi.norm() < 1e-12);
        let (phi, psi) = phi_psi_from_h(eta.eta1, eta.eta2, t, &cfg());
        assert!(phi.norm() < 1e-12 && (psi - 1.0).norm() < 1e-12);
        let z3 = EllipticZetaSpec::z_n(3, cfg());
        for t in points() {
            let (h1, ht) = quasi_periods(&z3, t, &cfg());
            let (phi, psi) = phi_psi_from_h(h1.unwrap(), ht.unwrap(), t, &cfg());
            let (p, q) = ((z3.phi)(t).unwrap(), (z3.psi)(t).unwrap());
            assert!((phi - p).norm() <= 1e-9 * (1.0 + p.norm()));
            assert!((psi - q).norm() <= 1e-9 * (1.0 + q.norm()));
        }
    }

    #[test]
    fn modular_from_zeta_examples() {
        let f3 = modular_from_zeta(&EllipticZetaSpec::z_n(3, cfg())).unwrap();
        let t = tau0();
        let (g2, g3) = eisenstein::g2_g3(t, cfg().qseries);
        let expected = g3 / g2 * (-2.0 / 3.0);
        assert!((f3.eval(t).unwrap() - expected).norm() < 1e-12 * expected.norm());
        let zero = modular_from_zeta(&EllipticZetaSpec::zeta()).unwrap();
        assert_eq!(zero.eval(t).unwrap(), C64::new(0.0, 0.0));
        assert!(matches!(
            modular_from_zeta(&EllipticZetaSpec::z_n(2, cfg())),
            Err(CorrespondenceError::VanishingPsi(_))
        ));
        assert!(modular_from_zeta(&EllipticZetaSpec::identity()).is_err());
    }

    #[test]
    fn equivariant_from_zeta_examples() {
        let t = tau0();
        let eta = weierstrass::eta_pair(t, &cfg());
        let h = equivariant_from_zeta(&EllipticZetaSpec::zeta(), &cfg()).unwrap();
        assert!((h.eval(t).unwrap() - eta.eta2 / eta.eta1).norm() < 1e-14);
        let id = equivariant_from_zeta(&EllipticZetaSpec::identity(), &cfg()).unwrap();
        assert!(id.is_trivial());
        assert_eq!(id.eval(t).unwrap(), t.tau());
        let h3 = equivariant_from_zeta(&EllipticZetaSpec::z_n(3, cfg()), &cfg()).unwrap();
        let (g2, g3) = eisenstein::g2_g3(t, cfg().qseries);
        // τ − 6πi·g₂/(−2g₃ + 3g₂η₁)
        let expected = t.tau() - C64::new(0.0, 6.0 * PI) * g2 / (g3 * -2.0 + g2 * eta.eta1 * 3.0);
        assert!((h3.eval(t).unwrap() - expected).norm() < 1e-11);
        assert!((h3.eval(t).unwrap() - zeta_algebra::h_n_eval(3, t, &cfg()).unwrap()).norm() < 1e-11);
        let z2 = EllipticZetaSpec::z_n(2, cfg());
        let h2 = equivariant_from_zeta(&z2, &cfg()).unwrap();
        assert!(h2.is_trivial());
    }

    #[test]
    fn m_transform_examples_and_cusp_relation() {
        let c = cfg();
        let h0 = m_transform(&form_by_name("zero", &c).unwrap(), &c).unwrap();
        let f3 = form_by_name("f_n:3", &c).unwrap();
        let h3 = m_transform(&f3, &c).unwrap();
        for t in points() {
            let eta = weierstrass::eta_pair(t, &c);
            assert!((h0.eval(t).unwrap() - eta.eta2 / eta.eta1).norm() < 1e-13);
            let hv = h3.eval(t).unwrap();
            assert!((hv - zeta_algebra::h_n_eval(3, t, &c).unwrap()).norm() < 1e-10 * (1.0 + hv.norm()));
            let fv = f3.eval(t).unwrap();
            let cusp = hv - t.tau() + TWO_PI_I / (fv + eta.eta1);
            assert!(cusp.norm() < 1e-10, "{cusp}");
        }
        assert!(matches!(
            m_transform(&form_by_name("delta", &c).unwrap(), &c),
            Err(CorrespondenceError::Weight { expected: 2, found: 12, .. })
        ));
    }

    #[test]
    fn m_inverse_examples_and_roundtrips() {
        let c = cfg();
        let f0 = m_inverse(&EquivariantFn::eta_ratio(c), &c).unwrap();
        let row1 = m_inverse(&equivariant_by_name("h_n:1", &c).unwrap(), &c).unwrap();
        let f3 = form_by_name("f_n:3", &c).unwrap();
        let back = m_inverse(&m_transform(&f3, &c).unwrap(), &c).unwrap();
        let h3 = equivariant_by_name("h_n:3", &c).unwrap();
        let f3_from_h = m_inverse(&h3, &c).unwrap();
        for t in points() {
            assert!(f0.eval(t).unwrap().norm() < 1e-9);
            assert!(row1.eval(t).unwrap().norm() < 1e-9);
            let fv = f3.eval(t).unwrap();
            assert!(back.eval(t).approx_eq(&Extended::Finite(fv), 1e-9));
            assert!(f3_from_h.eval(t).approx_eq(&Extended::Finite(fv), 1e-9));
        }
        assert!(matches!(m_inverse(&EquivariantFn::tau(), &c), Err(CorrespondenceError::Trivial(_))));
        let anon_tau = EquivariantFn::new("anon", CongruenceGroup::FULL, Arc::new(|t: ModularPoint| finite(t.tau())));
        assert!(m_inverse(&anon_tau, &c).is_err());
    }

    #[test]
    fn h_from_delta_is_eta_ratio() {
        let c = cfg();
        let h = h_from_form(&form_by_name("delta", &c).unwrap()).unwrap();
        let i = ModularPoint::from_parts(0.0, 1.0).unwrap();
        let eta = weierstrass::eta_pair(i, &c);
        assert!((h.eval(i).unwrap() - eta.eta2 / eta.eta1).norm() < 1e-7);
        for t in points() {
            let eta = weierstrass::eta_pair(t, &c);
            assert!((h.eval(t).unwrap() - eta.eta2 / eta.eta1).norm() < 1e-7);
        }
        assert!(h_from_form(&FormDescriptor::new("k0", 0, CongruenceGroup::FULL, constant(C64::new(1.0, 0.0)), None)).is_err());
    }

    #[test]
    fn finite_difference_derivative_matches_analytic() {
        let c = cfg();
        let g2 = form_by_name("g2", &c).unwrap();
        let numeric = FormDescriptor::new("g2fd", 4, CongruenceGroup::FULL, g2.evaluator(), None);
        for t in points().into_iter().take(5) {
            let (a, b) = (g2.derivative_at(t).unwrap(), numeric.derivative_at(t).unwrap());
            assert!((a - b).norm() < 1e-6 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn h_from_g2_is_equivariant() {
        let c = cfg();
        let h = h_from_form(&form_by_name("g2", &c).unwrap()).unwrap();
        let report = verify_equivariance(&h, 20, 3, 1e-6);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn lift_then_project_is_identity() {
        let c = cfg();
        let zero = lift_form_to_zeta(&form_by_name("zero", &c).unwrap()).unwrap();
        let t = tau0();
        assert_eq!((zero.phi)(t).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(zero.weight_k, -1);
        for name in ["f_n:3", "gamma0_stock:2"] {
            let f = form_by_name(name, &c).unwrap();
            let back = modular_from_zeta(&lift_form_to_zeta(&f).unwrap()).unwrap();
            assert_eq!(back.group(), f.group());
            for t in points() {
                assert_eq!(back.eval(t), f.eval(t));
            }
        }
    }

    #[test]
    fn lift_of_stock_form_recovers_h_and_f() {
        let c = cfg();
        let f = form_by_name("gamma0_stock:2", &c).unwrap();
        let z = lift_form_to_zeta(&f).unwrap();
        let h_direct = m_transform(&f, &c).unwrap();
        let h_lift = equivariant_from_zeta(&z, &c).unwrap();
        let f_lift = modular_from_zeta(&z).unwrap();
        for t in points() {
            assert!(h_lift.eval(t).approx_eq(&h_direct.eval(t), 1e-8));
            assert!(f_lift.eval(t).approx_eq(&f.eval(t), 1e-8));
        }
        let report = verify_equivariance(&h_lift, 30, 5, 1e-6);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn verify_equivariance_examples() {
        let c = cfg();
        let id = verify_equivariance(&EquivariantFn::tau(), 30, 1, 1e-12);
        assert!(id.passed && id.max_defect < 1e-12, "{id:?}");
        let eta = EquivariantFn::eta_ratio(c);
        let ok = verify_equivariance(&eta, 50, 42, 1e-7);
        assert!(ok.passed, "{ok:?}");
        let bad = verify_equivariance(&eta.shifted(C64::new(0.1, 0.0)), 50, 42, 1e-7);
        assert!(!bad.passed);
        assert!(bad.worst.unwrap().defect > 1e-3);
    }

    #[test]
    fn verify_weight_examples() {
        let c = cfg();
        let delta = verify_weight(&form_by_name("delta", &c).unwrap(), 50, 42, 1e-7);
        assert!(delta.passed, "{delta:?}");
        let e2 = verify_weight(&form_by_name("E2", &c).unwrap(), 50, 42, 1e-7);
        assert!(!e2.passed && e2.max_defect > 1e-3);
        let zero = verify_weight(&form_by_name("zero", &c).unwrap(), 10, 42, 1e-7);
        assert!(zero.passed);
        assert_eq!((zero.checked, zero.skipped), (0, 10));
    }

    #[test]
    fn stock_form_is_gamma0_modular_only() {
        let c = cfg();
        for n in [2u64, 3] {
            let f = form_by_name(&format!("gamma0_stock:{n}"), &c).unwrap();
            assert!(verify_weight(&f, 50, 7, 1e-6).passed);
            let s_pairs: Vec<_> = points().into_iter().map(|t| (Unimodular::s(), t)).collect();
            let bad = verify_weight_on(&f, &s_pairs, 1e-6);
            assert!(!bad.passed && bad.worst.is_some());
            let h = m_transform(&f, &c).unwrap();
            assert!(verify_equivariance(&h, 50, 7, 1e-6).passed);
            assert!(!verify_equivariance_on(&h, &s_pairs, 1e-6).passed);
            let full = sample_pairs(CongruenceGroup::FULL, 50, 7);
            assert!(!verify_equivariance_on(&h, &full, 1e-6).passed);
        }
    }

    #[test]
    fn registry_names() {
        let c = cfg();
        for name in ["zero", "delta", "g2", "g3", "E2", "f_n:3", "f_n:6", "gamma0_stock:3"] {
            assert_eq!(form_by_name(name, &c).unwrap().name(), name);
        }
        for bad in ["f_n:2", "f_n:0", "gamma0_stock:1", "nope", "f_n:x"] {
            assert!(form_by_name(bad, &c).is_err(), "{bad}");
        }
        assert!(zeta_by_name("Z_n:4", &c).is_ok());
        assert!(zeta_by_name("Z_n:0", &c).is_err());
        assert!(equivariant_by_name("h_n:2", &c).unwrap().is_trivial());
        assert!(!equivariant_by_name("h_n:3", &c).unwrap().is_trivial());
        assert!(equivariant_by_name("h", &c).is_err());
    }

    #[test]
    fn fundamental_points_lie_in_the_domain() {
        let pts = random_fundamental_points(200, 5);
        assert_eq!(pts, random_fundamental_points(200, 5));
        for p in pts {
            let t = p.tau();
            assert!(t.re.abs() <= 0.5 && t.norm() >= 1.0 && t.im <= 2.0);
        }
    }
}
