//! The acceptance criteria and the smaller named suites behind `verify`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correspondence::{
    self, equivariant_by_name, equivariant_from_zeta, form_by_name, lift_form_to_zeta, m_inverse, m_transform,
    modular_from_zeta, random_fundamental_points, verify_equivariance, verify_equivariance_on, verify_weight,
    verify_weight_on, EllipticZetaSpec, EquivariantFn, FormDescriptor,
};
use crate::eisenstein;
use crate::gamma::{CongruenceGroup, GroupKind};
use crate::lattice::{Extended, Lattice, ModularPoint, Unimodular, C64};
use crate::weierstrass::{self, EvalConfig};
use crate::zeta_algebra::{self, rat, RationalFn, WhPoly};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    /// Acceptance criterion number, if this check is one.
    pub id: Option<u32>,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub elapsed: Duration,
    pub budget: Duration,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let id = self.id.map(|i| format!("{i:>2} ")).unwrap_or_default();
        write!(
            f,
            "[{tag}] {id}{}: measured {:.3e} (tol {:.0e}) in {} ms",
            self.name,
            self.measured,
            self.tolerance,
            self.elapsed.as_millis()
        )?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        Ok(())
    }
}

/// Settings shared by every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub eval: EvalConfig,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            eval: EvalConfig::default(),
            seed: 42,
        }
    }
}

impl SuiteConfig {
    fn seed_for(&self, salt: u64) -> u64 {
        self.seed.wrapping_mul(1_000_003).wrapping_add(salt)
    }
}

struct Outcome {
    passed: bool,
    measured: f64,
    detail: String,
}

fn timed(
    id: Option<u32>,
    name: impl Into<String>,
    tolerance: f64,
    budget_ms: u64,
    body: impl FnOnce() -> Outcome,
) -> CheckResult {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let budget = Duration::from_millis(budget_ms);
    let mut detail = out.detail;
    let over = elapsed > budget;
    if over {
        if !detail.is_empty() {
            detail.push_str("; ");
        }
        detail.push_str(&format!("over budget of {} ms", budget_ms));
    }
    CheckResult {
        id,
        name: name.into(),
        passed: out.passed && !over,
        measured: out.measured,
        tolerance,
        elapsed,
        budget,
        detail,
    }
}

/// `|x − y| / (1 + |x|)` maximized over pairs; NaN propagates as failure.
fn max_defect(pairs: impl IntoIterator<Item = (Extended, Extended)>) -> f64 {
    pairs
        .into_iter()
        .map(|(x, y)| x.defect(&y))
        .map(|d| if d.is_nan() { f64::INFINITY } else { d })
        .fold(0.0, f64::max)
}

fn below(measured: f64, tol: f64) -> bool {
    measured <= tol
}

fn poly(terms: &[(i64, i64, u32, u32)]) -> WhPoly {
    WhPoly::from_terms(terms.iter().map(|&(p, q, a, b)| ((a, b), rat(p, q))))
}

/// Reference coefficient table, rows `n = 1..=6`: `(n, Φₙ, Ψₙ, fₙ)`.
pub fn reference_table() -> Vec<(i64, WhPoly, WhPoly, Option<RationalFn>)> {
    let g2 = WhPoly::g2();
    let g3 = WhPoly::g3();
    let ratio = |num: WhPoly, den: &WhPoly| RationalFn::new(num, den.clone());
    vec![
        (1, WhPoly::zero(), poly(&[(-1, 1, 0, 0)]), ratio(WhPoly::zero(), &WhPoly::one())),
        (2, poly(&[(1, 12, 1, 0)]), WhPoly::zero(), None),
        (3, poly(&[(1, 10, 0, 1)]), poly(&[(-3, 20, 1, 0)]), ratio(poly(&[(-2, 3, 0, 1)]), &g2)),
        (4, poly(&[(5, 336, 2, 0)]), poly(&[(-1, 7, 0, 1)]), ratio(poly(&[(-5, 48, 2, 0)]), &g3)),
        (5, poly(&[(1, 30, 1, 1)]), poly(&[(-7, 240, 2, 0)]), ratio(poly(&[(-8, 7, 0, 1)]), &g2)),
        (
            6,
            poly(&[(15, 4928, 3, 0), (1, 55, 0, 2)]),
            poly(&[(-87, 1540, 1, 1)]),
            ratio(poly(&[(-25, 464, 3, 0), (-28, 87, 0, 2)]), &(&g2 * &g3)),
        ),
    ]
}

/// Criterion 1, as stated: `|η(τ) − τη(1) − 2πi| < 1e−8` with the
/// quasi-periods taken from half-period values.
///
/// The quasi-periods of `ℤ + τℤ` satisfy `η(τ) − τη(1) = −2πi`, so the
/// stated residual is `4π` at every `τ`. The detail line carries the
/// residual of the correctly oriented relation for comparison.
pub fn criterion_1(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-8;
    timed(Some(1), "Legendre relation from half-period values", tol, 5_000, || {
        let mut literal: f64 = 0.0;
        let mut oriented: f64 = 0.0;
        for tau in random_fundamental_points(100, cfg.seed_for(1)) {
            let p = weierstrass::eta_pair_from_half_periods(tau, &cfg.eval);
            literal = literal.max((p.eta2 - tau.tau() * p.eta1 - TWO_PI_I).norm());
            oriented = oriented.max(p.legendre_residual().norm());
        }
        Outcome {
            passed: below(literal, tol),
            measured: literal,
            detail: format!(
                "stated residual |eta(tau)-tau*eta(1)-2*pi*i| = {literal:.12} (4*pi = {:.12}); oriented residual |tau*eta(1)-eta(tau)-2*pi*i| = {oriented:.3e}",
                4.0 * PI
            ),
        }
    })
}

/// The correctly oriented Legendre relation over `samples` random points.
pub fn legendre_oriented(cfg: &SuiteConfig, samples: usize) -> CheckResult {
    let tol = 1e-8;
    timed(None, "Legendre relation tau*eta(1) - eta(tau) = 2*pi*i", tol, 5_000, || {
        let measured = random_fundamental_points(samples.max(1), cfg.seed_for(1))
            .into_iter()
            .map(|tau| weierstrass::legendre_defect(tau, &cfg.eval).norm())
            .fold(0.0, f64::max);
        Outcome {
            passed: below(measured, tol),
            measured,
            detail: format!("{} points", samples.max(1)),
        }
    })
}

/// Criterion 2: exact reproduction of the coefficient table.
pub fn criterion_2(_cfg: &SuiteConfig) -> CheckResult {
    timed(Some(2), "coefficient table rows 1..6, exact", 0.0, 1_000, || {
        let mut mismatches = Vec::new();
        for (n, phi, psi, f) in reference_table() {
            let (p, q) = zeta_algebra::phi_psi(n);
            if p != phi {
                mismatches.push(format!("Phi_{n} = {p}"));
            }
            if q != psi {
                mismatches.push(format!("Psi_{n} = {q}"));
            }
            if zeta_algebra::f_n(n) != f {
                mismatches.push(format!("f_{n}"));
            }
        }
        Outcome {
            passed: mismatches.is_empty(),
            measured: mismatches.len() as f64,
            detail: mismatches.join(", "),
        }
    })
}

fn report_outcome(report: &correspondence::VerificationReport) -> Outcome {
    Outcome {
        passed: report.passed,
        measured: report.max_defect,
        detail: match &report.worst {
            Some(w) if !report.passed => format!("witness gamma={} tau={}", w.gamma, Extended::Finite(w.tau.tau())),
            _ => format!("{} checked", report.checked),
        },
    }
}

/// Criterion 3: `η(τ)/η(1)` is `SL₂(ℤ)`-equivariant.
pub fn criterion_3(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-7;
    timed(Some(3), "equivariance of eta(tau)/eta(1)", tol, 5_000, || {
        let c = cfg.eval;
        // quasi-periods from half-period sums, independent of the E₂ closed form
        let h = EquivariantFn::new(
            "eta(tau)/eta(1)",
            CongruenceGroup::FULL,
            Arc::new(move |tau| {
                let p = weierstrass::eta_pair_from_half_periods(tau, &c);
                Extended::ratio(p.eta2, p.eta1)
            }),
        );
        report_outcome(&verify_equivariance(&h, 50, cfg.seed_for(3), tol))
    })
}

/// Criterion 4: `η(τ)/η(1) = τ + 12Δ/Δ′` with `Δ′ = 2πiE₂Δ`.
pub fn criterion_4(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-7;
    timed(Some(4), "eta(tau)/eta(1) = tau + 12 Delta/Delta'", tol, 2_000, || {
        let q = cfg.eval.qseries;
        let measured = random_fundamental_points(20, cfg.seed_for(4))
            .into_iter()
            .map(|tau| {
                let eta = weierstrass::eta_pair(tau, &cfg.eval);
                let d = eisenstein::delta(tau, q);
                let dp = TWO_PI_I * eisenstein::e2(tau, q) * d;
                (eta.eta2 / eta.eta1 - tau.tau() - d * 12.0 / dp).norm()
            })
            .fold(0.0, f64::max);
        Outcome {
            passed: below(measured, tol),
            measured,
            detail: String::new(),
        }
    })
}

fn roundtrip_defects(
    forms: &[FormDescriptor],
    hs: &[EquivariantFn],
    points: &[ModularPoint],
    cfg: &EvalConfig,
) -> Result<(f64, f64), String> {
    let mut forward: f64 = 0.0;
    for f in forms {
        let back = m_inverse(&m_transform(f, cfg).map_err(|e| e.to_string())?, cfg).map_err(|e| e.to_string())?;
        forward = forward.max(max_defect(points.iter().map(|&t| (f.eval(t), back.eval(t)))));
    }
    let mut backward: f64 = 0.0;
    for h in hs {
        let back = m_transform(&m_inverse(h, cfg).map_err(|e| e.to_string())?, cfg).map_err(|e| e.to_string())?;
        backward = backward.max(max_defect(points.iter().map(|&t| (h.eval(t), back.eval(t)))));
    }
    Ok((forward, backward))
}

/// Criterion 5: `M⁻¹∘M` and `M∘M⁻¹` are the identity.
pub fn criterion_5(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-9;
    timed(Some(5), "bijection roundtrips for 0, f_3, f_4, Gamma0(2) stock form", tol, 5_000, || {
        let c = &cfg.eval;
        let names = ["zero", "f_n:3", "f_n:4", "gamma0_stock:2"];
        let forms: Vec<_> = names.iter().map(|n| form_by_name(n, c).expect("registered")).collect();
        let stock_lift = lift_form_to_zeta(&forms[3]).expect("weight 2");
        let hs = vec![
            EquivariantFn::eta_ratio(*c),
            equivariant_by_name("h_n:3", c).expect("registered"),
            equivariant_by_name("h_n:4", c).expect("registered"),
            equivariant_from_zeta(&stock_lift, c).expect("H(1) nonzero"),
        ];
        let points = random_fundamental_points(20, cfg.seed_for(5));
        match roundtrip_defects(&forms, &hs, &points, c) {
            Ok((fwd, bwd)) => {
                let measured = fwd.max(bwd);
                Outcome {
                    passed: below(measured, tol),
                    measured,
                    detail: format!("forms {fwd:.3e}, equivariant {bwd:.3e}"),
                }
            }
            Err(e) => Outcome {
                passed: false,
                measured: f64::INFINITY,
                detail: e,
            },
        }
    })
}

/// Criterion 6: `M(Φₙ/Ψₙ) = Hₙ(τ)/Hₙ(1)` for `n = 3..=6`.
pub fn criterion_6(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-8;
    timed(Some(6), "triangle commutativity n = 3..6", tol, 5_000, || triangle(cfg, tol))
}

fn triangle(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let c = &cfg.eval;
    let points = random_fundamental_points(20, cfg.seed_for(6));
    let mut measured: f64 = 0.0;
    for n in 3..=6 {
        let z = EllipticZetaSpec::z_n(n, *c);
        let via_form = modular_from_zeta(&z).and_then(|f| m_transform(&f, c));
        let direct = equivariant_from_zeta(&z, c);
        match (via_form, direct) {
            (Ok(a), Ok(b)) => {
                measured = measured.max(max_defect(points.iter().map(|&t| (b.eval(t), a.eval(t)))));
            }
            (Err(e), _) | (_, Err(e)) => {
                return Outcome {
                    passed: false,
                    measured: f64::INFINITY,
                    detail: e.to_string(),
                }
            }
        }
    }
    Outcome {
        passed: below(measured, tol),
        measured,
        detail: String::new(),
    }
}

/// Criterion 7: `∫℘ⁿ` over the periods `1` and `τ` against
/// `Φₙω + Ψₙη(ω)`, `n ≤ 4`.
pub fn criterion_7(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-5;
    timed(Some(7), "period integrals of wp^n, n <= 4", tol, 30_000, || periods(cfg, 5, tol))
}

fn periods(cfg: &SuiteConfig, count: usize, tol: f64) -> Outcome {
    let c = &cfg.eval;
    let mut measured: f64 = 0.0;
    for tau in random_fundamental_points(count, cfg.seed_for(7)) {
        let eta = weierstrass::eta_pair(tau, c);
        for n in 0..=4u32 {
            let (phi, psi) = zeta_algebra::phi_psi(n as i64);
            let (phi, psi) = (
                zeta_algebra::eval_whpoly(&phi, tau, c),
                zeta_algebra::eval_whpoly(&psi, tau, c),
            );
            for (period, omega, eta_w) in [((1, 0), C64::new(1.0, 0.0), eta.eta1), ((0, 1), tau.tau(), eta.eta2)] {
                let z0 = weierstrass::default_path_start(tau, period);
                let expected = phi * omega + psi * eta_w;
                let d = match weierstrass::period_integral_wp_power(n, tau, period, z0, c) {
                    Ok(v) => (v - expected).norm() / (1.0 + expected.norm()),
                    Err(_) => f64::INFINITY,
                };
                measured = measured.max(d);
            }
        }
    }
    Outcome {
        passed: below(measured, tol),
        measured,
        detail: format!("{} quadrature nodes", c.quad_points),
    }
}

/// A point of the period cell `x + yτ`, `|x|, |y| ≤ 1/2`, at least `0.1`
/// away from the lattice.
fn random_cell_point(rng: &mut ChaCha8Rng, tau: ModularPoint) -> C64 {
    loop {
        let (x, y): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let z = tau.tau() * y + x;
        let (z0, _, _) = crate::lattice::lattice_reduce_point(z, tau);
        let near = [
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            tau.tau(),
            -tau.tau(),
        ];
        if near.iter().all(|&p| (z0 - p).norm() > 0.1) {
            return z;
        }
    }
}

/// Criterion 8: `ζ′ = −℘` by central differences.
pub fn criterion_8(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-5;
    timed(Some(8), "zeta' = -wp by central differences", tol, 5_000, || {
        let c = &cfg.eval;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(8));
        let h = 1e-5;
        let mut measured: f64 = 0.0;
        for tau in random_fundamental_points(100, cfg.seed_for(80)) {
            let z = random_cell_point(&mut rng, tau);
            let f = |w: C64| weierstrass::zeta_w(tau, w, c).unwrap();
            let derivative = (f(z + h) - f(z - h)) / (2.0 * h);
            let wp = weierstrass::wp(tau, z, c).unwrap();
            measured = measured.max((derivative + wp).norm() / (1.0 + wp.norm()));
        }
        Outcome {
            passed: below(measured, tol),
            measured,
            detail: String::new(),
        }
    })
}

/// Criterion 9: `ζ(αΛ, αz) = α⁻¹ζ(Λ, z)` with `Λ` presented through a
/// random basis.
pub fn criterion_9(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-9;
    timed(Some(9), "homogeneity of zeta, weight -1", tol, 2_000, || {
        let c = &cfg.eval;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(9));
        let gammas = CongruenceGroup::FULL.sample_elements(20, cfg.seed_for(90));
        let mut measured: f64 = 0.0;
        for (tau, gamma) in random_fundamental_points(20, cfg.seed_for(91)).into_iter().zip(gammas) {
            let z = random_cell_point(&mut rng, tau);
            let alpha = C64::from_polar(rng.gen_range(0.3..3.0), rng.gen_range(-PI..PI));
            let base = Lattice::normalized(tau);
            let scaled = gamma.act_on_basis(&base.scaled(alpha).expect("alpha != 0"));
            let lhs = weierstrass::zeta_general(&scaled, alpha * z, c).expect("valid lattice");
            let rhs = weierstrass::zeta_w(tau, z, c).unwrap() / alpha;
            measured = measured.max(lhs.defect(&Extended::Finite(rhs)));
        }
        Outcome {
            passed: below(measured, tol),
            measured,
            detail: String::new(),
        }
    })
}

/// Criterion 10: each `fₙ`, `n = 3..=6`, has weight 2 under `SL₂(ℤ)`.
pub fn criterion_10(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-6;
    timed(Some(10), "weight 2 of f_n, n = 3..6", tol, 10_000, || {
        let mut measured: f64 = 0.0;
        let mut passed = true;
        for n in 3..=6 {
            let f = form_by_name(&format!("f_n:{n}"), &cfg.eval).expect("registered");
            let r = verify_weight(&f, 50, cfg.seed_for(10), tol);
            passed &= r.passed;
            measured = measured.max(r.max_defect);
        }
        Outcome {
            passed,
            measured,
            detail: String::new(),
        }
    })
}

fn s_pairs(cfg: &SuiteConfig) -> Vec<(Unimodular, ModularPoint)> {
    random_fundamental_points(10, cfg.seed_for(110))
        .into_iter()
        .map(|t| (Unimodular::s(), t))
        .collect()
}

/// Criterion 11: the stock `Γ₀(N)` form and its image are modular and
/// equivariant on `Γ₀(2)`, `Γ₀(3)`, and both fail at `S`.
pub fn criterion_11(cfg: &SuiteConfig) -> CheckResult {
    let tol = 1e-6;
    timed(Some(11), "Gamma0(N) coverage, N = 2, 3", tol, 10_000, || {
        let c = &cfg.eval;
        let mut measured: f64 = 0.0;
        let mut passed = true;
        let mut notes = Vec::new();
        for n in [2u64, 3] {
            let f = form_by_name(&format!("gamma0_stock:{n}"), c).expect("registered");
            let h = m_transform(&f, c).expect("weight 2");
            let w = verify_weight(&f, 50, cfg.seed_for(11), tol);
            let e = verify_equivariance(&h, 50, cfg.seed_for(11), tol);
            measured = measured.max(w.max_defect).max(e.max_defect);
            passed &= w.passed && e.passed;
            let sw = verify_weight_on(&f, &s_pairs(cfg), tol);
            let se = verify_equivariance_on(&h, &s_pairs(cfg), tol);
            let witnessed = !sw.passed && sw.worst.is_some() && !se.passed && se.worst.is_some();
            passed &= witnessed;
            notes.push(format!(
                "N={n}: S weight defect {:.3e}, S equivariance defect {:.3e}",
                sw.max_defect, se.max_defect
            ));
        }
        Outcome {
            passed,
            measured,
            detail: notes.join("; "),
        }
    })
}

/// Criterion 12: `E₂` is not a weight-2 form.
pub fn criterion_12(cfg: &SuiteConfig) -> CheckResult {
    let threshold = 1e-3;
    timed(Some(12), "E2 fails the weight-2 check", threshold, 2_000, || {
        let f = form_by_name("E2", &cfg.eval).expect("registered");
        let r = verify_weight(&f, 50, cfg.seed_for(12), 1e-7);
        Outcome {
            passed: !r.passed && r.max_defect > threshold,
            measured: r.max_defect,
            detail: match r.worst {
                Some(w) => format!("witness gamma={}", w.gamma),
                None => "no witness".into(),
            },
        }
    })
}

pub const CRITERIA: [fn(&SuiteConfig) -> CheckResult; 12] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
];

pub fn all_criteria(cfg: &SuiteConfig) -> Vec<CheckResult> {
    CRITERIA.iter().map(|c| c(cfg)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    All,
    Legendre,
    Equivariance,
    Weights,
    Table,
    Triangle,
    Periods,
}

impl std::str::FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "all" => SuiteName::All,
            "legendre" => SuiteName::Legendre,
            "equivariance" => SuiteName::Equivariance,
            "weights" => SuiteName::Weights,
            "table" => SuiteName::Table,
            "triangle" => SuiteName::Triangle,
            "periods" => SuiteName::Periods,
            _ => return Err(format!("unknown suite {s:?}")),
        })
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteName::All => "all",
            SuiteName::Legendre => "legendre",
            SuiteName::Equivariance => "equivariance",
            SuiteName::Weights => "weights",
            SuiteName::Table => "table",
            SuiteName::Triangle => "triangle",
            SuiteName::Periods => "periods",
        })
    }
}

/// Runs a named suite. `group`, `samples` and `tol` apply to the
/// equivariance and weight suites; `samples` also sizes the Legendre and
/// period suites.
pub fn run_suite(
    suite: SuiteName,
    group: CongruenceGroup,
    samples: usize,
    tol: f64,
    cfg: &SuiteConfig,
) -> Vec<CheckResult> {
    let samples = samples.max(1);
    match suite {
        SuiteName::All => all_criteria(cfg),
        SuiteName::Legendre => vec![legendre_oriented(cfg, samples)],
        SuiteName::Table => vec![criterion_2(cfg)],
        SuiteName::Triangle => vec![criterion_5(cfg), criterion_6(cfg)],
        SuiteName::Periods => vec![periods_check(cfg, samples.min(20))],
        SuiteName::Equivariance => equivariance_suite(group, samples, tol, cfg),
        SuiteName::Weights => weights_suite(group, samples, tol, cfg),
    }
}

fn periods_check(cfg: &SuiteConfig, count: usize) -> CheckResult {
    let tol = 1e-5;
    timed(None, format!("period integrals of wp^n at {count} points"), tol, 30_000 * count as u64, || {
        periods(cfg, count, tol)
    })
}

fn stock_level(group: CongruenceGroup) -> Option<u64> {
    (group.kind() == GroupKind::Gamma0 && group.level() >= 2).then_some(group.level())
}

fn equivariance_suite(group: CongruenceGroup, samples: usize, tol: f64, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let c = &cfg.eval;
    let mut subjects: Vec<EquivariantFn> = vec![EquivariantFn::eta_ratio(*c)];
    for n in 3..=6 {
        subjects.push(equivariant_by_name(&format!("h_n:{n}"), c).expect("registered"));
    }
    if let Some(n) = stock_level(group) {
        let f = gamma_stock(n, c);
        subjects.push(m_transform(&f, c).expect("weight 2"));
    }
    subjects
        .into_iter()
        .map(|h| {
            let h = h.with_group(group);
            timed(None, format!("equivariance of {} on {group}", h.name()), tol, 10_000, || {
                report_outcome(&verify_equivariance(&h, samples, cfg.seed_for(200), tol))
            })
        })
        .collect()
}

fn gamma_stock(n: u64, c: &EvalConfig) -> FormDescriptor {
    form_by_name(&format!("gamma0_stock:{n}"), c).expect("registered")
}

fn weights_suite(group: CongruenceGroup, samples: usize, tol: f64, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let c = &cfg.eval;
    let mut subjects: Vec<FormDescriptor> = ["delta", "g2", "g3", "f_n:3", "f_n:4", "f_n:5", "f_n:6"]
        .iter()
        .map(|n| form_by_name(n, c).expect("registered"))
        .collect();
    if let Some(n) = stock_level(group) {
        subjects.push(gamma_stock(n, c));
    }
    subjects
        .into_iter()
        .map(|f| {
            let f = FormDescriptor::new(f.name(), f.weight(), group, f.evaluator(), None);
            timed(None, format!("weight {} of {} on {group}", f.weight(), f.name()), tol, 10_000, || {
                report_outcome(&verify_weight(&f, samples, cfg.seed_for(300), tol))
            })
        })
        .collect()
}
