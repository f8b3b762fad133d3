//! q-expansions of the modular quantities `E₂`, `G₂`, `g₂`, `g₃` and `Δ`.
//!
//! The `*_series` functions sum the truncated q-expansion at the given `τ`
//! as-is. The unsuffixed evaluators first move `τ` into the fundamental
//! domain, where `|q| ≤ e^{−π√3}`, and transform back with the automorphy
//! factor `cτ + d` (plus the quasi-modular correction for `E₂`).
//!
//! Normalizations: `E₂ = 1 − 24Σσ₁(n)qⁿ`, `E₄ = 1 + 240Σσ₃(n)qⁿ`,
//! `E₆ = 1 − 504Σσ₅(n)qⁿ`, `g₂ = 60Σ′ω⁻⁴ = (4π⁴/3)E₄`,
//! `g₃ = 140Σ′ω⁻⁶ = (8π⁶/27)E₆`, `Δ = qΠ(1 − qⁿ)²⁴`, and
//! `G₂ = Σ_m Σ′_n (mτ + n)⁻² = (π²/3)E₂`, which is exactly the quasi-period
//! `η(1)` of `ℤ + τℤ`.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::lattice::{reduce_to_fundamental, ModularPoint, C64};

/// Number of q-powers retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QSeriesConfig {
    terms: usize,
}

impl QSeriesConfig {
    pub const DEFAULT_TERMS: usize = 64;

    /// `terms` is clamped to at least one.
    pub fn new(terms: usize) -> Self {
        QSeriesConfig {
            terms: terms.max(1),
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }
}

impl Default for QSeriesConfig {
    fn default() -> Self {
        QSeriesConfig::new(Self::DEFAULT_TERMS)
    }
}

/// `σ_k(n) = Σ_{d | n} d^k`.
pub fn sigma_divisor(k: u32, n: u64) -> BigUint {
    assert!(n >= 1, "sigma_divisor needs n >= 1");
    let mut total = BigUint::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += BigUint::from(d).pow(k);
            let e = n / d;
            if e != d {
                total += BigUint::from(e).pow(k);
            }
        }
        d += 1;
    }
    total
}

fn sigma_f64(k: u32, n: u64) -> f64 {
    let mut total = 0.0;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += (d as f64).powi(k as i32);
            let e = n / d;
            if e != d {
                total += (e as f64).powi(k as i32);
            }
        }
        d += 1;
    }
    total
}

/// `Σ_{n=1}^{terms} σ_k(n) qⁿ` by Horner evaluation from the top.
fn divisor_series(k: u32, q: C64, cfg: QSeriesConfig) -> C64 {
    let mut acc = C64::zero();
    for n in (1..=cfg.terms as u64).rev() {
        acc = (acc + sigma_f64(k, n)) * q;
    }
    acc
}

pub fn e2_series(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    C64::one() - divisor_series(1, tau.nome(), cfg) * 24.0
}

pub fn e4_series(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    C64::one() + divisor_series(3, tau.nome(), cfg) * 240.0
}

pub fn e6_series(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    C64::one() - divisor_series(5, tau.nome(), cfg) * 504.0
}

pub fn delta_series(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let q = tau.nome();
    let mut prod = C64::one();
    let mut qn = q;
    for _ in 0..cfg.terms {
        prod *= C64::one() - qn;
        qn *= q;
    }
    q * prod.powi(24)
}

/// Bound on the tail dropped by [`e2_series`]: `25·Σ_{n>terms} n²|q|ⁿ`.
pub fn e2_truncation_bound(tau: ModularPoint, cfg: QSeriesConfig) -> f64 {
    let r = tau.nome().norm();
    let mut total = 0.0;
    let mut n = cfg.terms as f64 + 1.0;
    let mut rn = r.powf(n);
    loop {
        let term = n * n * rn;
        total += term;
        if term <= 1e-18 * total || rn == 0.0 {
            break;
        }
        n += 1.0;
        rn *= r;
    }
    25.0 * total
}

const G2_SCALE: f64 = 4.0 * PI * PI * PI * PI / 3.0;
const G3_SCALE: f64 = 8.0 * PI * PI * PI * PI * PI * PI / 27.0;

/// A point carried to the fundamental domain: `τ′ = γτ`, `j = cτ + d`, `c`.
struct Reduced {
    tau: ModularPoint,
    j: C64,
    c: f64,
}

fn reduce(tau: ModularPoint) -> Reduced {
    let (t, gamma) = reduce_to_fundamental(tau);
    Reduced {
        tau: t,
        j: gamma.automorphy(tau.tau()),
        c: gamma.to_f64()[2],
    }
}

/// `E₂(τ)`, using `E₂(γτ) = (cτ+d)²E₂(τ) + (6c/πi)(cτ+d)`.
pub fn e2(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let r = reduce(tau);
    let corr = C64::new(0.0, 6.0 * r.c / PI) * r.j;
    (e2_series(r.tau, cfg) + corr) / (r.j * r.j)
}

pub fn e4(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let r = reduce(tau);
    e4_series(r.tau, cfg) / r.j.powi(4)
}

pub fn e6(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let r = reduce(tau);
    e6_series(r.tau, cfg) / r.j.powi(6)
}

/// `(g₂(τ), g₃(τ))`.
pub fn g2_g3(tau: ModularPoint, cfg: QSeriesConfig) -> (C64, C64) {
    let r = reduce(tau);
    (
        e4_series(r.tau, cfg) * G2_SCALE / r.j.powi(4),
        e6_series(r.tau, cfg) * G3_SCALE / r.j.powi(6),
    )
}

/// `G₂(τ) = (π²/3)E₂(τ) = η(1)` for `ℤ + τℤ`.
pub fn g_big2(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    e2(tau, cfg) * (PI * PI / 3.0)
}

pub fn delta(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let r = reduce(tau);
    delta_series(r.tau, cfg) / r.j.powi(12)
}

/// `Δ′(τ) = 2πi·E₂(τ)·Δ(τ)`.
pub fn delta_prime(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    C64::new(0.0, 2.0 * PI) * e2(tau, cfg) * delta(tau, cfg)
}

/// From Ramanujan's `E₄′ = (2πi/3)(E₂E₄ − E₆)`.
pub fn g2_prime(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let (e2v, e4v, e6v) = (e2(tau, cfg), e4(tau, cfg), e6(tau, cfg));
    C64::new(0.0, 2.0 * PI / 3.0) * (e2v * e4v - e6v) * G2_SCALE
}

/// From Ramanujan's `E₆′ = 2πi(E₂E₆ − E₄²)/2`.
pub fn g3_prime(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let (e2v, e4v, e6v) = (e2(tau, cfg), e4(tau, cfg), e6(tau, cfg));
    C64::new(0.0, PI) * (e2v * e6v - e4v * e4v) * G3_SCALE
}

/// From Ramanujan's `E₂′ = 2πi(E₂² − E₄)/12`.
pub fn e2_prime(tau: ModularPoint, cfg: QSeriesConfig) -> C64 {
    let (e2v, e4v) = (e2(tau, cfg), e4(tau, cfg));
    C64::new(0.0, 2.0 * PI / 12.0) * (e2v * e2v - e4v)
}

/// All Eisenstein quantities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinValues {
    pub tau: ModularPoint,
    pub g2: C64,
    pub g3: C64,
    pub e2: C64,
    pub g_big2: C64,
    pub delta: C64,
}

impl EisensteinValues {
    pub fn at(tau: ModularPoint, cfg: QSeriesConfig) -> Self {
        let (g2, g3) = g2_g3(tau, cfg);
        let e2v = e2(tau, cfg);
        EisensteinValues {
            tau,
            g2,
            g3,
            e2: e2v,
            g_big2: e2v * (PI * PI / 3.0),
            delta: delta(tau, cfg),
        }
    }

    /// `(2π)⁻¹²(g₂³ − 27g₃²)/Δ − 1`.
    pub fn discriminant_defect(&self) -> f64 {
        let disc = self.g2.powi(3) - self.g3 * self.g3 * 27.0;
        (disc / ((2.0 * PI).powi(12) * self.delta) - 1.0).norm()
    }
}
