//! Weierstrass `℘`, `℘′`, `ζ` and the quasi-period map `η`.
//!
//! Evaluation strategy for the lattice `ℤ + τℤ`:
//!
//! 1. reduce `τ` to `τ′ = γτ` in the fundamental domain, so that
//!    `ℤ + τℤ = j·(ℤ + τ′ℤ)` with `j = cτ + d`;
//! 2. reduce `z/j` into the cell `{x + yτ′ : x, y ∈ [−1/2, 1/2)}`;
//! 3. sum the trigonometric q-series on the cell, where every term decays
//!    at least like `|q′|^{n−1/2}`.
//!
//! With `u = e^{2πiz}`, `w₊ = qⁿu`, `w₋ = qⁿ/u`:
//!
//! ```text
//! ζ(z)  = η₁z + π cot(πz) + 2πi Σ_{n≥1} [ w₋/(1−w₋) − w₊/(1−w₊) ]
//! ℘(z)  = −η₁ + π²/sin²(πz) − 4π² Σ_{n≥1} [ w₊/(1−w₊)² + w₋/(1−w₋)² ]
//! ℘′(z) = −2π³cos(πz)/sin³(πz)
//!         − 8π³i Σ_{n≥1} [ w₊(1+w₊)/(1−w₊)³ − w₋(1+w₋)/(1−w₋)³ ]
//! ```
//!
//! where `η₁ = η(1) = (π²/3)E₂(τ)`. Away from the cell, `ζ` picks up
//! `m·η(1) + n·η(τ)` and `℘`, `℘′` are periodic.

use std::f64::consts::PI;

use num_integer::Integer;
use thiserror::Error;

use crate::eisenstein::{self, QSeriesConfig};
use crate::lattice::{
    lattice_reduce_point, normalize_to_tau, reduce_to_fundamental, Extended, Lattice,
    LatticeError, ModularPoint, C64,
};
use crate::quadrature::gauss_legendre;

/// Points closer than this to a lattice point are treated as poles.
pub const POLE_EPS: f64 = 1e-12;

/// Minimum distance between a quadrature path and the lattice.
pub const PATH_CLEARANCE: f64 = 1e-3;

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeierstrassError {
    #[error("integration path passes within {distance:.3e} of a lattice point")]
    PathNearPole { distance: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub qseries: QSeriesConfig,
    /// Square truncation `|m|, |n| ≤ radius` for the direct-sum oracles.
    pub direct_sum_radius: usize,
    pub quad_points: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            qseries: QSeriesConfig::default(),
            direct_sum_radius: 200,
            quad_points: 128,
        }
    }
}

/// `(η(1), η(τ))` for the lattice `ℤ + τℤ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiPeriodPair {
    pub tau: ModularPoint,
    pub eta1: C64,
    pub eta2: C64,
}

impl QuasiPeriodPair {
    /// `τ·η(1) − η(τ) − 2πi`, which vanishes for every `τ` in the upper
    /// half-plane.
    pub fn legendre_residual(&self) -> C64 {
        self.tau.tau() * self.eta1 - self.eta2 - TWO_PI_I
    }
}

/// The reduced lattice `ℤ + τ′ℤ` together with the data needed to map back.
struct Frame {
    tau: ModularPoint,
    j: C64,
    eta1: C64,
    eta2: C64,
    cfg: QSeriesConfig,
    coeffs: [f64; 4],
}

impl Frame {
    fn new(tau: ModularPoint, cfg: QSeriesConfig) -> Self {
        let (reduced, gamma) = reduce_to_fundamental(tau);
        let eta1 = eisenstein::e2_series(reduced, cfg) * (PI * PI / 3.0);
        Frame {
            tau: reduced,
            j: gamma.automorphy(tau.tau()),
            eta1,
            eta2: reduced.tau() * eta1 - TWO_PI_I,
            cfg,
            coeffs: gamma.to_f64(),
        }
    }

    /// Cell representative of `z/j` and its lattice coordinates, or `None`
    /// on a lattice point.
    fn locate(&self, z: C64) -> Option<(C64, i64, i64)> {
        let (z0, m, n) = lattice_reduce_point(z / self.j, self.tau);
        (z0.norm() >= POLE_EPS).then_some((z0, m, n))
    }

    /// Iterates `(w₊, w₋)` for `n = 1, 2, …` until both are negligible.
    fn nome_pairs(&self, z0: C64) -> impl Iterator<Item = (C64, C64)> {
        let q = self.tau.nome();
        let t = self.tau.tau();
        let mut plus = (TWO_PI_I * (t + z0)).exp();
        let mut minus = (TWO_PI_I * (t - z0)).exp();
        (0..self.cfg.terms()).map_while(move |_| {
            if plus.norm() < 1e-20 && minus.norm() < 1e-20 {
                return None;
            }
            let item = (plus, minus);
            plus *= q;
            minus *= q;
            Some(item)
        })
    }

    fn cell_zeta(&self, z0: C64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for (wp, wm) in self.nome_pairs(z0) {
            sum += wm / (1.0 - wm) - wp / (1.0 - wp);
        }
        self.eta1 * z0 + pi_cot(z0) + TWO_PI_I * sum
    }

    fn cell_wp(&self, z0: C64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for (wp, wm) in self.nome_pairs(z0) {
            sum += wp / ((1.0 - wp) * (1.0 - wp)) + wm / ((1.0 - wm) * (1.0 - wm));
        }
        -self.eta1 + pi2_csc2(z0) - sum * (4.0 * PI * PI)
    }

    fn cell_wp_prime(&self, z0: C64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for (wp, wm) in self.nome_pairs(z0) {
            sum += wp * (1.0 + wp) / (1.0 - wp).powi(3) - wm * (1.0 + wm) / (1.0 - wm).powi(3);
        }
        let pi3 = PI * PI * PI;
        let w = z0 * PI;
        let s = w.sin();
        -2.0 * pi3 * w.cos() / (s * s * s) - C64::new(0.0, 8.0 * pi3) * sum
    }
}

/// `π·cot(πz)`, switching to exponentials when `|Im z|` is large.
fn pi_cot(z: C64) -> C64 {
    let w = z * PI;
    if w.im.abs() < 20.0 {
        PI * w.cos() / w.sin()
    } else {
        // cot w = i(u + 1)/(u − 1) with |u| = |e^{±2iw}| ≤ 1
        let u = if w.im > 0.0 {
            (C64::new(0.0, 2.0) * w).exp()
        } else {
            (C64::new(0.0, -2.0) * w).exp()
        };
        let sign = if w.im > 0.0 { 1.0 } else { -1.0 };
        C64::new(0.0, PI * sign) * (u + 1.0) / (u - 1.0)
    }
}

/// `π²/sin²(πz)`.
fn pi2_csc2(z: C64) -> C64 {
    let w = z * PI;
    if w.im.abs() < 20.0 {
        let s = w.sin();
        PI * PI / (s * s)
    } else {
        let u = if w.im > 0.0 {
            (C64::new(0.0, 2.0) * w).exp()
        } else {
            (C64::new(0.0, -2.0) * w).exp()
        };
        -4.0 * PI * PI * u / ((1.0 - u) * (1.0 - u))
    }
}

/// `℘(ℤ + τℤ, z)`; `∞` on the lattice.
pub fn wp(tau: ModularPoint, z: C64, cfg: &EvalConfig) -> Extended {
    let frame = Frame::new(tau, cfg.qseries);
    match frame.locate(z) {
        Some((z0, _, _)) => Extended::Finite(frame.cell_wp(z0) / (frame.j * frame.j)),
        None => Extended::Infinity,
    }
}

/// `℘′(ℤ + τℤ, z)`; `∞` on the lattice.
pub fn wp_prime(tau: ModularPoint, z: C64, cfg: &EvalConfig) -> Extended {
    let frame = Frame::new(tau, cfg.qseries);
    match frame.locate(z) {
        Some((z0, _, _)) => Extended::Finite(frame.cell_wp_prime(z0) / frame.j.powi(3)),
        None => Extended::Infinity,
    }
}

/// `ζ(ℤ + τℤ, z)`; `∞` on the lattice.
pub fn zeta_w(tau: ModularPoint, z: C64, cfg: &EvalConfig) -> Extended {
    let frame = Frame::new(tau, cfg.qseries);
    match frame.locate(z) {
        Some((z0, m, n)) => {
            let reduced = frame.cell_zeta(z0) + frame.eta1 * m as f64 + frame.eta2 * n as f64;
            Extended::Finite(reduced / frame.j)
        }
        None => Extended::Infinity,
    }
}

/// `ζ(L, z) = ω₁⁻¹·ζ(ℤ + τℤ, z/ω₁)` with `τ = ω₂/ω₁`.
pub fn zeta_general(lattice: &Lattice, z: C64, cfg: &EvalConfig) -> Result<Extended, LatticeError> {
    let (tau, scale) = normalize_to_tau(lattice)?;
    Ok(match zeta_w(tau, z / scale, cfg) {
        Extended::Finite(v) => Extended::Finite(v / scale),
        Extended::Infinity => Extended::Infinity,
    })
}

/// `(η(1), η(τ)) = (G₂(τ), τG₂(τ) − 2πi)`.
pub fn eta_pair(tau: ModularPoint, cfg: &EvalConfig) -> QuasiPeriodPair {
    let eta1 = eisenstein::g_big2(tau, cfg.qseries);
    QuasiPeriodPair {
        tau,
        eta1,
        eta2: tau.tau() * eta1 - TWO_PI_I,
    }
}

/// `(η(1), η(τ))` from the half-period values `2ζ(1/2)`, `2ζ(τ/2)`.
///
/// The half-periods are summed directly on the cell boundary of the reduced
/// lattice and mapped back by `ℤ`-linearity and weight `−1` homogeneity; the
/// closed form of [`eta_pair`] is never consulted.
pub fn eta_pair_from_half_periods(tau: ModularPoint, cfg: &EvalConfig) -> QuasiPeriodPair {
    let frame = Frame::new(tau, cfg.qseries);
    let h1 = frame.cell_zeta(C64::new(0.5, 0.0)) * 2.0;
    let h2 = frame.cell_zeta(frame.tau.tau() * 0.5) * 2.0;
    let [a, b, c, d] = frame.coeffs;
    // 1 = j·(a − cτ′) and τ = j·(dτ′ − b)
    QuasiPeriodPair {
        tau,
        eta1: (h1 * a - h2 * c) / frame.j,
        eta2: (h2 * d - h1 * b) / frame.j,
    }
}

/// `η(m + nτ) = m·η(1) + n·η(τ)`.
pub fn eta_of(tau: ModularPoint, m: i64, n: i64, cfg: &EvalConfig) -> C64 {
    let pair = eta_pair(tau, cfg);
    pair.eta1 * m as f64 + pair.eta2 * n as f64
}

/// `η_L(m·ω₁ + n·ω₂)` for a general lattice, by weight `−1` homogeneity.
pub fn eta_of_lattice(lattice: &Lattice, m: i64, n: i64, cfg: &EvalConfig) -> Result<C64, LatticeError> {
    let (tau, scale) = normalize_to_tau(lattice)?;
    Ok(eta_of(tau, m, n, cfg) / scale)
}

/// Residual of the Legendre relation `τ·η(1) − η(τ) = 2πi`, with the
/// quasi-periods taken from independently evaluated half-period values.
pub fn legendre_defect(tau: ModularPoint, cfg: &EvalConfig) -> C64 {
    eta_pair_from_half_periods(tau, cfg).legendre_residual()
}

/// Distance from the segment `[z0, z0 + ω]` to the nearest point of `ℤ + τℤ`.
pub fn path_clearance(tau: ModularPoint, z0: C64, omega: C64) -> f64 {
    let t = tau.tau();
    let coords = |z: C64| {
        let y = z.im / t.im;
        (z.re - y * t.re, y)
    };
    let (x0, y0) = coords(z0);
    let (x1, y1) = coords(z0 + omega);
    let (xlo, xhi) = (x0.min(x1).floor() as i64 - 2, x0.max(x1).ceil() as i64 + 2);
    let (ylo, yhi) = (y0.min(y1).floor() as i64 - 2, y0.max(y1).ceil() as i64 + 2);
    let len2 = omega.norm_sqr();
    let mut best = f64::INFINITY;
    for m in xlo..=xhi {
        for n in ylo..=yhi {
            let p = t * n as f64 + m as f64;
            let s = if len2 == 0.0 {
                0.0
            } else {
                ((p - z0) * omega.conj()).re / len2
            };
            let nearest = z0 + omega * s.clamp(0.0, 1.0);
            best = best.min((p - nearest).norm());
        }
    }
    best
}

/// `∫ ℘ⁿ(u) du` along the straight path from `z0` to `z0 + m + kτ`, by
/// `cfg.quad_points`-node Gauss–Legendre quadrature.
///
/// Over a full period the elliptic part of a primitive of `℘ⁿ` cancels,
/// leaving `Φₙω + Ψₙη(ω)`.
pub fn period_integral_wp_power(
    n: u32,
    tau: ModularPoint,
    period: (i64, i64),
    z0: C64,
    cfg: &EvalConfig,
) -> Result<C64, WeierstrassError> {
    let omega = tau.tau() * period.1 as f64 + period.0 as f64;
    let distance = path_clearance(tau, z0, omega);
    if distance < PATH_CLEARANCE {
        return Err(WeierstrassError::PathNearPole { distance });
    }
    let frame = Frame::new(tau, cfg.qseries);
    let (nodes, weights) = gauss_legendre(cfg.quad_points.max(1));
    let mut sum = C64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        let u = z0 + omega * ((x + 1.0) * 0.5);
        let (u0, _, _) = frame
            .locate(u)
            .ok_or(WeierstrassError::PathNearPole { distance: 0.0 })?;
        let value = frame.cell_wp(u0) / (frame.j * frame.j);
        sum += value.powu(n) * *w;
    }
    Ok(sum * omega * 0.5)
}

/// A starting point whose period path runs halfway between two rows of
/// lattice points: `z0 = (v − ω)/2` where `(ω/g, v)` is a basis of the
/// lattice and `g = gcd(m, k)`.
pub fn default_path_start(tau: ModularPoint, period: (i64, i64)) -> C64 {
    let (m, k) = period;
    let t = tau.tau();
    let omega = t * k as f64 + m as f64;
    if m == 0 && k == 0 {
        return (C64::new(1.0, 0.0) + t) * 0.5;
    }
    let g = m.gcd(&k);
    let (mp, kp) = (m / g, k / g);
    // mp·r − kp·p = 1
    let e = mp.extended_gcd(&kp);
    let (r, p) = (e.x * e.gcd, -e.y * e.gcd);
    let v = t * r as f64 + p as f64;
    (v - omega) * 0.5
}
