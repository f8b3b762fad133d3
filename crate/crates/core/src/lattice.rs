//! Lattices, bases, the SL₂(ℤ) action and reduction utilities.
//!
//! Everything downstream evaluates series on the normalized lattice
//! `ℤ + τℤ` with `τ` in the standard fundamental domain, so this module owns
//! the bookkeeping that carries a general lattice or point there and back.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("omega1 must be non-zero")]
    ZeroPeriod,
    #[error("basis is not positively oriented: Im(omega2/omega1) = {0}")]
    Orientation(f64),
    #[error("tau must lie in the upper half-plane, got Im(tau) = {0}")]
    NotInUpperHalfPlane(f64),
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(BigInt),
    #[error("non-finite complex value")]
    NonFinite,
}

/// A point of the Riemann sphere `ℂ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(C64),
    Infinity,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn finite(&self) -> Option<C64> {
        match *self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }

    /// Returns the finite value, panicking on `∞`. Test helper.
    pub fn unwrap(self) -> C64 {
        self.finite().expect("value is the point at infinity")
    }

    /// `x / y` on the sphere: zero denominator gives `∞`.
    pub fn ratio(num: C64, den: C64) -> Extended {
        if den == C64::new(0.0, 0.0) {
            Extended::Infinity
        } else {
            Extended::Finite(num / den)
        }
    }

    /// Scaled distance used by every verification routine: `0` when both
    /// values are `∞`, `+∞` when exactly one is, otherwise
    /// `|x − y| / (1 + |x|)`.
    pub fn defect(&self, other: &Extended) -> f64 {
        match (self, other) {
            (Extended::Infinity, Extended::Infinity) => 0.0,
            (Extended::Finite(x), Extended::Finite(y)) => (x - y).norm() / (1.0 + x.norm()),
            _ => f64::INFINITY,
        }
    }

    /// `∞`-aware match: both `∞`, or `|x − y| ≤ tol·(1 + |x|)`.
    pub fn approx_eq(&self, other: &Extended, tol: f64) -> bool {
        self.defect(other) <= tol
    }
}

impl From<C64> for Extended {
    fn from(z: C64) -> Self {
        Extended::Finite(z)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

/// A point `τ` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularPoint(C64);

impl ModularPoint {
    pub fn new(tau: C64) -> Result<Self, LatticeError> {
        if !(tau.re.is_finite() && tau.im.is_finite()) {
            return Err(LatticeError::NonFinite);
        }
        if tau.im <= 0.0 {
            return Err(LatticeError::NotInUpperHalfPlane(tau.im));
        }
        Ok(ModularPoint(tau))
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, LatticeError> {
        Self::new(C64::new(re, im))
    }

    pub fn tau(&self) -> C64 {
        self.0
    }

    /// `q = e^{2πiτ}`.
    pub fn nome(&self) -> C64 {
        (C64::new(0.0, 2.0 * std::f64::consts::PI) * self.0).exp()
    }
}

/// An ordered basis `(ω₁, ω₂)` with `Im(ω₂/ω₁) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    omega1: C64,
    omega2: C64,
}

impl Lattice {
    pub fn new(omega1: C64, omega2: C64) -> Result<Self, LatticeError> {
        if omega1.norm() == 0.0 {
            return Err(LatticeError::ZeroPeriod);
        }
        let ratio = omega2 / omega1;
        if !(ratio.re.is_finite() && ratio.im.is_finite()) {
            return Err(LatticeError::NonFinite);
        }
        if ratio.im <= 0.0 {
            return Err(LatticeError::Orientation(ratio.im));
        }
        Ok(Lattice { omega1, omega2 })
    }

    /// `ℤ + τℤ`.
    pub fn normalized(tau: ModularPoint) -> Self {
        Lattice {
            omega1: C64::new(1.0, 0.0),
            omega2: tau.tau(),
        }
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }

    pub fn omega2(&self) -> C64 {
        self.omega2
    }

    /// `αΛ` with the basis scaled.
    pub fn scaled(&self, alpha: C64) -> Result<Self, LatticeError> {
        Lattice::new(alpha * self.omega1, alpha * self.omega2)
    }

    /// The lattice point `m·ω₁ + n·ω₂`.
    pub fn point(&self, m: i64, n: i64) -> C64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }
}

/// An integer matrix `[a b; c d]` of determinant one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Unimodular {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Unimodular {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, LatticeError> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(LatticeError::Determinant(det));
        }
        Ok(Unimodular { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self::from_i64_unchecked(1, 0, 0, 1)
    }

    /// `T = [1 1; 0 1]`.
    pub fn t() -> Self {
        Self::from_i64_unchecked(1, 1, 0, 1)
    }

    /// `S = [0 -1; 1 0]`.
    pub fn s() -> Self {
        Self::from_i64_unchecked(0, -1, 1, 0)
    }

    /// `T^k`.
    pub fn translation(k: impl Into<BigInt>) -> Self {
        Unimodular {
            a: BigInt::one(),
            b: k.into(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    fn from_i64_unchecked(a: i64, b: i64, c: i64, d: i64) -> Self {
        Unimodular {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn inverse(&self) -> Self {
        Unimodular {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// Entries as doubles, `[a, b, c, d]`.
    pub fn to_f64(&self) -> [f64; 4] {
        let cv = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [cv(&self.a), cv(&self.b), cv(&self.c), cv(&self.d)]
    }

    /// Largest absolute entry.
    pub fn max_entry(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }

    /// The automorphy factor `cτ + d`.
    pub fn automorphy(&self, tau: C64) -> C64 {
        let [_, _, c, d] = self.to_f64();
        tau * c + d
    }

    /// `(aτ + b)/(cτ + d)` on the sphere.
    pub fn mobius(&self, z: Extended) -> Extended {
        let [a, b, c, d] = self.to_f64();
        mobius_complex([C64::from(a), C64::from(b), C64::from(c), C64::from(d)], z)
    }

    /// `γτ` for `τ` in the upper half-plane; the image stays there.
    pub fn act(&self, tau: ModularPoint) -> ModularPoint {
        let [a, b, c, d] = self.to_f64();
        let z = tau.tau();
        // c and d never vanish together, so cτ + d ≠ 0 for Im τ > 0.
        ModularPoint((z * a + b) / (z * c + d))
    }

    /// The basis `(aω₁ + bω₂, cω₁ + dω₂)`, i.e. `(ω₁, ω₂)γᵗ`.
    pub fn act_on_basis(&self, lattice: &Lattice) -> Lattice {
        let [a, b, c, d] = self.to_f64();
        let (w1, w2) = (lattice.omega1, lattice.omega2);
        Lattice {
            omega1: w1 * a + w2 * b,
            omega2: w1 * c + w2 * d,
        }
    }

    pub fn is_congruent_to_identity(&self, level: &BigInt) -> bool {
        let one = BigInt::one();
        self.b.mod_floor(level).is_zero()
            && self.c.mod_floor(level).is_zero()
            && (&self.a - &one).mod_floor(level).is_zero()
            && (&self.d - &one).mod_floor(level).is_zero()
    }
}

impl Mul for &Unimodular {
    type Output = Unimodular;

    fn mul(self, rhs: &Unimodular) -> Unimodular {
        Unimodular {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl Mul for Unimodular {
    type Output = Unimodular;

    fn mul(self, rhs: Unimodular) -> Unimodular {
        &self * &rhs
    }
}

impl fmt::Display for Unimodular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{};{},{}]", self.a, self.b, self.c, self.d)
    }
}

/// Linear fractional action of a complex matrix `[a, b, c, d]` on the sphere.
///
/// `∞ ↦ a/c` (or `∞` when `c = 0`) and the pole `cz + d = 0` maps to `∞`.
pub fn mobius_complex(m: [C64; 4], z: Extended) -> Extended {
    let [a, b, c, d] = m;
    match z {
        Extended::Infinity => Extended::ratio(a, c),
        Extended::Finite(z) => Extended::ratio(a * z + b, c * z + d),
    }
}

/// Writes `L = scale·(ℤ + τℤ)`, returning `(τ, scale) = (ω₂/ω₁, ω₁)`.
pub fn normalize_to_tau(lattice: &Lattice) -> Result<(ModularPoint, C64), LatticeError> {
    if lattice.omega1.norm() == 0.0 {
        return Err(LatticeError::ZeroPeriod);
    }
    let tau = lattice.omega2 / lattice.omega1;
    if tau.im <= 0.0 {
        return Err(LatticeError::Orientation(tau.im));
    }
    Ok((ModularPoint::new(tau)?, lattice.omega1))
}

const BOUNDARY_EPS: f64 = 1e-14;

/// Moves `τ` into the standard fundamental domain.
///
/// Returns `(τ′, γ)` with `τ′ = γτ`, `Re τ′ ∈ [−1/2, 1/2)` and `|τ′| ≥ 1`;
/// on the unit circle the representative with `Re τ′ ≤ 0` is chosen.
pub fn reduce_to_fundamental(tau: ModularPoint) -> (ModularPoint, Unimodular) {
    let mut z = tau.tau();
    let mut gamma = Unimodular::identity();
    loop {
        let shift = (z.re + 0.5).floor();
        if shift != 0.0 {
            z.re -= shift;
            gamma = &Unimodular::translation(BigInt::from(-shift as i64)) * &gamma;
        }
        if z.norm_sqr() < 1.0 - BOUNDARY_EPS {
            z = -z.inv();
            gamma = &Unimodular::s() * &gamma;
        } else {
            break;
        }
    }
    if (z.norm_sqr() - 1.0).abs() <= BOUNDARY_EPS && z.re > BOUNDARY_EPS {
        gamma = &Unimodular::s() * &gamma;
    }
    // Recompute from γ so the returned point is exactly γτ.
    (gamma.act(tau), gamma)
}

/// Writes `z = z₀ + m + nτ` with `z₀ = x + yτ`, `x, y ∈ [−1/2, 1/2)`.
pub fn lattice_reduce_point(z: C64, tau: ModularPoint) -> (C64, i64, i64) {
    let t = tau.tau();
    let y = z.im / t.im;
    let x = z.re - y * t.re;
    let m = (x + 0.5).floor();
    let n = (y + 0.5).floor();
    let z0 = z - m - t * n;
    (z0, m as i64, n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn mobius_examples() {
        let i = Extended::Finite(c(0.0, 1.0));
        assert_eq!(Unimodular::t().mobius(i), Extended::Finite(c(1.0, 1.0)));
        assert!(close(Unimodular::s().mobius(i).unwrap(), c(0.0, 1.0), 1e-15));
        let w = Unimodular::s().mobius(Extended::Finite(c(0.0, 2.0))).unwrap();
        assert!(close(w, c(0.0, 0.5), 1e-15));
    }

    #[test]
    fn mobius_infinity_handling() {
        let g = Unimodular::new(2, 1, 1, 1).unwrap();
        assert_eq!(g.mobius(Extended::Infinity), Extended::Finite(c(2.0, 0.0)));
        assert_eq!(Unimodular::t().mobius(Extended::Infinity), Extended::Infinity);
        // cz + d = 0 at z = -1
        assert_eq!(g.mobius(Extended::Finite(c(-1.0, 0.0))), Extended::Infinity);
    }

    #[test]
    fn determinant_checked() {
        assert!(matches!(
            Unimodular::new(1, 1, 2, 1),
            Err(LatticeError::Determinant(_))
        ));
    }

    #[test]
    fn act_on_basis_examples() {
        let tau = c(0.2, 1.3);
        let l = Lattice::new(c(1.0, 0.0), tau).unwrap();
        assert_eq!(Unimodular::identity().act_on_basis(&l), l);
        let lt = Unimodular::t().act_on_basis(&l);
        assert_eq!(lt.omega1(), c(1.0, 0.0) + tau);
        assert_eq!(lt.omega2(), tau);
        // S then normalize gives -1/τ
        let ls = Unimodular::s().act_on_basis(&l);
        let (t2, _) = normalize_to_tau(&ls).unwrap();
        let expected = Unimodular::s().mobius(Extended::Finite(tau)).unwrap();
        assert!(close(t2.tau(), expected, 1e-14));
    }

    #[test]
    fn normalize_examples() {
        let (t, s) = normalize_to_tau(&Lattice::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap()).unwrap();
        assert_eq!((t.tau(), s), (c(0.0, 1.0), c(1.0, 0.0)));
        let (t, s) = normalize_to_tau(&Lattice::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap()).unwrap();
        assert_eq!((t.tau(), s), (c(0.0, 1.0), c(2.0, 0.0)));
        let (t, s) = normalize_to_tau(&Lattice::new(c(1.0, 1.0), c(-1.0, 1.0)).unwrap()).unwrap();
        assert!(close(t.tau(), c(0.0, 1.0), 1e-15));
        assert_eq!(s, c(1.0, 1.0));
    }

    #[test]
    fn lattice_rejects_bad_bases() {
        assert_eq!(
            Lattice::new(c(0.0, 0.0), c(0.0, 1.0)),
            Err(LatticeError::ZeroPeriod)
        );
        assert!(matches!(
            Lattice::new(c(0.0, 1.0), c(1.0, 0.0)),
            Err(LatticeError::Orientation(_))
        ));
        assert!(ModularPoint::from_parts(0.0, 0.0).is_err());
    }

    #[test]
    fn reduce_examples() {
        let i = ModularPoint::from_parts(0.0, 1.0).unwrap();
        let (t, g) = reduce_to_fundamental(i);
        assert_eq!(t.tau(), c(0.0, 1.0));
        assert_eq!(g, Unimodular::identity());

        let (t, g) = reduce_to_fundamental(ModularPoint::from_parts(5.0, 1.0).unwrap());
        assert!(close(t.tau(), c(0.0, 1.0), 1e-15));
        assert_eq!(g, Unimodular::new(1, -5, 0, 1).unwrap());

        let start = ModularPoint::from_parts(0.1, 0.1).unwrap();
        let (t, g) = reduce_to_fundamental(start);
        assert!(t.tau().im >= 0.1);
        assert!(t.tau().norm() >= 1.0 - 1e-12);
        assert!(t.tau().re >= -0.5 && t.tau().re < 0.5);
        assert!(close(g.act(start).tau(), t.tau(), 1e-12));
    }

    #[test]
    fn reduce_boundary_convention() {
        // Re τ = 1/2 maps to −1/2.
        let (t, _) = reduce_to_fundamental(ModularPoint::from_parts(0.5, 2.0).unwrap());
        assert!(close(t.tau(), c(-0.5, 2.0), 1e-15));
        // On the unit circle prefer Re τ ≤ 0.
        let th = 1.2f64;
        let (t, _) = reduce_to_fundamental(ModularPoint::from_parts(th.cos(), th.sin()).unwrap());
        assert!(t.tau().re <= 0.0);
        assert!(close(t.tau(), c(-th.cos(), th.sin()), 1e-14));
    }

    #[test]
    fn long_translation_does_not_overflow() {
        let (t, g) = reduce_to_fundamental(ModularPoint::from_parts(1e15 + 0.25, 1.0).unwrap());
        assert!(t.tau().re.abs() <= 0.5);
        assert_eq!(g.b(), &BigInt::from(-1_000_000_000_000_000i64));
    }

    #[test]
    fn lattice_reduce_point_examples() {
        let tau = ModularPoint::from_parts(0.3, 1.1).unwrap();
        let t = tau.tau();
        let z = t * 0.25 + 0.25;
        let (z0, m, n) = lattice_reduce_point(z, tau);
        assert!(close(z0, z, 1e-15));
        assert_eq!((m, n), (0, 0));

        let (z0, m, n) = lattice_reduce_point(c(1.0, 0.0), tau);
        assert!(close(z0, c(0.0, 0.0), 1e-15));
        assert_eq!((m, n), (1, 0));

        let (z0, m, n) = lattice_reduce_point(t * 2.2 + 3.7, tau);
        assert_eq!((m, n), (4, 2));
        assert!(close(z0, t * 0.2 - 0.3, 1e-12));
    }

    #[test]
    fn defect_is_infinity_aware() {
        let a = Extended::Finite(c(1.0, 0.0));
        assert_eq!(Extended::Infinity.defect(&Extended::Infinity), 0.0);
        assert!(a.defect(&Extended::Infinity).is_infinite());
        assert!(a.approx_eq(&Extended::Finite(c(1.0 + 1e-9, 0.0)), 1e-8));
    }
}
