//! Exact polynomials in `g₂` (weight 4) and `g₃` (weight 6), and the
//! three-term recurrence giving the coefficients `Φₙ`, `Ψₙ` of
//! `∫℘ⁿ = Φₙz + Ψₙζ(z) + (elliptic)`.
//!
//! ```text
//! u_{n+1} = (2n−1)/(4(2n+1))·g₂·u_{n−1} + (n−1)/(2(2n+1))·g₃·u_{n−2}
//! Φ₋₁ = Ψ₋₁ = 0,  Φ₀ = 1, Ψ₀ = 0,  Φ₁ = 0, Ψ₁ = −1
//! ```
//!
//! Note the recurrence skips `u_n`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::eisenstein;
use crate::lattice::{Extended, ModularPoint, C64};
use crate::weierstrass::{eta_pair, EvalConfig};

/// Exponents `(a, b)` of the monomial `g₂ᵃ g₃ᵇ`.
pub type Exponents = (u32, u32);

/// Sparse polynomial in `g₂, g₃` with exact rational coefficients.
///
/// Zero coefficients are never stored, so the zero polynomial is the empty
/// map. The weight `4a + 6b` is derived from the terms: a sum of
/// differently weighted polynomials simply reports no weight.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct WhPoly {
    terms: BTreeMap<Exponents, BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl WhPoly {
    pub fn zero() -> Self {
        WhPoly::default()
    }

    pub fn one() -> Self {
        WhPoly::monomial(BigRational::one(), 0, 0)
    }

    pub fn g2() -> Self {
        WhPoly::monomial(BigRational::one(), 1, 0)
    }

    pub fn g3() -> Self {
        WhPoly::monomial(BigRational::one(), 0, 1)
    }

    pub fn monomial(coeff: BigRational, a: u32, b: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((a, b), coeff);
        }
        WhPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, BigRational)>) -> Self {
        let mut p = WhPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, a: u32, b: u32) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Common weight `4a + 6b` of all monomials; `None` for zero or mixed.
    pub fn weight(&self) -> Option<u32> {
        let mut weights = self.terms.keys().map(|&(a, b)| 4 * a + 6 * b);
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weight().is_some()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return WhPoly::zero();
        }
        WhPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// The single monomial of `self`, if it has exactly one.
    pub fn as_monomial(&self) -> Option<(Exponents, &BigRational)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(e, c)| (*e, c)),
            _ => None,
        }
    }

    /// Substitute numeric values for `g₂`, `g₃`; coefficients are converted
    /// to `f64` only here.
    pub fn eval(&self, g2: C64, g3: C64) -> C64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| g2.powu(a) * g3.powu(b) * rational_to_f64(c))
            .sum()
    }

    /// Renders as e.g. `15/4928 g2^3 + 1/55 g3^2`, highest `g₂` power first.
    pub fn to_text(&self) -> String {
        render(
            self.terms.iter().rev().map(|(&(a, b), c)| (c.clone(), a as i64, b as i64)),
            Style::Text,
        )
    }

    pub fn to_latex(&self) -> String {
        render(
            self.terms.iter().rev().map(|(&(a, b), c)| (c.clone(), a as i64, b as i64)),
            Style::Latex,
        )
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge numerators/denominators together
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Copy)]
enum Style {
    Text,
    Latex,
}

/// Shared renderer for polynomials and Laurent monomial sums
/// `(coefficient, exponent of g₂, exponent of g₃)`.
fn render(terms: impl Iterator<Item = (BigRational, i64, i64)>, style: Style) -> String {
    let mut out = String::new();
    for (i, (c, a, b)) in terms.enumerate() {
        let negative = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let coeff = match style {
            Style::Text => format_rational(&mag),
            Style::Latex if mag.denom().is_one() => mag.numer().to_string(),
            Style::Latex => format!("\\frac{{{}}}{{{}}}", mag.numer(), mag.denom()),
        };
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (name, e) in [("g2", a), ("g3", b)] {
            let target = if e > 0 { &mut num } else { &mut den };
            match (e.abs(), style) {
                (0, _) => {}
                (1, Style::Text) => target.push(name.to_string()),
                (k, Style::Text) => target.push(format!("{name}^{k}")),
                (1, Style::Latex) => target.push(format!("{}_{}", &name[..1], &name[1..])),
                (k, Style::Latex) => target.push(format!("{}_{}^{k}", &name[..1], &name[1..])),
            }
        }
        let (sep, div) = match style {
            Style::Text => (" ", "/"),
            Style::Latex => ("", "/"),
        };
        let mut term = coeff;
        if num.is_empty() && den.is_empty() {
            out.push_str(&term);
            continue;
        }
        if !num.is_empty() {
            term = format!("{term}{sep}{}", num.join(sep));
        } else if !den.is_empty() {
            term = format!("{term}{sep}1");
        }
        if !den.is_empty() {
            let joined = den.join(sep);
            term = if den.len() > 1 {
                format!("{term}{div}({joined})")
            } else {
                format!("{term}{div}{joined}")
            };
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for WhPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for WhPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WhPoly({self})")
    }
}

impl Add for &WhPoly {
    type Output = WhPoly;

    fn add(self, rhs: &WhPoly) -> WhPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Neg for &WhPoly {
    type Output = WhPoly;

    fn neg(self) -> WhPoly {
        WhPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Sub for &WhPoly {
    type Output = WhPoly;

    fn sub(self, rhs: &WhPoly) -> WhPoly {
        self + &(-rhs)
    }
}

impl Mul for &WhPoly {
    type Output = WhPoly;

    fn mul(self, rhs: &WhPoly) -> WhPoly {
        let mut out = WhPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

/// `numerator / denominator`, compared by exact cross-multiplication.
#[derive(Clone)]
pub struct RationalFn {
    numerator: WhPoly,
    denominator: WhPoly,
}

impl RationalFn {
    /// `None` when the denominator is the zero polynomial.
    pub fn new(numerator: WhPoly, denominator: WhPoly) -> Option<Self> {
        if denominator.is_zero() {
            return None;
        }
        Some(RationalFn {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &WhPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &WhPoly {
        &self.denominator
    }

    pub fn eval(&self, g2: C64, g3: C64) -> Extended {
        Extended::ratio(self.numerator.eval(g2, g3), self.denominator.eval(g2, g3))
    }

    /// Weight of numerator minus weight of denominator.
    pub fn weight(&self) -> Option<i64> {
        Some(self.numerator.weight()? as i64 - self.denominator.weight()? as i64)
    }

    /// When the denominator is a single monomial, the quotient as a sum of
    /// Laurent monomials `(c, a, b)` meaning `c·g₂ᵃg₃ᵇ`.
    pub fn laurent_terms(&self) -> Option<Vec<(BigRational, i64, i64)>> {
        let ((da, db), dc) = self.denominator.as_monomial()?;
        Some(
            self.numerator
                .terms
                .iter()
                .rev()
                .map(|(&(a, b), c)| (c / dc, a as i64 - da as i64, b as i64 - db as i64))
                .collect(),
        )
    }

    /// `-5/48 g2^2/g3` style when the denominator is a monomial, else
    /// `(num)/(den)`.
    pub fn to_text(&self) -> String {
        match self.laurent_terms() {
            Some(t) => render(t.into_iter(), Style::Text),
            None => format!("({})/({})", self.numerator, self.denominator),
        }
    }

    pub fn to_latex(&self) -> String {
        match self.laurent_terms() {
            Some(t) => render(t.into_iter(), Style::Latex),
            None => format!(
                "\\frac{{{}}}{{{}}}",
                self.numerator.to_latex(),
                self.denominator.to_latex()
            ),
        }
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({})", self.to_text())
    }
}

fn memo() -> &'static Mutex<Vec<(WhPoly, WhPoly)>> {
    static MEMO: OnceLock<Mutex<Vec<(WhPoly, WhPoly)>>> = OnceLock::new();
    // index i holds n = i − 1
    MEMO.get_or_init(|| {
        Mutex::new(vec![
            (WhPoly::zero(), WhPoly::zero()),
            (WhPoly::one(), WhPoly::zero()),
            (WhPoly::zero(), -&WhPoly::one()),
        ])
    })
}

/// `(Φₙ, Ψₙ)` for `n ≥ −1`, memoized.
pub fn phi_psi(n: i64) -> (WhPoly, WhPoly) {
    assert!(n >= -1, "phi_psi needs n >= -1, got {n}");
    let idx = (n + 1) as usize;
    let mut table = memo().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= idx {
        // table.len() = k + 2 where k + 1 is the index being produced
        let k = table.len() as i64 - 2;
        let c1 = rat(2 * k - 1, 4 * (2 * k + 1));
        let c2 = rat(k - 1, 2 * (2 * k + 1));
        let lhs = |p: &WhPoly, q: &WhPoly| {
            &(&WhPoly::g2() * p).scale(&c1) + &(&WhPoly::g3() * q).scale(&c2)
        };
        let (phi_prev, psi_prev) = &table[(k) as usize];
        let (phi_prev2, psi_prev2) = &table[(k - 1) as usize];
        let next = (lhs(phi_prev, phi_prev2), lhs(psi_prev, psi_prev2));
        table.push(next);
    }
    table[idx].clone()
}

/// `fₙ = Φₙ/Ψₙ`; `None` exactly when `Ψₙ = 0`.
pub fn f_n(n: i64) -> Option<RationalFn> {
    assert!(n >= 1, "f_n needs n >= 1, got {n}");
    let (phi, psi) = phi_psi(n);
    RationalFn::new(phi, psi)
}

/// One line of the coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaTableRow {
    pub n: i64,
    pub phi: WhPoly,
    pub psi: WhPoly,
    pub f: Option<RationalFn>,
    pub weight_phi: Option<u32>,
    pub weight_psi: Option<u32>,
}

pub fn table_row(n: i64) -> ZetaTableRow {
    let (phi, psi) = phi_psi(n);
    ZetaTableRow {
        n,
        weight_phi: phi.weight(),
        weight_psi: psi.weight(),
        f: RationalFn::new(phi.clone(), psi.clone()),
        phi,
        psi,
    }
}

/// Rows `1..=max_n`.
pub fn table(max_n: i64) -> Vec<ZetaTableRow> {
    (1..=max_n).map(table_row).collect()
}

pub fn eval_whpoly(p: &WhPoly, tau: ModularPoint, cfg: &EvalConfig) -> C64 {
    let (g2, g3) = eisenstein::g2_g3(tau, cfg.qseries);
    p.eval(g2, g3)
}

/// `hₙ(τ) = Hₙ(τ)/Hₙ(1) = τ − 2πi/(fₙ(τ) + η(1))`; `τ` itself when `Ψₙ = 0`.
pub fn h_n_eval(n: i64, tau: ModularPoint, cfg: &EvalConfig) -> Extended {
    let t = tau.tau();
    let Some(f) = f_n(n) else {
        return Extended::Finite(t);
    };
    let (g2, g3) = eisenstein::g2_g3(tau, cfg.qseries);
    let eta1 = eta_pair(tau, cfg).eta1;
    match f.eval(g2, g3) {
        Extended::Infinity => Extended::Finite(t),
        Extended::Finite(fv) => {
            let den = fv + eta1;
            match Extended::ratio(C64::new(0.0, -2.0 * PI), den) {
                Extended::Finite(v) => Extended::Finite(t + v),
                Extended::Infinity => Extended::Infinity,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(Exponents, (i64, i64))]) -> WhPoly {
        WhPoly::from_terms(terms.iter().map(|&(e, (p, q))| (e, rat(p, q))))
    }

    #[test]
    fn arithmetic_examples() {
        let p = &WhPoly::g2() * &WhPoly::g3();
        assert_eq!(p.weight(), Some(10));
        let a = WhPoly::g2().scale(&rat(1, 12));
        let b = WhPoly::g2().scale(&rat(-1, 12));
        let s = &a + &b;
        assert!(s.is_zero());
        assert!(s.terms().is_empty());
        assert_eq!(&a * &a, WhPoly::monomial(rat(1, 144), 2, 0));
    }

    #[test]
    fn mixed_weights_drop_homogeneity() {
        let s = &WhPoly::g2() + &WhPoly::g3();
        assert_eq!(s.weight(), None);
        assert!(!s.is_homogeneous());
        let prod = &WhPoly::g2() * &WhPoly::g2();
        assert_eq!(prod.weight(), Some(8));
    }

    #[test]
    fn rationals_are_reduced() {
        let p = WhPoly::monomial(rat(-4, -56), 0, 1);
        let c = p.coeff(0, 1);
        assert_eq!(c, rat(1, 14));
        assert!(c.denom().is_positive());
    }

    #[test]
    fn initial_conditions() {
        assert_eq!(phi_psi(-1), (WhPoly::zero(), WhPoly::zero()));
        assert_eq!(phi_psi(0), (WhPoly::one(), WhPoly::zero()));
        assert_eq!(phi_psi(1), (WhPoly::zero(), -&WhPoly::one()));
    }

    #[test]
    fn table_entries() {
        assert_eq!(phi_psi(2), (poly(&[((1, 0), (1, 12))]), WhPoly::zero()));
        assert_eq!(
            phi_psi(3),
            (poly(&[((0, 1), (1, 10))]), poly(&[((1, 0), (-3, 20))]))
        );
        assert_eq!(
            phi_psi(4),
            (poly(&[((2, 0), (5, 336))]), poly(&[((0, 1), (-2, 14))]))
        );
        assert_eq!(
            phi_psi(5),
            (poly(&[((1, 1), (1, 30))]), poly(&[((2, 0), (-7, 240))]))
        );
        assert_eq!(
            phi_psi(6),
            (
                poly(&[((3, 0), (15, 4928)), ((0, 2), (1, 55))]),
                poly(&[((1, 1), (-87, 1540))])
            )
        );
    }

    #[test]
    fn f_n_entries() {
        assert!(f_n(2).is_none());
        let f3 = RationalFn::new(poly(&[((0, 1), (-2, 3))]), WhPoly::g2()).unwrap();
        assert_eq!(f_n(3).unwrap(), f3);
        let f6 = RationalFn::new(
            poly(&[((3, 0), (-25, 464)), ((0, 2), (-28, 87))]),
            poly(&[((1, 1), (1, 1))]),
        )
        .unwrap();
        assert_eq!(f_n(6).unwrap(), f6);
        assert_eq!(f_n(6).unwrap().to_text(), "-25/464 g2^2/g3 - 28/87 g3/g2");
        assert_eq!(f_n(1).unwrap().to_text(), "0");
    }

    #[test]
    fn rendering() {
        assert_eq!(phi_psi(4).0.to_text(), "5/336 g2^2");
        assert_eq!(phi_psi(4).1.to_text(), "-1/7 g3");
        assert_eq!(phi_psi(6).0.to_text(), "15/4928 g2^3 + 1/55 g3^2");
        assert_eq!(phi_psi(5).0.to_text(), "1/30 g2 g3");
        assert_eq!(phi_psi(1).1.to_text(), "-1");
        assert_eq!(WhPoly::zero().to_text(), "0");
        assert_eq!(phi_psi(3).1.to_latex(), "-\\frac{3}{20}g_2");
        assert_eq!(f_n(4).unwrap().to_text(), "-5/48 g2^2/g3");
    }

    #[test]
    fn weights_up_to_twelve() {
        for n in 1..=12 {
            let (phi, psi) = phi_psi(n);
            for &(a, b) in phi.terms().keys() {
                assert_eq!(4 * a + 6 * b, 2 * n as u32, "phi n={n}");
            }
            for &(a, b) in psi.terms().keys() {
                assert_eq!(4 * a + 6 * b, 2 * (n as u32 - 1), "psi n={n}");
            }
            let row = table_row(n);
            assert_eq!(row.f.is_none(), row.psi.is_zero());
        }
    }

    #[test]
    fn concurrent_memo_fill_is_consistent() {
        let handles: Vec<_> = (0..8)
            .map(|i| std::thread::spawn(move || phi_psi(20 + i % 3)))
            .collect();
        for h in handles {
            let (phi, _) = h.join().unwrap();
            assert!(phi.weight().is_some());
        }
        assert_eq!(phi_psi(21).0.weight(), Some(42));
    }

    #[test]
    fn evaluation() {
        let tau = ModularPoint::from_parts(0.0, 1.0).unwrap();
        let cfg = EvalConfig::default();
        assert_eq!(eval_whpoly(&WhPoly::one(), tau, &cfg), C64::new(1.0, 0.0));
        let (g2, _) = eisenstein::g2_g3(tau, cfg.qseries);
        let v = eval_whpoly(&phi_psi(2).0, tau, &cfg);
        assert!((v - g2 / 12.0).norm() < 1e-12);
        assert!(eval_whpoly(&phi_psi(3).0, tau, &cfg).norm() < 1e-9);
    }

    #[test]
    fn h_n_rows() {
        let cfg = EvalConfig::default();
        let tau = ModularPoint::from_parts(0.1, 1.2).unwrap();
        assert_eq!(h_n_eval(2, tau, &cfg), Extended::Finite(tau.tau()));
        let eta = eta_pair(tau, &cfg);
        let h1 = h_n_eval(1, tau, &cfg).unwrap();
        assert!((h1 - eta.eta2 / eta.eta1).norm() < 1e-12);

        let tau = ModularPoint::from_parts(0.0, 1.1).unwrap();
        let eta = eta_pair(tau, &cfg);
        let (g2, g3) = eisenstein::g2_g3(tau, cfg.qseries);
        let (phi, psi) = phi_psi(3);
        let (p, s) = (phi.eval(g2, g3), psi.eval(g2, g3));
        let direct = (p * tau.tau() + s * eta.eta2) / (p + s * eta.eta1);
        assert!((h_n_eval(3, tau, &cfg).unwrap() - direct).norm() < 1e-9);
    }
}
