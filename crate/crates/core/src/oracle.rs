//! Direct lattice sums over the square `|m|, |n| ≤ radius`.
//!
//! These converge only polynomially and exist as reference values for the
//! q-series evaluators; nothing else in the crate calls them.

use crate::lattice::{ModularPoint, C64};

fn lattice_points(tau: ModularPoint, radius: usize) -> impl Iterator<Item = C64> {
    let t = tau.tau();
    let r = radius as i64;
    (-r..=r).flat_map(move |m| {
        (-r..=r)
            .filter(move |&n| m != 0 || n != 0)
            .map(move |n| t * n as f64 + m as f64)
    })
}

/// `1/z² + Σ′ [(z − ω)⁻² − ω⁻²]`.
pub fn direct_wp(tau: ModularPoint, z: C64, radius: usize) -> C64 {
    let tail: C64 = lattice_points(tau, radius)
        .map(|w| (z - w).powi(-2) - w.powi(-2))
        .sum();
    z.powi(-2) + tail
}

/// `1/z + Σ′ [1/(z − ω) + 1/ω + z/ω²]`.
pub fn direct_zeta(tau: ModularPoint, z: C64, radius: usize) -> C64 {
    let tail: C64 = lattice_points(tau, radius)
        .map(|w| (z - w).inv() + w.inv() + z / (w * w))
        .sum();
    z.inv() + tail
}

/// `(60Σ′ω⁻⁴, 140Σ′ω⁻⁶)`.
pub fn direct_g2_g3(tau: ModularPoint, radius: usize) -> (C64, C64) {
    let (s4, s6) = lattice_points(tau, radius).fold(
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        |(s4, s6), w| {
            let w2 = (w * w).inv();
            (s4 + w2 * w2, s6 + w2 * w2 * w2)
        },
    );
    (s4 * 60.0, s6 * 140.0)
}

/// Central difference `(f(x + h) − f(x − h)) / 2h` along a complex direction.
pub fn central_difference(f: impl Fn(C64) -> C64, x: C64, h: f64) -> C64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g2_g3_at_i_match_brute_force_reference() {
        let tau = ModularPoint::from_parts(0.0, 1.0).unwrap();
        let (g2, g3) = direct_g2_g3(tau, 300);
        // independent NumPy sum at the same radius
        assert!((g2 - 189.07249864590472).norm() < 1e-8);
        assert!(g3.norm() < 1e-10);
    }
}
