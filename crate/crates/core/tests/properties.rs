use ellzeta::correspondence::{form_by_name, m_inverse, m_transform};
use ellzeta::gamma::CongruenceGroup;
use ellzeta::lattice::{lattice_reduce_point, reduce_to_fundamental};
use ellzeta::weierstrass::{eta_pair, wp, zeta_w};
use ellzeta::{EvalConfig, Extended, ModularPoint, Unimodular, C64};
use proptest::prelude::*;

fn upper_half_plane() -> impl Strategy<Value = ModularPoint> {
    (-3.0..3.0f64, 0.05..3.0f64).prop_map(|(re, im)| ModularPoint::from_parts(re, im).unwrap())
}

fn fundamental() -> impl Strategy<Value = ModularPoint> {
    (-0.5..0.5f64, 0.87..2.0f64)
        .prop_filter("outside unit disc", |(re, im)| re * re + im * im >= 1.0)
        .prop_map(|(re, im)| ModularPoint::from_parts(re, im).unwrap())
}

fn sl2z() -> impl Strategy<Value = Unimodular> {
    any::<u64>().prop_map(|seed| CongruenceGroup::FULL.sample_elements(1, seed).remove(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_is_a_group_action(g in sl2z(), h in sl2z(), tau in fundamental()) {
        let lhs = (&g * &h).act(tau).tau();
        let rhs = g.act(h.act(tau)).tau();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn reduction_lands_in_fundamental_domain(tau in upper_half_plane()) {
        let (r, gamma) = reduce_to_fundamental(tau);
        let t = r.tau();
        prop_assert!(t.re >= -0.5 - 1e-12 && t.re <= 0.5 + 1e-12);
        prop_assert!(t.norm() >= 1.0 - 1e-12);
        prop_assert!((gamma.act(tau).tau() - t).norm() < 1e-12);
    }

    #[test]
    fn point_reduction_roundtrips(x in -20.0..20.0f64, y in -20.0..20.0f64, tau in fundamental()) {
        let z = C64::new(x, y);
        let (z0, m, n) = lattice_reduce_point(z, tau);
        let back = z0 + m as f64 + tau.tau() * n as f64;
        prop_assert!((back - z).norm() < 1e-10);
    }

    #[test]
    fn zeta_is_quasi_periodic(tau in fundamental(), x in -0.45..0.45f64, y in -0.45..0.45f64) {
        let cfg = EvalConfig::default();
        let z = tau.tau() * y + x;
        prop_assume!(z.norm() > 0.05);
        let eta = eta_pair(tau, &cfg);
        let at = |w: C64| zeta_w(tau, w, &cfg).unwrap();
        let s1 = at(z + 1.0) - at(z) - eta.eta1;
        let st = at(z + tau.tau()) - at(z) - eta.eta2;
        let scale = 1.0 + at(z).norm();
        prop_assert!(s1.norm() < 1e-9 * scale && st.norm() < 1e-9 * scale);
    }

    #[test]
    fn wp_is_periodic_and_even(tau in fundamental(), x in -0.45..0.45f64, y in -0.45..0.45f64) {
        let cfg = EvalConfig::default();
        let z = tau.tau() * y + x;
        prop_assume!(z.norm() > 0.05);
        let v = wp(tau, z, &cfg);
        prop_assert!(v.approx_eq(&wp(tau, z + 1.0 - tau.tau(), &cfg), 1e-9));
        prop_assert!(v.approx_eq(&wp(tau, -z, &cfg), 1e-9));
    }

    #[test]
    fn m_inverse_undoes_m_transform(tau in fundamental(), n in 3i64..=6) {
        let cfg = EvalConfig::default();
        let f = form_by_name(&format!("f_n:{n}"), &cfg).unwrap();
        let back = m_inverse(&m_transform(&f, &cfg).unwrap(), &cfg).unwrap();
        prop_assert!(f.eval(tau).approx_eq(&back.eval(tau), 1e-9));
    }

    #[test]
    fn mobius_handles_infinity(g in sl2z()) {
        let img = g.mobius(Extended::Infinity);
        let back = g.inverse().mobius(img);
        prop_assert!(back.is_infinite());
    }
}
