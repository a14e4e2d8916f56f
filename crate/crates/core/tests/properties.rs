//! Property tests for the invariants of the public API.

use proptest::prelude::*;

use rho_maximal::dini::{dini_integral, DiniValue};
use rho_maximal::domain::{
    parse_raw_values, write_raw_values, BoundaryPolicy, Cube, CubeFamily, Domain, SampledFunction,
};
use rho_maximal::maximal::{hl_maximal, orlicz_maximal};
use rho_maximal::orlicz::luxemburg_average;
use rho_maximal::radius::{critical_covering, CriticalRadius};
use rho_maximal::weights::{a1_rho_constant, ap_rho_constant};
use rho_maximal::young::{GrowthFunction, YoungFunction};

fn dom1() -> Domain {
    Domain::new(1, 4.0, 32).unwrap()
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..5.0f64], len)
}

fn weight_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..20.0f64, len)
}

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.0..4.0f64).prop_map(|p| YoungFunction::power(p).unwrap()),
        (1.0..3.0f64, 0.0..2.0f64).prop_map(|(p, q)| YoungFunction::plog(p, q).unwrap()),
    ]
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn young_inverse_round_trips(phi in young(), t in 1e-3..1e3f64) {
        prop_assert!(rel_close(phi.at(phi.inverse(t).unwrap()), t, 1e-9));
    }

    #[test]
    fn young_inequality(p in 1.2..4.0f64, s in 1e-2..1e2f64, t in 1e-2..1e2f64) {
        let phi = YoungFunction::power(p).unwrap();
        let dual = phi.complementary().unwrap();
        prop_assert!(s * t <= (phi.at(s) + dual.at(t)) * (1.0 + 1e-12));
    }

    #[test]
    fn luxemburg_is_homogeneous_and_bounded(
        v in values(32), c in 0.1..10.0f64, phi in young(), center in -3.0..3.0f64, half in 0.2..1.0f64,
    ) {
        let f = SampledFunction::from_values(dom1(), v).unwrap();
        let q = Cube::new(&[center], half).unwrap();
        let a = luxemburg_average(&f, &q, &phi);
        let b = luxemburg_average(&f.scale(c), &q, &phi);
        prop_assert!(rel_close(b, c * a, 1e-8), "{b} vs {}", c * a);
        // Never above the maximum when Φ(1) = 1.
        if (phi.at(1.0) - 1.0).abs() < 1e-12 {
            prop_assert!(a <= f.max_abs() * (1.0 + 1e-8));
        }
    }

    #[test]
    fn hl_is_sublinear_and_homogeneous(u in values(32), v in values(32), c in 0.1..10.0f64, sigma in 0.0..4.0f64) {
        let dom = dom1();
        let rho = CriticalRadius::inverse_power(1.0).unwrap();
        let fam = CubeFamily::new(dom, BoundaryPolicy::ZeroExtend);
        let f = SampledFunction::from_values(dom, u).unwrap();
        let g = SampledFunction::from_values(dom, v).unwrap();
        let mf = hl_maximal(&f, sigma, &rho, &fam).unwrap();
        let mg = hl_maximal(&g, sigma, &rho, &fam).unwrap();
        let sum = hl_maximal(&f.zip_with(&g, |a, b| a + b).unwrap(), sigma, &rho, &fam).unwrap();
        let scaled = hl_maximal(&f.scale(c), sigma, &rho, &fam).unwrap();
        for i in 0..dom.len() {
            prop_assert!(sum.values()[i] <= (mf.values()[i] + mg.values()[i]) * (1.0 + 1e-12));
            prop_assert!(rel_close(scaled.values()[i], c * mf.values()[i], 1e-12));
        }
    }

    #[test]
    fn damping_is_monotone_and_jensen_orders_operators(
        u in values(32), s1 in 0.0..3.0f64, ds in 0.0..3.0f64, p in 1.0..3.0f64,
    ) {
        let dom = dom1();
        let rho = CriticalRadius::inverse_power(1.0).unwrap();
        let fam = CubeFamily::new(dom, BoundaryPolicy::ZeroExtend);
        let f = SampledFunction::from_values(dom, u).unwrap();
        let weak = hl_maximal(&f, s1, &rho, &fam).unwrap();
        let strong = hl_maximal(&f, s1 + ds, &rho, &fam).unwrap();
        let orlicz = orlicz_maximal(&f, &YoungFunction::power(p).unwrap(), s1, &rho, &fam).unwrap();
        for i in 0..dom.len() {
            prop_assert!(strong.values()[i] <= weak.values()[i] * (1.0 + 1e-12));
            prop_assert!(weak.values()[i] <= orlicz.values()[i] * (1.0 + 1e-8));
        }
    }

    #[test]
    fn weight_constants_are_scale_invariant(w in weight_values(32), c in 0.01..100.0f64, theta in 0.0..4.0f64) {
        let dom = dom1();
        let rho = CriticalRadius::inverse_power(1.0).unwrap();
        let fam = CubeFamily::new(dom, BoundaryPolicy::Inside);
        let w = SampledFunction::from_values(dom, w).unwrap();
        let a = ap_rho_constant(&w, 2.0, theta, &rho, &fam).unwrap().constant;
        let b = ap_rho_constant(&w.scale(c), 2.0, theta, &rho, &fam).unwrap().constant;
        prop_assert!(rel_close(a, b, 1e-9));
        let a1 = a1_rho_constant(&w, theta, &rho, &fam).unwrap().constant;
        let b1 = a1_rho_constant(&w.scale(c), theta, &rho, &fam).unwrap().constant;
        prop_assert!(rel_close(a1, b1, 1e-9));
    }

    #[test]
    fn weight_constants_decrease_in_theta_and_p(
        w in weight_values(32), t1 in 0.0..3.0f64, dt in 0.0..3.0f64, p1 in 1.1..3.0f64, dp in 0.0..2.0f64,
    ) {
        let dom = dom1();
        let rho = CriticalRadius::inverse_power(1.0).unwrap();
        let fam = CubeFamily::new(dom, BoundaryPolicy::Inside);
        let w = SampledFunction::from_values(dom, w).unwrap();
        let c = |p: f64, t: f64| ap_rho_constant(&w, p, t, &rho, &fam).unwrap().constant;
        prop_assert!(c(p1, t1 + dt) <= c(p1, t1) * (1.0 + 1e-12));
        // A_{p1} ⊂ A_{p2} for p1 <= p2, cube by cube.
        prop_assert!(c(p1 + dp, t1) <= c(p1, t1) * (1.0 + 1e-9));
        let a1 = a1_rho_constant(&w, t1, &rho, &fam).unwrap().constant;
        prop_assert!(c(p1, t1) <= a1 * (1.0 + 1e-9));
    }

    #[test]
    fn dini_integral_scales_for_power_pairs(e in 1.0..3.0f64, t in 0.1..10.0f64, k in 1.5..4.0f64) {
        // a(s) = s^e, η = t: I(t) = t^e / e exactly, so I(kt) = k^e I(t).
        let a = GrowthFunction::power(1.0, e).unwrap();
        let eta = YoungFunction::power(1.0).unwrap();
        let DiniValue::Finite(i1) = dini_integral(&a, &eta, t).unwrap() else { panic!("diverged") };
        let DiniValue::Finite(i2) = dini_integral(&a, &eta, k * t).unwrap() else { panic!("diverged") };
        prop_assert!(rel_close(i1, t.powf(e) / e, 1e-6), "{i1} vs {}", t.powf(e) / e);
        prop_assert!(rel_close(i2, k.powf(e) * i1, 1e-6));
    }

    #[test]
    fn raw_values_round_trip(v in prop::collection::vec(-1e6..1e6f64, 16)) {
        let f = SampledFunction::from_values(Domain::new(1, 2.5, 16).unwrap(), v).unwrap();
        let g = parse_raw_values(&write_raw_values(&f)).unwrap();
        prop_assert_eq!(f.domain(), g.domain());
        prop_assert_eq!(f.values(), g.values());
    }

    #[test]
    fn raw_parser_never_panics(text in "[dLN0-9 .e\\-\n]{0,64}") {
        let _ = parse_raw_values(&text);
    }

    #[test]
    fn coverings_cover(c in 0.2..3.0f64, n in 3u32..6) {
        let rho = CriticalRadius::inverse_power(c).unwrap();
        let dom = Domain::new(2, 4.0, 1 << n).unwrap();
        prop_assert!(critical_covering(&rho, &dom).covers_all());
    }
}
