use std::f64::consts::PI;

use proptest::prelude::*;
use virasoro::algebra::{bracket, coadjoint, inertia_apply, inertia_invert, pair, AlgebraElement, CocycleParams, InertiaKind, Momentum};
use virasoro::euler::NamedEquation;
use virasoro::group::{bott_cocycle, cocycle_defect, connection_cochain, euler_cocycle, flow};
use virasoro::hamiltonian::{grad_h_kdv, poisson_bracket, FunctionalGradient};
use virasoro::integrate::{simulate_from, Termination};
use virasoro::sampling;
use virasoro::verify::shift_config;
use virasoro::{Field, GridSpec, NullspacePolicy};

fn grid() -> GridSpec {
    GridSpec::new(64).unwrap()
}

fn kinds() -> impl Strategy<Value = InertiaKind> {
    prop_oneof![Just(InertiaKind::L2), Just(InertiaKind::H1), Just(InertiaKind::HomogeneousH1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn duality(seed in any::<u64>(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let g = grid();
        let mut rng = sampling::rng(seed);
        let k = sampling::band_limit(&g);
        let x = AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), 0.3);
        let y = AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), -1.1);
        let m = Momentum::new(sampling::band_limited_field(g, k, &mut rng), 2.0);
        let p = CocycleParams::new(alpha, beta);
        let d = pair(&coadjoint(&x, &m, p).unwrap(), &y).unwrap() + pair(&m, &bracket(&x, &y, p).unwrap()).unwrap();
        prop_assert!(d.abs() <= 1e-9, "{d:e}");
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear(seed in any::<u64>(), s in -2.0..2.0f64) {
        let g = grid();
        let mut rng = sampling::rng(seed);
        let k = sampling::band_limit(&g);
        let x = AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), 0.0);
        let y = AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), 0.0);
        let z = AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), 0.0);
        let p = CocycleParams::new(1.0, 0.5);
        let xy = bracket(&x, &y, p).unwrap();
        let yx = bracket(&y, &x, p).unwrap();
        prop_assert!((&xy.u + &yx.u).sup_norm() <= 1e-11 && (xy.a + yx.a).abs() <= 1e-11);
        let combo = AlgebraElement::new(&y.u + &(s * &z.u), 0.0);
        let lhs = bracket(&x, &combo, p).unwrap();
        let xz = bracket(&x, &z, p).unwrap();
        prop_assert!(lhs.u.max_abs_diff(&(&xy.u + &(s * &xz.u))) <= 1e-10);
        prop_assert!((lhs.a - xy.a - s * xz.a).abs() <= 1e-10);
    }

    #[test]
    fn inertia_is_symmetric_and_invertible(seed in any::<u64>(), kind in kinds()) {
        let g = grid();
        let mut rng = sampling::rng(seed);
        let k = sampling::band_limit(&g);
        let x = AlgebraElement::new(sampling::zero_mean_field(g, k, &mut rng), 1.0);
        let y = AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), -2.0);
        let d = pair(&inertia_apply(&x, kind), &y).unwrap() - pair(&inertia_apply(&y, kind), &x).unwrap();
        prop_assert!(d.abs() <= 1e-10);
        let back = inertia_invert(&inertia_apply(&x, kind), kind, NullspacePolicy::default()).unwrap();
        prop_assert!(back.u.max_abs_diff(&x.u) <= 1e-10);
    }

    #[test]
    fn poisson_bracket_is_antisymmetric(seed in any::<u64>()) {
        let g = grid();
        let mut rng = sampling::rng(seed);
        let k = sampling::band_limit(&g);
        let f = FunctionalGradient(AlgebraElement::new(sampling::band_limited_field(g, k, &mut rng), 0.4));
        let h = grad_h_kdv(&Momentum::new(sampling::band_limited_field(g, k / 2, &mut rng), 1.0));
        prop_assert!((poisson_bracket(&f, &h).unwrap() + poisson_bracket(&h, &f).unwrap()).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn group_cocycles_close(seed in any::<u64>(), alpha in 0.1..3.0f64, shift in -4i64..4) {
        let g = GridSpec::new(128).unwrap();
        let mut rng = sampling::rng(seed);
        let f = sampling::smooth_diffeo(g, &mut rng);
        let h = sampling::smooth_diffeo(g, &mut rng);
        let k = sampling::smooth_diffeo(g, &mut rng);
        prop_assert!(cocycle_defect(bott_cocycle, &f, &h, &k).unwrap().abs() <= 1e-8);
        let chi = |a: &_, b: &_| euler_cocycle(a, b, alpha);
        prop_assert!(cocycle_defect(chi, &f, &h, &k).unwrap().abs() <= 1e-8);
        let tau = |x: &_| connection_cochain(x, 0, alpha);
        let cob = euler_cocycle(&f, &h, alpha).unwrap() + tau(&f) + tau(&h) - tau(&f.compose(&h).unwrap());
        prop_assert!(cob.abs() <= 1e-9);
        let deck = connection_cochain(&f, shift, alpha) - tau(&f) + 2.0 * PI * PI * alpha * shift as f64;
        prop_assert!(deck.abs() <= 1e-12);
    }

    #[test]
    fn flows_compose(seed in any::<u64>(), s in 0.05..0.4f64, t in 0.05..0.4f64) {
        let g = GridSpec::new(128).unwrap();
        let mut rng = sampling::rng(seed);
        let x = sampling::band_limited_field(g, 3, &mut rng).scale(0.5);
        let end = |t: f64| flow(&x, t, 2).unwrap().maps.pop().unwrap();
        let d = end(s).compose(&end(t)).unwrap().distance(&end(s + t));
        prop_assert!(d <= 1e-7, "{d:e}");
    }

    #[test]
    fn mean_and_central_coordinate_are_conserved(seed in any::<u64>(), which in 0usize..8) {
        let g = GridSpec::new(64).unwrap();
        let mut rng = sampling::rng(seed);
        let eq = NamedEquation::from_name(NamedEquation::NAMES[which], 0.8, 0.6, 1.2).unwrap();
        let v0 = sampling::band_limited_field(g, 3, &mut rng).scale(0.3);
        let traj = simulate_from(&shift_config(eq, 64, 1e-3, 0.05), &v0).unwrap();
        prop_assert_eq!(traj.status, Termination::Completed);
        let m0 = traj.conserved[0].mean;
        for (q, s) in traj.conserved.iter().zip(&traj.snapshots) {
            prop_assert!((q.mean - m0).abs() <= 1e-10);
            prop_assert_eq!(s.c, eq.central());
        }
        let times = &traj.times;
        prop_assert!(times.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn homogeneous_inversion_rejects_constants() {
    let g = grid();
    let m = Momentum::new(Field::constant(g, 1.0), 0.0);
    assert!(inertia_invert(&m, InertiaKind::HomogeneousH1, NullspacePolicy::default()).is_err());
    let r = inertia_invert(&m, InertiaKind::HomogeneousH1, NullspacePolicy::Project).unwrap();
    assert!(r.u.sup_norm() < 1e-15);
}
