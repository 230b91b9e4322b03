//! Flow maps against finite differences, the group law of `Ψ_c`, and
//! convergence under tolerance tightening.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use contactkit::adcalc::field::MapWithJacobian;
use contactkit::adcalc::level_set::level_set_frame;
use contactkit::adcalc::ChartPoint;
use contactkit::flows::{conformality_between, double_equiv_field, double_equivalence_flow, psi_c, DoubleEquivMap, FlowOptions, PsiC, Tolerances};
use contactkit::linalg::norm;
use contactkit::weinstein::sampling::sample_surface_point;
use contactkit::weinstein::{cutoff_equation, double, make_model, CutoffSpec, DoubledSpace, ModelKind, RegularEquation};

fn space(torus: bool, n: usize) -> DoubledSpace<f64> {
    let kind = if torus { ModelKind::Torus } else { ModelKind::Flat };
    let m = make_model(kind, n).unwrap();
    double(&m, cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap())).unwrap()
}

fn surface_point(ds: &DoubledSpace<f64>, seed: u64) -> ChartPoint<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ChartPoint::new(ds.chart(), sample_surface_point(ds, &mut rng)).unwrap()
}

fn tight() -> FlowOptions<f64> {
    FlowOptions::with_tol(Tolerances::new(1e-12, 1e-14))
}

/// Central difference of `map` along `v`, with angle differences wrapped.
fn fd_column(ds: &DoubledSpace<f64>, map: &dyn MapWithJacobian<f64>, x: &[f64], v: &[f64], h: f64) -> Vec<f64> {
    let at = |s: f64| {
        let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + s * h * b).collect();
        map.apply(&y).unwrap().0
    };
    let (p, m) = (at(1.0), at(-1.0));
    ds.chart().difference(&m, &p).iter().map(|d| d / (2.0 * h)).collect()
}

fn assert_jacobian_matches(ds: &DoubledSpace<f64>, map: &dyn MapWithJacobian<f64>, p: &ChartPoint<f64>) {
    let (_, jac) = map.apply(p.coords()).unwrap();
    // tangent directions only: the maps are defined on the level set
    for v in level_set_frame(&ds.f_d_field(), p, 1e-8).unwrap() {
        let got = jac.mul_vec(&v);
        let oracle = fd_column(ds, map, p.coords(), &v, 1e-5);
        let err: Vec<f64> = got.iter().zip(&oracle).map(|(a, b)| a - b).collect();
        assert!(norm(&err) < 1e-6 * (1.0 + norm(&got)), "{got:?} vs {oracle:?}");
    }
}

#[test]
fn gray_deformed_rotation_jacobian_matches_finite_differences() {
    for (torus, n) in [(false, 1), (false, 2), (true, 1)] {
        let ds = space(torus, n);
        let map = PsiC { ds: &ds, k: 1, opts: tight(), surface_tol: 1e-4 };
        for seed in 0..4 {
            assert_jacobian_matches(&ds, &map, &surface_point(&ds, seed));
        }
    }
}

#[test]
fn double_equivalence_jacobian_matches_finite_differences() {
    let ds = space(false, 1);
    let f0 = RegularEquation::shifted(ds.model());
    let field = double_equiv_field(&f0, ds.equation(), &ds);
    let map = DoubleEquivMap { field: &field, opts: tight() };
    for seed in 0..4 {
        assert_jacobian_matches(&ds, &map, &surface_point(&ds, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn iterates_compose(seed in any::<u64>(), torus in any::<bool>()) {
        let ds = space(torus, 1);
        let p = surface_point(&ds, seed);
        let opts = tight();
        let two = psi_c(&ds, &p, 2, &opts, 1e-8).unwrap();
        let one = psi_c(&ds, &p, 1, &opts, 1e-8).unwrap();
        let again = psi_c(&ds, &one.endpoint, 1, &opts, 1e-8).unwrap();
        prop_assert!(two.endpoint.distance(&again.endpoint) < 1e-9);
        let chained = again.jacobian.mul(&one.jacobian);
        let diff = (0..ds.dim()).flat_map(|i| (0..ds.dim()).map(move |j| (i, j))).map(|(i, j)| (chained[(i, j)] - two.jacobian[(i, j)]).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-7, "{diff}");
    }

    #[test]
    fn conformality_does_not_depend_on_the_basis(seed in any::<u64>(), basis in any::<u64>()) {
        let ds = space(false, 1);
        let p = surface_point(&ds, seed);
        let map = PsiC { ds: &ds, k: 1, opts: FlowOptions::default(), surface_tol: 1e-8 };
        let a = conformality_between(&map, &ds, &ds, &p, 1e-8, None).unwrap();
        let b = conformality_between(&map, &ds, &ds, &p, 1e-8, Some(basis)).unwrap();
        prop_assert!(a.residual < 1e-6 && b.residual < 1e-6);
        prop_assert!(a.factor > 0.0);
        prop_assert!((a.factor - b.factor).abs() < 1e-6 * a.factor);
    }
}

#[test]
fn endpoints_converge_as_tolerances_tighten() {
    let ds = space(false, 2);
    let p = surface_point(&ds, 11);
    let f0 = RegularEquation::shifted(ds.model());
    let field = double_equiv_field(&f0, ds.equation(), &ds);
    let target = ds.with_equation(f0.clone());
    let reference = psi_c(&ds, &p, 1, &FlowOptions::with_tol(Tolerances::new(1e-13, 1e-15)), 1e-8).unwrap();
    let mut last = f64::INFINITY;
    let mut previous: Option<(ChartPoint<f64>, f64)> = None;
    for factor in [1.0, 10.0, 100.0] {
        let opts = FlowOptions::with_tol(Tolerances::default().tightened(factor));
        let r = psi_c(&ds, &p, 1, &opts, 1e-8).unwrap();
        let err = r.endpoint.distance(&reference.endpoint);
        assert!(err <= last.max(1e-13), "error {err} after tightening by {factor}");
        last = err;
        if let Some((q, rel)) = &previous {
            let moved = r.endpoint.distance(q);
            assert!(moved < 10.0 * rel * (1.0 + norm(q.coords())), "moved {moved} after tightening by {factor}");
        }
        previous = Some((r.endpoint.clone(), opts.tol.rel));
        let landed = double_equivalence_flow(&field, &p, &opts).unwrap();
        assert!(target.f_d(landed.endpoint.coords()).abs() < 1e-8);
    }
    assert!(last < 1e-9);
}
