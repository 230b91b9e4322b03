//! Model-level properties: the cutoff, the Liouville identities and the
//! contact condition on sampled points.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use contactkit::adcalc::field::{OneForm, TimeDependentField};
use contactkit::adcalc::ChartPoint;
use contactkit::flows::double_equiv_field;
use contactkit::weinstein::checks::{contact_volume_check, h_homogeneity_residual, liouville_residual};
use contactkit::weinstein::sampling::{random_vector, sample_ambient_point, sample_surface_point};
use contactkit::weinstein::{cutoff_equation, double, make_model, CutoffSpec, DoubledSpace, ModelKind, RegularEquation};

fn space(torus: bool, n: usize) -> DoubledSpace<f64> {
    let kind = if torus { ModelKind::Torus } else { ModelKind::Flat };
    let m = make_model(kind, n).unwrap();
    double(&m, cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap())).unwrap()
}

fn cutoff() -> CutoffSpec<f64> {
    CutoffSpec::for_model(&make_model::<f64>(ModelKind::Flat, 1).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cutoff_is_monotone_and_odd(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let c = cutoff();
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assert!(c.chi(lo) <= c.chi(hi));
        // strict wherever neither value has rounded onto a plateau
        if lo < hi && c.chi(lo) > -1.0 && c.chi(hi) < 1.0 {
            prop_assert!(c.chi(lo) < c.chi(hi), "flat between {lo} and {hi}");
        }
        prop_assert_eq!(c.chi(-x), -c.chi(x));
        prop_assert!(c.chi(x).abs() <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn liouville_identities_hold(seed in any::<u64>(), torus in any::<bool>(), n in 1usize..3, t in 0.0f64..=1.0) {
        let ds = space(torus, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_ambient_point(&ds, &mut rng);
        let m = ds.model();
        prop_assert!(liouville_residual(&m.lambda_form(), &m.liouville_field(), &x[..m.dim()]) < 1e-12);
        prop_assert!(liouville_residual(&ds.lambda_t_form(t), &ds.z_d_field(), &x) < 1e-12);
        prop_assert!(h_homogeneity_residual(&ds, &x) < 1e-12 * ds.h(&x).abs().max(1.0));
    }

    #[test]
    fn lie_derivative_matches_bracket_oracle(seed in any::<u64>(), torus in any::<bool>(), t in 0.0f64..=1.0) {
        // for constant u, [X, u] = −DX·u, so L_X ω(u) = X(ω(u)) + ω(DX·u)
        let ds = space(torus, 1);
        let f0 = RegularEquation::shifted(ds.model());
        let field = double_equiv_field(&f0, ds.equation(), &ds);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_surface_point(&ds, &mut rng);
        let u = random_vector(ds.dim(), &mut rng);
        let w = ds.lambda_d_form();
        let xf: Vec<f64> = field.eval(&x, t);
        let h = 1e-5;
        let along = |v: &[f64], s: f64| -> Vec<f64> { x.iter().zip(v).map(|(a, b)| a + s * b).collect() };
        let d_pairing = (w.apply(&along(&xf, h), &u) - w.apply(&along(&xf, -h), &u)) / (2.0 * h);
        let fp: Vec<f64> = field.eval(&along(&u, h), t);
        let fm: Vec<f64> = field.eval(&along(&u, -h), t);
        let dx_u: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let oracle = d_pairing + w.apply(&x, &dx_u);
        let predicted = field.coefficient(&x, t) * w.apply(&x, &u);
        prop_assert!((oracle - predicted).abs() < 1e-6 * (1.0 + predicted.abs()), "{oracle} vs {predicted}");
    }
}

#[test]
fn contact_volume_has_uniform_sign() {
    for (torus, n) in [(false, 1), (false, 2), (true, 1)] {
        let ds = space(torus, n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..200)
            .map(|_| {
                let p = ChartPoint::new(ds.chart(), sample_surface_point(&ds, &mut rng)).unwrap();
                contact_volume_check(&ds, &p, 1e-8).unwrap()
            })
            .collect();
        let sign = vals[0].signum();
        assert!(vals.iter().all(|v| v.signum() == sign && v.abs() > 1e-8), "torus={torus} n={n}");
    }
}

#[test]
fn surface_points_are_transverse() {
    let ds = space(false, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let x = sample_surface_point(&ds, &mut rng);
        assert!(ds.f_d(&x).abs() < 1e-10);
        assert!(ds.transversality(&x) > 0.0);
    }
}
