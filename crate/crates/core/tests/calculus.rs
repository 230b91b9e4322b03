//! Property tests of the differential-calculus layer against independent
//! finite-difference oracles.

use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use contactkit::adcalc::exterior::{d_oneform, pullback_oneform};
use contactkit::adcalc::field::{Differential, MapWithJacobian, OneForm, ScalarField};
use contactkit::adcalc::{ChartPoint, TangentVector};
use contactkit::flows::PsiRotation;
use contactkit::linalg::Mat;
use contactkit::weinstein::sampling::{random_vector, sample_ambient_point};
use contactkit::weinstein::{cutoff_equation, double, make_model, CutoffSpec, DoubledSpace, ModelKind};
use contactkit::Result;

fn space(torus: bool, n: usize) -> DoubledSpace<f64> {
    let kind = if torus { ModelKind::Torus } else { ModelKind::Flat };
    let m = make_model(kind, n).unwrap();
    double(&m, cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap())).unwrap()
}

fn point_and_vectors(ds: &DoubledSpace<f64>, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = sample_ambient_point(ds, &mut rng);
    let u = random_vector(ds.dim(), &mut rng);
    let v = random_vector(ds.dim(), &mut rng);
    (x, u, v)
}

fn shifted(x: &[f64], v: &[f64], h: f64) -> Vec<f64> {
    x.iter().zip(v).map(|(a, b)| a + h * b).collect()
}

/// Fourth-order central difference of `g` along `v`.
fn fd(g: impl Fn(&[f64]) -> f64, x: &[f64], v: &[f64], h: f64) -> f64 {
    let at = |s: f64| g(&shifted(x, v, s * h));
    (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn directional_derivatives_match_finite_differences(seed in any::<u64>(), torus in any::<bool>(), n in 1usize..3) {
        let ds = space(torus, n);
        let (x, u, _) = point_and_vectors(&ds, seed);
        let fdf = ds.f_d_field();
        prop_assert!(close(fdf.directional(&x, &u), fd(|y| ds.f_d(y), &x, &u, 1e-4), 1e-6));
        let psi = ds.psi_d_field();
        prop_assert!(close(psi.directional(&x, &u), fd(|y| ds.psi_d(y), &x, &u, 1e-4), 1e-6));
        let h = ds.h_field();
        prop_assert!(close(h.directional(&x, &u), fd(|y| ds.h(y), &x, &u, 1e-4), 1e-6));
    }

    #[test]
    fn exterior_derivative_of_liouville_form_matches_finite_differences(seed in any::<u64>(), torus in any::<bool>()) {
        // constant u, v: dω(u, v) = u(ω(v)) − v(ω(u))
        let ds = space(torus, 1);
        let (x, u, v) = point_and_vectors(&ds, seed);
        let w = ds.lambda_d_form();
        let p = ChartPoint::new(ds.chart(), x.clone()).unwrap();
        let got = d_oneform(&w, &p, &TangentVector::new(&p, u.clone()).unwrap(), &TangentVector::new(&p, v.clone()).unwrap()).unwrap();
        let oracle = fd(|y| w.apply(y, &v), &x, &u, 1e-4) - fd(|y| w.apply(y, &u), &x, &v, 1e-4);
        prop_assert!(close(got, oracle, 1e-6), "{got} vs {oracle}");
    }

    #[test]
    fn exact_forms_are_closed(seed in any::<u64>(), torus in any::<bool>(), n in 1usize..3) {
        let ds = space(torus, n);
        let (x, u, v) = point_and_vectors(&ds, seed);
        let p = ChartPoint::new(ds.chart(), x).unwrap();
        let (u, v) = (TangentVector::new(&p, u).unwrap(), TangentVector::new(&p, v).unwrap());
        for val in [
            d_oneform(&Differential(ds.f_d_field()), &p, &u, &v).unwrap(),
            d_oneform(&Differential(ds.psi_d_field()), &p, &u, &v).unwrap(),
            d_oneform(&Differential(ds.h_field()), &p, &u, &v).unwrap(),
        ] {
            prop_assert!(val.abs() < 1e-10, "{val}");
        }
    }

    #[test]
    fn pullback_is_functorial(seed in any::<u64>(), torus in any::<bool>()) {
        let ds = space(torus, 1);
        let (x, u, _) = point_and_vectors(&ds, seed);
        let psi = PsiRotation(&ds);
        let twice = Composite(&psi, &psi);
        let w = ds.lambda_d_form();
        let p = ChartPoint::new(ds.chart(), x.clone()).unwrap();
        let direct = pullback_oneform(&twice, &w, &p, &TangentVector::new(&p, u.clone()).unwrap()).unwrap();
        let (y, j) = psi.apply(&x).unwrap();
        let q = ChartPoint::new(ds.chart(), y).unwrap();
        let staged = pullback_oneform(&psi, &w, &q, &TangentVector::new(&q, j.mul_vec(&u)).unwrap()).unwrap();
        prop_assert!(close(direct, staged, 1e-12));
    }

    #[test]
    fn evaluators_are_periodic_in_angles(seed in any::<u64>(), torus in any::<bool>(), n in 1usize..3) {
        let ds = space(torus, n);
        let (x, u, _) = point_and_vectors(&ds, seed);
        let mask = ds.chart().periodic_mask().to_vec();
        let y: Vec<f64> = x.iter().zip(&mask).map(|(&a, &p)| if p { a + TAU } else { a }).collect();
        prop_assert!(close(ds.f_d(&x), ds.f_d(&y), 1e-14));
        prop_assert!(close(ds.h(&x), ds.h(&y), 1e-14));
        prop_assert!(close(ds.lambda_d(&x, &u), ds.lambda_d(&y, &u), 1e-14));
        let mut r = y.clone();
        ds.chart().reduce(&mut r);
        let pr = ChartPoint::new(ds.chart(), r).unwrap();
        prop_assert!(pr.approx_eq(&ChartPoint::new(ds.chart(), x.clone()).unwrap(), 1e-12));
    }
}

/// `second ∘ first` with the chain rule.
struct Composite<'a>(&'a dyn MapWithJacobian<f64>, &'a dyn MapWithJacobian<f64>);

impl MapWithJacobian<f64> for Composite<'_> {
    fn apply(&self, x: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
        let (y, a) = self.0.apply(x)?;
        let (z, b) = self.1.apply(&y)?;
        Ok((z, b.mul(&a)))
    }
}
