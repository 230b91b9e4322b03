//! The time-one map of the double-equivalence field `X_t`.
//!
//! Along a solution of `ẋ = −X_t(x)` the value `f_tᴰ(x(t))` is constant, so
//! running it from `t = 1` down to `t = 0` carries `{f1ᴰ = 0}` onto
//! `{f0ᴰ = 0}`.

use crate::adcalc::chart::ChartPoint;
use crate::adcalc::field::{MapWithJacobian, Negated};
use crate::error::Result;
use crate::flows::fields::DoubleEquivField;
use crate::flows::integrator::{integrate_flow, FlowOptions, FlowResult};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Flow from `{f1ᴰ = 0}` to `{f0ᴰ = 0}`; the recorded constraint is `f_tᴰ`.
pub fn double_equivalence_flow<R: Real>(field: &DoubleEquivField<R>, p: &ChartPoint<R>, opts: &FlowOptions<R>) -> Result<FlowResult<R>> {
    let constraint = |x: &[R], t: R| field.f_t_d(x, t);
    integrate_flow(&Negated(field.clone()), p, R::one(), R::zero(), opts, Some(&constraint))
}

pub struct DoubleEquivMap<'a, R> {
    pub field: &'a DoubleEquivField<R>,
    pub opts: FlowOptions<R>,
}

impl<R: Real> MapWithJacobian<R> for DoubleEquivMap<'_, R> {
    fn apply(&self, x: &[R]) -> Result<(Vec<R>, Mat<R>)> {
        let p = ChartPoint::new(self.field.space().chart(), x.to_vec())?;
        let r = double_equivalence_flow(self.field, &p, &self.opts)?;
        Ok((r.endpoint.coords().to_vec(), r.jacobian))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::fields::double_equiv_field;
    use crate::weinstein::cutoff::{cutoff_equation, CutoffSpec, RegularEquation};
    use crate::weinstein::double::double;
    use crate::weinstein::model::make_flat_model;

    #[test]
    fn lands_on_the_shifted_double() {
        let m = make_flat_model::<f64>(1).unwrap();
        let f1 = cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap());
        let f0 = RegularEquation::shifted(&m);
        let ds = double(&m, f1.clone()).unwrap();
        let x = double_equiv_field(&f0, &f1, &ds);
        // ψ = 0.81: f1 = χ(−0.19) lies in the transition band
        let mut p: Vec<f64> = vec![0.9, 0.0, 0.0, 0.4];
        p[2] = -(-ds.f(&p)).sqrt();
        let p = ChartPoint::new(ds.chart(), p).unwrap();
        let r = double_equivalence_flow(&x, &p, &FlowOptions::default()).unwrap();
        let ds0 = ds.with_equation(f0);
        assert!(ds0.f_d(r.endpoint.coords()).abs() < 1e-9);
        assert!(r.drift < 1e-9);
    }

    #[test]
    fn equal_equations_give_identity() {
        let m = make_flat_model::<f64>(1).unwrap();
        let f = cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap());
        let ds = double(&m, f.clone()).unwrap();
        let x = double_equiv_field(&f, &f, &ds);
        let p = ChartPoint::new(ds.chart(), vec![0.2, 0.1, -1.0, 1.0]).unwrap();
        let r = double_equivalence_flow(&x, &p, &FlowOptions::default()).unwrap();
        assert_eq!(r.endpoint.coords(), p.coords());
        assert_eq!(r.jacobian, Mat::identity(4));
    }
}
