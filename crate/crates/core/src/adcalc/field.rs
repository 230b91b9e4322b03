//! Fields, forms and maps on a coordinate chart.
//!
//! Evaluators are generic over [`Scalar`] so they can be run on plain reals,
//! on dual numbers (first derivatives) and on nested duals. Forms are
//! evaluators taking a point and tangent vector(s); coefficients are never
//! stored.

use crate::adcalc::dual::{lift, seed, tangent, Dual};
use crate::error::Result;
use crate::linalg::Mat;
use crate::scalar::{Real, Scalar};

pub trait ScalarField<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> S;

    fn value(&self, x: &[R]) -> R {
        self.eval(x)
    }

    /// `df_x(v)`.
    fn directional(&self, x: &[R], v: &[R]) -> R {
        self.eval(&seed(x, v)).eps
    }

    /// Coordinate gradient, one forward pass per coordinate.
    fn gradient(&self, x: &[R]) -> Vec<R> {
        let n = x.len();
        let mut e = vec![R::zero(); n];
        (0..n)
            .map(|i| {
                e[i] = R::one();
                let d = self.eval(&seed(x, &e)).eps;
                e[i] = R::zero();
                d
            })
            .collect()
    }
}

pub trait VectorField<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S>;

    fn value(&self, x: &[R]) -> Vec<R> {
        self.eval(x)
    }

    /// `(X(x), DX_x · v)`.
    fn jvp(&self, x: &[R], v: &[R]) -> (Vec<R>, Vec<R>) {
        let out = self.eval(&seed(x, v));
        (out.iter().map(|d| d.re).collect(), tangent(&out))
    }

    fn jacobian(&self, x: &[R]) -> Mat<R> {
        let n = x.len();
        let mut e = vec![R::zero(); n];
        let cols: Vec<Vec<R>> = (0..n)
            .map(|i| {
                e[i] = R::one();
                let c = self.jvp(x, &e).1;
                e[i] = R::zero();
                c
            })
            .collect();
        Mat::from_columns(&cols)
    }
}

/// A `[t0, t1]`-parametric vector field.
pub trait TimeDependentField<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn eval<S: Scalar<Real = R>>(&self, x: &[S], t: R) -> Vec<S>;

    /// Domain monitor called by the integrator on every stage. Fields with a
    /// singular locus report it here instead of returning garbage.
    fn check(&self, _x: &[R], _t: R) -> Result<()> {
        Ok(())
    }
}

pub trait OneForm<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// `ω_x(v)`, linear in `v`.
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S;

    /// Whether the form is asserted closed (`dω = 0`).
    fn is_closed(&self) -> bool {
        false
    }

    fn apply(&self, x: &[R], v: &[R]) -> R {
        self.eval(x, v)
    }

    /// Coefficients `ω_x(∂_i)`.
    fn coefficients(&self, x: &[R]) -> Vec<R> {
        let n = x.len();
        let mut e = vec![R::zero(); n];
        (0..n)
            .map(|i| {
                e[i] = R::one();
                let c = self.eval(x, &e);
                e[i] = R::zero();
                c
            })
            .collect()
    }
}

pub trait TwoForm<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// `ω_x(u, v)`, bilinear and antisymmetric.
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], u: &[S], v: &[S]) -> S;

    fn apply(&self, x: &[R], u: &[R], v: &[R]) -> R {
        self.eval(x, u, v)
    }
}

/// A smooth map between charts, given by a generic evaluator.
pub trait SmoothMap<R: Real>: Send + Sync {
    fn source_dim(&self) -> usize;
    fn target_dim(&self) -> usize;

    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S>;

    fn jacobian_ad(&self, x: &[R]) -> Mat<R> {
        let n = x.len();
        let mut e = vec![R::zero(); n];
        let cols: Vec<Vec<R>> = (0..n)
            .map(|i| {
                e[i] = R::one();
                let c = tangent(&self.eval(&seed(x, &e)));
                e[i] = R::zero();
                c
            })
            .collect();
        Mat::from_columns(&cols)
    }
}

/// Anything that can produce an image point together with its Jacobian,
/// including maps defined by flows. Object safe.
pub trait MapWithJacobian<R: Real>: Send + Sync {
    fn apply(&self, x: &[R]) -> Result<(Vec<R>, Mat<R>)>;
}

/// Wraps a [`SmoothMap`] as a [`MapWithJacobian`] using forward-mode AD.
pub struct AdMap<M>(pub M);

impl<R: Real, M: SmoothMap<R>> MapWithJacobian<R> for AdMap<M> {
    fn apply(&self, x: &[R]) -> Result<(Vec<R>, Mat<R>)> {
        Ok((self.0.eval(x), self.0.jacobian_ad(x)))
    }
}

pub struct IdentityMap(pub usize);

impl<R: Real> MapWithJacobian<R> for IdentityMap {
    fn apply(&self, x: &[R]) -> Result<(Vec<R>, Mat<R>)> {
        Ok((x.to_vec(), Mat::identity(self.0)))
    }
}

/// Freezes the time argument of a [`TimeDependentField`].
pub struct AtTime<'a, F, R> {
    pub field: &'a F,
    pub t: R,
}

impl<R: Real, F: TimeDependentField<R>> VectorField<R> for AtTime<'_, F, R> {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        self.field.eval(x, self.t)
    }
}

/// Time-independent field seen as a time-dependent one.
pub struct Autonomous<F>(pub F);

impl<R: Real, F: VectorField<R>> TimeDependentField<R> for Autonomous<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], _t: R) -> Vec<S> {
        self.0.eval(x)
    }
}

/// `-X_t`, used to run a parametric flow with the time parameter decreasing.
pub struct Negated<F>(pub F);

impl<R: Real, F: TimeDependentField<R>> TimeDependentField<R> for Negated<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], t: R) -> Vec<S> {
        self.0.eval(x, t).into_iter().map(|v| -v).collect()
    }
    fn check(&self, x: &[R], t: R) -> Result<()> {
        self.0.check(x, t)
    }
}

/// Constant-coefficient vector field (e.g. `∂_θ`).
pub struct ConstantField<R>(pub Vec<R>);

impl<R: Real> VectorField<R> for ConstantField<R> {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn eval<S: Scalar<Real = R>>(&self, _x: &[S]) -> Vec<S> {
        lift(&self.0)
    }
}

/// Linear vector field `x ↦ A x`.
pub struct LinearField<R>(pub Mat<R>);

impl<R: Real> VectorField<R> for LinearField<R> {
    fn dim(&self) -> usize {
        self.0.rows()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        (0..self.0.rows())
            .map(|i| self.0.row(i).iter().zip(x).map(|(&a, &xi)| xi.scale(a)).sum())
            .collect()
    }
}

/// Exterior derivative of a scalar field, as a one-form.
pub struct Differential<F>(pub F);

impl<R: Real, F: ScalarField<R>> OneForm<R> for Differential<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        self.0.eval(&seed(x, v)).eps
    }
    fn is_closed(&self) -> bool {
        true
    }
}

/// `ι_X dω` evaluated as a one-form, for checking Liouville identities.
pub struct ContractedDifferential<'a, W, X> {
    pub form: &'a W,
    pub field: &'a X,
}

impl<R: Real, W: OneForm<R>, X: VectorField<R>> OneForm<R> for ContractedDifferential<'_, W, X> {
    fn dim(&self) -> usize {
        self.form.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        let xv = self.field.eval(x);
        d_oneform_generic(self.form, x, &xv, v)
    }
}

/// `dω_x(u, v)` for constant-coefficient `u, v`, at any scalar level.
pub fn d_oneform_generic<R: Real, S: Scalar<Real = R>, W: OneForm<R>>(form: &W, x: &[S], u: &[S], v: &[S]) -> S {
    let lv: Vec<Dual<S>> = v.iter().map(|&a| Dual::constant(a)).collect();
    let lu: Vec<Dual<S>> = u.iter().map(|&a| Dual::constant(a)).collect();
    let du_wv = form.eval(&seed(x, u), &lv).eps;
    let dv_wu = form.eval(&seed(x, v), &lu).eps;
    du_wv - dv_wu
}

/// Exterior derivative of a one-form as a two-form.
pub struct ExteriorDerivative<W>(pub W);

impl<R: Real, W: OneForm<R>> TwoForm<R> for ExteriorDerivative<W> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], u: &[S], v: &[S]) -> S {
        d_oneform_generic(&self.0, x, u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic;
    impl ScalarField<f64> for Quadratic {
        fn dim(&self) -> usize {
            2
        }
        fn eval<S: Scalar<Real = f64>>(&self, x: &[S]) -> S {
            x[0] * x[0] * x[1] + x[1].sin()
        }
    }

    #[test]
    fn gradient_of_polynomial() {
        let g = Quadratic.gradient(&[1.5, 0.3]);
        assert!((g[0] - 2.0 * 1.5 * 0.3).abs() < 1e-15);
        assert!((g[1] - (1.5 * 1.5 + 0.3_f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn linear_field_jacobian_is_matrix() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]);
        let j = LinearField(a.clone()).jacobian(&[0.2, -0.7]);
        assert_eq!(j, a);
    }

    #[test]
    fn differential_is_closed() {
        let w = ExteriorDerivative(Differential(Quadratic));
        let v = w.apply(&[0.4, -1.1], &[1.0, 0.3], &[-0.2, 2.0]);
        assert!(v.abs() < 1e-14);
        assert!(Differential(Quadratic).is_closed());
    }
}
