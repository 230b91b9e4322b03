//! Pointwise exterior calculus on [`ChartPoint`]s.

use crate::adcalc::chart::{ChartPoint, TangentVector};
use crate::adcalc::dual::{constants, seed, Dual};
use crate::adcalc::field::{d_oneform_generic, MapWithJacobian, OneForm, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A covector at a base point, in the coordinate dual basis.
#[derive(Clone, Debug)]
pub struct Covector<R> {
    base: ChartPoint<R>,
    components: Vec<R>,
}

impl<R: Real> Covector<R> {
    pub fn base(&self) -> &ChartPoint<R> {
        &self.base
    }

    pub fn components(&self) -> &[R] {
        &self.components
    }

    pub fn apply(&self, u: &TangentVector<R>) -> Result<R> {
        same_base(&self.base, u)?;
        Ok(crate::linalg::dot(&self.components, u.components()))
    }
}

fn same_base<R: Real>(p: &ChartPoint<R>, u: &TangentVector<R>) -> Result<()> {
    if p.chart() == u.base().chart() && p.coords() == u.base().coords() {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

/// Fails with the name of the first coordinate whose value is not finite.
pub(crate) fn finite_or_err<R: Real>(p: &ChartPoint<R>, values: &[R], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => {
            let coordinate = if values.len() == p.dim() { p.chart().name(i).to_owned() } else { format!("#{i}") };
            Err(Error::NonFinite { what: what.to_owned(), coordinate })
        }
    }
}

fn finite_scalar<R: Real>(p: &ChartPoint<R>, v: R, dir: &TangentVector<R>, what: &str) -> Result<R> {
    if v.is_finite() {
        return Ok(v);
    }
    // name the first coordinate the direction actually moves
    let i = dir.components().iter().position(|c| !c.is_zero()).unwrap_or(0);
    Err(Error::NonFinite { what: what.to_owned(), coordinate: p.chart().name(i).to_owned() })
}

pub fn exterior_derivative<R: Real, F: ScalarField<R>>(field: &F, p: &ChartPoint<R>) -> Result<Covector<R>> {
    check_dim(p, field.dim())?;
    let g = field.gradient(p.coords());
    finite_or_err(p, &g, "exterior derivative")?;
    Ok(Covector { base: p.clone(), components: g })
}

pub fn d_oneform<R: Real, W: OneForm<R>>(form: &W, p: &ChartPoint<R>, u: &TangentVector<R>, v: &TangentVector<R>) -> Result<R> {
    check_dim(p, form.dim())?;
    same_base(p, u)?;
    same_base(p, v)?;
    let val = d_oneform_generic(form, p.coords(), u.components(), v.components());
    finite_scalar(p, val, u, "d of one-form")
}

/// `(ι_X dω + d(ω(X)))(u)`.
pub fn lie_derivative_oneform<R: Real, W: OneForm<R>, X: VectorField<R>>(
    form: &W,
    field: &X,
    p: &ChartPoint<R>,
    u: &TangentVector<R>,
) -> Result<R> {
    check_dim(p, form.dim())?;
    same_base(p, u)?;
    let x = p.coords();
    let xv = field.value(x);
    finite_or_err(p, &xv, "vector field")?;
    let contracted = d_oneform_generic(form, x, &xv, u.components());
    let xs = seed(x, u.components());
    let xd: Vec<Dual<R>> = field.eval(&xs);
    let derivative_of_pairing = form.eval(&xs, &xd).eps;
    finite_scalar(p, contracted + derivative_of_pairing, u, "Lie derivative")
}

/// `form(map(p))(D map_p · u)`.
pub fn pullback_oneform<R: Real, W: OneForm<R>>(
    map: &dyn MapWithJacobian<R>,
    form: &W,
    p: &ChartPoint<R>,
    u: &TangentVector<R>,
) -> Result<R> {
    same_base(p, u)?;
    let (image, jac) = map.apply(p.coords())?;
    if image.len() != form.dim() {
        return Err(Error::Dimension { expected: form.dim(), found: image.len() });
    }
    let pushed = jac.mul_vec(u.components());
    finite_or_err(p, &pushed, "pushed-forward vector")?;
    let val = form.apply(&image, &pushed);
    finite_scalar(p, val, u, "pullback")
}

/// Lifts a real point to constant duals; convenience for nested evaluations.
pub fn lift_point<R: Real>(x: &[R]) -> Vec<Dual<R>> {
    constants(x)
}

fn check_dim<R: Real>(p: &ChartPoint<R>, dim: usize) -> Result<()> {
    if p.dim() == dim {
        Ok(())
    } else {
        Err(Error::Dimension { expected: dim, found: p.dim() })
    }
}
