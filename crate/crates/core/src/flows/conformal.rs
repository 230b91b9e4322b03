//! Conformality of a map on contact planes: `G*αᴰ = g·αᴰ` with `g > 0`.

use serde::Serialize;

use crate::adcalc::chart::ChartPoint;
use crate::adcalc::field::{MapWithJacobian, OneForm};
use crate::adcalc::level_set::{tangent_basis_of_level_set, tangent_basis_of_level_set_seeded};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::scalar::Real;
use crate::weinstein::double::DoubledSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conformality<R> {
    /// Least-squares factor `g` in `G*α ≈ g α`.
    pub factor: R,
    /// `‖G*α − g α‖ / ‖G*α‖` over the level-set basis; the sine of the angle
    /// between the two covectors restricted to the surface.
    pub residual: R,
}

/// Conformality of `map` from `{fᴰ = 0}` of `source` to `{fᴰ = 0}` of
/// `target`, measured on the level-set basis at `p` (seeded basis if
/// `basis_seed` is given).
pub fn conformality_between<R: Real>(
    map: &dyn MapWithJacobian<R>,
    source: &DoubledSpace<R>,
    target: &DoubledSpace<R>,
    p: &ChartPoint<R>,
    surface_tol: R,
    basis_seed: Option<u64>,
) -> Result<Conformality<R>> {
    let field = source.f_d_field();
    let basis = match basis_seed {
        None => tangent_basis_of_level_set(&field, p, surface_tol)?,
        Some(s) => tangent_basis_of_level_set_seeded(&field, p, surface_tol, s)?,
    };
    let (image, jac) = map.apply(p.coords())?;
    let fv = target.f_d(&image);
    if !(fv.abs() < surface_tol) {
        return Err(Error::OffSurface { value: fv.as_f64(), tol: surface_tol.as_f64() });
    }
    let alpha_src = source.lambda_d_form();
    let alpha_dst = target.lambda_d_form();
    let a: Vec<R> = basis.iter().map(|e| alpha_src.apply(p.coords(), e.components())).collect();
    let b: Vec<R> = basis.iter().map(|e| alpha_dst.apply(&image, &jac.mul_vec(e.components()))).collect();
    let factor = dot(&b, &a) / dot(&a, &a);
    let diff: Vec<R> = b.iter().zip(&a).map(|(&bi, &ai)| bi - factor * ai).collect();
    let nb = norm(&b);
    let residual = if nb.is_zero() { R::one() } else { norm(&diff) / nb };
    if factor <= R::zero() {
        return Err(Error::CoorientationReversal { factor: factor.as_f64() });
    }
    Ok(Conformality { factor, residual })
}

/// [`conformality_between`] for a self-map of one doubled surface.
pub fn conformality_residual<R: Real>(map: &dyn MapWithJacobian<R>, ds: &DoubledSpace<R>, p: &ChartPoint<R>, surface_tol: R) -> Result<Conformality<R>> {
    conformality_between(map, ds, ds, p, surface_tol, None)
}
