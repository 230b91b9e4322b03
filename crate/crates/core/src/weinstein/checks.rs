//! Pointwise structural checks. Each returns a residual (or a value whose
//! sign matters); callers decide thresholds.

use crate::adcalc::chart::ChartPoint;
use crate::adcalc::field::{d_oneform_generic, OneForm, ScalarField, VectorField};
use crate::adcalc::level_set::level_set_frame;
use crate::error::{Error, Result};
use crate::linalg::{norm, pfaffian, Mat};
use crate::scalar::Real;
use crate::weinstein::double::DoubledSpace;
use crate::weinstein::model::WeinsteinModel;

fn basis<R: Real>(dim: usize) -> impl Iterator<Item = Vec<R>> {
    (0..dim).map(move |i| {
        let mut e = vec![R::zero(); dim];
        e[i] = R::one();
        e
    })
}

/// `max_i |dω(X, ∂_i) − ω(∂_i)|`, the Liouville identity `ι_X dω = ω`.
pub fn liouville_residual<R: Real, W: OneForm<R>, X: VectorField<R>>(form: &W, field: &X, x: &[R]) -> R {
    let xv = field.value(x);
    basis::<R>(x.len()).fold(R::zero(), |m, e| {
        let lhs = d_oneform_generic(form, x, &xv, &e);
        m.max((lhs - form.apply(x, &e)).abs())
    })
}

/// `max_i |J²∂_i + ∂_i|`.
pub fn j_squared_residual<R: Real>(model: &WeinsteinModel<R>) -> R {
    basis::<R>(model.dim()).fold(R::zero(), |m, e| {
        let jj = model.j_apply(&model.j_apply(&e));
        jj.iter().zip(&e).fold(m, |m, (&a, &b)| m.max((a + b).abs()))
    })
}

/// `max_i |Jᴰ²∂_i + ∂_i|`.
pub fn j_squared_residual_doubled<R: Real>(ds: &DoubledSpace<R>) -> R {
    basis::<R>(ds.dim()).fold(R::zero(), |m, e| {
        let jj = ds.j_d(&ds.j_d(&e));
        jj.iter().zip(&e).fold(m, |m, (&a, &b)| m.max((a + b).abs()))
    })
}

/// `dλ(u, Ju)`; positive for `u ≠ 0` when `J` is tamed.
pub fn taming_value<R: Real>(model: &WeinsteinModel<R>, x: &[R], u: &[R]) -> R {
    let ju = model.j_apply(u);
    d_oneform_generic(&model.lambda_form(), x, u, &ju)
}

/// `max_i |λ(∂_i) − κ·(−dψ(J∂_i))|`.
pub fn almost_stein_check<R: Real>(model: &WeinsteinModel<R>, x: &[R]) -> R {
    let psi = model.exhaustion();
    basis::<R>(model.dim()).fold(R::zero(), |m, e| {
        let dc = psi.directional(x, &model.j_apply(&e));
        let rhs = -model.kappa() * dc;
        m.max((model.lambda(x, &e) - rhs).abs())
    })
}

/// `|dh(Zᴰ) − h|` for the rotation Hamiltonian.
pub fn h_homogeneity_residual<R: Real>(ds: &DoubledSpace<R>, x: &[R]) -> R {
    let z = ds.z_d(x);
    (ds.h_field().directional(x, &z) - ds.h(x)).abs()
}

/// `α ∧ (dα)^m` on an oriented basis `e_1 … e_{2m+1}` of `T_x{fᴰ = 0}`,
/// computed as `m!·Pf` of the bordered matrix `[[0, a], [−a, Ω]]` with
/// `a_i = α(e_i)` and `Ω_ij = dα(e_i, e_j)`.
pub fn contact_volume_on_basis<R: Real>(ds: &DoubledSpace<R>, x: &[R], frame: &[Vec<R>]) -> Result<R> {
    let k = ds.dim() - 1;
    if frame.len() != k {
        return Err(Error::Dimension { expected: k, found: frame.len() });
    }
    for v in frame {
        let nv = norm(v);
        if !(nv > R::lit(1e-12)) {
            return Err(Error::DegenerateBasis { norm: nv.as_f64() });
        }
    }
    let alpha = ds.lambda_d_form();
    let mut b = Mat::<R>::zeros(k + 1, k + 1);
    for i in 0..k {
        let a = alpha.apply(x, &frame[i]);
        b[(0, i + 1)] = a;
        b[(i + 1, 0)] = -a;
        for j in i + 1..k {
            let w = d_oneform_generic(&alpha, x, &frame[i], &frame[j]);
            b[(i + 1, j + 1)] = w;
            b[(j + 1, i + 1)] = -w;
        }
    }
    let m = (k - 1) / 2;
    let factorial = (1..=m).fold(R::one(), |acc, i| acc * R::lit(i as f64));
    Ok(factorial * pfaffian(&b))
}

/// Contact volume at an on-surface point, on the canonical level-set basis.
pub fn contact_volume_check<R: Real>(ds: &DoubledSpace<R>, p: &ChartPoint<R>, on_surface_tol: R) -> Result<R> {
    let frame = level_set_frame(&ds.f_d_field(), p, on_surface_tol)?;
    contact_volume_on_basis(ds, p.coords(), &frame)
}
