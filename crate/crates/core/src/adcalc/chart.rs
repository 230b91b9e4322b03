//! Explicit coordinate charts with periodic (angular) coordinates.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartSpec {
    names: Vec<String>,
    periodic: Vec<bool>,
}

impl ChartSpec {
    pub fn new<S: AsRef<str>>(names: &[S], periodic: &[bool]) -> Result<Arc<Self>> {
        if names.is_empty() {
            return Err(Error::Chart("dimension must be at least 1".into()));
        }
        if names.len() != periodic.len() {
            return Err(Error::Chart(format!(
                "periodic mask has length {} but chart has {} coordinates",
                periodic.len(),
                names.len()
            )));
        }
        Ok(Arc::new(ChartSpec { names: names.iter().map(|s| s.as_ref().to_owned()).collect(), periodic: periodic.to_vec() }))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn is_periodic(&self, i: usize) -> bool {
        self.periodic[i]
    }

    pub fn periodic_mask(&self) -> &[bool] {
        &self.periodic
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Reduces periodic coordinates into `[0, 2π)` in place.
    pub fn reduce<R: Real>(&self, coords: &mut [R]) {
        for (x, &p) in coords.iter_mut().zip(&self.periodic) {
            if p {
                *x = reduce_angle(*x);
            }
        }
    }

    /// Coordinate difference `b - a` with periodic entries taken as the
    /// representative in `[-π, π)`.
    pub fn difference<R: Real>(&self, a: &[R], b: &[R]) -> Vec<R> {
        a.iter()
            .zip(b)
            .zip(&self.periodic)
            .map(|((&x, &y), &p)| if p { wrap_pi(y - x) } else { y - x })
            .collect()
    }
}

pub fn reduce_angle<R: Real>(x: R) -> R {
    let tau = R::two_pi();
    let r = x % tau;
    let r = if r < R::zero() { r + tau } else { r };
    // x % tau + tau can round up to tau itself
    if r >= tau {
        R::zero()
    } else {
        r
    }
}

/// Representative of `x` modulo 2π in `[-π, π)`.
pub fn wrap_pi<R: Real>(x: R) -> R {
    let pi = R::PI();
    reduce_angle(x + pi) - pi
}

#[derive(Clone, Debug)]
pub struct ChartPoint<R> {
    chart: Arc<ChartSpec>,
    coords: Vec<R>,
}

impl<R: Real> ChartPoint<R> {
    /// Builds a point, reducing periodic coordinates. All coordinates must be finite.
    pub fn new(chart: &Arc<ChartSpec>, mut coords: Vec<R>) -> Result<Self> {
        if coords.len() != chart.dim() {
            return Err(Error::Dimension { expected: chart.dim(), found: coords.len() });
        }
        if let Some(i) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "chart point".into(), coordinate: chart.name(i).to_owned() });
        }
        chart.reduce(&mut coords);
        Ok(ChartPoint { chart: Arc::clone(chart), coords })
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub fn coords(&self) -> &[R] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Equality up to `tol`, periodic coordinates compared modulo 2π.
    pub fn approx_eq(&self, other: &ChartPoint<R>, tol: R) -> bool {
        self.chart == other.chart && self.distance(other) <= tol
    }

    /// Max-norm distance with periodic coordinates compared modulo 2π.
    pub fn distance(&self, other: &ChartPoint<R>) -> R {
        self.chart.difference(&self.coords, &other.coords).into_iter().fold(R::zero(), |m, d| m.max(d.abs()))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|x| x.as_f64()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct TangentVector<R> {
    base: ChartPoint<R>,
    components: Vec<R>,
}

impl<R: Real> TangentVector<R> {
    pub fn new(base: &ChartPoint<R>, components: Vec<R>) -> Result<Self> {
        if components.len() != base.dim() {
            return Err(Error::Dimension { expected: base.dim(), found: components.len() });
        }
        if let Some(i) = components.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "tangent vector".into(), coordinate: base.chart().name(i).to_owned() });
        }
        Ok(TangentVector { base: base.clone(), components })
    }

    /// The coordinate vector `∂_i` at `base`.
    pub fn coordinate(base: &ChartPoint<R>, i: usize) -> Self {
        let mut c = vec![R::zero(); base.dim()];
        c[i] = R::one();
        TangentVector { base: base.clone(), components: c }
    }

    pub fn base(&self) -> &ChartPoint<R> {
        &self.base
    }

    pub fn components(&self) -> &[R] {
        &self.components
    }

    fn same_base(&self, other: &TangentVector<R>) -> bool {
        self.base.chart == other.base.chart && self.base.coords == other.base.coords
    }

    pub fn try_add(&self, other: &TangentVector<R>) -> Result<Self> {
        if !self.same_base(other) {
            return Err(Error::BaseMismatch);
        }
        let c = self.components.iter().zip(&other.components).map(|(&a, &b)| a + b).collect();
        Ok(TangentVector { base: self.base.clone(), components: c })
    }

    pub fn scaled(&self, k: R) -> Self {
        TangentVector { base: self.base.clone(), components: self.components.iter().map(|&a| a * k).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn chart() -> Arc<ChartSpec> {
        ChartSpec::new(&["s", "theta"], &[false, true]).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ChartSpec::new::<&str>(&[], &[]).is_err());
        assert!(ChartSpec::new(&["x"], &[true, false]).is_err());
    }

    #[test]
    fn angles_reduced_into_range() {
        let p = ChartPoint::new(&chart(), vec![1.0, -0.5]).unwrap();
        assert!((p.coords()[1] - (TAU - 0.5)).abs() < 1e-15);
        let p = ChartPoint::new(&chart(), vec![1.0, 3.0 * TAU + 0.25]).unwrap();
        assert!((p.coords()[1] - 0.25).abs() < 1e-14);
        assert_eq!(reduce_angle(-1e-300_f64), 0.0);
        assert!(reduce_angle(TAU) < TAU);
    }

    #[test]
    fn equality_is_modulo_two_pi() {
        let a = ChartPoint::new(&chart(), vec![1.0, 1e-12]).unwrap();
        let b = ChartPoint::new(&chart(), vec![1.0, TAU - 1e-12]).unwrap();
        assert!(a.approx_eq(&b, 1e-10));
        let c = ChartPoint::new(&chart(), vec![1.0 + 1e-6, 0.0]).unwrap();
        assert!(!a.approx_eq(&c, 1e-10));
        assert!((wrap_pi(PI + 0.1) + PI - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_and_mismatched_bases() {
        assert!(matches!(ChartPoint::new(&chart(), vec![f64::NAN, 0.0]), Err(Error::NonFinite { .. })));
        let a = ChartPoint::new(&chart(), vec![0.0, 0.0]).unwrap();
        let b = ChartPoint::new(&chart(), vec![1.0, 0.0]).unwrap();
        let u = TangentVector::coordinate(&a, 0);
        let v = TangentVector::coordinate(&b, 0);
        assert!(matches!(u.try_add(&v), Err(Error::BaseMismatch)));
        let w = u.try_add(&TangentVector::coordinate(&a, 1)).unwrap().scaled(2.0);
        assert_eq!(w.components(), &[2.0, 2.0]);
    }
}
