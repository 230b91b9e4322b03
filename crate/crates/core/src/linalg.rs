//! Small dense linear algebra. Dimensions here never exceed a dozen, so
//! everything is row-major `Vec` storage with textbook algorithms.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{Num, Zero};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Num> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn map<U: Copy + Num>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<R: Real> Mat<R> {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> R {
        self.data.iter().fold(R::zero(), |m, &x| m.max(x.abs()))
    }
}

impl<R: Real> Mat<Complex<R>> {
    pub fn max_abs(&self) -> R {
        self.data.iter().fold(R::zero(), |m, x| m.max(x.cabs()))
    }
}

/// Modulus and argument of complex numbers over any [`Real`].
pub trait ComplexExt<R> {
    fn cabs(&self) -> R;
    fn carg(&self) -> R;
}

impl<R: Real> ComplexExt<R> for Complex<R> {
    fn cabs(&self) -> R {
        let (a, b) = (self.re.abs(), self.im.abs());
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return R::zero();
        }
        let q = small / big;
        big * (R::one() + q * q).sqrt()
    }

    fn carg(&self) -> R {
        self.im.atan2(self.re)
    }
}

pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).fold(R::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<R: Real>(a: &[R]) -> R {
    dot(a, a).sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<R: Real>(m: &Mat<R>) -> R {
    assert_eq!(m.rows(), m.cols(), "square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut d = R::one();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().partial_cmp(&a[(j, k)].abs()).unwrap()).unwrap();
        if a[(p, k)].is_zero() {
            return R::zero();
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            d = -d;
        }
        let piv = a[(k, k)];
        d *= piv;
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            for j in k..n {
                a[(i, j)] = a[(i, j)] - f * a[(k, j)];
            }
        }
    }
    d
}

/// Complex determinant, same elimination with modulus pivoting.
pub fn complex_det<R: Real>(m: &Mat<Complex<R>>) -> Complex<R> {
    assert_eq!(m.rows(), m.cols(), "square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut d = Complex::new(R::one(), R::zero());
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].cabs().partial_cmp(&a[(j, k)].cabs()).unwrap()).unwrap();
        if a[(p, k)].is_zero() {
            return Complex::zero();
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            d = -d;
        }
        let piv = a[(k, k)];
        d = d * piv;
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            for j in k..n {
                a[(i, j)] = a[(i, j)] - f * a[(k, j)];
            }
        }
    }
    d
}

/// Solves `m x = b`; `None` if `m` is numerically singular.
pub fn solve<R: Real>(m: &Mat<R>, b: &[R]) -> Option<Vec<R>> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    assert_eq!(n, b.len());
    let mut a = m.clone();
    let mut x = b.to_vec();
    let scale = a.max_abs().max(R::min_positive_value());
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().partial_cmp(&a[(j, k)].abs()).unwrap()).unwrap();
        if a[(p, k)].abs() <= scale * R::epsilon() * R::lit(16.0) {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            for j in k..n {
                a[(i, j)] = a[(i, j)] - f * a[(k, j)];
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= a[(k, j)] * x[j];
        }
        x[k] = s / a[(k, k)];
    }
    Some(x)
}

/// Pfaffian of an antisymmetric matrix, by expansion along the first row.
/// Cost is (n-1)!! which is fine for the sizes used here (n <= 12).
pub fn pfaffian<R: Real>(m: &Mat<R>) -> R {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square matrix");
    let idx: Vec<usize> = (0..n).collect();
    pfaffian_rec(m, &idx)
}

fn pfaffian_rec<R: Real>(m: &Mat<R>, idx: &[usize]) -> R {
    match idx.len() {
        0 => R::one(),
        n if n % 2 == 1 => R::zero(),
        2 => m[(idx[0], idx[1])],
        _ => {
            let mut acc = R::zero();
            for j in 1..idx.len() {
                let a = m[(idx[0], idx[j])];
                if a.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|&(p, _)| p + 1 != j).map(|(_, &v)| v).collect();
                let sub = pfaffian_rec(m, &rest);
                // sign (-1)^(j+1) with j counted from 0 for the first row
                if j % 2 == 1 {
                    acc += a * sub;
                } else {
                    acc -= a * sub;
                }
            }
            acc
        }
    }
}

/// Singular values of a real `rows x cols` matrix (rows >= cols) via one-sided Jacobi,
/// sorted descending.
pub fn singular_values<R: Real>(m: &Mat<R>) -> Vec<R> {
    let c = m.cols();
    let mut cols: Vec<Vec<R>> = (0..c).map(|j| m.column(j)).collect();
    let tol = R::epsilon() * R::lit(4.0);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma.is_zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (R::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (R::one() + zeta * zeta).sqrt());
                let cs = R::one() / (R::one() + t * t).sqrt();
                let sn = cs * t;
                let (head, tail) = cols.split_at_mut(q);
                for (a, b) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = cs * x - sn * y;
                    *b = sn * x + cs * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<R> = cols.iter().map(|v| norm(v)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = Mat::<f64>::from_rows(&[vec![2.0, -1.0, 0.5], vec![1.0, 3.0, -2.0], vec![0.0, 4.0, 1.0]]);
        let cof = 2.0 * (3.0 * 1.0 - (-2.0) * 4.0) - -(1.0 * 1.0 - 0.0) + 0.5 * (4.0 - 0.0);
        assert!((det(&m) - cof).abs() < 1e-12);
    }

    #[test]
    fn complex_determinant_of_diagonal() {
        let z = |re: f64, im: f64| Complex::new(re, im);
        let m = Mat::from_rows(&[vec![z(0.0, 1.0), z(0.0, 0.0)], vec![z(5.0, 0.0), z(2.0, 1.0)]]);
        let d = complex_det(&m);
        assert!((d - z(-1.0, 2.0)).cabs() < 1e-14);
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let mut a = Mat::<f64>::zeros(6, 6);
        let mut v = 0.3;
        for i in 0..6 {
            for j in i + 1..6 {
                v = (v * 7.1 + 0.37) % 2.0 - 1.0;
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        let pf = pfaffian(&a);
        assert!((pf * pf - det(&a)).abs() < 1e-12);
        // Standard symplectic block has Pfaffian 1.
        let mut j = Mat::<f64>::zeros(4, 4);
        j[(0, 1)] = 1.0;
        j[(1, 0)] = -1.0;
        j[(2, 3)] = 1.0;
        j[(3, 2)] = -1.0;
        assert_eq!(pfaffian(&j), 1.0);
    }

    #[test]
    fn solve_recovers_solution_and_flags_singular() {
        let m = Mat::<f64>::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]);
        let x = solve(&m, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        let s = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&s, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // columns orthogonal with norms 3 and 0.5
        let m = Mat::<f64>::from_columns(&[vec![3.0, 0.0, 0.0], vec![0.0, 0.3, 0.4]]);
        let sv = singular_values(&m);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 0.5).abs() < 1e-14);
        let m = Mat::from_columns(&[vec![1.0, 1.0, 0.0], vec![1.0, 1.0 + 1e-9, 0.0]]);
        let sv = singular_values(&m);
        assert!(sv[1] < 1e-9 && sv[1] > 1e-10);
    }
}
