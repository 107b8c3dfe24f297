//! Dense least squares by Householder QR.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Builds a matrix from columns of equal length.
    pub fn from_columns(columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
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

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solution of `min ||X b - y||`.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    /// `(X^T X)^{-1}`, the unscaled coefficient covariance.
    pub xtx_inv: Matrix<T>,
}

/// Solves the least-squares problem, rejecting rank-deficient designs.
///
/// A column is treated as dependent when the norm of its component orthogonal to the
/// preceding columns falls below `sqrt(eps)` times its original norm.
pub fn least_squares<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<LeastSquares<T>> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::input(format!("design has {n} rows but response has {}", y.len())));
    }
    if n < p {
        return Err(Error::estimation(format!("{n} observations for {p} coefficients")));
    }
    let col_norms: Vec<T> = (0..p)
        .map(|j| (0..n).fold(T::zero(), |acc, i| acc + x[(i, j)] * x[(i, j)]).sqrt())
        .collect();
    let tol = T::epsilon().sqrt();

    let mut a = x.clone();
    let mut qty = y.to_vec();
    let mut rdiag = vec![T::zero(); p];

    for k in 0..p {
        let norm = (k..n).fold(T::zero(), |acc, i| acc + a[(i, k)] * a[(i, k)]).sqrt();
        if !(norm > tol * col_norms[k]) || norm.is_zero() {
            return Err(Error::estimation(format!(
                "design is rank deficient: column {k} is constant or collinear with earlier columns"
            )));
        }
        let alpha = if a[(k, k)] > T::zero() { -norm } else { norm };
        // v = a[k.., k] - alpha e_k, stored in place
        a[(k, k)] = a[(k, k)] - alpha;
        let vnorm2 = (k..n).fold(T::zero(), |acc, i| acc + a[(i, k)] * a[(i, k)]);
        for j in (k + 1)..p {
            let dot = (k..n).fold(T::zero(), |acc, i| acc + a[(i, k)] * a[(i, j)]);
            let f = (dot + dot) / vnorm2;
            for i in k..n {
                a[(i, j)] = a[(i, j)] - f * a[(i, k)];
            }
        }
        let dot = (k..n).fold(T::zero(), |acc, i| acc + a[(i, k)] * qty[i]);
        let f = (dot + dot) / vnorm2;
        for i in k..n {
            qty[i] = qty[i] - f * a[(i, k)];
        }
        rdiag[k] = alpha;
    }

    // Back substitution on R b = (Q^T y)[..p].
    let r = |i: usize, j: usize| if i == j { rdiag[i] } else { a[(i, j)] };
    let mut b = vec![T::zero(); p];
    for i in (0..p).rev() {
        let s = ((i + 1)..p).fold(qty[i], |acc, j| acc - r(i, j) * b[j]);
        b[i] = s / r(i, i);
    }

    // R^{-1} column by column, then (X^T X)^{-1} = R^{-1} R^{-T}.
    let mut rinv = Matrix::zeros(p, p);
    for c in 0..p {
        for i in (0..=c).rev() {
            let rhs = if i == c { T::one() } else { T::zero() };
            let s = ((i + 1)..=c).fold(rhs, |acc, j| acc - r(i, j) * rinv[(j, c)]);
            rinv[(i, c)] = s / r(i, i);
        }
    }
    let mut xtx_inv = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let start = i.max(j);
            xtx_inv[(i, j)] = (start..p).fold(T::zero(), |acc, k| acc + rinv[(i, k)] * rinv[(j, k)]);
        }
    }

    Ok(LeastSquares { coefficients: b, xtx_inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = Matrix::from_columns(&[vec![1.0_f64; 3], vec![1.0, 2.0, 3.0]]);
        let ls = least_squares(&x, &[2.0, 4.0, 6.0]).unwrap();
        assert!(ls.coefficients[0].abs() < 1e-14);
        assert!((ls.coefficients[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_gram_matches_closed_form() {
        // For [1, x] the Gram inverse has a closed form.
        let xs = [1.0, 2.0, 4.0, 7.0];
        let x = Matrix::from_columns(&[vec![1.0; 4], xs.to_vec()]);
        let ls = least_squares(&x, &[0.0; 4]).unwrap();
        let n = 4.0;
        let sx: f64 = xs.iter().sum();
        let sxx: f64 = xs.iter().map(|v| v * v).sum();
        let det = n * sxx - sx * sx;
        assert!((ls.xtx_inv[(0, 0)] - sxx / det).abs() < 1e-12);
        assert!((ls.xtx_inv[(0, 1)] + sx / det).abs() < 1e-12);
        assert!((ls.xtx_inv[(1, 1)] - n / det).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_detected() {
        let x = Matrix::from_columns(&[vec![1.0; 4], vec![5.0; 4]]);
        assert!(matches!(least_squares(&x, &[1.0, 2.0, 3.0, 4.0]), Err(Error::Estimation(_))));
        let x = Matrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        assert!(matches!(least_squares(&x, &[1.0, 2.0, 3.0]), Err(Error::Estimation(_))));
        let x = Matrix::from_columns(&[vec![1.0; 3], vec![0.0; 3]]);
        assert!(matches!(least_squares(&x, &[1.0, 2.0, 3.0]), Err(Error::Estimation(_))));
    }
}
