//! Dense square matrices and a symmetric eigensolver.
//!
//! The solver is the classic Householder tridiagonalization followed by the
//! implicit QL iteration (EISPACK `tred2`/`tql2`, via the JAMA port). It is
//! fully deterministic, which the spectral sign convention downstream relies
//! on.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Largest |A[i][j] - A[j][i]|.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Copy with row and column `k` deleted.
    pub fn without(&self, k: usize) -> Self {
        assert!(k < self.n);
        let n = self.n - 1;
        let mut out = Self::zeros(n);
        for (oi, i) in (0..self.n).filter(|&i| i != k).enumerate() {
            for (oj, j) in (0..self.n).filter(|&j| j != k).enumerate() {
                out[(oi, oj)] = self[(i, j)];
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
///
/// `values` are ascending. When vectors were requested, column `k` of
/// `vectors` is the unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Option<DenseMatrix<T>>,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// Full decomposition. Only the lower triangle of `a` is read.
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        decompose(a, true)
    }

    /// Eigenvalues only; skips accumulating the orthogonal transforms.
    pub fn values_only(a: &DenseMatrix<T>) -> Result<Vec<T>> {
        decompose(a, false).map(|e| e.values)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Option<Vec<T>> {
        let v = self.vectors.as_ref()?;
        Some((0..v.dim()).map(|i| v[(i, k)]).collect())
    }
}

fn decompose<T: Scalar>(a: &DenseMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: want_vectors.then(|| DenseMatrix::zeros(0)),
        });
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e, want_vectors);
    tql2(&mut v, &mut d, &mut e, want_vectors)?;

    // tql2 leaves values unsorted only in pathological cases; sort with vectors.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = DenseMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                out[(r, new_col)] = v[(r, old_col)];
            }
        }
        out
    });
    Ok(SymmetricEigen { values, vectors })
}

// Householder reduction to tridiagonal form. On exit `d` holds the diagonal,
// `e[1..]` the sub-diagonal and, if `accumulate`, `v` the orthogonal transform.
fn tred2<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T], accumulate: bool) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for &dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
                v[(j, i)] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = v[(j, j)];
        }
        e[0] = zero;
        return;
    }

    for i in 0..(n - 1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = zero;
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

// Implicit QL on the symmetric tridiagonal (d, e).
fn tql2<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T], accumulate: bool) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    let max_iter = 30 * n.max(1) + 30;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if accumulate {
                        for k in 0..n {
                            let hk = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * hk;
                            v[(k, i)] = c * v[(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &DenseMatrix<f64>, eig: &SymmetricEigen<f64>) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..a.dim() {
            let x = eig.vector(k).unwrap();
            let ax = a.mul_vec(&x);
            let r: f64 = ax
                .iter()
                .zip(&x)
                .map(|(p, q)| (p - eig.values[k] * q).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let a = DenseMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let eig = SymmetricEigen::new(&a).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        assert!(residual(&a, &eig) < 1e-14);
    }

    #[test]
    fn path_laplacian_eigenvalues() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        let eig = SymmetricEigen::new(&a).unwrap();
        for (got, want) in eig.values.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want as f64).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(residual(&a, &eig) < 1e-12);
    }

    #[test]
    fn values_only_matches_full() {
        let a = DenseMatrix::from_rows(&[
            vec![4.0_f64, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let full = SymmetricEigen::new(&a).unwrap();
        let vals = SymmetricEigen::values_only(&a).unwrap();
        for (x, y) in full.values.iter().zip(&vals) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(residual(&a, &full) < 1e-12);
    }

    #[test]
    fn one_by_one_and_empty() {
        let a = DenseMatrix::from_rows(&[vec![5.0f64]]).unwrap();
        let eig = SymmetricEigen::new(&a).unwrap();
        assert_eq!(eig.values, vec![5.0]);
        assert_eq!(eig.vector(0).unwrap(), vec![1.0]);
        assert!(SymmetricEigen::<f64>::values_only(&DenseMatrix::zeros(0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_precision_runs() {
        let a = DenseMatrix::from_rows(&[vec![2.0f32, -1.0], vec![-1.0, 2.0]]).unwrap();
        let eig = SymmetricEigen::new(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-6);
        assert!((eig.values[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn without_drops_row_and_column() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ])
        .unwrap();
        let b = a.without(1);
        assert_eq!(b, DenseMatrix::from_rows(&[vec![1.0, 3.0], vec![7.0, 9.0]]).unwrap());
    }
}
