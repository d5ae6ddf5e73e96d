//! Dense row-major matrices and Gaussian elimination with partial pivoting.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Builds a matrix from nested rows. All rows must share one length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `yᵀ * self` for a row vector `y`.
    pub fn vec_mul(&self, y: &[T]) -> Vec<T> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a * x = b` for square `a` by Gaussian elimination with partial
/// pivoting. Consumes `a` as scratch space.
///
/// Returns [`Error::Singular`] when a pivot falls below the scalar's pivot
/// tolerance relative to the largest entry of `a`.
pub fn solve<T: Scalar>(mut a: Matrix<T>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(Error::InvalidInput(format!(
            "solve expects a square system, got {}x{} with rhs {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let scale = a.data.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale == T::zero() {
        return Err(Error::Singular);
    }
    let threshold = scale * T::pivot_tolerance();

    for k in 0..n {
        let (p, pivot) =
            (k..n).map(|i| (i, a[(i, k)].abs())).fold(
                (k, T::neg_infinity()),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if !(pivot > threshold) {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let inv = T::one() / a[(k, k)];
        for i in (k + 1)..n {
            let factor = a[(i, k)] * inv;
            if factor == T::zero() {
                continue;
            }
            a[(i, k)] = T::zero();
            let (upper, lower) = a.data.split_at_mut(i * n);
            let pivot_row = &upper[k * n..(k + 1) * n];
            let row = &mut lower[..n];
            for j in (k + 1)..n {
                row[j] -= factor * pivot_row[j];
            }
            let bk = b[k];
            b[i] -= factor * bk;
        }
    }

    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in (k + 1)..n {
            acc -= a[(k, j)] * x[j];
        }
        x[k] = acc / a[(k, k)];
    }
    Ok(x)
}
