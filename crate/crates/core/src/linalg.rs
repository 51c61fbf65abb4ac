//! Dense symmetric linear algebra.
//!
//! [`DenseMatrix`] is a thin wrapper over `nalgebra::DMatrix<f64>` so that the
//! rest of the crate only sees the operations it needs: Cholesky with a
//! jitter fallback, triangular solves, and the smallest eigenvalue of a
//! symmetric matrix.

use std::ops::{Index, IndexMut};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Jitter multipliers tried in order; each is scaled by `trace(A) / n`.
pub const DEFAULT_JITTER_MULTIPLIERS: [f64; 5] = [0.0, 1e-12, 1e-10, 1e-8, 1e-6];

/// Relative tolerance used by [`DenseMatrix::is_symmetric`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Dense matrix of 64-bit reals.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix(DMatrix::identity(n, n))
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim("row-major data length", rows * cols, data.len()));
        }
        Ok(DenseMatrix(DMatrix::from_row_slice(rows, cols, data)))
    }

    /// Builds a matrix from a list of equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::dim("row length", cols, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), cols, &data)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        DenseMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        DenseMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    /// Contiguous view of column `j`.
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.rows();
        &self.0.as_slice()[j * n..(j + 1) * n]
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows();
        (0..n).all(|i| {
            (0..i).all(|j| {
                let a = self.0[(i, j)];
                (a - self.0[(j, i)]).abs() <= SYMMETRY_TOLERANCE * (1.0 + a.abs())
            })
        })
    }

    /// Replaces the matrix by `(A + Aᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows();
        for j in 0..n {
            for i in (j + 1)..n {
                let v = 0.5 * (self.0[(i, j)] + self.0[(j, i)]);
                self.0[(i, j)] = v;
                self.0[(j, i)] = v;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix(self.0.transpose())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::dim("matrix product", self.cols(), other.rows()));
        }
        Ok(DenseMatrix(&self.0 * &other.0))
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols() != v.len() {
            return Err(Error::dim("matrix-vector product", self.cols(), v.len()));
        }
        let out = &self.0 * DVector::from_column_slice(v);
        Ok(out.as_slice().to_vec())
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        DenseMatrix(&self.0 * factor)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.0.shape() != other.0.shape() {
            return Err(Error::dim("matrix difference", self.rows() * self.cols(), other.rows() * other.cols()));
        }
        Ok(DenseMatrix(&self.0 - &other.0))
    }

    /// Returns `self + shift · I`.
    pub fn add_diagonal(&self, shift: f64) -> DenseMatrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows().min(m.ncols()) {
            m[(i, i)] += shift;
        }
        DenseMatrix(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl From<DMatrix<f64>> for DenseMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        DenseMatrix(m)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut f64 {
        &mut self.0[idx]
    }
}

/// Cholesky factor of `A + jitter_applied · I`.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    inner: Cholesky<f64, Dyn>,
    jitter_applied: f64,
}

impl CholeskyFactor {
    pub fn n(&self) -> usize {
        self.inner.l_dirty().nrows()
    }

    /// Lower-triangular factor `L`.
    pub fn l(&self) -> DenseMatrix {
        DenseMatrix(self.inner.l())
    }

    pub fn jitter_applied(&self) -> f64 {
        self.jitter_applied
    }

    /// Solves `(A + jI) x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n() {
            return Err(Error::dim("cholesky solve", self.n(), b.len()));
        }
        let x = self.inner.solve(&DVector::from_column_slice(b));
        Ok(x.as_slice().to_vec())
    }
}

/// Default absolute jitter schedule for `a`: [`DEFAULT_JITTER_MULTIPLIERS`]
/// scaled by `trace(a) / n` (or by 1 when the trace is not positive).
pub fn default_jitter_schedule(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows().max(1) as f64;
    let scale = a.trace() / n;
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    DEFAULT_JITTER_MULTIPLIERS.iter().map(|m| m * scale).collect()
}

/// Factors `a + j·I` for the first jitter `j` of `jitter_schedule` that
/// yields a positive definite matrix.
pub fn cholesky(a: &DenseMatrix, jitter_schedule: &[f64]) -> Result<CholeskyFactor> {
    if !a.is_square() {
        return Err(Error::dim("cholesky (square input)", a.rows(), a.cols()));
    }
    if !a.is_symmetric() {
        return Err(Error::InvalidSpec("cholesky input is not symmetric".into()));
    }
    for &jitter in jitter_schedule {
        let shifted = if jitter == 0.0 {
            a.0.clone()
        } else {
            a.add_diagonal(jitter).0
        };
        if let Some(inner) = Cholesky::new(shifted) {
            // nalgebra accepts a zero pivot as long as no NaN appears.
            if inner.l_dirty().diagonal().iter().all(|d| *d > 0.0 && d.is_finite()) {
                return Ok(CholeskyFactor {
                    inner,
                    jitter_applied: jitter,
                });
            }
        }
    }
    Err(Error::NotPositiveDefinite {
        max_jitter: jitter_schedule.iter().copied().fold(0.0, f64::max),
    })
}

/// Solves `(A + jI) X = B` for every column of `b`.
pub fn cholesky_solve(factor: &CholeskyFactor, b: &DenseMatrix) -> Result<DenseMatrix> {
    if b.rows() != factor.n() {
        return Err(Error::dim("cholesky solve", factor.n(), b.rows()));
    }
    Ok(DenseMatrix(factor.inner.solve(&b.0)))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DenseMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::dim("eigenvalue (square input)", a.rows(), a.cols()));
    }
    if a.rows() == 0 {
        return Err(Error::dim("eigenvalue (non-empty input)", 1, 0));
    }
    let eig = SymmetricEigen::new(a.0.clone());
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Dot product of two equally long slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
