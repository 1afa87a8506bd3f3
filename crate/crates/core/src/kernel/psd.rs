//! Gram matrices and positive semi-definiteness checks.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::KernelSpec;
use crate::error::{Error, Result};

/// Largest order for which [`principal_minors_nonnegative`] enumerates all
/// `2^n - 1` principal minors.
pub const MAX_MINOR_ORDER: usize = 8;

/// Square symmetric matrix of kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(DMatrix<f64>);

impl GramMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    /// Builds the matrix from pair difference vectors. Rows are filled in
    /// parallel; each entry is computed independently, so the result does
    /// not depend on the thread count.
    pub fn from_diffs(diffs: &[Vec<f64>], spec: KernelSpec) -> Self {
        let n = diffs.len();
        let mut data = vec![0.0; n * n];
        // nalgebra is column-major; with a symmetric kernel column j equals row j
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(j, col)| {
            for (i, out) in col.iter_mut().enumerate() {
                *out = spec.eval_diffs(&diffs[i], &diffs[j]);
            }
        });
        Self(DMatrix::from_vec(n, n, data))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }
}

/// Smallest eigenvalue of a symmetric matrix (`+inf` for an empty one).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn check_square_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let slack = tol.max(1e-12);
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > slack {
                return Err(Error::NotSymmetric(slack));
            }
        }
    }
    Ok(())
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    check_square_symmetric(m, tol)?;
    Ok(min_eigenvalue(m) >= -tol)
}

/// Checks that every principal minor has determinant `>= -tol`
/// (Sylvester's criterion for semi-definiteness). Only for `n <= 8`.
pub fn principal_minors_nonnegative(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    check_square_symmetric(m, tol)?;
    let n = m.nrows();
    if n > MAX_MINOR_ORDER {
        return Err(Error::InvalidArgument(format!(
            "principal minor enumeration supports n <= {MAX_MINOR_ORDER}, got {n}"
        )));
    }
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |r, c| m[(idx[r], idx[c])]);
        if sub.determinant() < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}
