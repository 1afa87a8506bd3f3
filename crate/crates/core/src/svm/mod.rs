//! Binary kernel SVM: SMO training, Platt calibration and selection of the
//! cost parameter by repeated cross-validation.

pub mod cv;
pub mod platt;
pub mod smo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::GramMatrix;

pub use cv::{default_c_grid, select_c, CvConfig};
pub use platt::{platt_fit, platt_prob, PlattParams};
pub use smo::{dual_objective, smo_train, smo_train_with, ExitReason, SmoConfig};

/// Read access to kernel values between training examples.
pub trait KernelSource: Sync {
    fn len(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl KernelSource for GramMatrix {
    fn len(&self) -> usize {
        GramMatrix::len(self)
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Kernel values computed on demand by a closure.
pub struct FnKernel<F> {
    n: usize,
    f: F,
}

impl<F: Fn(usize, usize) -> f64 + Sync> FnKernel<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(usize, usize) -> f64 + Sync> KernelSource for FnKernel<F> {
    fn len(&self) -> usize {
        self.n
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        (self.f)(i, j)
    }
}

/// The kernel restricted to a subset of examples.
pub struct SubsetKernel<'a, K: ?Sized> {
    inner: &'a K,
    indices: &'a [usize],
}

impl<'a, K: KernelSource + ?Sized> SubsetKernel<'a, K> {
    pub fn new(inner: &'a K, indices: &'a [usize]) -> Self {
        Self { inner, indices }
    }
}

impl<K: KernelSource + ?Sized> KernelSource for SubsetKernel<'_, K> {
    fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.inner.entry(self.indices[i], self.indices[j])
    }
}

/// A trained binary SVM. Only support vectors (`alpha > 0`) are kept;
/// `support[k]` indexes the training list the model was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alpha: Vec<f64>,
    pub labels: Vec<i8>,
    pub support: Vec<usize>,
    pub bias: f64,
    pub c: f64,
    pub platt: Option<PlattParams>,
    pub iterations: usize,
    pub exit: ExitReason,
}

impl SvmModel {
    pub fn num_support(&self) -> usize {
        self.support.len()
    }

    /// `sum_k alpha_k y_k K(x, x_k) + b`, where `row[k]` is the kernel value
    /// between the query and the k-th support vector.
    pub fn decision_value(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.support.len() {
            return Err(Error::DimensionMismatch {
                expected: self.support.len(),
                found: row.len(),
            });
        }
        Ok(self.decision_with(|k| row[k]))
    }

    /// Like [`decision_value`](Self::decision_value) with the kernel row
    /// supplied lazily by support-vector position.
    #[inline]
    pub fn decision_with(&self, mut kernel: impl FnMut(usize) -> f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..self.support.len() {
            sum += self.alpha[k] * f64::from(self.labels[k]) * kernel(k);
        }
        sum + self.bias
    }

    /// Calibrated probability of the positive class.
    pub fn probability(&self, decision: f64) -> Result<f64> {
        let platt = self
            .platt
            .ok_or_else(|| Error::InvalidArgument("model has no Platt calibration".into()))?;
        Ok(platt_prob(platt, decision))
    }

    /// Dual coefficients over all `n` training examples.
    pub fn dense_alpha(&self, n: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; n];
        for (k, &i) in self.support.iter().enumerate() {
            alpha[i] = self.alpha[k];
        }
        alpha
    }
}

/// Validates a ±1 label vector and requires both classes.
pub(crate) fn check_labels(labels: &[i8]) -> Result<()> {
    if let Some(&bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::InvalidArgument(format!("label {bad} is not +1 or -1")));
    }
    let pos = labels.iter().any(|&y| y == 1);
    let neg = labels.iter().any(|&y| y == -1);
    if !(pos && neg) {
        return Err(Error::SingleClass);
    }
    Ok(())
}
