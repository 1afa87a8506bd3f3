//! Sequential minimal optimisation for the C-SVM dual
//!
//! ```text
//! min_a  1/2 a' Q a - e' a    s.t.  0 <= a_i <= C,  y' a = 0,
//! Q_ij = y_i y_j K_ij
//! ```
//!
//! Each step picks the maximal violating pair (first-order working set
//! selection) and solves the two-variable subproblem analytically. The
//! update and bias rules follow the LIBSVM solver.

use serde::{Deserialize, Serialize};

use super::{check_labels, KernelSource, SvmModel};
use crate::error::{Error, Result};
use crate::rng;
use rand::seq::SliceRandom;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExitReason {
    /// Maximal KKT violation fell below the tolerance.
    Converged,
    /// The selected pair could not be moved any further.
    Stalled,
    /// Iteration cap reached.
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    pub c: f64,
    pub tol: f64,
    /// Iteration cap, in multiples of the number of examples.
    pub max_passes: usize,
    /// Seeds the scan order used to break ties in working-set selection.
    pub seed: u64,
}

impl SmoConfig {
    pub const DEFAULT_TOL: f64 = 1e-3;
    pub const DEFAULT_MAX_PASSES: usize = 10_000;

    pub fn new(c: f64) -> Self {
        Self {
            c,
            tol: Self::DEFAULT_TOL,
            max_passes: Self::DEFAULT_MAX_PASSES,
            seed: 0,
        }
    }
}

/// Trains a binary SVM on kernel values `kernel.entry(i, j)` and labels
/// in `{-1, +1}`.
pub fn smo_train<K: KernelSource + ?Sized>(
    kernel: &K,
    labels: &[i8],
    c: f64,
    tol: f64,
    seed: u64,
) -> Result<SvmModel> {
    smo_train_with(
        kernel,
        labels,
        &SmoConfig {
            c,
            tol,
            max_passes: SmoConfig::DEFAULT_MAX_PASSES,
            seed,
        },
    )
}

pub fn smo_train_with<K: KernelSource + ?Sized>(
    kernel: &K,
    labels: &[i8],
    config: &SmoConfig,
) -> Result<SvmModel> {
    let n = labels.len();
    if kernel.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: kernel.len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidArgument("at least two training examples are required".into()));
    }
    check_labels(labels)?;
    let c = config.c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            config.tol
        )));
    }

    let y: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
    let diag: Vec<f64> = (0..n).map(|i| kernel.entry(i, i)).collect();
    if diag.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("kernel diagonal"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(config.seed));

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut row_i = vec![0.0; n];
    let mut row_j = vec![0.0; n];

    let max_iter = config.max_passes.saturating_mul(n).max(1);
    let mut iterations = 0;
    let exit = loop {
        let Some((i, j)) = select_working_set(&order, &y, &alpha, &grad, c, config.tol) else {
            break ExitReason::Converged;
        };
        if iterations >= max_iter {
            break ExitReason::MaxIterations;
        }
        iterations += 1;

        for t in 0..n {
            row_i[t] = kernel.entry(i, t);
            row_j[t] = kernel.entry(j, t);
        }
        if row_i.iter().chain(&row_j).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kernel value"));
        }

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let q_ij = y[i] * y[j] * row_i[j];
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_i = alpha[i] - old_i;
        let d_j = alpha[j] - old_j;
        if d_i == 0.0 && d_j == 0.0 {
            break ExitReason::Stalled;
        }
        for t in 0..n {
            grad[t] += y[t] * (y[i] * row_i[t] * d_i + y[j] * row_j[t] * d_j);
        }
    };

    let rho = compute_rho(&y, &alpha, &grad, c);
    let mut support = Vec::new();
    let mut coef = Vec::new();
    let mut sv_labels = Vec::new();
    for (t, &a) in alpha.iter().enumerate() {
        if a > 0.0 {
            support.push(t);
            coef.push(a);
            sv_labels.push(labels[t]);
        }
    }
    Ok(SvmModel {
        alpha: coef,
        labels: sv_labels,
        support,
        bias: -rho,
        c,
        platt: None,
        iterations,
        exit,
    })
}

#[inline]
fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

#[inline]
fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Maximal violating pair, or `None` when the KKT gap is below `tol`.
fn select_working_set(
    order: &[usize],
    y: &[f64],
    alpha: &[f64],
    grad: &[f64],
    c: f64,
    tol: f64,
) -> Option<(usize, usize)> {
    let mut g_max = f64::NEG_INFINITY;
    let mut g_min = f64::INFINITY;
    let (mut i, mut j) = (usize::MAX, usize::MAX);
    for &t in order {
        let v = -y[t] * grad[t];
        if in_up(y[t], alpha[t], c) && v > g_max {
            g_max = v;
            i = t;
        }
        if in_low(y[t], alpha[t], c) && v < g_min {
            g_min = v;
            j = t;
        }
    }
    if i == usize::MAX || j == usize::MAX || g_max - g_min < tol {
        None
    } else {
        Some((i, j))
    }
}

/// Threshold from free support vectors, or the midpoint of the feasible
/// interval when every coefficient sits at a bound.
fn compute_rho(y: &[f64], alpha: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Dual objective `1/2 a'Qa - sum(a)` for a dense coefficient vector.
pub fn dual_objective<K: KernelSource + ?Sized>(kernel: &K, labels: &[i8], alpha: &[f64]) -> f64 {
    let n = labels.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * f64::from(labels[i] * labels[j]) * kernel.entry(i, j);
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}
