//! Randomised validity check: Gram matrices of random pair sets must be
//! positive semi-definite, and the graded proportion must agree with the
//! Boolean table on `{0, 1}^4`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{boolean_proportion, proportion_degree, GramMatrix, KernelSpec};
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheckConfig {
    pub samples: usize,
    pub max_pairs: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for KernelCheckConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            max_pairs: 50,
            min_dim: 10,
            max_dim: 10,
            tol: 1e-8,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub pairs: usize,
    pub dim: usize,
    pub min_eigenvalue_mean: f64,
    pub min_eigenvalue_poly2: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCheckReport {
    pub tol: f64,
    pub trials: Vec<TrialReport>,
    pub trials_passed: usize,
    pub boolean_matched: usize,
    pub boolean_total: usize,
    pub passed: bool,
}

/// Number of Boolean quadruples on which the graded proportion equals the
/// Boolean table, out of 16.
pub fn boolean_table_matches() -> Result<usize> {
    let mut matched = 0;
    for bits in 0u8..16 {
        let b = |k: u8| bits & (8 >> k) != 0;
        let f = |k: u8| if b(k) { 1.0 } else { 0.0 };
        let graded = proportion_degree(f(0), f(1), f(2), f(3))?;
        let expected = if boolean_proportion(b(0), b(1), b(2), b(3)) { 1.0 } else { 0.0 };
        if graded == expected {
            matched += 1;
        }
    }
    Ok(matched)
}

/// Random pair sets with items uniform on the unit cube, one Gram matrix
/// per kernel variant and trial. Each trial draws from its own seed stream.
pub fn kernel_check(config: &KernelCheckConfig) -> Result<KernelCheckReport> {
    if config.max_pairs == 0 || config.min_dim == 0 || config.min_dim > config.max_dim {
        return Err(Error::InvalidArgument(
            "kernel check needs max_pairs >= 1 and 1 <= min_dim <= max_dim".into(),
        ));
    }
    let trials: Vec<TrialReport> = (0..config.samples)
        .map(|t| {
            let mut rng = rng::seeded(derive_seed(config.seed, &[t as u64]));
            let pairs = rng.random_range(1..=config.max_pairs);
            let dim = rng.random_range(config.min_dim..=config.max_dim);
            let diffs: Vec<Vec<f64>> = (0..pairs)
                .map(|_| {
                    (0..dim)
                        .map(|_| rng.random::<f64>() - rng.random::<f64>())
                        .collect()
                })
                .collect();
            let min_eigenvalue_mean = GramMatrix::from_diffs(&diffs, KernelSpec::MEAN).min_eigenvalue();
            let min_eigenvalue_poly2 = GramMatrix::from_diffs(&diffs, KernelSpec::POLY2).min_eigenvalue();
            TrialReport {
                pairs,
                dim,
                min_eigenvalue_mean,
                min_eigenvalue_poly2,
                passed: min_eigenvalue_mean >= -config.tol && min_eigenvalue_poly2 >= -config.tol,
            }
        })
        .collect();
    let trials_passed = trials.iter().filter(|t| t.passed).count();
    let boolean_matched = boolean_table_matches()?;
    Ok(KernelCheckReport {
        tol: config.tol,
        passed: trials_passed == trials.len() && boolean_matched == 16,
        trials,
        trials_passed,
        boolean_matched,
        boolean_total: 16,
    })
}
