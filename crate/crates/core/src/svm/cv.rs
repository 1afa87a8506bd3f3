//! Cost-parameter selection by repeated stratified cross-validation.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{check_labels, smo_train, KernelSource, SubsetKernel};
use crate::error::{Error, Result};
use crate::rng;

/// `{2^-6, 2^-4, ..., 2^6}`.
pub fn default_c_grid() -> Vec<f64> {
    (-3..=3).map(|k| 2f64.powi(2 * k)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub grid: Vec<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub tol: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            grid: default_c_grid(),
            folds: 2,
            repeats: 3,
            tol: super::SmoConfig::DEFAULT_TOL,
        }
    }
}

/// Fold index per example. Each class is shuffled separately and dealt
/// round-robin so that every fold gets a share of both.
fn stratified_folds(labels: &[i8], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::seeded(seed);
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] > 0).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] < 0).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut assignment = vec![0; labels.len()];
    for (k, &i) in pos.iter().chain(&neg).enumerate() {
        assignment[i] = k % folds;
    }
    assignment
}

/// Misclassification rate of an SVM trained on `train` and evaluated on
/// `valid`. A single-class training split predicts that class.
fn fold_error<K: KernelSource + ?Sized>(
    kernel: &K,
    labels: &[i8],
    train: &[usize],
    valid: &[usize],
    c: f64,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    let train_labels: Vec<i8> = train.iter().map(|&i| labels[i]).collect();
    let predict: Box<dyn Fn(usize) -> i8> = match check_labels(&train_labels) {
        Ok(()) => {
            let model = smo_train(&SubsetKernel::new(kernel, train), &train_labels, c, tol, seed)?;
            Box::new(move |v| {
                let f = model.decision_with(|k| kernel.entry(v, train[model.support[k]]));
                if f >= 0.0 {
                    1
                } else {
                    -1
                }
            })
        }
        Err(Error::SingleClass) => {
            let only = train_labels[0];
            Box::new(move |_| only)
        }
        Err(e) => return Err(e),
    };
    let wrong = valid.iter().filter(|&&v| predict(v) != labels[v]).count();
    Ok(wrong as f64 / valid.len() as f64)
}

/// Returns the grid value with the lowest mean validation error over
/// `repeats` runs of `folds`-fold stratified cross-validation. Ties go to
/// the smallest C.
pub fn select_c<K: KernelSource + ?Sized>(
    kernel: &K,
    labels: &[i8],
    config: &CvConfig,
    seed: u64,
) -> Result<f64> {
    if config.grid.is_empty() {
        return Err(Error::InvalidArgument("empty C grid".into()));
    }
    if let Some(c) = config.grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    if config.folds < 2 || config.repeats == 0 {
        return Err(Error::InvalidArgument(
            "cross-validation needs at least 2 folds and 1 repeat".into(),
        ));
    }
    if kernel.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: kernel.len(),
        });
    }
    check_labels(labels)?;

    let mut splits = Vec::new();
    for r in 0..config.repeats {
        let split_seed = rng::derive_seed(seed, &[r as u64]);
        let assignment = stratified_folds(labels, config.folds, split_seed);
        for f in 0..config.folds {
            let (valid, train): (Vec<usize>, Vec<usize>) =
                (0..labels.len()).partition(|&i| assignment[i] == f);
            if !valid.is_empty() && !train.is_empty() {
                splits.push((train, valid, rng::derive_seed(split_seed, &[f as u64])));
            }
        }
    }
    if splits.is_empty() {
        return Err(Error::InvalidArgument("too few examples for cross-validation".into()));
    }

    let mut grid = config.grid.clone();
    grid.sort_by(f64::total_cmp);
    let errors: Vec<f64> = grid
        .par_iter()
        .map(|&c| {
            let per_fold: Result<Vec<f64>> = splits
                .par_iter()
                .map(|(train, valid, s)| fold_error(kernel, labels, train, valid, c, config.tol, *s))
                .collect();
            per_fold.map(|v| v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for k in 1..grid.len() {
        if errors[k] < errors[best] {
            best = k;
        }
    }
    Ok(grid[best])
}
