//! Expected rank regression: least squares on normalised rank targets.

use nalgebra::{DMatrix, DVector};

use super::LinearModel;
use crate::data::RankedDataset;
use crate::error::{Error, Result};

/// `pi(i) / (n + 1)` for 1-based positions `pi(i)`; takes 0-based positions.
pub fn err_targets(positions: &[usize]) -> Vec<f64> {
    let n = positions.len() as f64;
    positions.iter().map(|&p| (p as f64 + 1.0) / (n + 1.0)).collect()
}

/// Fits an affine model to the rank targets of every training item. Rank
/// deficient designs get the minimum-norm solution. A query is ranked by
/// ascending predicted target.
pub fn err_fit(train: &RankedDataset) -> Result<LinearModel> {
    let d = train.dim();
    let m = train.num_items();
    if m == 0 {
        return Err(Error::EmptySample);
    }
    let mut x = DMatrix::<f64>::zeros(m, d + 1);
    let mut y = DVector::<f64>::zeros(m);
    let mut row = 0;
    for q in &train.queries {
        let targets = err_targets(q.ranking.positions());
        for (item, t) in q.items.iter().zip(targets) {
            if item.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: item.dim(),
                });
            }
            for (k, &v) in item.iter().enumerate() {
                x[(row, k)] = v;
            }
            x[(row, d)] = 1.0;
            y[row] = t;
            row += 1;
        }
    }
    let svd = x.svd(true, true);
    let largest = svd.singular_values.max();
    let eps = largest * (m.max(d + 1) as f64) * f64::EPSILON;
    let beta = svd
        .solve(&y, eps)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("regression coefficients"));
    }
    Ok(LinearModel {
        weights: beta.rows(0, d).iter().copied().collect(),
        intercept: beta[d],
    })
}
