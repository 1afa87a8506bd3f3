//! Reference rankers: expected rank regression, a linear ranking SVM and
//! an approximate analogical-transfer ranker ("able2rank-lite").

pub mod able2rank;
pub mod err;
pub mod ranksvm;

use serde::{Deserialize, Serialize};

use crate::data::FeatureVector;

pub use able2rank::{able2rank_lite, able2rank_preferences, DEFAULT_K};
pub use err::{err_fit, err_targets};
pub use ranksvm::{ranksvm_fit, RankSvmConfig};

/// `U(x) = w'x + intercept`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.intercept
    }

    pub fn scores(&self, items: &[FeatureVector]) -> Vec<f64> {
        items.iter().map(|x| self.score(x)).collect()
    }
}

/// Item indices sorted by score, ties kept in input order.
pub fn order_by_score(scores: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    if descending {
        idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    } else {
        idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    }
    idx
}
