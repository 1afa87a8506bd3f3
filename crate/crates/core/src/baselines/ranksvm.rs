//! Linear ranking SVM on preference difference vectors.

use rand::Rng as _;

use super::LinearModel;
use crate::data::RankedDataset;
use crate::error::{Error, Result};
use crate::kernel::GramMatrix;
use crate::rng::{self, derive_seed};
use crate::svm::{select_c, smo_train, CvConfig, SmoConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RankSvmConfig {
    /// Fixed cost parameter; `None` selects it by cross-validation.
    pub c: Option<f64>,
    pub cv: CvConfig,
    pub tol: f64,
}

impl Default for RankSvmConfig {
    fn default() -> Self {
        Self {
            c: None,
            cv: CvConfig::default(),
            tol: SmoConfig::DEFAULT_TOL,
        }
    }
}

/// Trains on `z = x - x'` for every preference `x > x'` (zero differences
/// skipped), with `(z, +1)` or `(-z, -1)` picked by a seeded coin. The SVM
/// bias is discarded: items are ranked by descending `w'x`.
pub fn ranksvm_fit(train: &RankedDataset, config: &RankSvmConfig, seed: u64) -> Result<LinearModel> {
    let d = train.dim();
    let mut coin = rng::seeded(derive_seed(seed, &[0]));
    let mut z: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<i8> = Vec::new();
    for q in &train.queries {
        for (w, l) in q.preferences() {
            let diff: Vec<f64> = q.items[w].iter().zip(q.items[l].iter()).map(|(a, b)| a - b).collect();
            if diff.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: diff.len(),
                });
            }
            if diff.iter().all(|&v| v == 0.0) {
                continue;
            }
            if coin.random::<bool>() {
                z.push(diff);
                labels.push(1);
            } else {
                z.push(diff.into_iter().map(|v| -v).collect());
                labels.push(-1);
            }
        }
    }
    if z.is_empty() {
        return Err(Error::InvalidArgument("no informative preference pairs".into()));
    }
    if labels.iter().all(|&y| y == labels[0]) {
        let last = z.len() - 1;
        z[last].iter_mut().for_each(|v| *v = -*v);
        labels[last] = -labels[last];
    }

    let n = z.len();
    let gram = GramMatrix::from_fn(n, |i, j| z[i].iter().zip(&z[j]).map(|(a, b)| a * b).sum());
    let c = match config.c {
        Some(c) => c,
        None => select_c(&gram, &labels, &CvConfig { tol: config.tol, ..config.cv.clone() }, derive_seed(seed, &[1]))?,
    };
    let model = smo_train(&gram, &labels, c, config.tol, derive_seed(seed, &[2]))?;
    let mut weights = vec![0.0; d];
    for (k, &i) in model.support.iter().enumerate() {
        let coef = model.alpha[k] * f64::from(model.labels[k]);
        for (w, v) in weights.iter_mut().zip(&z[i]) {
            *w += coef * v;
        }
    }
    Ok(LinearModel {
        weights,
        intercept: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::order_by_score;
    use crate::data::{FeatureSchema, FeatureVector, RankedQuery, Ranking};

    fn one_dim(values: &[f64]) -> RankedDataset {
        // larger values are preferred
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        RankedDataset {
            schema: FeatureSchema::numeric(vec!["x".into()]),
            queries: vec![RankedQuery::new(
                "q",
                values.iter().map(|&v| FeatureVector(vec![v])).collect(),
                Ranking::from_ordering(&order).unwrap(),
            )
            .unwrap()],
        }
    }

    #[test]
    fn recovers_the_sign() {
        let m = ranksvm_fit(&one_dim(&[0.3, 1.2, -0.4, 0.8, 2.0]), &RankSvmConfig::default(), 1).unwrap();
        assert!(m.weights[0] > 0.0);
        assert_eq!(m.intercept, 0.0);
    }

    #[test]
    fn zero_differences_are_skipped() {
        assert!(ranksvm_fit(&one_dim(&[1.0, 1.0]), &RankSvmConfig::default(), 0).is_err());
        let m = ranksvm_fit(&one_dim(&[1.0, 1.0, 2.0]), &RankSvmConfig::default(), 0).unwrap();
        assert!(m.weights[0] > 0.0);
    }

    #[test]
    fn shift_invariant_within_a_query() {
        let base = one_dim(&[0.3, 1.2, -0.4, 0.8, 2.0, 0.1]);
        let shifted = base.map_items(|x| Ok(FeatureVector(vec![x[0] + 5.0]))).unwrap();
        let cfg = RankSvmConfig::default();
        let a = ranksvm_fit(&base, &cfg, 3).unwrap();
        let b = ranksvm_fit(&shifted, &cfg, 3).unwrap();
        let oa = order_by_score(&a.scores(&base.queries[0].items), true);
        let ob = order_by_score(&b.scores(&shifted.queries[0].items), true);
        assert_eq!(oa, ob);
        assert_eq!(oa, base.queries[0].ranking.ordering());
    }
}
