//! Analogical transfer of training preferences to query pairs.
//!
//! This is an approximation ("-lite"): for a query pair the evidence for
//! each direction is the sum of the `k` largest proportion degrees against
//! all training preferences, and the two sums are turned into odds.

use rayon::prelude::*;

use crate::data::{FeatureVector, RankedDataset};
use crate::error::{Error, Result};
use crate::kernel::{pair_difference, KernelSpec};
use crate::ranker::btl::{self, btl_fit, rank_from_theta};
use crate::ranker::{Prediction, PreferenceMatrix};

pub const DEFAULT_K: usize = 20;

fn top_k_sum(values: &mut [f64], k: usize) -> f64 {
    values.sort_by(|a, b| b.total_cmp(a));
    values.iter().take(k).sum()
}

/// Preference relation over `query`. Training and query items must
/// already be normalised to `[0, 1]`.
pub fn able2rank_preferences(
    train: &RankedDataset,
    query: &[FeatureVector],
    k: usize,
) -> Result<PreferenceMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut observed = Vec::new();
    for q in &train.queries {
        for (w, l) in q.preferences() {
            observed.push(pair_difference(&q.items[w], &q.items[l])?);
        }
    }
    let d = train.dim();
    if let Some(bad) = query.iter().find(|x| x.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let n = query.len();
    let evidence: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return Ok(0.0);
                    }
                    let target = pair_difference(&query[i], &query[j])?;
                    let mut degrees: Vec<f64> = observed
                        .iter()
                        .map(|z| KernelSpec::MEAN.eval_diffs(z, &target))
                        .collect();
                    Ok(top_k_sum(&mut degrees, k))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    PreferenceMatrix::from_evidence(&evidence)
}

pub fn able2rank_lite(train: &RankedDataset, query: &[FeatureVector], k: usize) -> Result<Prediction> {
    let p = able2rank_preferences(train, query, k)?;
    let fit = btl_fit(&p, btl::DEFAULT_TOL, btl::DEFAULT_MAX_ITER)?;
    Ok(Prediction {
        ordering: rank_from_theta(&fit.params.theta),
        theta: fit.params.theta,
        preference_matrix: Some(p),
    })
}
