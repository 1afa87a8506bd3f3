//! Binary pair instances extracted from training rankings.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::{FeatureVector, RankedDataset};
use crate::error::{Error, Result};
use crate::rng;

/// An ordered pair of items; `label = +1` means `first` is preferred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairInstance {
    pub first: FeatureVector,
    pub second: FeatureVector,
    pub label: i8,
}

impl PairInstance {
    /// Same preference stated the other way round.
    pub fn flipped(&self) -> Self {
        Self {
            first: self.second.clone(),
            second: self.first.clone(),
            label: -self.label,
        }
    }

    /// `first - second`, feature by feature.
    pub fn difference(&self) -> Vec<f64> {
        self.first.iter().zip(self.second.iter()).map(|(a, b)| a - b).collect()
    }
}

/// One instance per observed preference within each ranking, oriented by a
/// seeded fair coin. With `cap` set, a uniform sample of that many
/// instances is kept (in extraction order).
///
/// If every instance ends up with the same label, the last one is flipped
/// so that both classes are present.
pub fn build_pair_instances(
    data: &RankedDataset,
    seed: u64,
    cap: Option<usize>,
) -> Result<Vec<PairInstance>> {
    let mut rng = rng::seeded(seed);
    let mut out = Vec::new();
    for q in &data.queries {
        if q.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "query {:?} has {} item(s); training queries need at least 2",
                q.id,
                q.len()
            )));
        }
        for (w, l) in q.preferences() {
            let (a, b) = (&q.items[w], &q.items[l]);
            out.push(if rng.random::<bool>() {
                PairInstance {
                    first: a.clone(),
                    second: b.clone(),
                    label: 1,
                }
            } else {
                PairInstance {
                    first: b.clone(),
                    second: a.clone(),
                    label: -1,
                }
            });
        }
    }
    if let Some(cap) = cap {
        if cap == 0 {
            return Err(Error::InvalidArgument("pair cap must be positive".into()));
        }
        if cap < out.len() {
            let mut keep = rand::seq::index::sample(&mut rng, out.len(), cap).into_vec();
            keep.sort_unstable();
            let mut all: Vec<Option<PairInstance>> = out.into_iter().map(Some).collect();
            out = keep.into_iter().map(|i| all[i].take().unwrap()).collect();
        }
    }
    if let Some(first) = out.first().map(|p| p.label) {
        if out.iter().all(|p| p.label == first) {
            let last = out.len() - 1;
            out[last] = out[last].flipped();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSchema, RankedQuery, Ranking};

    fn dataset(sizes: &[usize]) -> RankedDataset {
        let queries = sizes
            .iter()
            .enumerate()
            .map(|(qi, &n)| {
                let items = (0..n).map(|i| FeatureVector(vec![i as f64 / n as f64, qi as f64])).collect();
                RankedQuery::new(format!("q{qi}"), items, Ranking::identity(n)).unwrap()
            })
            .collect();
        RankedDataset {
            schema: FeatureSchema::numeric(vec!["a".into(), "b".into()]),
            queries,
        }
    }

    #[test]
    fn counts_and_orientation() {
        let pairs = build_pair_instances(&dataset(&[3]), 1, None).unwrap();
        assert_eq!(pairs.len(), 3);
        // the first feature grows with position, so winners have the smaller value
        for p in &pairs {
            let winner_first = p.first[0] < p.second[0];
            assert_eq!(winner_first, p.label == 1);
        }
        let pairs = build_pair_instances(&dataset(&[2, 4]), 1, None).unwrap();
        assert_eq!(pairs.len(), 1 + 6);
        // pairs never cross queries
        assert!(pairs.iter().all(|p| p.first[1] == p.second[1]));
    }

    #[test]
    fn coin_is_roughly_fair() {
        let pairs = build_pair_instances(&dataset(&[60]), 7, None).unwrap();
        let pos = pairs.iter().filter(|p| p.label == 1).count() as f64 / pairs.len() as f64;
        assert!((pos - 0.5).abs() < 0.05, "{pos}");
    }

    #[test]
    fn deterministic_and_capped() {
        let d = dataset(&[10, 8]);
        assert_eq!(
            build_pair_instances(&d, 3, None).unwrap(),
            build_pair_instances(&d, 3, None).unwrap()
        );
        let capped = build_pair_instances(&d, 3, Some(20)).unwrap();
        assert_eq!(capped.len(), 20);
        assert_eq!(capped, build_pair_instances(&d, 3, Some(20)).unwrap());
        assert_eq!(build_pair_instances(&d, 3, Some(1000)).unwrap().len(), 45 + 28);
        assert!(build_pair_instances(&d, 3, Some(0)).is_err());
    }

    #[test]
    fn both_labels_always_present() {
        for seed in 0..20 {
            let pairs = build_pair_instances(&dataset(&[2, 2]), seed, None).unwrap();
            assert!(pairs.iter().any(|p| p.label == 1));
            assert!(pairs.iter().any(|p| p.label == -1));
        }
    }

    #[test]
    fn singleton_query_is_rejected() {
        assert!(build_pair_instances(&dataset(&[1]), 0, None).is_err());
    }
}
