#![allow(dead_code)]

use std::path::{Path, PathBuf};

use anker_rank::data::{save_dataset, FeatureSchema, FeatureVector, RankedDataset, RankedQuery, Ranking};
use anker_rank::rng;
use rand::Rng as _;

/// Mixed-sign weights of the ground-truth utility.
pub const WEIGHTS: [f64; 10] = [1.0, -0.8, 0.6, -0.4, 0.9, -0.7, 0.5, -0.3, 0.8, -0.2];

pub fn utility(x: &[f64]) -> f64 {
    x.iter().zip(WEIGHTS.iter()).map(|(a, w)| a * w).sum()
}

/// `queries` rankings of `n` items drawn uniformly from the unit cube and
/// ordered by the utility, best first.
pub fn linear_dataset(seed: u64, queries: usize, n: usize) -> RankedDataset {
    let mut rng = rng::seeded(seed);
    let d = WEIGHTS.len();
    let queries = (0..queries)
        .map(|q| {
            let items: Vec<FeatureVector> = (0..n)
                .map(|_| FeatureVector((0..d).map(|_| rng.random::<f64>()).collect()))
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| utility(&items[b]).total_cmp(&utility(&items[a])));
            RankedQuery::new(format!("q{q}"), items, Ranking::from_ordering(&order).unwrap()).unwrap()
        })
        .collect();
    RankedDataset {
        schema: FeatureSchema::numeric((1..=d).map(|k| format!("f{k}")).collect()),
        queries,
    }
}

/// One-feature rankings where larger values win.
pub fn monotone_dataset(seed: u64, queries: usize, n: usize) -> RankedDataset {
    let mut rng = rng::seeded(seed);
    let queries = (0..queries)
        .map(|q| {
            let items: Vec<FeatureVector> = (0..n).map(|_| FeatureVector(vec![rng.random::<f64>()])).collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| items[b][0].total_cmp(&items[a][0]));
            RankedQuery::new(format!("q{q}"), items, Ranking::from_ordering(&order).unwrap()).unwrap()
        })
        .collect();
    RankedDataset {
        schema: FeatureSchema::numeric(vec!["x".into()]),
        queries,
    }
}

pub fn write(dir: &Path, name: &str, data: &RankedDataset) -> PathBuf {
    let path = dir.join(name);
    save_dataset(data, &path).unwrap();
    path
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_anker-rank")
}
