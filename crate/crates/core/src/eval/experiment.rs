//! The train-on-one, test-on-another benchmark protocol.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ranking_loss;
use crate::baselines::{able2rank_lite, err_fit, order_by_score, ranksvm_fit, RankSvmConfig};
use crate::data::{
    choose_scope_for_items, normalize::fit_pair, FeatureVector, NormalizationMode,
    NormalizationScope, RankedDataset, Ranking, DEFAULT_ALPHA,
};
use crate::error::{Error, Result};
use crate::ranker::{AnkerConfig, AnkerModel};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Anker,
    Err,
    RankSvm,
    Able2Rank,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Anker, Method::Err, Method::RankSvm, Method::Able2Rank];

    pub fn name(self) -> &'static str {
        match self {
            Method::Anker => "anker",
            Method::Err => "err",
            Method::RankSvm => "ranksvm",
            Method::Able2Rank => "able2rank",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::UnsupportedMethod(s.trim().to_string()))
    }
}

/// Parses a comma-separated method list, dropping repeats.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub anker: AnkerConfig,
    pub ranksvm: RankSvmConfig,
    pub able2rank_k: usize,
    /// Overrides the KS-gate decision for every method when set.
    pub scope: Option<NormalizationScope>,
    pub alpha: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            anker: AnkerConfig::default(),
            ranksvm: RankSvmConfig::default(),
            able2rank_k: crate::baselines::DEFAULT_K,
            scope: None,
            alpha: DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub problem: String,
    pub method: Method,
    pub mean: f64,
    pub std: f64,
    pub losses: Vec<f64>,
    /// Position of `mean` among the methods on this problem; equal means
    /// share the smallest rank.
    pub rank: usize,
}

fn normalized_pair(
    mode: NormalizationMode,
    train: &RankedDataset,
    test: &RankedDataset,
    config: &ExperimentConfig,
) -> Result<(RankedDataset, RankedDataset)> {
    let test_items: Vec<FeatureVector> = test.items().cloned().collect();
    let scope = match config.scope {
        Some(s) => s,
        None => choose_scope_for_items(train.items(), &test_items, config.alpha)?,
    };
    let (a, b) = fit_pair(mode, scope, train.items(), test_items.iter())?;
    Ok((
        train.map_items(|x| a.apply_one(x))?,
        test.map_items(|x| b.apply_one(x))?,
    ))
}

/// Predicted orderings (best first) for every test query.
pub fn predict_orderings(
    method: Method,
    train: &RankedDataset,
    test: &RankedDataset,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    train.check_compatible(&test.schema)?;
    match method {
        Method::Anker => {
            let test_items: Vec<FeatureVector> = test.items().cloned().collect();
            let anker = AnkerConfig {
                scope: config.scope,
                alpha: config.alpha,
                ..config.anker.clone()
            };
            let model = AnkerModel::fit(train, &test_items, &anker, seed)?;
            test.queries
                .iter()
                .map(|q| model.rank(&q.items).map(|p| p.ordering))
                .collect()
        }
        Method::Err => {
            let (tr, te) = normalized_pair(NormalizationMode::ZScore, train, test, config)?;
            let model = err_fit(&tr)?;
            Ok(te
                .queries
                .iter()
                .map(|q| order_by_score(&model.scores(&q.items), false))
                .collect())
        }
        Method::RankSvm => {
            let (tr, te) = normalized_pair(NormalizationMode::ZScore, train, test, config)?;
            let model = ranksvm_fit(&tr, &config.ranksvm, seed)?;
            Ok(te
                .queries
                .iter()
                .map(|q| order_by_score(&model.scores(&q.items), true))
                .collect())
        }
        Method::Able2Rank => {
            let (tr, te) = normalized_pair(NormalizationMode::MinMax, train, test, config)?;
            te.queries
                .iter()
                .map(|q| able2rank_lite(&tr, &q.items, config.able2rank_k).map(|p| p.ordering))
                .collect()
        }
    }
}

/// Mean ranking loss over the test queries for one seeded run.
pub fn run_once(
    method: Method,
    train: &RankedDataset,
    test: &RankedDataset,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<f64> {
    if test.queries.is_empty() {
        return Err(Error::InvalidArgument("test set has no queries".into()));
    }
    let orderings = predict_orderings(method, train, test, config, seed)?;
    let mut total = 0.0;
    for (q, ordering) in test.queries.iter().zip(&orderings) {
        let predicted = Ranking::from_ordering(ordering)?;
        total += ranking_loss(predicted.positions(), q.ranking.positions())?;
    }
    Ok(total / test.queries.len() as f64)
}

/// Mean and sample standard deviation; exactly `(x, 0)` when all values
/// equal `x`.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    if values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// 1-based ranks of `scores` (lower is better); equal scores share the
/// smallest rank of their group.
pub fn competition_ranks(scores: &[f64]) -> Vec<usize> {
    scores
        .iter()
        .map(|&s| 1 + scores.iter().filter(|&&o| o < s).count())
        .collect()
}

/// Runs every method `repeats` times on one problem. Each (method, run)
/// gets its own seed stream derived from `seed`.
pub fn run_experiment(
    problem: &str,
    train: &RankedDataset,
    test: &RankedDataset,
    methods: &[Method],
    repeats: usize,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentResult>> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    train.check_compatible(&test.schema)?;
    let jobs: Vec<(Method, usize)> = methods
        .iter()
        .flat_map(|&m| (0..repeats).map(move |r| (m, r)))
        .collect();
    let losses: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, r)| run_once(m, train, test, config, derive_seed(seed, &[m.stream(), r as u64])))
        .collect::<Result<_>>()?;

    let mut results: Vec<ExperimentResult> = methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let runs = losses[k * repeats..(k + 1) * repeats].to_vec();
            let (mean, std) = mean_std(&runs);
            ExperimentResult {
                problem: problem.to_string(),
                method,
                mean,
                std,
                losses: runs,
                rank: 0,
            }
        })
        .collect();
    let means: Vec<f64> = results.iter().map(|r| r.mean).collect();
    for (r, rank) in results.iter_mut().zip(competition_ranks(&means)) {
        r.rank = rank;
    }
    Ok(results)
}

/// Column means of a problems-by-methods rank matrix.
pub fn average_ranks(ranks: &[Vec<usize>]) -> Result<Vec<f64>> {
    let first = ranks.first().ok_or(Error::EmptySample)?;
    let m = first.len();
    if let Some(row) = ranks.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: row.len(),
        });
    }
    let p = ranks.len() as f64;
    Ok((0..m)
        .map(|k| ranks.iter().map(|r| r[k] as f64).sum::<f64>() / p)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names() {
        assert_eq!("RankSVM".parse::<Method>().unwrap(), Method::RankSvm);
        assert!(matches!("ranknet".parse::<Method>(), Err(Error::UnsupportedMethod(_))));
        assert_eq!(parse_methods("anker, err,anker").unwrap(), vec![Method::Anker, Method::Err]);
        assert!(parse_methods("").is_err());
    }

    #[test]
    fn ranks_share_the_minimum() {
        assert_eq!(competition_ranks(&[0.05, 0.02, 0.02]), vec![3, 1, 1]);
        assert_eq!(competition_ranks(&[0.1]), vec![1]);
    }

    #[test]
    fn average_rank_examples() {
        assert_eq!(average_ranks(&vec![vec![1]; 6]).unwrap(), vec![1.0]);
        assert_eq!(average_ranks(&[vec![1], vec![2]]).unwrap(), vec![1.5]);
        assert_eq!(average_ranks(&[vec![3, 1]]).unwrap(), vec![3.0, 1.0]);
        assert!(average_ranks(&[vec![1, 2], vec![1]]).is_err());
        assert!(average_ranks(&[]).is_err());
    }

    #[test]
    fn mean_and_std() {
        assert_eq!(mean_std(&[0.1, 0.1, 0.1]), (0.1, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
    }
}
