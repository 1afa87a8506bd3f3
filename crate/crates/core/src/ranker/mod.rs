//! The analogy-kernel ranker: pairwise SVM over item pairs, calibrated
//! into a reciprocal preference relation and aggregated with BTL.

pub mod btl;
pub mod pairs;
pub mod preference;

use serde::{Deserialize, Serialize};

use crate::data::{
    choose_scope_for_items, normalize::fit_pair, FeatureVector, NormalizationMode,
    NormalizationScope, NormalizationStats, RankedDataset, DEFAULT_ALPHA,
};
use crate::error::{Error, Result};
use crate::kernel::{GramMatrix, KernelSpec};
use crate::rng::derive_seed;
use crate::svm::{platt_fit, select_c, smo_train, CvConfig, SmoConfig, SvmModel};

pub use btl::{btl_fit, rank_from_theta, BtlFit, BtlParams};
pub use pairs::{build_pair_instances, PairInstance};
pub use preference::{preference_matrix, PreferenceMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct AnkerConfig {
    pub kernel: KernelSpec,
    /// Fixed cost parameter; `None` selects it by cross-validation.
    pub c: Option<f64>,
    pub cv: CvConfig,
    pub pair_cap: Option<usize>,
    /// Overrides the KS-gate decision when set.
    pub scope: Option<NormalizationScope>,
    pub alpha: f64,
    pub svm_tol: f64,
    pub btl_tol: f64,
    pub btl_max_iter: usize,
}

impl Default for AnkerConfig {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::POLY2,
            c: None,
            cv: CvConfig::default(),
            pair_cap: None,
            scope: None,
            alpha: DEFAULT_ALPHA,
            svm_tol: SmoConfig::DEFAULT_TOL,
            btl_tol: btl::DEFAULT_TOL,
            btl_max_iter: btl::DEFAULT_MAX_ITER,
        }
    }
}

/// Ranking of one query: item indices best to worst, the BTL utilities
/// and optionally the preference relation they were fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub ordering: Vec<usize>,
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference_matrix: Option<PreferenceMatrix>,
}

/// A fitted ranker. Support pairs are stored already normalised, aligned
/// with the support vectors of `svm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnkerModel {
    pub kernel: KernelSpec,
    pub train_stats: NormalizationStats,
    pub test_stats: NormalizationStats,
    pub svm: SvmModel,
    pub support_pairs: Vec<PairInstance>,
    pub btl_tol: f64,
    pub btl_max_iter: usize,
}

impl AnkerModel {
    /// Fits on `train`. `test_items` are the items that will be ranked; they
    /// only enter through the normalisation statistics.
    pub fn fit(
        train: &RankedDataset,
        test_items: &[FeatureVector],
        config: &AnkerConfig,
        seed: u64,
    ) -> Result<Self> {
        let d = train.dim();
        if let Some(bad) = test_items.iter().find(|x| x.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        let scope = match config.scope {
            Some(s) => s,
            None => choose_scope_for_items(train.items(), test_items, config.alpha)?,
        };
        let (train_stats, test_stats) =
            fit_pair(NormalizationMode::MinMax, scope, train.items(), test_items.iter())?;
        let normalized = train.map_items(|x| train_stats.apply_one(x))?;

        let pairs = build_pair_instances(&normalized, derive_seed(seed, &[0]), config.pair_cap)?;
        let diffs: Vec<Vec<f64>> = pairs.iter().map(PairInstance::difference).collect();
        let labels: Vec<i8> = pairs.iter().map(|p| p.label).collect();
        let gram = GramMatrix::from_diffs(&diffs, config.kernel);

        let c = match config.c {
            Some(c) => c,
            None => select_c(&gram, &labels, &CvConfig { tol: config.svm_tol, ..config.cv.clone() }, derive_seed(seed, &[1]))?,
        };
        let mut svm = smo_train(&gram, &labels, c, config.svm_tol, derive_seed(seed, &[2]))?;
        let decisions: Vec<f64> = (0..pairs.len())
            .map(|t| svm.decision_with(|k| gram.get(t, svm.support[k])))
            .collect();
        svm.platt = Some(platt_fit(&decisions, &labels)?);
        let support_pairs = svm.support.iter().map(|&i| pairs[i].clone()).collect();

        Ok(Self {
            kernel: config.kernel,
            train_stats,
            test_stats,
            svm,
            support_pairs,
            btl_tol: config.btl_tol,
            btl_max_iter: config.btl_max_iter,
        })
    }

    /// Preference relation over raw query items.
    pub fn preference_matrix(&self, items: &[FeatureVector]) -> Result<PreferenceMatrix> {
        let normalized = self.test_stats.apply(items)?;
        preference_matrix(&self.svm, &self.support_pairs, self.kernel, &normalized)
    }

    pub fn rank(&self, items: &[FeatureVector]) -> Result<Prediction> {
        if items.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a query needs at least 2 items, got {}",
                items.len()
            )));
        }
        let p = self.preference_matrix(items)?;
        let fit = btl_fit(&p, self.btl_tol, self.btl_max_iter)?;
        Ok(Prediction {
            ordering: rank_from_theta(&fit.params.theta),
            theta: fit.params.theta,
            preference_matrix: Some(p),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Fits on `train` and ranks `query`.
pub fn anker_rank(
    train: &RankedDataset,
    query: &[FeatureVector],
    config: &AnkerConfig,
    seed: u64,
) -> Result<Prediction> {
    AnkerModel::fit(train, query, config, seed)?.rank(query)
}
