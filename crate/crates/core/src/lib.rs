//! Object ranking with the analogy kernel.
//!
//! Training rankings are reduced to labelled pairs of items. A kernel SVM
//! with the analogy kernel (a similarity between the feature-wise
//! differences of two item pairs) learns to recognise preferences, its
//! calibrated outputs form a reciprocal preference matrix for a new query,
//! and a Bradley-Terry-Luce fit turns that matrix into a total order.
//!
//! The crate also ships the reference rankers used for comparison (expected
//! rank regression, a linear ranking SVM and an analogical-transfer ranker)
//! and the benchmark harness that evaluates them.

pub mod baselines;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod kernel;
pub mod ranker;
pub mod rng;
pub mod svm;

pub use error::{Error, Result};

pub use data::{
    FeatureKind, FeatureSchema, FeatureVector, NormalizationScope, NormalizationStats, RankedDataset,
    RankedQuery, Ranking,
};
pub use kernel::{KernelSpec, KernelVariant};
pub use ranker::{AnkerConfig, AnkerModel, BtlParams, PairInstance, Prediction, PreferenceMatrix};
pub use svm::{PlattParams, SvmModel};
