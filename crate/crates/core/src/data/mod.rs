//! Items, rankings, dataset ingestion and feature normalisation.

pub mod dataset;
pub mod ks;
pub mod normalize;

pub use dataset::{
    load_dataset, load_dataset_with_schema, load_items, read_dataset, read_items, save_dataset,
    write_dataset, FeatureKind, FeatureSchema, FeatureVector, RankedDataset, RankedQuery, Ranking,
};
pub use ks::{
    choose_normalization_scope, choose_scope_for_items, ks_gate, ks_two_sample, KsDecision,
    DEFAULT_ALPHA,
};
pub use normalize::{
    minmax_fit_apply, zscore_fit_apply, NormalizationMode, NormalizationScope, NormalizationStats,
};
