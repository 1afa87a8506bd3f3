//! Ranking loss, the benchmark protocol and result tables.

pub mod experiment;
pub mod loss;
pub mod report;

pub use experiment::{
    average_ranks, competition_ranks, mean_std, parse_methods, predict_orderings, run_experiment,
    run_once, ExperimentConfig, ExperimentResult, Method,
};
pub use loss::{discordant_pairs, ranking_loss};
pub use report::{format_table, write_csv};
