use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed header, unknown column kind, missing or unexpected column.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("query '{query}': duplicate rank {rank}")]
    DuplicateRank { query: String, rank: usize },

    #[error("query '{query}': ranks are not contiguous 1..{n}")]
    NonContiguousRanks { query: String, n: usize },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: unknown level '{value}' for ordinal feature '{feature}'")]
    UnknownLevel {
        line: u64,
        feature: String,
        value: String,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("value {value} outside the kernel domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric within tolerance {0}")]
    NotSymmetric(f64),

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("preference matrix is not reciprocal at ({i}, {j})")]
    NotReciprocal { i: usize, j: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported method '{0}'")]
    UnsupportedMethod(String),
}

impl Error {
    /// Whether the error stems from malformed user input rather than an
    /// internal failure.
    pub fn is_data_error(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. } | Error::NonFinite(_) | Error::Json(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
