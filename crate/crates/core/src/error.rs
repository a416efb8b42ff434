use thiserror::Error;

use crate::coloring::Coloring;
use crate::recursion::RecursionTrace;

pub type Result<T, E = DiscError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DiscError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("norm model {model} violated: {detail}")]
    ModelViolation { model: &'static str, detail: String },

    #[error("active index set must be nonempty")]
    EmptyActiveSet,

    #[error("active index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("merge conflict: base coloring is nonzero at index {index}")]
    MergeConflict { index: usize },

    #[error("invalid coloring value {value} at index {index}")]
    InvalidColoring { index: usize, value: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exhaustive search refused: n = {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("no state with support >= {min_support} found; best infeasible support {}", best.support())]
    NoFeasible { min_support: usize, best: Box<Coloring> },

    #[error("random coloring exceeded threshold {threshold} in all {attempts} attempts (best {best_max_abs})")]
    RetryExhausted {
        threshold: f64,
        attempts: usize,
        best_max_abs: f64,
        best: Box<Coloring>,
    },

    #[error("recursion round {round} failed: {source}")]
    RoundFailed {
        round: usize,
        #[source]
        source: Box<DiscError>,
        trace: Box<RecursionTrace>,
    },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
