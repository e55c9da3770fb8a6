//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("minibatch index set is empty")]
    EmptyMinibatch,

    #[error("minibatch index {index} out of range for {len} data points")]
    BadMinibatchIndex { index: usize, len: usize },

    #[error("chain aborted at iteration {iteration}: {reason}")]
    ChainAborted { iteration: usize, reason: String },

    #[error("trace is degenerate (constant); {0} undefined")]
    DegenerateTrace(&'static str),

    #[error("trace too short: length {len} must exceed max lag {max_lag}")]
    TraceTooShort { len: usize, max_lag: usize },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("training aborted: {0}")]
    TrainingAborted(String),

    #[error("rejection sampling budget exceeded ({0} draws)")]
    RejectionBudgetExceeded(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("all candidate scores are non-finite")]
    AllScoresNonFinite,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
