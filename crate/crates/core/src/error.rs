use thiserror::Error;

/// Errors produced by the inference and filtering primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("outcome set mismatch: {0}")]
    OutcomeMismatch(String),

    #[error("outcome labels must be unique and non-empty: {0}")]
    InvalidOutcomes(String),

    #[error("weight {value} at index {index} is outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },

    #[error("{kind} normalization violated at row {row}: got {value}")]
    Normalization {
        kind: &'static str,
        row: usize,
        value: f64,
    },

    #[error("hybrid joint satisfies neither normalization (sum-of-max {sum_of_max}, max-of-sum {max_of_sum})")]
    HybridNormalization { sum_of_max: f64, max_of_sum: f64 },

    #[error("degenerate evidence: every posterior weight is zero")]
    DegenerateEvidence,

    #[error("degenerate innovation covariance: Cholesky factorization failed")]
    DegenerateInnovation,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported state embedding from {from} to {to}")]
    UnsupportedEmbedding { from: String, to: String },

    #[error("mode {0} has zero predicted probability but nonzero incoming weight")]
    ZeroPredictedMode(usize),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
