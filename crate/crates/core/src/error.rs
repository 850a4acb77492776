use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty counts")]
    EmptyCounts,

    #[error("axis angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("response probabilities not normalized: {0}")]
    ContractViolation(String),

    #[error("joint distribution invalid: {0}")]
    InvalidDistribution(String),

    #[error("measure undefined: model is not deterministic")]
    MeasureUndefined,

    #[error("analytic measure not available for this model")]
    AnalyticUnsupported,

    #[error("ensemble must be a hemisphere distribution")]
    UniformEnsemble,

    #[error("inference undefined: field label axis does not match the measurement axis")]
    InferenceUndefined,

    #[error("{0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
