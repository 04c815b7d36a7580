use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("invalid Weibull parameters: shape={shape}, scale={scale} (both must be finite and > 0)")]
    InvalidModel { shape: f64, scale: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty sample: no input values")]
    EmptySample,
    #[error("every value was discarded as anomalous ({discarded} of {discarded})")]
    AllDiscarded { discarded: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("shape is not identifiable: all {n} positive samples equal {value}")]
    NonIdentifiable { n: usize, value: f64 },
    #[error("no convergence after {iterations} iterations (|g| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, StatsError>;
