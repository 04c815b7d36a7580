use std::path::PathBuf;

use ei_core::View;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("target unreachable at {url}: {message}")]
    Unreachable { url: String, message: String },
    #[error("authentication failed for the {0} view")]
    AuthFailed(View),
    #[error("site model has no usable entry point")]
    EmptyModel,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("target down: {message} (partial logs kept in {})", log_dir.display())]
    TargetDown { message: String, log_dir: PathBuf },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Stats(#[from] ei_core::stats::StatsError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
