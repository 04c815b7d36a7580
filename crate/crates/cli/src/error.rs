use std::path::{Path, PathBuf};

use ei_core::psp::PspError;
use ei_core::sim::SimError;
use ei_core::stats::StatsError;
use ei_harness::HarnessError;
use thiserror::Error;

/// Process exit codes. Stable; scripts may rely on them.
pub mod code {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const EMPTY_SAMPLE: i32 = 3;
    pub const NON_IDENTIFIABLE: i32 = 4;
    pub const NO_CONVERGENCE: i32 = 5;
    pub const ALL_DISCARDED: i32 = 6;
    pub const TARGET_DOWN: i32 = 7;
    pub const AUTH_FAILED: i32 = 8;
    pub const MISSING_PHASE: i32 = 9;
    pub const PARSE: i32 = 10;
    pub const PSP_METRIC: i32 = 11;
    pub const LOCKED: i32 = 12;
    pub const INVARIANT_BREACH: i32 = 13;
    pub const CONFIG: i32 = 14;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error("phase `{label}` has no fit report at {}", path.display())]
    MissingPhase { label: String, path: PathBuf },
    #[error("project is locked by another command ({})", path.display())]
    Locked { path: PathBuf },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Psp(#[from] PspError),
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => code::USAGE,
            CliError::Config(_) => code::CONFIG,
            CliError::Io { .. } => code::IO,
            CliError::Artifact { .. } => code::PARSE,
            CliError::MissingPhase { .. } => code::MISSING_PHASE,
            CliError::Locked { .. } => code::LOCKED,
            CliError::Stats(e) => stats_code(e),
            CliError::Sim(SimError::InvalidConfig(_)) => code::CONFIG,
            CliError::Sim(SimError::InvariantBreach(_)) => code::INVARIANT_BREACH,
            CliError::Harness(e) => match e {
                HarnessError::Unreachable { .. } | HarnessError::TargetDown { .. } => code::TARGET_DOWN,
                HarnessError::AuthFailed(_) => code::AUTH_FAILED,
                HarnessError::EmptyModel => code::EMPTY_SAMPLE,
                HarnessError::InvalidProfile(_) | HarnessError::InvalidConfig(_) => code::CONFIG,
                HarnessError::Io { .. } => code::IO,
                HarnessError::Stats(e) => stats_code(e),
            },
            CliError::Psp(PspError::Parse { .. }) => code::PARSE,
            CliError::Psp(_) => code::PSP_METRIC,
        }
    }
}

fn stats_code(e: &StatsError) -> i32 {
    match e {
        StatsError::EmptySample | StatsError::InsufficientData(_) => code::EMPTY_SAMPLE,
        StatsError::NonIdentifiable { .. } => code::NON_IDENTIFIABLE,
        StatsError::NoConvergence { .. } => code::NO_CONVERGENCE,
        StatsError::AllDiscarded { .. } => code::ALL_DISCARDED,
        StatsError::Parse { .. } => code::PARSE,
        StatsError::InvalidModel { .. } | StatsError::InvalidArgument(_) => code::USAGE,
    }
}
