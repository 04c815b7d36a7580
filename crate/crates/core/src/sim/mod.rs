//! Discrete-event simulation of the target operating under ideal conditions.
//!
//! Users arrive with exponential gaps, are admitted with probability
//! `1/(n+1)` (n = users in system) subject to a hard capacity, and hold the
//! server for a Normal service time. Each admitted user may hit a fault
//! (Bernoulli, `fault_probability`), which ends its stay early and counts as
//! one defect. A run processes `events_per_run` arrivals and then drains; its
//! defect density is the number of faults observed.
//!
//! Every run draws from its own ChaCha8 stream selected by `(seed, run_index)`,
//! and each user's service draws come from a per-user sub-seed taken at
//! arrival, so runs with different fault probabilities see common random
//! numbers.

mod campaign;
mod config;
mod engine;

use thiserror::Error;

pub use campaign::{run_campaign, run_campaign_with, samples_from_runs};
pub use config::SimConfig;
pub use engine::{
    admission_probability, init_run, run_single, run_single_traced, Counters, EventKind, RunResult, SimState,
    SimStats, TraceEvent, UserRef,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("simulation invariant breached: {0}")]
    InvariantBreach(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
