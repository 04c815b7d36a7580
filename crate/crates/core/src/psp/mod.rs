//! Personal Software Process quality measures.
//!
//! Metrics are computed per program record and collected into trend series
//! with least-squares slopes. A metric that cannot be computed for a record
//! is carried as [`MetricValue::NotApplicable`], never as zero.

mod io;
mod metrics;
mod record;
mod trend;

use thiserror::Error;

pub use io::{read_records_csv, read_records_json, write_series_csv, CSV_HEADER};
pub use metrics::{appraisal_failure_ratio, defects_per_kloc, elimination_rate, introduction_rate, yield_percent};
pub use record::{DefectEntry, Phase, PhaseTimes, PspProgramRecord};
pub use trend::{least_squares_slope, trend_report, MetricValue, PspTrendReport, Series};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PspError {
    #[error("program {program}: {message}")]
    InvalidRecord { program: u32, message: String },
    #[error("no defects injected before compile; yield is not applicable")]
    NoDefects,
    #[error("zero new/changed LOC")]
    ZeroLoc,
    #[error("defects present but no time recorded in the {0} phases")]
    ZeroTime(&'static str),
    #[error("no compile or test time recorded")]
    ZeroFailureTime,
    #[error("no program records")]
    Empty,
    #[error("program numbers must strictly increase: {next} follows {prev}")]
    NotIncreasing { prev: u32, next: u32 },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: u64, column: String, message: String },
}

pub type Result<T> = std::result::Result<T, PspError>;
