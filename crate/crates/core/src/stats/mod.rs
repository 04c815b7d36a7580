//! Defect-density statistics: anomaly screening, histograms, Weibull
//! maximum-likelihood fitting, goodness of fit and model comparison.
//!
//! All functions are pure over their inputs.

mod compare;
mod error;
mod gamma;
mod gof;
mod histogram;
mod mle;
mod samples;
mod weibull;

pub use compare::{compare_models, comparison_grid, overlay_curves, ComparisonReport, Verdict, GRID_POINTS};
pub use error::{Result, StatsError};
pub use gamma::gamma;
pub use gof::{expected_cells, goodness_of_fit, merge_cells, GofResult, GofTest, MIN_EXPECTED};
pub use histogram::{build_histogram, histogram_of, Bin, Histogram};
pub use mle::{
    fit_positive, fit_weibull, log_likelihood, FitReport, GofConfig, RootMethod, ScoreFunction, ShapeRoot,
    SolverConfig,
};
pub use samples::{discard_anomalies, discard_anomalies_labeled, AnomalyPolicy, DefectSampleSet, Discarded};
pub use weibull::WeibullModel;
