//! Reliability evaluation toolkit core.
//!
//! * [`stats`]: defect-density samples, histograms, Weibull maximum-likelihood
//!   fitting, goodness-of-fit tests and model comparison.
//! * [`sim`]: deterministic discrete-event simulation of a web server operating
//!   under ideal conditions, producing one defect-density value per run.
//! * [`psp`]: Personal Software Process quality measures and their trends.
//! * [`par`]: data-parallel helpers with a sequential fallback.

pub mod par;
pub mod psp;
pub mod sim;
pub mod stats;

mod view;

pub use view::{View, ViewMix};
