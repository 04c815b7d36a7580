use super::engine::{run_single, RunResult};
use super::{Result, SimConfig};
use crate::par::{try_map_indexed, Execution};
use crate::stats::DefectSampleSet;

/// Run `cfg.runs` independent runs and return one defect density per run.
pub fn run_campaign(cfg: &SimConfig) -> Result<DefectSampleSet> {
    run_campaign_with(cfg, Execution::default()).map(|runs| samples_from_runs(&runs))
}

/// Runs share nothing, so they may be spread across workers; results are
/// always in run-index order.
pub fn run_campaign_with(cfg: &SimConfig, exec: Execution) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    try_map_indexed(cfg.runs, exec, |i| run_single(cfg, i as u64))
}

pub fn samples_from_runs(runs: &[RunResult]) -> DefectSampleSet {
    let raw: Vec<f64> = runs.iter().map(|r| r.defect_density as f64).collect();
    DefectSampleSet::from_raw(&raw, "ideal")
}
