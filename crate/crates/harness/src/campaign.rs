use std::path::Path;

use ei_core::stats::DefectSampleSet;
use log::{info, warn};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::{
    analyze_logs, generate_test_cases, run_evaluation, CaseConfig, HarnessConfig, HarnessError, Mttf, Result,
    SiteModel, TestProfile,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub evaluations: usize,
    pub cases_per_round: usize,
    pub seed: u64,
    pub label: String,
    pub cases: CaseConfig,
    pub harness: HarnessConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            evaluations: 500,
            cases_per_round: 1000,
            seed: 2005,
            label: "real".into(),
            cases: CaseConfig::default(),
            harness: HarnessConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: usize,
    pub seed: u64,
    pub defect_density: u64,
    pub testers: usize,
    pub mttf: Mttf,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub samples: DefectSampleSet,
    pub rounds: Vec<RoundSummary>,
}

/// Seed of round `round`, mixed with splitmix64 so neighbouring rounds get
/// unrelated streams.
pub fn round_seed(seed: u64, round: usize) -> u64 {
    let mut z = seed.wrapping_add((round as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Repeat generate → run → analyze for `cfg.evaluations` rounds, one defect
/// density per round. Each round logs to `work_dir/round-NNNN`. A round cut
/// short by an outage keeps its partial density as a flagged discard.
/// `before_round` runs ahead of every round.
pub fn run_campaign(
    target: &Url,
    model: &SiteModel,
    profiles: &[TestProfile],
    cfg: &CampaignConfig,
    work_dir: &Path,
    mut before_round: impl FnMut(usize),
) -> Result<CampaignResult> {
    cfg.harness.validate()?;
    let mut samples = DefectSampleSet::from_raw(&[], cfg.label.clone());
    let mut rounds = Vec::with_capacity(cfg.evaluations);
    for round in 0..cfg.evaluations {
        before_round(round);
        let seed = round_seed(cfg.seed, round);
        let cases = generate_test_cases(model, profiles, cfg.cases_per_round, seed, &cfg.cases)?;
        let harness = HarnessConfig { seed, ..cfg.harness.clone() };
        let dir = work_dir.join(format!("round-{round:04}"));
        let (log, testers, aborted) = match run_evaluation(target, &cases, &harness, &dir) {
            Ok(eval) => (analyze_logs(&eval.log_files)?, eval.testers, None),
            Err(HarnessError::TargetDown { message, log_dir }) => {
                warn!("round {round} aborted: {message}");
                let partial = tester_logs(&log_dir)?;
                (analyze_logs(&partial)?, partial.len(), Some(message))
            }
            Err(e) => return Err(e),
        };
        let density = log.defect_density;
        match &aborted {
            Some(message) => samples.push_flagged(density as f64, format!("round {round} aborted: {message}")),
            None => samples.push(density as f64),
        }
        info!("round {round}: density {density} from {testers} tester(s)");
        rounds.push(RoundSummary { round, seed, defect_density: density, testers, mttf: log.mttf, aborted });
    }
    Ok(CampaignResult { samples, rounds })
}

fn tester_logs(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))? {
        let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "log") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}
