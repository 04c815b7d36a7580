//! Project configuration, read from TOML:
//!
//! ```toml
//! [simulation]            # ideal-conditions simulator
//! runs = 500
//! fault_probability = 0.03
//!
//! [analysis]              # screening, histogram, goodness of fit
//! policy = { method = "tukey", k = 3.0 }
//! bin_width = 1.0
//! test = { method = "chi-square", estimated_params = 2 }
//!
//! [crawl]
//! max_depth = 16
//! [crawl.auth.views.professor]
//! entry = "/professor/"
//! token = "prof-secret"
//!
//! [evaluation]            # harness campaign
//! evaluations = 500
//! [evaluation.harness]
//! duration_s = 100.0
//!
//! [[profiles]]
//! view = "public"
//! action_mix = { insert = 0.0, delete = 0.0, update = 0.0, read = 1.0 }
//! ```
//!
//! Every section and key is optional.

use std::path::Path;

use ei_core::sim::SimConfig;
use ei_core::stats::{AnomalyPolicy, GofConfig, GofTest, SolverConfig};
use ei_harness::{default_profiles, CampaignConfig, CrawlAuth, CrawlLimits, TestProfile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub policy: AnomalyPolicy,
    pub bin_width: f64,
    pub origin: f64,
    pub test: GofTest,
    pub significance: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let gof = GofConfig::default();
        let solver = SolverConfig::default();
        AnalysisConfig {
            policy: AnomalyPolicy::default(),
            bin_width: gof.bin_width,
            origin: gof.origin,
            test: gof.test,
            significance: gof.significance,
            tolerance: solver.tolerance,
            max_iterations: solver.max_iterations,
        }
    }
}

impl AnalysisConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            gof: Some(GofConfig {
                test: self.test,
                significance: self.significance,
                bin_width: self.bin_width,
                origin: self.origin,
            }),
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrawlConfig {
    #[serde(flatten)]
    pub limits: CrawlLimits,
    pub auth: CrawlAuth,
}

impl Default for CrawlConfig {
    fn default() -> Self {
        CrawlConfig { limits: CrawlLimits::default(), auth: CrawlAuth::mock() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EiConfig {
    pub simulation: SimConfig,
    pub analysis: AnalysisConfig,
    pub crawl: CrawlConfig,
    pub evaluation: CampaignConfig,
    pub profiles: Vec<TestProfile>,
}

impl Default for EiConfig {
    fn default() -> Self {
        EiConfig {
            simulation: SimConfig::default(),
            analysis: AnalysisConfig::default(),
            crawl: CrawlConfig::default(),
            evaluation: CampaignConfig::default(),
            profiles: default_profiles(),
        }
    }
}

impl EiConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(EiConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// A global `--seed` drives both the simulator and the evaluation campaign.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.simulation.seed = s;
            self.evaluation.seed = s;
        }
        self
    }
}
