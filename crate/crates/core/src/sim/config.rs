use serde::{Deserialize, Serialize};

use super::{Result, SimError};
use crate::ViewMix;

/// Simulation parameters. Times are in simulated seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub interarrival_mean: f64,
    pub service_mean: f64,
    pub service_std: f64,
    /// Floor applied to Normal service draws.
    pub min_service_time: f64,
    pub capacity: usize,
    pub events_per_run: usize,
    pub runs: usize,
    /// Fault chance per admitted user.
    pub fault_probability: f64,
    pub seed: u64,
    pub view_mix: ViewMix,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            interarrival_mean: 4.0,
            service_mean: 3.0,
            service_std: 1.0,
            min_service_time: 0.01,
            capacity: 100,
            events_per_run: 100,
            runs: 500,
            fault_probability: 0.03,
            seed: 2005,
            view_mix: ViewMix::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("interarrival_mean", self.interarrival_mean)?;
        positive("service_mean", self.service_mean)?;
        positive("service_std", self.service_std)?;
        positive("min_service_time", self.min_service_time)?;
        if !(0.0..=1.0).contains(&self.fault_probability) {
            return Err(SimError::InvalidConfig(format!(
                "fault_probability must lie in [0, 1], got {}",
                self.fault_probability
            )));
        }
        if !self.view_mix.is_valid() {
            return Err(SimError::InvalidConfig("view_mix weights must be >= 0 and sum to 1".into()));
        }
        Ok(())
    }
}
