//! A straight-line re-implementation of the ideal-conditions model: arrivals
//! are walked in order and each user's exit time is kept in a plain vector.
//! Uses its own RNG and draw order, so agreement is statistical only.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

pub struct OracleParams {
    pub interarrival_mean: f64,
    pub service_mean: f64,
    pub service_std: f64,
    pub capacity: usize,
    pub arrivals: usize,
    pub fault_probability: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            interarrival_mean: 4.0,
            service_mean: 3.0,
            service_std: 1.0,
            capacity: 100,
            arrivals: 100,
            fault_probability: 0.03,
        }
    }
}

fn normal(rng: &mut StdRng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Faults seen in one run.
pub fn run_once(p: &OracleParams, rng: &mut StdRng) -> u64 {
    let mut exits: Vec<f64> = Vec::new();
    let mut clock = 0.0;
    let mut faults = 0;
    for _ in 0..p.arrivals {
        clock += -p.interarrival_mean * (1.0 - rng.random::<f64>()).ln();
        exits.retain(|&t| t > clock);
        let n = exits.len();
        if n >= p.capacity || rng.random::<f64>() >= 1.0 / (n as f64 + 1.0) {
            continue;
        }
        let service = (p.service_mean + p.service_std * normal(rng)).max(0.01);
        if rng.random::<f64>() < p.fault_probability {
            faults += 1;
            exits.push(clock + rng.random::<f64>() * service);
        } else {
            exits.push(clock + service);
        }
    }
    faults
}

pub fn mean_faults(p: &OracleParams, runs: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..runs).map(|_| run_once(p, &mut rng) as f64).sum::<f64>() / runs as f64
}
