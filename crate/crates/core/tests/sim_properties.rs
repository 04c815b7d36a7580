mod common;

use common::sim_oracle::{mean_faults, OracleParams};
use ei_core::par::Execution;
use ei_core::sim::{init_run, run_campaign, run_campaign_with, run_single_traced, EventKind, SimConfig};
use ei_core::stats::{fit_weibull, AnomalyPolicy, SolverConfig};
use proptest::prelude::*;

fn mean_density(cfg: &SimConfig) -> f64 {
    let set = run_campaign(cfg).unwrap();
    set.values().iter().sum::<f64>() / set.len() as f64
}

#[test]
fn interarrival_and_service_means_calibrated() {
    let cfg = SimConfig { runs: 1, ..SimConfig::default() };
    let (mut ia_sum, mut ia_n, mut sv_sum, mut sv_n) = (0.0, 0u64, 0.0, 0u64);
    let mut run = 0;
    while ia_n < 10_000 || sv_n < 10_000 {
        let mut s = init_run(&cfg, run);
        s.run_to_end(&cfg, |_| {}).unwrap();
        ia_sum += s.stats.interarrival_sum;
        ia_n += s.stats.interarrival_count;
        sv_sum += s.stats.service_sum;
        sv_n += s.stats.service_count;
        run += 1;
    }
    let ia = ia_sum / ia_n as f64;
    let sv = sv_sum / sv_n as f64;
    assert!((ia - 4.0).abs() <= 0.2, "interarrival mean {ia}");
    assert!((sv - 3.0).abs() <= 0.15, "service mean {sv}");
}

#[test]
fn service_mean_over_many_draws() {
    // fast arrivals admit many users per run
    let cfg = SimConfig { interarrival_mean: 0.5, events_per_run: 1000, ..SimConfig::default() };
    let (mut sum, mut n) = (0.0, 0u64);
    let mut run = 0;
    while n < 100_000 {
        let mut s = init_run(&cfg, run);
        s.run_to_end(&cfg, |_| {}).unwrap();
        sum += s.stats.service_sum;
        n += s.stats.service_count;
        run += 1;
    }
    let mean = sum / n as f64;
    assert!((mean - 3.0).abs() <= 0.03, "service mean {mean} over {n} draws");
}

#[test]
fn admission_rate_at_queue_size_three() {
    let cfg = SimConfig { interarrival_mean: 0.05, events_per_run: 2000, ..SimConfig::default() };
    let (mut trials, mut admitted) = (0u64, 0u64);
    let mut run = 0;
    while trials < 100_000 {
        let mut before = 0usize;
        run_single_traced(&cfg, run, |ev| {
            if ev.kind == EventKind::Arrival && before == 3 {
                trials += 1;
                if ev.queue_size == 4 {
                    admitted += 1;
                }
            }
            before = ev.queue_size;
        })
        .unwrap();
        run += 1;
    }
    let rate = admitted as f64 / trials as f64;
    assert!((rate - 0.25).abs() <= 0.02, "admission rate {rate} over {trials} trials");
}

#[test]
fn campaign_is_bit_identical_for_a_seed() {
    let cfg = SimConfig { runs: 100, seed: 31, ..SimConfig::default() };
    let a = run_campaign_with(&cfg, Execution::Parallel).unwrap();
    let b = run_campaign_with(&cfg, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.duration.to_bits(), y.duration.to_bits());
    }
}

#[test]
fn mean_density_agrees_with_straight_line_oracle() {
    let cfg = SimConfig::default();
    let ours = mean_density(&cfg);
    let oracle = mean_faults(&OracleParams::default(), 20_000, 77);
    let rel = (ours - oracle).abs() / oracle;
    assert!(rel <= 0.10, "campaign mean {ours} vs oracle {oracle}");
}

#[test]
fn density_non_decreasing_in_fault_probability() {
    let means: Vec<f64> = [0.0, 0.25, 0.5, 1.0]
        .iter()
        .map(|&p| mean_density(&SimConfig { runs: 200, seed: 11, fault_probability: p, ..SimConfig::default() }))
        .collect();
    assert_eq!(means[0], 0.0);
    for w in means.windows(2) {
        assert!(w[0] <= w[1], "{means:?}");
    }
}

#[test]
fn every_user_errors_at_probability_one() {
    let cfg = SimConfig { runs: 20, fault_probability: 1.0, ..SimConfig::default() };
    for r in run_campaign_with(&cfg, Execution::Sequential).unwrap() {
        assert_eq!(r.defect_density, r.admitted);
    }
}

#[test]
fn default_campaign_fits_right_skewed_shape() {
    let solver = SolverConfig { gof: None, ..SolverConfig::default() };
    for seed in [2005, 1, 2, 3, 4] {
        let cfg = SimConfig { seed, ..SimConfig::default() };
        let set = run_campaign(&cfg).unwrap().refine(AnomalyPolicy::default()).unwrap();
        let fit = fit_weibull(&set, &solver).unwrap();
        assert!(fit.model.shape() > 1.0, "seed {seed}: shape {}", fit.model.shape());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn queue_bounded_and_clock_monotone(
        seed in any::<u64>(),
        capacity in 0usize..6,
        interarrival in 0.05f64..5.0,
        events in 1usize..300,
        p in 0.0f64..=1.0,
    ) {
        let cfg = SimConfig {
            seed,
            capacity,
            interarrival_mean: interarrival,
            events_per_run: events,
            fault_probability: p,
            ..SimConfig::default()
        };
        let mut s = init_run(&cfg, 0);
        let mut last = 0.0;
        while let Some(ev) = s.step(&cfg).unwrap() {
            prop_assert!(ev.queue_size <= capacity);
            prop_assert!(ev.clock >= last);
            last = ev.clock;
            let c = s.counters;
            prop_assert_eq!(c.admitted, c.departed + s.queue_size as u64);
        }
        let c = s.counters;
        prop_assert_eq!(c.arrivals, events as u64);
        prop_assert_eq!(c.admitted + c.rejected, c.arrivals);
        prop_assert_eq!(c.admitted, c.departed);
        prop_assert!(c.errors <= c.admitted);
    }
}
