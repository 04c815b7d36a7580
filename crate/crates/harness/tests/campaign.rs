mod common;

use common::replay::{replay, seeded_table};
use ei_core::stats::{AnomalyPolicy, DefectSampleSet};
use ei_harness::mock::{FaultTable, MockTarget};
use ei_harness::{
    crawl_site, default_profiles, generate_test_cases, round_seed, run_campaign, CampaignConfig, CrawlAuth,
    CrawlLimits, HarnessConfig, SiteModel,
};

fn model() -> SiteModel {
    let clean = MockTarget::start(FaultTable::new()).unwrap();
    crawl_site(&clean.url(), &CrawlAuth::mock(), &CrawlLimits::default()).unwrap()
}

#[test]
fn outage_rounds_are_flagged_not_dropped() {
    let target = MockTarget::start(FaultTable::new()).unwrap();
    let cfg = CampaignConfig { evaluations: 503, cases_per_round: 3, seed: 6, ..CampaignConfig::default() };
    let outages = [17usize, 250, 499];
    let dir = tempfile::tempdir().unwrap();
    let result = run_campaign(&target.url(), &model(), &default_profiles(), &cfg, dir.path(), |round| {
        target.set_outage(outages.contains(&round));
    })
    .unwrap();
    let set: &DefectSampleSet = &result.samples;
    assert_eq!(set.len(), 500);
    assert_eq!(set.discarded().len(), 3);
    assert!(set.discarded().iter().all(|d| d.reason.contains("aborted")));
    assert!(set.values().iter().all(|v| *v == 0.0));
    let aborted: Vec<usize> = result.rounds.iter().filter(|r| r.aborted.is_some()).map(|r| r.round).collect();
    assert_eq!(aborted, outages);
    // the flagged values stay out of later screening
    let refined = result.samples.clone().refine(AnomalyPolicy::default()).unwrap();
    assert_eq!(refined.len(), 500);
}

#[test]
fn seeded_campaign_matches_offline_replay() {
    let faults = seeded_table(10);
    let target = MockTarget::start(faults.clone()).unwrap();
    let model = model();
    let cfg = CampaignConfig { evaluations: 20, cases_per_round: 200, seed: 99, ..CampaignConfig::default() };
    let dir = tempfile::tempdir().unwrap();
    let result = run_campaign(&target.url(), &model, &default_profiles(), &cfg, dir.path(), |_| {}).unwrap();
    let predicted: Vec<f64> = (0..cfg.evaluations)
        .map(|r| {
            let seed = round_seed(cfg.seed, r);
            let cases = generate_test_cases(&model, &default_profiles(), cfg.cases_per_round, seed, &cfg.cases).unwrap();
            let harness = HarnessConfig { seed, ..cfg.harness.clone() };
            replay(&cases, &harness, &faults).density as f64
        })
        .collect();
    assert_eq!(result.samples.values(), predicted.as_slice());
    assert!(predicted.iter().any(|d| *d > 0.0));

    let again = run_campaign(&target.url(), &model, &default_profiles(), &cfg, dir.path(), |_| {}).unwrap();
    assert_eq!(again, result);
}
