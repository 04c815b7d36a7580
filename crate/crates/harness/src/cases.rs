use std::collections::BTreeMap;

use ei_core::{View, ViewMix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Action, HarnessError, Result, SiteModel, TestProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub path: String,
    pub action: Action,
    /// Form fields sent with mutating actions.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub input: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: u64,
    pub profile: TestProfile,
    pub steps: Vec<Step>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseConfig {
    pub walk_length: usize,
    pub view_mix: ViewMix,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig { walk_length: 6, view_mix: ViewMix::default() }
    }
}

/// Random walks over `model`, one per case. Each case picks a view by the
/// configured mix (restricted to views with a profile and an entry point),
/// then a profile of that view. A `read` step follows a random link; a
/// mutating step stays on its page.
pub fn generate_test_cases(
    model: &SiteModel,
    profiles: &[TestProfile],
    count: usize,
    seed: u64,
    cfg: &CaseConfig,
) -> Result<Vec<TestCase>> {
    if count == 0 {
        return Err(HarnessError::InvalidConfig("case count must be at least 1".into()));
    }
    for p in profiles {
        p.validate()?;
    }
    let usable: Vec<&TestProfile> = profiles.iter().filter(|p| model.entry_points.contains_key(&p.view)).collect();
    if model.nodes.is_empty() || usable.is_empty() {
        return Err(HarnessError::EmptyModel);
    }
    let mut views: Vec<View> = usable.iter().map(|p| p.view).collect();
    views.sort();
    views.dedup();
    let mut weights: Vec<f64> = views.iter().map(|v| cfg.view_mix.weight(*v)).collect();
    if weights.iter().sum::<f64>() <= 0.0 {
        weights = vec![1.0; views.len()];
    }
    let total: f64 = weights.iter().sum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    for id in 0..count as u64 {
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut view = *views.last().expect("non-empty");
        for (v, w) in views.iter().zip(&weights) {
            acc += w;
            if u < acc {
                view = *v;
                break;
            }
        }
        let candidates: Vec<&&TestProfile> = usable.iter().filter(|p| p.view == view).collect();
        let profile = (*candidates[rng.random_range(0..candidates.len())]).clone();
        let case_seed: u64 = rng.random();
        let steps = walk(model, &profile, id, case_seed, cfg.walk_length);
        cases.push(TestCase { id, profile, steps, seed: case_seed });
    }
    Ok(cases)
}

fn walk(model: &SiteModel, profile: &TestProfile, id: u64, seed: u64, length: usize) -> Vec<Step> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = model.entry_points[&profile.view].clone();
    let mut steps = Vec::with_capacity(length);
    for k in 0..length {
        let Some(node) = model.node(&path) else { break };
        let Some(action) = profile.action_mix.sample_among(&node.actions, &mut rng) else { break };
        let mut input = BTreeMap::new();
        if matches!(action, Action::Insert | Action::Update) {
            input.insert("record".to_string(), format!("case{id}-step{k}-{}", rng.random_range(0..1000u32)));
        }
        steps.push(Step { path: path.clone(), action, input });
        if action == Action::Read {
            let links: Vec<&str> = model.links_from(&path).collect();
            if !links.is_empty() {
                path = links[rng.random_range(0..links.len())].to_string();
            }
        }
    }
    steps
}
