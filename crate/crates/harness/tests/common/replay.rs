//! Offline replay: walk the planned steps of each tester against the mock's
//! page table and fault table, predicting every outcome without HTTP.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ei_harness::mock::{self, FaultKind, FaultTable};
use ei_harness::{plan_evaluation, Action, HarnessConfig, TestCase};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Predicted {
    Ok,
    Nav,
    Fault(String),
}

pub fn predict_step(path: &str, action: Action, token: Option<&str>, faults: &FaultTable) -> Predicted {
    let Some(page) = mock::PAGES.iter().find(|p| p.path == path) else {
        return Predicted::Nav;
    };
    let required = match page.view {
        ei_core::View::Professor => Some(mock::PROFESSOR_TOKEN),
        ei_core::View::Student => Some(mock::STUDENT_TOKEN),
        ei_core::View::Public => None,
    };
    if required.is_some() && required != token {
        return Predicted::Fault("http-401".into());
    }
    if action != Action::Read && !page.forms.contains(&action) {
        return Predicted::Fault("http-405".into());
    }
    let seeded = faults.faults.iter().find(|f| f.path == path && f.action == action);
    match seeded.map(|f| f.kind) {
        Some(FaultKind::Status(code)) => Predicted::Fault(format!("http-{code}")),
        Some(FaultKind::ErrorMarker) => Predicted::Fault("error-marker".into()),
        None => Predicted::Ok,
    }
}

pub struct Replay {
    pub density: u64,
    pub signatures: BTreeMap<(String, Action, String), u64>,
    pub nav_errors: u64,
    pub steps: u64,
}

pub fn replay(cases: &[TestCase], cfg: &HarnessConfig, faults: &FaultTable) -> Replay {
    let mut out = Replay { density: 0, signatures: BTreeMap::new(), nav_errors: 0, steps: 0 };
    for plan in plan_evaluation(cases, cfg).unwrap() {
        let case = &cases[plan.case_index];
        for s in &plan.steps {
            let step = &case.steps[s.step_index];
            out.steps += 1;
            match predict_step(&step.path, step.action, case.profile.credentials.as_deref(), faults) {
                Predicted::Ok => {}
                Predicted::Nav => out.nav_errors += 1,
                Predicted::Fault(code) => {
                    out.density += 1;
                    *out.signatures.entry((step.path.clone(), step.action, code)).or_default() += 1;
                }
            }
        }
    }
    out
}

/// Distinct `(path, action)` pairs the planned steps touch.
pub fn covered_pairs(cases: &[TestCase], cfg: &HarnessConfig) -> std::collections::BTreeSet<(String, Action)> {
    plan_evaluation(cases, cfg)
        .unwrap()
        .iter()
        .flat_map(|p| p.steps.iter().map(move |s| &cases[p.case_index].steps[s.step_index]))
        .map(|s| (s.path.clone(), s.action))
        .collect()
}

/// `k` faults on distinct pairs, spread over the fixture and cycling through
/// the fault kinds.
pub fn seeded_table(k: usize) -> FaultTable {
    let pairs = mock::all_pairs();
    assert!(k <= pairs.len());
    let kinds = [FaultKind::Status(500), FaultKind::ErrorMarker, FaultKind::Status(502)];
    (0..k).fold(FaultTable::new(), |t, i| {
        let (path, action) = pairs[(i * 7) % pairs.len()];
        t.with(path, action, kinds[i % kinds.len()])
    })
}
