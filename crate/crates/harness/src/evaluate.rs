use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::activity::{ActivityRecord, LogHeader, Outcome};
use crate::http::Client;
use crate::{mock, HarnessError, Result, TestCase};

/// What a step's response must look like to count as `ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpectRules {
    pub required_marker: Option<String>,
    pub forbidden_marker: Option<String>,
}

impl Default for ExpectRules {
    fn default() -> Self {
        ExpectRules { required_marker: None, forbidden_marker: Some(mock::ERROR_MARKER.into()) }
    }
}

/// Times are on the evaluation clock, which starts at 0 when the first
/// tester could arrive. `time_scale` maps it to wall time: 0 runs steps as
/// fast as the target answers, 1 paces them in real time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub duration_s: f64,
    pub interarrival_mean_s: f64,
    pub exec_mean_s: f64,
    pub exec_std_s: f64,
    pub workers: usize,
    pub seed: u64,
    pub time_scale: f64,
    pub timeout_ms: u64,
    pub rules: ExpectRules,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            duration_s: 100.0,
            interarrival_mean_s: 4.0,
            exec_mean_s: 3.0,
            exec_std_s: 1.0,
            workers: 100,
            seed: 2005,
            time_scale: 0.0,
            timeout_ms: 10_000,
            rules: ExpectRules::default(),
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.duration_s.is_finite()
            && self.duration_s > 0.0
            && self.interarrival_mean_s.is_finite()
            && self.interarrival_mean_s > 0.0
            && self.exec_mean_s.is_finite()
            && self.exec_mean_s > 0.0
            && self.exec_std_s.is_finite()
            && self.exec_std_s > 0.0
            && self.workers > 0
            && self.time_scale.is_finite()
            && self.time_scale >= 0.0
            && self.timeout_ms > 0;
        if ok {
            Ok(())
        } else {
            Err(HarnessError::InvalidConfig(format!("harness settings out of range: {self:?}")))
        }
    }

    fn duration_ms(&self) -> u64 {
        (self.duration_s * 1000.0).round() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedStep {
    pub step_index: usize,
    pub timestamp_ms: u64,
}

/// When a tester starts, stops and which of its case's steps fall inside the
/// evaluation window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TesterPlan {
    pub tester_id: u64,
    pub case_index: usize,
    pub start_ms: u64,
    pub end_ms: u64,
    pub steps: Vec<PlannedStep>,
}

/// Tester `i` runs case `i`. Testers arrive at cumulative Exp gaps; each
/// draws a Normal execution time (floored at 10 ms) over which its steps are
/// spread evenly. Testers arriving after the window closes do not run, and
/// steps past it are dropped.
pub fn plan_evaluation(cases: &[TestCase], cfg: &HarnessConfig) -> Result<Vec<TesterPlan>> {
    cfg.validate()?;
    let window = cfg.duration_ms();
    let mut arrivals = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gap = Exp::new(1.0 / cfg.interarrival_mean_s).expect("validated mean");
    let exec = Normal::new(cfg.exec_mean_s, cfg.exec_std_s).expect("validated");
    let mut clock_s = 0.0;
    let mut plans = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        clock_s += gap.sample(&mut arrivals);
        let start_ms = (clock_s * 1000.0).round() as u64;
        if start_ms >= window {
            break;
        }
        let mut own = ChaCha8Rng::seed_from_u64(cfg.seed);
        own.set_stream(i as u64 + 1);
        let exec_ms = (exec.sample(&mut own).max(0.01) * 1000.0).round() as u64;
        let n = case.steps.len() as u64;
        let steps = (0..n)
            .map(|k| PlannedStep { step_index: k as usize, timestamp_ms: start_ms + exec_ms * (k + 1) / n })
            .take_while(|s| s.timestamp_ms <= window)
            .collect();
        plans.push(TesterPlan { tester_id: i as u64, case_index: i, start_ms, end_ms: (start_ms + exec_ms).min(window), steps });
    }
    Ok(plans)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub log_files: Vec<PathBuf>,
    pub testers: usize,
}

enum Verdict {
    Outcome(Outcome),
    Down(String),
}

fn classify(status: u16, body: &str, rules: &ExpectRules) -> Verdict {
    match status {
        503 => Verdict::Down("target answered 503".into()),
        404 => Verdict::Outcome(Outcome::NavError(404)),
        200..=299 => {
            if rules.forbidden_marker.as_deref().is_some_and(|m| body.contains(m)) {
                Verdict::Outcome(Outcome::Fault("error-marker".into()))
            } else if rules.required_marker.as_deref().is_some_and(|m| !body.contains(m)) {
                Verdict::Outcome(Outcome::Fault("missing-marker".into()))
            } else {
                Verdict::Outcome(Outcome::Ok)
            }
        }
        s => Verdict::Outcome(Outcome::Fault(format!("http-{s}"))),
    }
}

pub(crate) fn log_name(tester_id: u64) -> String {
    format!("tester-{tester_id:05}.log")
}

/// Run every planned tester against `target`, each writing only its own log
/// in `log_dir`. Stale tester logs in `log_dir` are removed first. An outage
/// stops all testers; their partial logs end with an `# aborted` line and
/// the call fails with [`HarnessError::TargetDown`].
pub fn run_evaluation(target: &Url, cases: &[TestCase], cfg: &HarnessConfig, log_dir: &Path) -> Result<Evaluation> {
    let plans = plan_evaluation(cases, cfg)?;
    fs::create_dir_all(log_dir).map_err(|e| HarnessError::io(log_dir, e))?;
    for entry in fs::read_dir(log_dir).map_err(|e| HarnessError::io(log_dir, e))? {
        let path = entry.map_err(|e| HarnessError::io(log_dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("tester-") && name.ends_with(".log") {
            fs::remove_file(&path).map_err(|e| HarnessError::io(&path, e))?;
        }
    }

    let client = Client::new(target, Duration::from_millis(cfg.timeout_ms));
    let next = AtomicUsize::new(0);
    let down: Mutex<Option<String>> = Mutex::new(None);
    let io_error: Mutex<Option<HarnessError>> = Mutex::new(None);
    let t0 = Instant::now();
    let workers = cfg.workers.min(plans.len()).max(1);
    info!("evaluating {} tester(s) with {workers} worker(s)", plans.len());

    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(plan) = plans.get(i) else { break };
                let path = log_dir.join(log_name(plan.tester_id));
                let result = File::create(&path).and_then(|f| {
                    run_tester(&client, &cases[plan.case_index], plan, cfg, t0, &down, BufWriter::new(f))
                });
                if let Err(e) = result {
                    io_error.lock().unwrap().get_or_insert(HarnessError::io(path, e));
                }
            });
        }
    });

    if let Some(e) = io_error.into_inner().unwrap() {
        return Err(e);
    }
    if let Some(message) = down.into_inner().unwrap() {
        warn!("evaluation aborted: {message}");
        return Err(HarnessError::TargetDown { message, log_dir: log_dir.to_path_buf() });
    }
    let log_files = plans.iter().map(|p| log_dir.join(log_name(p.tester_id))).collect();
    Ok(Evaluation { log_files, testers: plans.len() })
}

fn run_tester<W: Write>(
    client: &Client,
    case: &TestCase,
    plan: &TesterPlan,
    cfg: &HarnessConfig,
    t0: Instant,
    down: &Mutex<Option<String>>,
    mut out: W,
) -> std::io::Result<()> {
    let header = LogHeader { tester_id: plan.tester_id, test_case_id: case.id, view: case.profile.view, start_ms: plan.start_ms };
    writeln!(out, "{header}")?;
    let token = case.profile.credentials.as_deref();
    let mut last_ms = plan.start_ms;
    let mut aborted = down.lock().unwrap().clone();
    for planned in &plan.steps {
        if aborted.is_some() {
            break;
        }
        if cfg.time_scale > 0.0 {
            let due = t0 + Duration::from_secs_f64(planned.timestamp_ms as f64 / 1000.0 * cfg.time_scale);
            std::thread::sleep(due.saturating_duration_since(Instant::now()));
        }
        if let Some(reason) = down.lock().unwrap().clone() {
            aborted = Some(reason);
            break;
        }
        let step = &case.steps[planned.step_index];
        let fields: Vec<(String, String)> = step.input.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let verdict = match client.request(&step.path, step.action, token, &fields) {
            Ok(reply) => classify(reply.status, &reply.body, &cfg.rules),
            Err(e) => Verdict::Down(format!("transport error: {e}")),
        };
        match verdict {
            Verdict::Outcome(outcome) => {
                let rec = ActivityRecord {
                    timestamp_ms: planned.timestamp_ms,
                    tester_id: plan.tester_id,
                    test_case_id: case.id,
                    step_index: planned.step_index,
                    node: step.path.clone(),
                    action: step.action,
                    outcome,
                };
                writeln!(out, "{rec}")?;
                last_ms = planned.timestamp_ms;
            }
            Verdict::Down(reason) => {
                down.lock().unwrap().get_or_insert(reason.clone());
                aborted = Some(reason);
            }
        }
    }
    match aborted {
        Some(reason) => {
            writeln!(out, "# end_ms={last_ms}")?;
            writeln!(out, "# aborted {reason}")?;
        }
        None => writeln!(out, "# end_ms={}", plan.end_ms)?,
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{default_profiles, Action, Step};

    fn case(id: u64, steps: usize) -> TestCase {
        let step = Step { path: "/".into(), action: Action::Read, input: Default::default() };
        TestCase { id, profile: default_profiles().remove(2), steps: vec![step; steps], seed: id }
    }

    #[test]
    fn plan_respects_window() {
        let cases: Vec<_> = (0..200).map(|i| case(i, 6)).collect();
        let cfg = HarnessConfig::default();
        let plans = plan_evaluation(&cases, &cfg).unwrap();
        assert!(!plans.is_empty() && plans.len() < 200);
        for w in plans.windows(2) {
            assert!(w[0].start_ms <= w[1].start_ms);
        }
        for p in &plans {
            assert!(p.start_ms < 100_000 && p.end_ms <= 100_000);
            assert!(p.steps.iter().all(|s| s.timestamp_ms <= 100_000 && s.timestamp_ms > p.start_ms));
        }
        assert_eq!(plans, plan_evaluation(&cases, &cfg).unwrap());
    }

    #[test]
    fn steps_evenly_spaced() {
        let cfg = HarnessConfig { duration_s: 1e9, ..HarnessConfig::default() };
        let plans = plan_evaluation(&[case(0, 4)], &cfg).unwrap();
        let p = &plans[0];
        let ts: Vec<u64> = p.steps.iter().map(|s| s.timestamp_ms - p.start_ms).collect();
        let exec = p.end_ms - p.start_ms;
        assert_eq!(ts, vec![exec / 4, exec / 2, exec * 3 / 4, exec]);
    }

    #[test]
    fn classification() {
        let rules = ExpectRules::default();
        let code = |s, b| match classify(s, b, &rules) {
            Verdict::Outcome(o) => o.to_string(),
            Verdict::Down(_) => "down".into(),
        };
        assert_eq!(code(200, "fine"), "ok");
        assert_eq!(code(200, "x EI-FIXTURE-ERROR y"), "fault:error-marker");
        assert_eq!(code(500, ""), "fault:http-500");
        assert_eq!(code(401, ""), "fault:http-401");
        assert_eq!(code(404, ""), "nav_error:404");
        assert_eq!(code(503, ""), "down");
        let strict = ExpectRules { required_marker: Some("<nav>".into()), forbidden_marker: None };
        assert!(matches!(classify(200, "plain", &strict), Verdict::Outcome(Outcome::Fault(c)) if c == "missing-marker"));
    }
}
