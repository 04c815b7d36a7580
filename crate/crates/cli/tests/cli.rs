use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use ei_harness::mock::{FaultKind, FaultTable, MockTarget};
use ei_harness::{crawl_site, Action, CrawlAuth, CrawlLimits};
use serde_json::Value;

fn ei(project: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ei"))
        .arg("--project-dir")
        .arg(project)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path.as_ref()).unwrap()).unwrap()
}

fn write_fit(project: &Path, label: &str, shape: f64, scale: f64) {
    let dir = project.join("phases").join(label);
    fs::create_dir_all(&dir).unwrap();
    let doc = serde_json::json!({ "label": label, "report": { "model": { "shape": shape, "scale": scale } } });
    fs::write(dir.join("fit.json"), doc.to_string()).unwrap();
}

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/psp_programs.csv");

#[test]
fn simulate_is_reproducible_and_right_skewed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = ei(dir.path(), &["--seed", "7", "simulate", "--runs", "300"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let phase = |d: &tempfile::TempDir| d.path().join("phases/ideal");
    for name in ["raw_samples.txt", "samples.txt", "discarded.csv", "histogram.csv", "fit.json", "config.json", "runs.csv"] {
        assert_eq!(fs::read(phase(&a).join(name)).unwrap(), fs::read(phase(&b).join(name)).unwrap(), "{name}");
    }
    assert!(phase(&a).join("timing.json").exists());
    assert!(!a.path().join(".ei.lock").exists());
    let fit = json(phase(&a).join("fit.json"));
    assert!(fit["report"]["model"]["shape"].as_f64().unwrap() > 1.0);
    assert_eq!(json(phase(&a).join("config.json"))["config"]["simulation"]["seed"], 7);
    assert_eq!(fs::read_to_string(phase(&a).join("raw_samples.txt")).unwrap().lines().count(), 300);
}

#[test]
fn trace_lists_every_event() {
    let dir = tempfile::tempdir().unwrap();
    let out = ei(dir.path(), &["simulate", "--runs", "4", "--trace", "--label", "traced"]);
    // four runs are too few to fit reliably; the trace is written first either way
    let _ = code(&out);
    let trace = fs::read_to_string(dir.path().join("phases/traced/trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("run,clock,event_type,queue_size"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let runs = fs::read_to_string(dir.path().join("phases/traced/runs.csv")).unwrap();
    for row in runs.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let arrivals = rows.iter().filter(|r| r[0] == cols[0] && r[2] == "arrival").count();
        assert_eq!(arrivals.to_string(), cols[2], "run {}", cols[0]);
    }
}

#[test]
fn zero_runs_is_an_empty_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = ei(dir.path(), &["simulate", "--runs", "0"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn compare_against_itself_is_equal() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ei(dir.path(), &["simulate", "--runs", "200"])), 0);
    let out = ei(dir.path(), &["compare", "ideal", "ideal"]);
    assert_eq!(code(&out), 0);
    let c = json(dir.path().join("comparisons/ideal__vs__ideal/comparison.json"));
    assert_eq!(c["verdict"], "equal");
    assert_eq!(c["report"]["sup_cdf_distance"].as_f64(), Some(0.0));
}

#[test]
fn compare_orders_published_models() {
    let dir = tempfile::tempdir().unwrap();
    write_fit(dir.path(), "ideal", 1.63, 2.4);
    write_fit(dir.path(), "real", 2.16, 12.8);
    write_fit(dir.path(), "post-psp", 1.26, 5.19);

    assert_eq!(code(&ei(dir.path(), &["compare", "post-psp", "real"])), 0);
    let c = json(dir.path().join("comparisons/post-psp__vs__real/comparison.json"));
    assert_eq!(c["verdict"], "improved");
    let ratio = c["report"]["mean_ratio"].as_f64().unwrap();
    assert!((ratio - 0.426).abs() < 0.001, "{ratio}");

    assert_eq!(code(&ei(dir.path(), &["compare", "real", "ideal"])), 0);
    let c = json(dir.path().join("comparisons/real__vs__ideal/comparison.json"));
    assert_eq!(c["verdict"], "worsened");

    let overlay = fs::read_to_string(dir.path().join("comparisons/real__vs__ideal/overlay.csv")).unwrap();
    assert_eq!(overlay.lines().next(), Some("x,pdf_a,pdf_b"));
    assert_eq!(overlay.lines().count(), 1 + 501);
}

#[test]
fn compare_needs_both_phases() {
    let dir = tempfile::tempdir().unwrap();
    write_fit(dir.path(), "real", 2.16, 12.8);
    let out = ei(dir.path(), &["compare", "ideal", "real"]);
    assert_eq!(code(&out), 9);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ideal"));
}

#[test]
fn psp_fixture_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ei(dir.path(), &["psp", "--records", FIXTURE]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let phase = dir.path().join("phases/psp");
    let report = json(phase.join("psp_report.json"));
    let slope = |name: &str| report[name]["slope"].as_f64().unwrap_or(f64::NAN);
    assert!(slope("yield_percent") > 0.0);
    assert!(slope("defects_per_kloc") < 0.0);
    for name in ["yield_percent", "defects_per_kloc", "elimination_rate", "introduction_rate", "appraisal_failure_ratio"] {
        let csv = fs::read_to_string(phase.join("series").join(format!("{name}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 11, "{name}");
    }
}

#[test]
fn psp_rejects_empty_records() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = ei(dir.path(), &["psp", "--records", empty.to_str().unwrap()]);
    assert_ne!(code(&out), 0);
}

#[test]
fn fit_reads_a_csv_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let rows: String = (1..=40).map(|i| format!("{i},{}\n", (i % 7 + 1) as f64 * 0.5)).collect();
    fs::write(&csv, format!("run,density\n{rows}")).unwrap();
    let out = ei(dir.path(), &["fit", "--samples", csv.to_str().unwrap(), "--label", "mine", "--column", "density"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let fit = json(dir.path().join("phases/mine/fit.json"));
    assert_eq!(fit["report"]["sample_count"], 40);
}

#[test]
fn bad_usage_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ei(dir.path(), &["simulate", "--runs", "many"])), 2);
    let cfg = dir.path().join("ei.toml");
    fs::write(&cfg, "[simulation]\nrunz = 3\n").unwrap();
    assert_eq!(code(&ei(dir.path(), &["--config", cfg.to_str().unwrap(), "simulate"])), 14);
    assert_eq!(code(&ei(dir.path(), &["simulate", "--label", "../x"])), 2);
}

#[test]
fn held_lock_refuses_to_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(".ei.lock"), "").unwrap();
    assert_eq!(code(&ei(dir.path(), &["simulate", "--runs", "10"])), 12);
}

#[test]
fn evaluate_against_seeded_mock() {
    let table = FaultTable::new()
        .with("/professor/courses", Action::Insert, FaultKind::Status(500))
        .with("/student/profile", Action::Update, FaultKind::ErrorMarker)
        .with("/professor/grades", Action::Update, FaultKind::Status(502));
    let target = MockTarget::start(table).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let url = target.url().to_string();
    let args = ["--seed", "3", "evaluate", "--target", &url, "--evaluations", "12", "--cases", "200"];
    let out = ei(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let phase = dir.path().join("phases/real");
    let rounds = json(phase.join("rounds.json"));
    assert_eq!(rounds.as_array().unwrap().len(), 12);
    let raw: Vec<f64> =
        fs::read_to_string(phase.join("raw_samples.txt")).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(raw.len(), 12);
    assert!(raw.iter().all(|&d| d >= 0.0 && d.fract() == 0.0), "{raw:?}");
    assert!(raw.iter().any(|&d| d > 0.0));
    assert!(dir.path().join("work/real/round-0000").is_dir());

    // same seed, same target behaviour, same densities
    let again = tempfile::tempdir().unwrap();
    assert_eq!(code(&ei(again.path(), &args)), 0);
    assert_eq!(fs::read(phase.join("raw_samples.txt")).unwrap(), fs::read(again.path().join("phases/real/raw_samples.txt")).unwrap());
}

#[test]
fn fault_free_evaluation_keeps_samples_then_fails_to_fit() {
    let target = MockTarget::start(FaultTable::new()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let url = target.url().to_string();
    let out = ei(dir.path(), &["evaluate", "--target", &url, "--evaluations", "3", "--cases", "50"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let raw = fs::read_to_string(dir.path().join("phases/real/raw_samples.txt")).unwrap();
    assert_eq!(raw, "0\n0\n0\n");
}

#[test]
fn unreachable_target_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let out = ei(dir.path(), &["crawl", "--target", &format!("http://127.0.0.1:{port}/")]);
    assert_eq!(code(&out), 7);
}

#[test]
fn mock_serve_can_be_crawled() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_ei"))
        .args(["mock-serve", "--bind", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let url = line.trim().rsplit(' ').next().unwrap().to_string();
    let site = dir.path().join("site.json");
    let out = ei(dir.path(), &["crawl", "--target", &url, "--out", site.to_str().unwrap()]);
    child.kill().unwrap();
    child.wait().unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let direct = crawl_site(
        &MockTarget::start(FaultTable::new()).unwrap().url(),
        &CrawlAuth::mock(),
        &CrawlLimits::default(),
    )
    .unwrap();
    assert_eq!(json(&site), serde_json::to_value(&direct).unwrap());
}
