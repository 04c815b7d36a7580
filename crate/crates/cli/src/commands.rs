use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ei_core::par::Execution;
use ei_core::psp::{read_records_csv, read_records_json, trend_report, write_series_csv};
use ei_core::sim::{run_campaign_with, run_single_traced, samples_from_runs};
use ei_core::stats::{
    build_histogram, compare_models, fit_weibull, overlay_curves, ComparisonReport, DefectSampleSet, FitReport,
    StatsError, Verdict, WeibullModel,
};
use ei_harness::mock::{FaultTable, MockTarget};
use ei_harness::{crawl_site, run_campaign, SiteModel};
use log::info;
use serde::{Deserialize, Serialize};
use url::Url;

use crate::config::{AnalysisConfig, EiConfig};
use crate::error::CliError;
use crate::project::{ensure_dir, write_json, write_text, Project};

/// Points on the overlay grid written by `compare`.
pub const OVERLAY_POINTS: usize = 501;

/// What produced a phase: enough to re-run it.
#[derive(Serialize)]
struct Provenance<'a> {
    command: &'static str,
    label: &'a str,
    inputs: serde_json::Value,
    config: &'a EiConfig,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FitArtifact {
    pub label: String,
    pub report: FitReport,
}

#[derive(Serialize)]
struct Timing<'a> {
    command: &'a str,
    wall_clock_ms: u128,
}

fn write_timing(dir: &Path, command: &str, started: Instant) -> Result<(), CliError> {
    write_json(&dir.join("timing.json"), &Timing { command, wall_clock_ms: started.elapsed().as_millis() })
}

fn lines_of(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

/// Screen, bin and fit a sample set, persisting each step under `dir`.
/// Earlier artifacts are kept when a later step fails.
fn analyze_phase(dir: &Path, set: DefectSampleSet, analysis: &AnalysisConfig) -> Result<FitReport, CliError> {
    write_text(&dir.join("raw_samples.txt"), &lines_of(&set.raw_values()))?;
    if set.is_empty() && set.discarded().is_empty() {
        return Err(StatsError::EmptySample.into());
    }
    let set = set.refine(analysis.policy)?;
    write_text(&dir.join("samples.txt"), &lines_of(set.values()))?;
    let mut discarded = String::from("value,reason\n");
    for d in set.discarded() {
        discarded.push_str(&format!("{},\"{}\"\n", d.value, d.reason.replace('"', "'")));
    }
    write_text(&dir.join("discarded.csv"), &discarded)?;

    let hist = build_histogram(&set, analysis.bin_width, analysis.origin)?;
    let mut csv = Vec::new();
    hist.write_csv(&mut csv).map_err(|e| CliError::io(dir.join("histogram.csv"), e))?;
    write_text(&dir.join("histogram.csv"), &String::from_utf8(csv).expect("csv output is UTF-8"))?;

    let report = fit_weibull(&set, &analysis.solver()).map_err(|e| {
        if set.values().iter().all(|v| *v == 0.0) {
            log::error!("all {} retained samples are zero; nothing to fit", set.len());
        }
        e
    })?;
    write_json(&dir.join("fit.json"), &FitArtifact { label: set.source_label.clone(), report: report.clone() })?;
    Ok(report)
}

fn fit_summary(label: &str, r: &FitReport) -> String {
    let gof = match (&r.gof, &r.gof_note) {
        (Some(g), _) => format!("gof statistic {:.4} vs {:.4}: {}", g.statistic, g.threshold, if g.passed { "pass" } else { "fail" }),
        (None, Some(note)) => format!("gof skipped: {note}"),
        (None, None) => "gof skipped".into(),
    };
    format!(
        "{label}: shape {:.4}, scale {:.4}, mean {:.4} from {} positive sample(s) ({} zero(s) excluded); {gof}",
        r.model.shape(),
        r.model.scale(),
        r.model.mean(),
        r.sample_count,
        r.zeros_excluded
    )
}

pub fn simulate(project: &Project, cfg: &EiConfig, label: &str, trace: bool) -> Result<String, CliError> {
    let started = Instant::now();
    let _lock = project.lock()?;
    let dir = project.phase_dir(label)?;
    ensure_dir(&dir)?;
    let sim = &cfg.simulation;
    write_json(
        &dir.join("config.json"),
        &Provenance { command: "simulate", label, inputs: serde_json::json!({ "seed": sim.seed }), config: cfg },
    )?;
    let runs = run_campaign_with(sim, Execution::Parallel)?;
    let mut table = String::from("run_index,defect_density,arrivals,admitted,rejected,duration\n");
    for r in &runs {
        table.push_str(&format!("{},{},{},{},{},{}\n", r.run_index, r.defect_density, r.arrivals, r.admitted, r.rejected, r.duration));
    }
    write_text(&dir.join("runs.csv"), &table)?;
    if trace {
        let path = dir.join("trace.csv");
        let mut w = BufWriter::new(File::create(&path).map_err(|e| CliError::io(&path, e))?);
        let mut io_result = writeln!(w, "run,clock,event_type,queue_size");
        for i in 0..sim.runs as u64 {
            run_single_traced(sim, i, |ev| {
                if io_result.is_ok() {
                    io_result = writeln!(w, "{i},{},{},{}", ev.clock, ev.kind.label(), ev.queue_size);
                }
            })?;
        }
        io_result.and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
    }
    let mut set = samples_from_runs(&runs);
    set.source_label = label.to_string();
    let report = analyze_phase(&dir, set, &cfg.analysis)?;
    write_timing(&dir, "simulate", started)?;
    Ok(fit_summary(label, &report))
}

pub fn crawl(project: &Project, cfg: &EiConfig, target: &Url, out: Option<&Path>) -> Result<String, CliError> {
    let _lock = project.lock()?;
    let model = crawl_site(target, &cfg.crawl.auth, &cfg.crawl.limits)?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| project.root().join("site.json"));
    write_json(&path, &model)?;
    Ok(format!(
        "{} page(s), {} edge(s), {} note(s) -> {}",
        model.nodes.len(),
        model.edges.len(),
        model.notes.len(),
        path.display()
    ))
}

fn load_site(path: &Path) -> Result<SiteModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let model: SiteModel =
        serde_json::from_str(&text).map_err(|e| CliError::Artifact { path: path.into(), message: e.to_string() })?;
    model.validate().map_err(|message| CliError::Artifact { path: path.into(), message })?;
    Ok(model)
}

pub fn evaluate(
    project: &Project,
    cfg: &EiConfig,
    target: &Url,
    label: &str,
    site: Option<&Path>,
) -> Result<String, CliError> {
    let started = Instant::now();
    let _lock = project.lock()?;
    let dir = project.phase_dir(label)?;
    ensure_dir(&dir)?;
    write_json(
        &dir.join("config.json"),
        &Provenance {
            command: "evaluate",
            label,
            inputs: serde_json::json!({ "target": target.as_str(), "site": site, "seed": cfg.evaluation.seed }),
            config: cfg,
        },
    )?;
    let model = match site {
        Some(p) => load_site(p)?,
        None => crawl_site(target, &cfg.crawl.auth, &cfg.crawl.limits)?,
    };
    write_json(&dir.join("site.json"), &model)?;
    let mut campaign = cfg.evaluation.clone();
    campaign.label = label.to_string();
    let work = project.work_dir(label)?;
    let result = run_campaign(target, &model, &cfg.profiles, &campaign, &work, |round| info!("round {round}"))?;
    write_json(&dir.join("rounds.json"), &result.rounds)?;
    let aborted = result.rounds.iter().filter(|r| r.aborted.is_some()).count();
    let report = analyze_phase(&dir, result.samples, &cfg.analysis)?;
    write_timing(&dir, "evaluate", started)?;
    Ok(format!("{} ({} of {} round(s) aborted)", fit_summary(label, &report), aborted, result.rounds.len()))
}

pub fn psp(project: &Project, cfg: &EiConfig, records: &Path, label: &str) -> Result<String, CliError> {
    let started = Instant::now();
    let _lock = project.lock()?;
    let dir = project.phase_dir(label)?;
    ensure_dir(&dir)?;
    let file = File::open(records).map_err(|e| CliError::io(records, e))?;
    let is_json = records.extension().is_some_and(|x| x.eq_ignore_ascii_case("json"));
    let recs = if is_json { read_records_json(BufReader::new(file))? } else { read_records_csv(BufReader::new(file))? };
    let report = trend_report(&recs)?;
    write_json(
        &dir.join("config.json"),
        &Provenance { command: "psp", label, inputs: serde_json::json!({ "records": records }), config: cfg },
    )?;
    write_json(&dir.join("psp_report.json"), &report)?;
    for (name, series) in report.named_series() {
        let path = dir.join("series").join(format!("{name}.csv"));
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &report.program_numbers, series).map_err(|e| CliError::io(&path, e))?;
        write_text(&path, &String::from_utf8(buf).expect("csv output is UTF-8"))?;
    }
    write_timing(&dir, "psp", started)?;
    let slopes: Vec<String> = report
        .named_series()
        .iter()
        .map(|(name, s)| match s.slope.value() {
            Some(v) => format!("{name} {v:+.4}"),
            None => format!("{name} n/a"),
        })
        .collect();
    Ok(format!("{label}: {} program(s); slopes: {}", recs.len(), slopes.join(", ")))
}

pub fn fit(
    project: &Project,
    cfg: &EiConfig,
    samples: &Path,
    label: &str,
    column: Option<&str>,
) -> Result<String, CliError> {
    let started = Instant::now();
    let _lock = project.lock()?;
    let dir = project.phase_dir(label)?;
    ensure_dir(&dir)?;
    let file = File::open(samples).map_err(|e| CliError::io(samples, e))?;
    let raw = match column {
        Some(c) => DefectSampleSet::read_csv_column(file, c)?,
        None => DefectSampleSet::read_lines(BufReader::new(file))?,
    };
    write_json(
        &dir.join("config.json"),
        &Provenance { command: "fit", label, inputs: serde_json::json!({ "samples": samples, "column": column }), config: cfg },
    )?;
    let report = analyze_phase(&dir, DefectSampleSet::from_raw(&raw, label), &cfg.analysis)?;
    write_timing(&dir, "fit", started)?;
    Ok(fit_summary(label, &report))
}

pub fn load_fit(project: &Project, label: &str) -> Result<WeibullModel, CliError> {
    let path = project.phase_dir(label)?.join("fit.json");
    if !path.exists() {
        return Err(CliError::MissingPhase { label: label.into(), path });
    }
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Artifact { path: path.clone(), message: e.to_string() })?;
    serde_json::from_value(doc["report"]["model"].clone())
        .map_err(|e| CliError::Artifact { path, message: format!("report.model: {e}") })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Change {
    Improved,
    Worsened,
    Equal,
}

#[derive(Serialize)]
struct ComparisonArtifact<'a> {
    a: &'a str,
    b: &'a str,
    /// How `a` stands relative to the baseline `b`.
    verdict: Change,
    report: &'a ComparisonReport,
}

/// Compare phase `a` against baseline `b` using only their fit reports.
pub fn compare(project: &Project, a: &str, b: &str) -> Result<String, CliError> {
    let _lock = project.lock()?;
    let (ma, mb) = (load_fit(project, a)?, load_fit(project, b)?);
    let report = compare_models(&ma, &mb);
    let verdict = match report.verdict {
        Verdict::Equal => Change::Equal,
        Verdict::AMoreReliable => Change::Improved,
        Verdict::BMoreReliable => Change::Worsened,
    };
    let dir = project.comparison_dir(a, b)?;
    write_json(&dir.join("comparison.json"), &ComparisonArtifact { a, b, verdict, report: &report })?;
    let mut csv = String::from("x,pdf_a,pdf_b\n");
    for (x, pa, pb) in overlay_curves(&ma, &mb, OVERLAY_POINTS) {
        csv.push_str(&format!("{x},{pa},{pb}\n"));
    }
    write_text(&dir.join("overlay.csv"), &csv)?;
    Ok(format!(
        "{a} vs {b}: mean {:.4} vs {:.4} (ratio {:.4}), sup CDF distance {:.4}; verdict {}",
        report.mean_a,
        report.mean_b,
        report.mean_ratio,
        report.sup_cdf_distance,
        serde_json::to_value(verdict).expect("enum serializes").as_str().unwrap_or("?")
    ))
}

pub fn mock_serve(bind: &str, faults: Option<&PathBuf>, workers: usize) -> Result<String, CliError> {
    let table = match faults {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str::<FaultTable>(&text).map_err(|e| CliError::Artifact { path: p.clone(), message: e.to_string() })?
        }
        None => FaultTable::new(),
    };
    table.validate().map_err(CliError::Usage)?;
    let target = MockTarget::bind(bind, table, workers).map_err(|e| CliError::io(bind, e))?;
    println!("mock target listening on {}", target.url());
    std::io::stdout().flush().ok();
    target.serve_forever();
    Ok("mock target stopped".into())
}
