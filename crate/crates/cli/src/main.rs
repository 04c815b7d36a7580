//! `ei`: command-line driver for the evaluation + improvement workflow.

mod commands;
mod config;
mod error;
mod project;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use url::Url;

use config::EiConfig;
use error::CliError;
use project::Project;

#[derive(Parser)]
#[command(name = "ei", version, about = "Reliability evaluation and improvement toolkit")]
struct Cli {
    /// Project directory holding phase artifacts.
    #[arg(long, global = true, default_value = ".")]
    project_dir: PathBuf,
    /// Seed for the simulator and the evaluation campaign.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate ideal-condition operation and fit the resulting densities.
    Simulate {
        #[arg(long, default_value = "ideal")]
        label: String,
        /// Override the number of runs.
        #[arg(long)]
        runs: Option<usize>,
        /// Also write every event to trace.csv.
        #[arg(long)]
        trace: bool,
    },
    /// Crawl a target and write its site model.
    Crawl {
        #[arg(long)]
        target: Url,
        /// Output file (default: <project>/site.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an evaluation campaign against a target and fit the densities.
    Evaluate {
        #[arg(long)]
        target: Url,
        #[arg(long, default_value = "real")]
        label: String,
        /// Use a saved site model instead of crawling.
        #[arg(long)]
        site: Option<PathBuf>,
        #[arg(long)]
        evaluations: Option<usize>,
        /// Test cases generated per round.
        #[arg(long)]
        cases: Option<usize>,
        /// Evaluation window per round, in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Concurrent tester cap.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Compute PSP quality metrics and trends from program records.
    Psp {
        /// CSV (one defect per row) or JSON records.
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "psp")]
        label: String,
    },
    /// Fit a Weibull model to an existing sample file.
    Fit {
        /// One value per line, or a CSV file with --column.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        label: String,
        #[arg(long)]
        column: Option<String>,
    },
    /// Compare phase A against baseline phase B.
    Compare { a: String, b: String },
    /// Serve the bundled mock target.
    MockServe {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        /// JSON fault table.
        #[arg(long)]
        faults: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        workers: usize,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut cfg = EiConfig::load(cli.config.as_deref())?.with_seed(cli.seed);
    let project = Project::new(&cli.project_dir);
    match cli.command {
        Command::Simulate { label, runs, trace } => {
            if let Some(r) = runs {
                cfg.simulation.runs = r;
            }
            commands::simulate(&project, &cfg, &label, trace)
        }
        Command::Crawl { target, out } => commands::crawl(&project, &cfg, &target, out.as_deref()),
        Command::Evaluate { target, label, site, evaluations, cases, duration, workers } => {
            let e = &mut cfg.evaluation;
            if let Some(v) = evaluations {
                e.evaluations = v;
            }
            if let Some(v) = cases {
                e.cases_per_round = v;
            }
            if let Some(v) = duration {
                e.harness.duration_s = v;
            }
            if let Some(v) = workers {
                e.harness.workers = v;
            }
            commands::evaluate(&project, &cfg, &target, &label, site.as_deref())
        }
        Command::Psp { records, label } => commands::psp(&project, &cfg, &records, &label),
        Command::Fit { samples, label, column } => commands::fit(&project, &cfg, &samples, &label, column.as_deref()),
        Command::Compare { a, b } => commands::compare(&project, &a, &b),
        Command::MockServe { bind, faults, workers } => commands::mock_serve(&bind, faults.as_ref(), workers),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from((if e.use_stderr() { error::code::USAGE } else { error::code::OK }) as u8);
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
