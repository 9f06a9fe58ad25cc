//! `robobench` command line: run the matrix, rate runs, validate programs,
//! emit reports and export the case study.
//!
//! Exit codes: 0 success, 1 validation or run failure, 2 configuration or
//! usage error.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use robobench::bench::{load_records, Bench, Mode, RecordStore, RunConfig, TrialRecord};
use robobench::feedback::{
    emit_report, export_case_study, import_feedback, load_feedback, rate_session, FeedbackStore, ReportError,
};
use robobench::lang::validate_source;
use robobench::world::{UserSignal, WaitMode};

#[derive(Parser)]
#[command(name = "robobench", version, about = "Multi-agent robot programming bench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pre-generate, execute and regenerate every cell of the configured matrix.
    Run {
        /// Run configuration (TOML).
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `workers` from the config.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Collect blind observer ratings for successful runs.
    Rate {
        #[command(flatten)]
        store: StoreArgs,
        /// Observer label stored with each rating.
        #[arg(long, default_value = "observer")]
        observer: String,
        /// Seed for the presentation order.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Import ratings from a JSON-lines file instead of prompting.
        #[arg(long)]
        import: Option<PathBuf>,
    },
    /// Parse and statically check a robot program.
    Validate { program: PathBuf },
    /// Write aggregate.json and the per-figure CSV tables.
    Report {
        #[command(flatten)]
        store: StoreArgs,
        /// Directory for report files [default: <store dir>/report].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra score table restricted to these trials, e.g. `--prompts 3,5`.
        #[arg(long, value_delimiter = ',')]
        prompts: Vec<u8>,
    },
    /// Write anonymized programs and a sealed key for code review.
    ExportCaseStudy {
        #[command(flatten)]
        store: StoreArgs,
        /// Directory for the bundle [default: <store dir>/case_study].
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [3u8, 5])]
        prompts: Vec<u8>,
        #[arg(long, default_value_t = 2)]
        per_config: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args)]
struct StoreArgs {
    /// Record store written by `run` (records.jsonl).
    #[arg(long)]
    store: PathBuf,
    /// Feedback store [default: feedback.jsonl next to the record store].
    #[arg(long)]
    feedback: Option<PathBuf>,
}

impl StoreArgs {
    fn dir(&self) -> PathBuf {
        self.store.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf)
    }

    fn feedback_path(&self) -> PathBuf {
        self.feedback.clone().unwrap_or_else(|| self.dir().join("feedback.jsonl"))
    }

    fn records(&self) -> Result<Vec<TrialRecord>, Failure> {
        load_records(&self.store).map_err(|e| Failure::Config(e.to_string()))
    }
}

enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Config(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, workers } => cmd_run(&config, out, workers),
        Command::Rate { store, observer, seed, import } => cmd_rate(&store, &observer, seed, import.as_deref()),
        Command::Validate { program } => cmd_validate(&program),
        Command::Report { store, out, prompts } => cmd_report(&store, out, &prompts),
        Command::ExportCaseStudy { store, out, prompts, per_config, seed } => {
            cmd_export(&store, out, &prompts, per_config, seed)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_run(path: &Path, out: Option<PathBuf>, workers: Option<usize>) -> Result<(), Failure> {
    let mut config = RunConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(out) = out {
        config.output_dir = out;
    }
    if let Some(w) = workers {
        config.workers = w;
    }
    config.validate().map_err(|e| Failure::Config(e.to_string()))?;
    let backend = config.build_backend().map_err(|e| Failure::Config(e.to_string()))?;
    let store = RecordStore::open(config.records_path()).map_err(|e| Failure::Config(e.to_string()))?;

    let mut bench = Bench::from_config(backend.as_ref(), &config);
    if config.mode == Mode::Interactive {
        let signal = UserSignal::new();
        let deliver = signal.clone();
        let announce = Arc::new(move |prompt: &str| {
            print!("robot waits: \"{prompt}\" - press Enter when the user is ready ");
            let _ = io::stdout().flush();
            let mut line = String::new();
            if io::stdin().lock().read_line(&mut line).is_ok_and(|n| n > 0) {
                deliver.deliver();
            }
        });
        bench = bench.with_mode(WaitMode::Interactive { signal, announce: Some(announce) });
    }

    println!("records: {}", store.path().display());
    let progress = |r: &TrialRecord| {
        let status = match (&r.outcome, &r.generation.failure) {
            (Some(o), _) => o.status.to_string(),
            (None, Some(f)) => format!("generation failed: {}", f.message),
            (None, None) => "no program".into(),
        };
        println!(
            "config {} trial {} rep {} attempt {}: {status} ({:.2} s simulated, {} in / {} out tokens)",
            r.config, r.trial, r.repetition, r.attempt_index, r.execution_sim_time, r.input_tokens, r.output_tokens
        );
    };
    let outcome = bench.run_matrix(&config.matrix, &store, &progress).map_err(|e| Failure::Check(e.to_string()))?;
    let finals = outcome.final_records().count();
    println!(
        "{} cells run this time, {} final records, {} cells failed every attempt",
        outcome.executed_cells.len(),
        finals,
        outcome.failed_cells.len()
    );
    if outcome.failed_cells.is_empty() {
        Ok(())
    } else {
        let cells: Vec<String> = outcome.failed_cells.iter().map(ToString::to_string).collect();
        Err(Failure::Check(format!("all retries failed for: {}", cells.join("; "))))
    }
}

fn cmd_rate(args: &StoreArgs, observer: &str, seed: u64, import: Option<&Path>) -> Result<(), Failure> {
    let records = args.records()?;
    let mut store = FeedbackStore::open(args.feedback_path()).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(file) = import {
        let summary = import_feedback(file, &records, &mut store).map_err(|e| Failure::Config(e.to_string()))?;
        println!("imported {} rating(s) into {}", summary.accepted, store.path().display());
        for (line, reason) in &summary.rejected {
            eprintln!("{}:{line}: rejected: {reason}", file.display());
        }
        return if summary.rejected.is_empty() {
            Ok(())
        } else {
            Err(Failure::Check(format!("{} line(s) rejected", summary.rejected.len())))
        };
    }
    let stdin = io::stdin();
    let summary = rate_session(&records, &mut store, observer, seed, stdin.lock(), io::stdout())
        .map_err(|e| Failure::Check(e.to_string()))?;
    println!("rated {} of {} run(s)", summary.rated, summary.pending);
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let source = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let diagnostics = validate_source(&source);
    for d in &diagnostics {
        println!("{}:{}:{}: {} {}", path.display(), d.line, d.column, d.code.as_str(), d.message);
    }
    if diagnostics.is_empty() {
        println!("{}: ok", path.display());
        Ok(())
    } else {
        Err(Failure::Check(format!("{} diagnostic(s)", diagnostics.len())))
    }
}

fn report_failure(e: ReportError) -> Failure {
    match e {
        ReportError::UnknownTrial(_) => Failure::Config(e.to_string()),
        other => Failure::Check(other.to_string()),
    }
}

fn cmd_report(args: &StoreArgs, out: Option<PathBuf>, prompts: &[u8]) -> Result<(), Failure> {
    let records = args.records()?;
    let feedback = load_feedback(args.feedback_path()).map_err(|e| Failure::Config(e.to_string()))?;
    let filter: Option<BTreeSet<u8>> = (!prompts.is_empty()).then(|| prompts.iter().copied().collect());
    let out = out.unwrap_or_else(|| args.dir().join("report"));
    let artifacts = emit_report(&records, &feedback, filter.as_ref(), &out).map_err(report_failure)?;
    println!("{}", artifacts.aggregate.display());
    for t in &artifacts.tables {
        println!("{}", t.display());
    }
    Ok(())
}

fn cmd_export(
    args: &StoreArgs,
    out: Option<PathBuf>,
    prompts: &[u8],
    per_config: usize,
    seed: u64,
) -> Result<(), Failure> {
    let records = args.records()?;
    let out = out.unwrap_or_else(|| args.dir().join("case_study"));
    let study = export_case_study(&records, prompts, per_config, seed, &out).map_err(report_failure)?;
    println!("{} samples in {} (key: {})", study.samples.len(), out.display(), study.key_path.display());
    Ok(())
}
