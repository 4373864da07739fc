use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sasaki::document::ModelDocument;
use sasaki::report::{build_report, ReportOptions, DEFAULT_SAMPLES, DEFAULT_SEED};
use sasaki::scan::{scan_to_file, GridSpec};
use sasaki::verify::{run_suite, VerifyOptions};
use sasaki::Error;

/// Curvature of sphere bundles with the Sasaki metric.
#[derive(Parser)]
#[command(name = "sasaki", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature report for a model document (JSON).
    Report {
        file: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random planes for the sectional-curvature range.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Tolerance for float comparisons and verdicts (overrides the document).
        #[arg(long)]
        tol: Option<f64>,
        /// Include the wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Run a property suite; exit code 1 if any check fails.
    Verify {
        /// Suite name, or `all`.
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Model document to audit (skew-adjoint suite).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Print the outcome as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a parameter grid and write CSV.
    Scan {
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Report { file, out, samples, seed, tol, timing } => {
            let options = ReportOptions { samples, seed, tolerance: tol, timing };
            let report = match ModelDocument::from_path(&file).and_then(|doc| build_report(&doc, &options)) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let text = report.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        return fail(Error::Io(format!("{}: {e}", path.display())));
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Command::Verify { suite, samples, seed, tol, model, json } => {
            let options = VerifyOptions { samples, seed, tolerance: tol, model };
            let outcome = match run_suite(&suite, &options) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&outcome).expect("outcome serializes"));
            } else {
                print!("{}", outcome.render_text());
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Scan { grid, out } => {
            match GridSpec::from_path(&grid).and_then(|spec| scan_to_file(&spec, &out)) {
                Ok(rows) => {
                    eprintln!("wrote {rows} rows to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
