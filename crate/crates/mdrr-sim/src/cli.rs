//! The `mdrr-sim` command line: argument parsing, dispatch, and exit codes.
//!
//! Four verbs:
//!
//! - `run <scenario>` — simulate one scenario and write its report files.
//! - `sweep <scenario> --param <key> --values <v1,v2,...>` — repeat the
//!   scenario once per value of one key, in parallel, and write a combined
//!   comparison file on top of the per-run reports.
//! - `validate <scenario>` — parse and validate without running.
//! - `list-scenarios` — show the scenarios bundled into the binary.
//!
//! `<scenario>` is a file path or a bundled scenario name; a path that exists
//! on disk wins. Exit codes: 0 success, 1 bad command line, 2 scenario
//! problem (unknown name, unreadable file, parse or validation failure),
//! 3 runtime failure (report files could not be written).

use std::io;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::report;
use crate::scenario::{self, ScenarioError};
use crate::sweep::{self, SweepError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SCENARIO: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "mdrr-sim",
    version,
    about = "Frame-based uplink scheduling simulator",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report files
    Run(RunArgs),
    /// Run one scenario once per value of a swept key
    Sweep(SweepArgs),
    /// Parse and validate a scenario without running it
    Validate(ValidateArgs),
    /// List the scenarios bundled into this binary
    ListScenarios,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    /// Comma-separated values with a header row
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file path or bundled scenario name
    scenario: String,
    /// Directory the report files are written into
    #[arg(long, env = "MDRR_SIM_OUTPUT", default_value = "out", value_name = "DIR")]
    output: PathBuf,
    /// Replace the scenario's random seed (applied after any --override)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Set one scenario key, e.g. --override sim.duration_s=10 (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Format of the tabular report files
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario file path or bundled scenario name
    scenario: String,
    /// Dotted scenario key to sweep, e.g. flows.ms2_voice.min_reserved_kbps
    #[arg(long, value_name = "KEY")]
    param: String,
    /// Comma-separated values for the swept key
    #[arg(long, value_name = "V1,V2,...", value_delimiter = ',', required = true)]
    values: Vec<String>,
    /// Directory the per-value report directories are written into
    #[arg(long, env = "MDRR_SIM_OUTPUT", default_value = "out", value_name = "DIR")]
    output: PathBuf,
    /// Replace the scenario's random seed (applied after any --override)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Set one scenario key, e.g. --override sim.duration_s=10 (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Format of the tabular report files
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scenario file path or bundled scenario name
    scenario: String,
    /// Replace the scenario's random seed (applied after any --override)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Set one scenario key, e.g. --override sim.duration_s=10 (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Error)]
enum AppError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("writing reports: {0}")]
    Io(#[from] io::Error),
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Scenario(_) | AppError::Sweep(SweepError::Scenario(_)) => EXIT_SCENARIO,
            AppError::Sweep(SweepError::DuplicateValue(_) | SweepError::NoValues) => EXIT_USAGE,
            AppError::Sweep(SweepError::Report(_)) | AppError::Io(_) => EXIT_RUNTIME,
        }
    }
}

/// Entry point used by the binary: parses arguments, dispatches, and maps
/// every outcome to its exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Merges `--override` pairs with the `--seed` shorthand; the seed is
/// appended last so it wins over any `sim.seed` override.
fn merge_overrides(
    raw: &[String],
    seed: Option<u64>,
) -> Result<Vec<(String, String)>, ScenarioError> {
    let mut overrides = raw
        .iter()
        .map(|s| scenario::split_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(seed) = seed {
        overrides.push(("sim.seed".to_string(), seed.to_string()));
    }
    Ok(overrides)
}

fn dispatch(command: Command) -> Result<(), AppError> {
    match command {
        Command::Run(args) => {
            let ReportFormat::Csv = args.format;
            let overrides = merge_overrides(&args.overrides, args.seed)?;
            let (label, config) = scenario::load(&args.scenario, &overrides)?;
            let result = mdrr_core::run(&config).map_err(ScenarioError::from)?;
            report::write_reports(&config, &result, &args.output)?;
            println!(
                "{label}: {} frames, {} flows, {} stations",
                result.frames(),
                result.flows.len(),
                result.stations.len(),
            );
            println!("reports: {}", args.output.display());
        }
        Command::Sweep(args) => {
            let ReportFormat::Csv = args.format;
            let overrides = merge_overrides(&args.overrides, args.seed)?;
            let (label, text) = scenario::resolve_source(&args.scenario)?;
            let runs = sweep::run_sweep(&text, &args.param, &args.values, &overrides, &args.output)?;
            for run in &runs {
                println!("{label} {}={}: {}", args.param, run.value, run.dir.display());
            }
            println!(
                "comparison: {}",
                args.output.join(sweep::SWEEP_FILE).display()
            );
        }
        Command::Validate(args) => {
            let overrides = merge_overrides(&args.overrides, args.seed)?;
            let (label, config) = scenario::load(&args.scenario, &overrides)?;
            println!(
                "ok: {label}: {} stations, {} flows, {:.3} s",
                config.stations.len(),
                config.flows.len(),
                mdrr_core::ticks_to_secs(config.duration_ticks),
            );
        }
        Command::ListScenarios => {
            for entry in scenario::BUNDLED {
                println!("{:<20} {}", entry.name, entry.summary);
            }
        }
    }
    Ok(())
}
