//! Parameter sweeps: one scenario run once per value of a single dotted key.
//!
//! Each value gets its own full report directory named `<key>=<value>` under
//! the sweep output directory, and the sweep finishes with one combined
//! `sweep.csv` comparing per-flow metrics across all values. Runs execute in
//! parallel, one thread per value, and the returned list preserves the order
//! the values were given in.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;

use mdrr_core::metrics::flow_metrics;
use mdrr_core::sim::{SimConfig, SimResult};
use thiserror::Error;

use crate::report::{self, csv_to_io, fmt6, opt6};
use crate::scenario::{self, ScenarioError};

pub const SWEEP_FILE: &str = "sweep.csv";

/// Header row of `sweep.csv`.
pub const SWEEP_HEADER: [&str; 11] = [
    "param",
    "value",
    "flow",
    "station",
    "class",
    "throughput_bps",
    "mean_delay_s",
    "jitter_s",
    "loss_ratio",
    "delivered",
    "dropped",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("writing sweep reports: {0}")]
    Report(#[from] io::Error),
    #[error("sweep value {0:?} repeats; every value must map to its own output directory")]
    DuplicateValue(String),
    #[error("a sweep needs at least one value")]
    NoValues,
}

/// One completed run of a sweep.
#[derive(Debug)]
pub struct SweepRun {
    /// The raw value the swept key was set to.
    pub value: String,
    /// The directory this run's report files were written into.
    pub dir: PathBuf,
    pub config: SimConfig,
    pub result: SimResult,
}

fn sanitize(value: &str) -> String {
    value
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn dir_name(param: &str, value: &str) -> String {
    let key = param.rsplit('.').next().unwrap_or(param);
    format!("{key}={}", sanitize(value))
}

/// Runs `text` once per value in `values`, with `param=value` applied on top
/// of `base_overrides`, writing one report directory per run plus a combined
/// `sweep.csv` into `out_dir`.
pub fn run_sweep(
    text: &str,
    param: &str,
    values: &[String],
    base_overrides: &[(String, String)],
    out_dir: &Path,
) -> Result<Vec<SweepRun>, SweepError> {
    if values.is_empty() {
        return Err(SweepError::NoValues);
    }
    let dirs: Vec<PathBuf> = values
        .iter()
        .map(|value| out_dir.join(dir_name(param, value)))
        .collect();
    let mut seen = BTreeSet::new();
    for (value, dir) in values.iter().zip(&dirs) {
        if !seen.insert(dir.clone()) {
            return Err(SweepError::DuplicateValue(value.clone()));
        }
    }
    fs::create_dir_all(out_dir)?;

    let outcomes: Vec<Result<SweepRun, SweepError>> = thread::scope(|scope| {
        let handles: Vec<_> = values
            .iter()
            .zip(&dirs)
            .map(|(value, dir)| {
                scope.spawn(move || -> Result<SweepRun, SweepError> {
                    let mut overrides = base_overrides.to_vec();
                    overrides.push((param.to_string(), value.clone()));
                    let config = scenario::parse_scenario(text, &overrides)?;
                    let result = mdrr_core::run(&config).map_err(ScenarioError::from)?;
                    report::write_reports(&config, &result, dir)?;
                    Ok(SweepRun {
                        value: value.clone(),
                        dir: dir.clone(),
                        config,
                        result,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("sweep worker panicked"))
            .collect()
    });

    let runs = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    write_comparison(param, &runs, &out_dir.join(SWEEP_FILE))?;
    Ok(runs)
}

fn write_comparison(param: &str, runs: &[SweepRun], path: &Path) -> io::Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(csv_to_io)?;
    wtr.write_record(SWEEP_HEADER).map_err(csv_to_io)?;
    for run in runs {
        for flow in &run.result.flows {
            let m = flow_metrics(flow, run.result.duration_ticks);
            wtr.write_record([
                param.to_string(),
                run.value.clone(),
                flow.name.clone(),
                run.result.stations[flow.station_id as usize].name.clone(),
                flow.class.name().to_string(),
                fmt6(m.throughput_bps),
                opt6(m.mean_delay_s),
                opt6(m.jitter_s),
                fmt6(m.loss_ratio),
                (flow.delivered.len() as u64).to_string(),
                flow.dropped.to_string(),
            ])
            .map_err(csv_to_io)?;
        }
    }
    wtr.flush()
}
