//! Report files rendered from a finished run.
//!
//! Every run produces four files with stable names and column sets:
//!
//! - `metrics.csv` — one row per flow: cumulative counters and the derived
//!   throughput/delay/jitter/loss figures.
//! - `timeseries.csv` — one row per flow per frame: bytes granted, queue
//!   depth after the grant, and the frame's total symbol usage.
//! - `trace.csv` — one row per flow per frame: channel state, the weight
//!   and quantum in force, and the deficit left after service.
//! - `summary.txt` — a human-readable digest of the same numbers.
//!
//! Rows are emitted in (frame, flow-id) order and every floating-point
//! column uses fixed six-decimal formatting, so identical runs produce
//! byte-identical files.

use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use mdrr_core::metrics::{fairness_index, flow_metrics, FlowMetrics};
use mdrr_core::sim::{SimConfig, SimResult};
use mdrr_core::time::TICKS_PER_SEC;

use crate::scenario;

pub const METRICS_FILE: &str = "metrics.csv";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Header row of `metrics.csv`.
pub const METRICS_HEADER: [&str; 13] = [
    "flow",
    "station",
    "class",
    "generated",
    "delivered",
    "dropped",
    "queued_at_end",
    "bytes_delivered",
    "throughput_bps",
    "mean_delay_s",
    "jitter_s",
    "jitter_smoothed_s",
    "loss_ratio",
];

/// Header row of `timeseries.csv`.
pub const TIMESERIES_HEADER: [&str; 6] = [
    "frame",
    "end_s",
    "flow",
    "granted_bytes",
    "queue_packets",
    "frame_symbols_used",
];

/// Header row of `trace.csv`.
pub const TRACE_HEADER: [&str; 10] = [
    "frame",
    "flow",
    "station",
    "cinr_db",
    "reported_cinr_db",
    "profile_index",
    "profile",
    "weight_percent",
    "quantum_bytes",
    "deficit_bytes",
];

pub(crate) fn fmt6(value: f64) -> String {
    format!("{value:.6}")
}

pub(crate) fn opt6(value: Option<f64>) -> String {
    value.map(fmt6).unwrap_or_default()
}

pub(crate) fn csv_to_io(err: csv::Error) -> io::Error {
    io::Error::other(err)
}

/// Writes all four report files into `dir`, creating it if needed.
pub fn write_reports(config: &SimConfig, result: &SimResult, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_metrics(result, &dir.join(METRICS_FILE))?;
    write_timeseries(result, &dir.join(TIMESERIES_FILE))?;
    write_trace(config, result, &dir.join(TRACE_FILE))?;
    write_summary(config, result, &dir.join(SUMMARY_FILE))?;
    Ok(())
}

fn write_metrics(result: &SimResult, path: &Path) -> io::Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(csv_to_io)?;
    wtr.write_record(METRICS_HEADER).map_err(csv_to_io)?;
    for flow in &result.flows {
        let m = flow_metrics(flow, result.duration_ticks);
        let station = &result.stations[flow.station_id as usize].name;
        wtr.write_record([
            flow.name.as_str(),
            station.as_str(),
            flow.class.name(),
            &flow.generated.to_string(),
            &(flow.delivered.len() as u64).to_string(),
            &flow.dropped.to_string(),
            &flow.queued_at_end.to_string(),
            &flow.bytes_delivered.to_string(),
            &fmt6(m.throughput_bps),
            &opt6(m.mean_delay_s),
            &opt6(m.jitter_s),
            &opt6(m.jitter_smoothed_s),
            &fmt6(m.loss_ratio),
        ])
        .map_err(csv_to_io)?;
    }
    wtr.flush()
}

fn write_timeseries(result: &SimResult, path: &Path) -> io::Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(csv_to_io)?;
    wtr.write_record(TIMESERIES_HEADER).map_err(csv_to_io)?;
    for frame in 0..result.frames() as usize {
        let end_s = (frame as u64 + 1) * result.frame_ticks;
        for flow in &result.flows {
            wtr.write_record([
                frame.to_string(),
                fmt6(end_s as f64 / TICKS_PER_SEC as f64),
                flow.name.clone(),
                flow.per_frame_bytes[frame].to_string(),
                flow.per_frame_queue[frame].to_string(),
                result.symbols_used[frame].to_string(),
            ])
            .map_err(csv_to_io)?;
        }
    }
    wtr.flush()
}

fn write_trace(config: &SimConfig, result: &SimResult, path: &Path) -> io::Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(csv_to_io)?;
    wtr.write_record(TRACE_HEADER).map_err(csv_to_io)?;
    for rec in &result.trace {
        wtr.write_record([
            rec.frame.to_string(),
            result.flows[rec.flow_id as usize].name.clone(),
            result.stations[rec.station_id as usize].name.clone(),
            fmt6(rec.cinr_db),
            fmt6(rec.reported_cinr_db),
            rec.profile_index.to_string(),
            config.profiles[rec.profile_index].name.clone(),
            fmt6(rec.weight_percent),
            rec.quantum_bytes.to_string(),
            rec.deficit_bytes.to_string(),
        ])
        .map_err(csv_to_io)?;
    }
    wtr.flush()
}

fn write_summary(config: &SimConfig, result: &SimResult, path: &Path) -> io::Result<()> {
    let mut out = Vec::new();
    let frames = result.frames();
    let frame_ms = result.frame_ticks as f64 * 1000.0 / TICKS_PER_SEC as f64;
    writeln!(out, "uplink scheduling run")?;
    writeln!(out, "=====================")?;
    writeln!(
        out,
        "duration: {} s ({} frames x {} ms)",
        fmt6(result.duration_ticks as f64 / TICKS_PER_SEC as f64),
        frames,
        fmt6(frame_ms),
    )?;
    writeln!(
        out,
        "scheduler: {} (deficit {}, priority {}, low tier {}, weights {})",
        scenario::discipline_name(config.scheduler.discipline),
        scenario::drr_mode_name(config.scheduler.drr_mode),
        scenario::priority_mode_name(config.scheduler.priority_mode),
        scenario::low_class_policy_name(config.scheduler.low_class_policy),
        scenario::weight_formula_name(config.scheduler.weight_formula),
    )?;
    let used: u64 = result.symbols_used.iter().sum();
    let mean_used = if frames == 0 { 0.0 } else { used as f64 / frames as f64 };
    let peak_used = result.symbols_used.iter().copied().max().unwrap_or(0);
    writeln!(
        out,
        "budget: {} symbols/frame; mean used {}, peak {}",
        result.symbols_per_frame,
        fmt6(mean_used),
        peak_used,
    )?;
    writeln!(out, "deficit stalls: {}", result.stalls.len())?;
    writeln!(out)?;

    writeln!(out, "stations:")?;
    for s in &result.stations {
        writeln!(
            out,
            "  {}: {} m, final cinr {} dB, profile {} ({})",
            s.name,
            fmt6(s.distance_m),
            fmt6(s.final_cinr_db),
            s.final_profile,
            config.profiles[s.final_profile].name,
        )?;
    }
    writeln!(out)?;

    writeln!(out, "flows:")?;
    let mut throughputs = Vec::with_capacity(result.flows.len());
    for flow in &result.flows {
        let m: FlowMetrics = flow_metrics(flow, result.duration_ticks);
        throughputs.push(m.throughput_bps);
        writeln!(
            out,
            "  {} ({} on {}): delivered {} pkts / {} B, dropped {}, left queued {}, \
             throughput {} bps, mean delay {} s, jitter {} s, loss {}",
            flow.name,
            flow.class.name(),
            result.stations[flow.station_id as usize].name,
            flow.delivered.len(),
            flow.bytes_delivered,
            flow.dropped,
            flow.queued_at_end,
            fmt6(m.throughput_bps),
            opt6(m.mean_delay_s),
            opt6(m.jitter_s),
            fmt6(m.loss_ratio),
        )?;
    }
    writeln!(out)?;
    match fairness_index(&throughputs) {
        Some(j) => writeln!(out, "fairness index over flow throughputs: {}", fmt6(j))?,
        None => writeln!(out, "fairness index over flow throughputs: n/a")?,
    }
    fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{bundled, parse_scenario};

    fn tiny_run() -> (SimConfig, SimResult) {
        let config = parse_scenario(bundled("drr_trace").unwrap().text, &[]).unwrap();
        let result = mdrr_core::run(&config).unwrap();
        (config, result)
    }

    fn lines(path: &Path) -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(String::from)
            .collect()
    }

    #[test]
    fn reports_have_stable_headers_and_row_counts() {
        let (config, result) = tiny_run();
        let dir = tempfile::tempdir().unwrap();
        write_reports(&config, &result, dir.path()).unwrap();

        let metrics = lines(&dir.path().join(METRICS_FILE));
        assert_eq!(metrics[0], METRICS_HEADER.join(","));
        assert_eq!(metrics.len(), 1 + result.flows.len());

        let timeseries = lines(&dir.path().join(TIMESERIES_FILE));
        assert_eq!(timeseries[0], TIMESERIES_HEADER.join(","));
        assert_eq!(
            timeseries.len() as u64,
            1 + result.frames() * result.flows.len() as u64
        );

        let trace = lines(&dir.path().join(TRACE_FILE));
        assert_eq!(trace[0], TRACE_HEADER.join(","));
        assert_eq!(trace.len(), 1 + result.trace.len());

        let summary = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
        assert!(summary.contains("uplink scheduling run"), "{summary}");
        assert!(summary.contains("flows:"), "{summary}");
    }

    #[test]
    fn the_same_result_always_renders_the_same_bytes() {
        let (config, result) = tiny_run();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        write_reports(&config, &result, dir_a.path()).unwrap();
        write_reports(&config, &result, dir_b.path()).unwrap();
        for file in [METRICS_FILE, TIMESERIES_FILE, TRACE_FILE, SUMMARY_FILE] {
            let a = fs::read(dir_a.path().join(file)).unwrap();
            let b = fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs between identical writes");
        }
    }

    #[test]
    fn metrics_rows_carry_the_flow_counters() {
        let (config, result) = tiny_run();
        let dir = tempfile::tempdir().unwrap();
        write_reports(&config, &result, dir.path()).unwrap();
        let metrics = lines(&dir.path().join(METRICS_FILE));
        // drr_trace: one flow, three 200-byte packets, all delivered.
        let row: Vec<&str> = metrics[1].split(',').collect();
        assert_eq!(row[0], "q0");
        assert_eq!(row[1], "ms0");
        assert_eq!(row[2], "rtPS");
        assert_eq!(row[3], "3", "generated");
        assert_eq!(row[4], "3", "delivered");
        assert_eq!(row[7], "600", "bytes delivered");
    }
}
