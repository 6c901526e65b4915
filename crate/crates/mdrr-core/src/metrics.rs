//! Metrics reduced from a run's output: throughput, delay, two jitter
//! estimators, loss, and Jain's fairness index.
//!
//! Grants complete at frame boundaries, so delivery stamps sit exactly on
//! multiples of the frame length. Throughput windows are therefore
//! left-open/right-closed `(start, end]`: the deliveries of the frame
//! spanning `[t, t+5 ms)` belong to the window that contains `t+5 ms`.
//!
//! "No data" and "zero" are different answers: a flow that delivered
//! nothing has no mean delay rather than a delay of zero, hence the
//! `Option` results.

use alloc::vec::Vec;
use core::ops::Range;

use crate::packet::{FlowId, Packet};
use crate::sim::FlowResult;
use crate::time::{ticks_to_secs, Tick};

/// Per-flow summary over a whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMetrics {
    pub flow_id: FlowId,
    /// Delivered bits over the run duration.
    pub throughput_bps: f64,
    /// Mean queueing delay in seconds; `None` when nothing was delivered.
    pub mean_delay_s: Option<f64>,
    /// Mean absolute deviation of inter-delivery gaps, in seconds; `None`
    /// below two deliveries.
    pub jitter_s: Option<f64>,
    /// RFC 3550 style smoothed estimator over the same deliveries, for
    /// comparison with tooling that reports it.
    pub jitter_smoothed_s: Option<f64>,
    /// Dropped over offered-and-resolved: `dropped / (delivered + dropped)`.
    /// Packets still queued at the end count as neither. Zero when the flow
    /// saw no traffic.
    pub loss_ratio: f64,
    pub delivered_packets: u64,
    pub dropped_packets: u64,
}

/// Reduces one flow's record to its summary metrics.
pub fn flow_metrics(flow: &FlowResult, duration_ticks: Tick) -> FlowMetrics {
    assert!(duration_ticks > 0, "duration must be positive");
    let (mean_delay_s, jitter_s) = delay_and_jitter(&flow.delivered);
    let delivered = flow.delivered.len() as u64;
    let resolved = delivered + flow.dropped;
    FlowMetrics {
        flow_id: flow.flow_id,
        throughput_bps: flow.bytes_delivered as f64 * 8.0 / ticks_to_secs(duration_ticks),
        mean_delay_s,
        jitter_s,
        jitter_smoothed_s: smoothed_jitter(&flow.delivered),
        loss_ratio: if resolved == 0 { 0.0 } else { flow.dropped as f64 / resolved as f64 },
        delivered_packets: delivered,
        dropped_packets: flow.dropped,
    }
}

/// Delivered bits inside the window `(start, end]`, over the window length.
pub fn throughput_bps(flow: &FlowResult, window: Range<Tick>) -> f64 {
    assert!(window.end > window.start, "window must be nonempty");
    let bits: u64 = flow
        .delivered
        .iter()
        .filter(|p| matches!(p.dequeued_at, Some(t) if t > window.start && t <= window.end))
        .map(|p| p.size_bytes as u64 * 8)
        .sum();
    bits as f64 / ticks_to_secs(window.end - window.start)
}

/// Tumbling-window throughput series: bps in each consecutive window
/// `(k*w, (k+1)*w]` until `horizon_ticks` is covered.
pub fn windowed_throughput(flow: &FlowResult, window_ticks: Tick, horizon_ticks: Tick) -> Vec<f64> {
    assert!(window_ticks > 0, "window must be nonempty");
    let windows = horizon_ticks.div_ceil(window_ticks);
    (0..windows)
        .map(|k| throughput_bps(flow, k * window_ticks..(k + 1) * window_ticks))
        .collect()
}

/// Mean queueing delay and inter-delivery jitter, in seconds.
///
/// The jitter is the mean absolute deviation of the gaps between
/// consecutive deliveries: zero for a perfectly periodic flow no matter the
/// period. `None` means not enough deliveries to measure (one for the mean,
/// two for the jitter) — distinct from a measured zero.
pub fn delay_and_jitter(delivered: &[Packet]) -> (Option<f64>, Option<f64>) {
    if delivered.is_empty() {
        return (None, None);
    }
    let delay_sum: f64 = delivered
        .iter()
        .map(|p| ticks_to_secs(p.dequeued_at.expect("delivered packets are stamped") - p.created_at))
        .sum();
    let mean_delay = delay_sum / delivered.len() as f64;
    if delivered.len() < 2 {
        return (Some(mean_delay), None);
    }
    let gaps: Vec<f64> = delivered
        .windows(2)
        .map(|w| ticks_to_secs(w[1].dequeued_at.unwrap() - w[0].dequeued_at.unwrap()))
        .collect();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let jitter = gaps.iter().map(|g| libm::fabs(g - mean_gap)).sum::<f64>() / gaps.len() as f64;
    (Some(mean_delay), Some(jitter))
}

/// The interarrival-jitter estimator RTP receivers maintain: for each pair
/// of consecutive deliveries the transit-time difference feeds a 1/16
/// exponential smoother. `None` below two deliveries.
pub fn smoothed_jitter(delivered: &[Packet]) -> Option<f64> {
    if delivered.len() < 2 {
        return None;
    }
    let transit =
        |p: &Packet| ticks_to_secs(p.dequeued_at.expect("delivered packets are stamped") - p.created_at);
    let mut jitter = 0.0;
    for w in delivered.windows(2) {
        let d = libm::fabs(transit(&w[1]) - transit(&w[0]));
        jitter += (d - jitter) / 16.0;
    }
    Some(jitter)
}

/// Jain's fairness index `(Σv)² / (n · Σv²)`: 1 when all shares are equal,
/// approaching `1/n` as one value dominates. `None` for an empty or all-zero
/// input, where the index is undefined.
pub fn fairness_index(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let sum: f64 = values.iter().sum();
    let sum_sq: f64 = values.iter().map(|v| v * v).sum();
    if sum_sq == 0.0 {
        return None;
    }
    Some(sum * sum / (values.len() as f64 * sum_sq))
}
