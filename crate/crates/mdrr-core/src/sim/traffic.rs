//! Traffic sources: constant-bit-rate and variable-packet-size generators
//! feeding the uplink queues.
//!
//! Arrival instants are computed in exact integer arithmetic (u128 against
//! the 10 ns tick base) so a CBR source never drifts no matter how long the
//! run, and two runs with the same seed produce identical arrival lists.

use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::packet::FlowId;
use crate::time::{Tick, TICKS_PER_SEC};

/// Rate scale corresponding to the nominal (1.0x) load.
pub const RATE_SCALE_ONE: u64 = 1_000_000;

/// What a source emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficPattern {
    /// Fixed-size packets at a constant bit rate: inter-arrival time is
    /// exactly `packet_bytes * 8 / rate_bps` seconds.
    Cbr { rate_bps: u64, packet_bytes: u32 },
    /// Constant bit rate with per-packet sizes drawn uniformly from
    /// `[min_bytes, max_bytes]`; each packet's spacing matches its own
    /// size so the bit rate still holds over any short window.
    VariableCbr { rate_bps: u64, min_bytes: u32, max_bytes: u32 },
}

impl TrafficPattern {
    pub fn rate_bps(&self) -> u64 {
        match *self {
            TrafficPattern::Cbr { rate_bps, .. } => rate_bps,
            TrafficPattern::VariableCbr { rate_bps, .. } => rate_bps,
        }
    }

    /// Largest packet this pattern can emit.
    pub fn max_packet_bytes(&self) -> u32 {
        match *self {
            TrafficPattern::Cbr { packet_bytes, .. } => packet_bytes,
            TrafficPattern::VariableCbr { max_bytes, .. } => max_bytes,
        }
    }
}

/// One flow's offered load: its pattern and the interval it is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrafficSource {
    pub flow_id: FlowId,
    pub pattern: TrafficPattern,
    pub start: Tick,
    /// Exclusive end of the emission interval; `None` runs to the end of
    /// the simulation.
    pub stop: Option<Tick>,
}

/// A generated packet arrival, before it is wrapped into an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrival {
    pub time: Tick,
    pub size_bytes: u32,
}

/// Ticks occupied by `bits` at `rate_bps` scaled by `rate_scale` (in
/// millionths), rounded to the nearest tick. Exact in u128.
fn interval_ticks(bits: u64, rate_bps: u64, rate_scale: u64) -> u128 {
    let num = bits as u128 * TICKS_PER_SEC as u128 * RATE_SCALE_ONE as u128;
    let den = rate_bps as u128 * rate_scale as u128;
    (num + den / 2) / den
}

/// Emits the source's arrivals that fall inside `window` (typically the
/// whole run), with the source's bit rate scaled by `rate_scale`
/// millionths — the overload knob. Sizes for variable patterns are drawn
/// from `rng`, which the caller seeds per flow.
pub fn generate_traffic<R: Rng>(
    source: &TrafficSource,
    window: Range<Tick>,
    rate_scale: u64,
    rng: &mut R,
) -> Vec<Arrival> {
    let begin = source.start.max(window.start);
    let end = match source.stop {
        Some(stop) => stop.min(window.end),
        None => window.end,
    };
    let mut arrivals = Vec::new();
    if begin >= end {
        return arrivals;
    }
    match source.pattern {
        TrafficPattern::Cbr { rate_bps, packet_bytes } => {
            // The k-th packet leaves at start + k * interval, computed from
            // k directly so rounding never accumulates.
            let bits = packet_bytes as u64 * 8;
            for k in 0u64.. {
                let offset = interval_ticks(bits.saturating_mul(k), rate_bps, rate_scale);
                let time = source.start as u128 + offset;
                if time >= end as u128 {
                    break;
                }
                let time = time as Tick;
                if time >= begin {
                    arrivals.push(Arrival { time, size_bytes: packet_bytes });
                }
            }
        }
        TrafficPattern::VariableCbr { rate_bps, min_bytes, max_bytes } => {
            let mut time = source.start as u128;
            while time < end as u128 {
                let size = rng.random_range(min_bytes..=max_bytes);
                if time >= begin as u128 {
                    arrivals.push(Arrival { time: time as Tick, size_bytes: size });
                }
                // Each packet occupies exactly its own serialization time
                // at the scaled rate, never less than one tick so the
                // sequence always advances.
                time += interval_ticks(size as u64 * 8, rate_bps, rate_scale).max(1);
            }
        }
    }
    arrivals
}
