//! Frame structure: timing constants, the per-frame symbol budget the
//! scheduler allocates from, and the cost of a packet in OFDMA symbols.

use crate::amc::BurstProfile;
use crate::time::{Tick, TICKS_PER_SEC};

/// Static air-interface parameters shared by every frame of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    /// Frame duration in ticks (5 ms in the bundled scenarios).
    pub frame_ticks: Tick,
    /// Uplink data symbols available for allocation per frame.
    pub symbols_per_frame: u32,
    /// Largest packet any flow may generate; also the base term of the
    /// deficit quantum.
    pub mtu_bytes: u32,
    /// Data subcarriers carried by one OFDMA symbol.
    pub data_subcarriers: u32,
}

impl FrameConfig {
    /// Total uplink capacity in symbols per second, derived exactly from
    /// the frame duration and the per-frame symbol count.
    pub fn total_capacity_sps(&self) -> f64 {
        self.symbols_per_frame as f64 * TICKS_PER_SEC as f64 / self.frame_ticks as f64
    }

    /// Number of frames that start before `duration_ticks`.
    pub fn frames_in(&self, duration_ticks: Tick) -> u64 {
        duration_ticks.div_ceil(self.frame_ticks)
    }
}

/// Symbols a packet of `size_bytes` occupies on the uplink under the given
/// burst profile: `ceil(bits / bits_per_symbol)`, computed in integer
/// arithmetic so the cost is exact for every rational coding rate.
pub fn bytes_to_symbols(size_bytes: u32, profile: &BurstProfile, data_subcarriers: u32) -> u64 {
    let (num, den) = profile.bits_per_symbol_ratio(data_subcarriers);
    let scaled_bits = size_bytes as u64 * 8 * den;
    scaled_bits.div_ceil(num)
}

/// The symbol budget of one frame. The scheduler consumes from it packet by
/// packet and stops granting once the next packet no longer fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameBudget {
    total: u64,
    remaining: u64,
}

impl FrameBudget {
    pub fn new(symbols: u32) -> Self {
        FrameBudget {
            total: symbols as u64,
            remaining: symbols as u64,
        }
    }

    pub fn fits(&self, cost_symbols: u64) -> bool {
        cost_symbols <= self.remaining
    }

    /// Consumes `cost_symbols` from the budget. Panics if it does not fit;
    /// callers must check [`fits`](Self::fits) first.
    pub fn consume(&mut self, cost_symbols: u64) {
        assert!(
            cost_symbols <= self.remaining,
            "budget overrun: cost {cost_symbols} > remaining {}",
            self.remaining
        );
        self.remaining -= cost_symbols;
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn used(&self) -> u64 {
        self.total - self.remaining
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}
