//! Simulation time base.
//!
//! Time is kept in integer ticks of 10 ns so that frame boundaries, packet
//! arrivals and report instants compare exactly and event ordering never
//! depends on floating-point rounding. 10 ns divides every interval the
//! simulator cares about (5 ms frames, OFDMA symbol times on the order of
//! 100 us, millisecond-scale packet spacings) and a `u64` tick counter spans
//! nearly six thousand years, so overflow is not a practical concern.

/// One simulation tick is 10 ns.
pub type Tick = u64;

/// Ticks per second (tick length 10 ns).
pub const TICKS_PER_SEC: u64 = 100_000_000;

/// Converts a tick count to seconds. Lossy (f64), for reporting only;
/// scheduling always compares raw ticks.
pub fn ticks_to_secs(t: Tick) -> f64 {
    t as f64 / TICKS_PER_SEC as f64
}

/// Converts seconds to the nearest tick. Intended for configuration values
/// (frame duration, run length, start/stop offsets), not for event math.
pub fn secs_to_ticks(secs: f64) -> Tick {
    libm::round(secs * TICKS_PER_SEC as f64) as Tick
}
