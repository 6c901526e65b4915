//! Core library for frame-based uplink scheduling in a point-to-multipoint
//! OFDMA network: packet and service-flow types, queue disciplines
//! (round-robin, weighted round-robin, deficit round-robin, and a modified
//! deficit round-robin with channel-aware weights), adaptive modulation and
//! coding with hysteresis, a deterministic discrete-event engine, and the
//! metrics reduced from its output.
//!
//! The crate is `no_std` + `alloc` compatible: all simulation state lives in
//! ordinary collections, time is integer ticks, and the only randomness is a
//! seeded ChaCha stream, so the same configuration always produces the same
//! trace. File formats, scenario handling and the command line live in the
//! companion `mdrr-sim` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod amc;
pub mod disciplines;
pub mod flow;
pub mod frame;
pub mod metrics;
pub mod packet;
pub mod sim;
pub mod station;
pub mod time;

pub use amc::{BurstProfile, ChannelParams, ChannelState, CodingRate, ProfileSet};
pub use disciplines::{
    DeficitQueue, Discipline, DrrMode, FrameService, LowClassPolicy, PriorityMode, SchedulerState,
};
pub use flow::{PriorityClass, QosParams, ServiceClass, ServiceFlow};
pub use frame::{bytes_to_symbols, FrameBudget, FrameConfig};
pub use metrics::{fairness_index, flow_metrics, FlowMetrics};
pub use packet::{FlowId, Packet, StationId};
pub use sim::{run, SimConfig, SimResult};
pub use station::MobileStation;
pub use time::{ticks_to_secs, Tick, TICKS_PER_SEC};
