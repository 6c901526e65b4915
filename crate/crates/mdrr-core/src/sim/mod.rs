//! The discrete-event simulation: configuration, traffic generation, and
//! the engine that drives frames, channel reports, and arrivals to the end
//! of a run.

mod config;
mod engine;
mod traffic;

pub use config::{ConfigError, ConfigErrors, FlowConfig, SchedulerConfig, SimConfig, StationConfig};
pub use engine::{
    run, Event, EventKind, FlowResult, SimResult, StallRecord, StationResult, TraceRecord,
};
pub use traffic::{generate_traffic, Arrival, TrafficPattern, TrafficSource, RATE_SCALE_ONE};
