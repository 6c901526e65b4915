//! Simulation configuration: everything a run needs, validated up front.
//!
//! Validation collects *all* problems instead of stopping at the first, and
//! every error names the offending key in the dotted notation the scenario
//! files use (`flows.<name>.traffic.rate_kbps`), so a user fixing a scenario
//! sees the complete list in one pass.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::amc::{BurstProfile, ChannelParams, ProfileSet};
use crate::disciplines::{
    mtmr_sps, Discipline, DrrMode, LowClassPolicy, PriorityMode, WeightFormula,
};
use crate::flow::ServiceClass;
use crate::frame::{bytes_to_symbols, FrameConfig};
use crate::sim::traffic::{TrafficPattern, RATE_SCALE_ONE};
use crate::time::Tick;

/// One subscriber station: a name for reports and its distance from the
/// base station, which fixes its channel through the pathloss model.
#[derive(Debug, Clone, PartialEq)]
pub struct StationConfig {
    pub name: String,
    pub distance_m: f64,
}

/// One uplink service flow: who carries it, its QoS contract, its queue,
/// and the traffic offered to it.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub name: String,
    /// Index into [`SimConfig::stations`].
    pub station: usize,
    pub class: ServiceClass,
    pub max_sustained_bps: u64,
    pub min_reserved_bps: u64,
    pub max_latency_ticks: Tick,
    /// Queue capacity in packets; arrivals beyond it are tail-dropped.
    pub queue_capacity: usize,
    pub pattern: TrafficPattern,
    /// When the source starts emitting.
    pub start: Tick,
    /// When it stops (exclusive); `None` runs to the end of the simulation.
    pub stop: Option<Tick>,
    /// Packets granted per WRR visit; ignored by other disciplines.
    pub wrr_weight: u32,
    /// Fixed quantum for plain DRR. `None` defaults to one MTU. Ignored by
    /// MDRR, which derives quanta from weights every frame.
    pub quantum_bytes: Option<u64>,
}

/// Scheduler policy knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerConfig {
    pub discipline: Discipline,
    pub drr_mode: DrrMode,
    pub priority_mode: PriorityMode,
    pub low_class_policy: LowClassPolicy,
    pub weight_formula: WeightFormula,
    /// Frames between consecutive channel-quality reports.
    pub cqich_period_frames: u64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            discipline: Discipline::Mdrr,
            drr_mode: DrrMode::default(),
            priority_mode: PriorityMode::default(),
            low_class_policy: LowClassPolicy::default(),
            weight_formula: WeightFormula::default(),
            cqich_period_frames: 1,
        }
    }
}

/// A complete simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub duration_ticks: Tick,
    pub seed: u64,
    /// Offered-load multiplier in millionths ([`RATE_SCALE_ONE`] = nominal);
    /// scales every source's bit rate, turning one scenario into a load
    /// sweep.
    pub rate_scale: u64,
    pub frame: FrameConfig,
    pub channel: ChannelParams,
    pub profiles: Vec<BurstProfile>,
    pub stations: Vec<StationConfig>,
    pub flows: Vec<FlowConfig>,
    pub scheduler: SchedulerConfig,
}

/// One validation failure, naming the key that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// Every validation failure found in a configuration, one per line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigErrors {}

impl SimConfig {
    /// Checks the whole configuration, collecting every failure.
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut errors = Vec::new();
        let mut push = |key: String, message: String| errors.push(ConfigError { key, message });

        if self.duration_ticks == 0 {
            push("sim.duration_s".into(), "must be positive".into());
        }
        if self.rate_scale == 0 {
            push("sim.overload_factor".into(), "must be positive".into());
        }
        if self.frame.frame_ticks == 0 {
            push("frame.duration_ms".into(), "must be positive".into());
        }
        if self.frame.symbols_per_frame == 0 {
            push("frame.symbols_per_frame".into(), "must be positive".into());
        }
        if self.frame.mtu_bytes == 0 || self.frame.mtu_bytes > 65_535 {
            push("frame.mtu_bytes".into(), "must be between 1 and 65535".into());
        }
        if self.frame.data_subcarriers == 0 {
            push("frame.data_subcarriers".into(), "must be positive".into());
        }
        if !self.channel.ref_distance_m.is_finite() || self.channel.ref_distance_m <= 0.0 {
            push("channel.ref_distance_m".into(), "must be positive and finite".into());
        }
        if self.channel.noise_sigma_db < 0.0 || !self.channel.noise_sigma_db.is_finite() {
            push("channel.noise_sigma_db".into(), "must be nonnegative and finite".into());
        }
        if self.scheduler.cqich_period_frames == 0 {
            push("scheduler.cqich_period_frames".into(), "must be positive".into());
        }

        // The most robust profile governs the worst-case checks below; only
        // run them once the ladder itself is sound.
        let ladder = match ProfileSet::new(self.profiles.clone()) {
            Ok(set) => Some(set),
            Err(e) => {
                push("profiles".into(), e.to_string());
                None
            }
        };

        for (i, station) in self.stations.iter().enumerate() {
            if station.name.is_empty() {
                push(format!("stations[{i}].name"), "must not be empty".into());
            }
            if self.stations[..i].iter().any(|s| s.name == station.name) {
                push(format!("stations.{}", station.name), "duplicate station name".into());
            }
            if !station.distance_m.is_finite() || station.distance_m <= 0.0 {
                push(
                    format!("stations.{}.distance_m", station.name),
                    "must be positive and finite".into(),
                );
            }
        }

        for (i, flow) in self.flows.iter().enumerate() {
            let name = if flow.name.is_empty() {
                push(format!("flows[{i}].name"), "must not be empty".into());
                format!("flows[{i}]")
            } else {
                format!("flows.{}", flow.name)
            };
            if self.flows[..i].iter().any(|f| f.name == flow.name && !flow.name.is_empty()) {
                push(name.clone(), "duplicate flow name".into());
            }
            if flow.station >= self.stations.len() {
                push(
                    format!("{name}.station"),
                    format!("no station at index {} (have {})", flow.station, self.stations.len()),
                );
            }
            if !flow.class.is_schedulable() {
                push(
                    format!("{name}.class"),
                    format!(
                        "{} grants are reserved outside the frame scheduler; use rtPS, nrtPS, or BE",
                        flow.class.name()
                    ),
                );
            }
            if flow.min_reserved_bps > flow.max_sustained_bps {
                push(
                    format!("{name}.min_reserved_kbps"),
                    "must not exceed max_sustained_kbps".into(),
                );
            }
            if flow.max_latency_ticks == 0 {
                push(format!("{name}.max_latency_ms"), "must be positive".into());
            }
            if flow.queue_capacity == 0 {
                push(format!("{name}.queue_capacity"), "must be positive".into());
            }
            if flow.wrr_weight == 0 {
                push(format!("{name}.wrr_weight"), "must be positive".into());
            }
            if flow.quantum_bytes == Some(0) {
                push(format!("{name}.quantum_bytes"), "must be positive when set".into());
            }
            if let Some(stop) = flow.stop {
                if stop <= flow.start {
                    push(format!("{name}.traffic.stop_s"), "must be after start_s".into());
                }
            }
            if flow.pattern.rate_bps() == 0 {
                push(format!("{name}.traffic.rate_kbps"), "must be positive".into());
            }
            match flow.pattern {
                TrafficPattern::Cbr { packet_bytes, .. } => {
                    if packet_bytes == 0 || packet_bytes > self.frame.mtu_bytes {
                        push(
                            format!("{name}.traffic.packet_bytes"),
                            format!("must be between 1 and frame.mtu_bytes ({})", self.frame.mtu_bytes),
                        );
                    }
                }
                TrafficPattern::VariableCbr { min_bytes, max_bytes, .. } => {
                    if min_bytes == 0 {
                        push(format!("{name}.traffic.min_bytes"), "must be positive".into());
                    }
                    if min_bytes > max_bytes {
                        push(format!("{name}.traffic.min_bytes"), "must not exceed max_bytes".into());
                    }
                    if max_bytes > self.frame.mtu_bytes {
                        push(
                            format!("{name}.traffic.max_bytes"),
                            format!("must not exceed frame.mtu_bytes ({})", self.frame.mtu_bytes),
                        );
                    }
                }
            }
            if let Some(ladder) = &ladder {
                let robust = ladder.get(0);
                // Any packet must fit into an empty frame even on the most
                // robust profile, or the scheduler could never drain it.
                let worst = flow.pattern.max_packet_bytes();
                if worst > 0 && worst <= self.frame.mtu_bytes && self.frame.data_subcarriers > 0 {
                    let cost = bytes_to_symbols(worst, robust, self.frame.data_subcarriers);
                    if cost > self.frame.symbols_per_frame as u64 {
                        push(
                            format!("{name}.traffic"),
                            format!(
                                "a {worst}-byte packet needs {cost} symbols on {} but a frame carries {}",
                                robust.name, self.frame.symbols_per_frame
                            ),
                        );
                    }
                }
                // The reserved rate must be satisfiable on the most robust
                // profile, or the weight derivation is undefined.
                if self.frame.frame_ticks > 0 && self.frame.data_subcarriers > 0 {
                    let demand = mtmr_sps(flow.min_reserved_bps, robust, self.frame.data_subcarriers);
                    let capacity = self.frame.total_capacity_sps();
                    if demand > capacity {
                        push(
                            format!("{name}.min_reserved_kbps"),
                            format!(
                                "demands {demand:.1} symbols/s on {} but the uplink carries {capacity:.1}",
                                robust.name
                            ),
                        );
                    }
                }
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }
}

impl Default for SimConfig {
    /// An empty but valid configuration: ten seconds of standard frames with
    /// the default ladder and no stations or flows. Tests and builders start
    /// from here.
    fn default() -> Self {
        SimConfig {
            duration_ticks: 10 * crate::time::TICKS_PER_SEC,
            seed: 1,
            rate_scale: RATE_SCALE_ONE,
            frame: FrameConfig {
                frame_ticks: 500_000,
                symbols_per_frame: 21,
                mtu_bytes: 1500,
                data_subcarriers: 800,
            },
            channel: ChannelParams::default(),
            profiles: crate::amc::standard_ladder(),
            stations: Vec::new(),
            flows: Vec::new(),
            scheduler: SchedulerConfig::default(),
        }
    }
}
