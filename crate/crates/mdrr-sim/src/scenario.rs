//! Scenario files: the on-disk description of a simulation run.
//!
//! A scenario is a TOML document with `[frame]`, `[sim]`, `[channel]` and
//! `[scheduler]` sections, an `[[profiles]]` ladder, and named
//! `[stations.<name>]` / `[flows.<name>]` tables. Parsing is strict:
//! unknown keys are rejected, and every diagnostic names the offending key
//! in the dotted notation used throughout (`flows.ms2.traffic.rate_kbps`).
//!
//! Stations and flows are ordered lexicographically by name. That ordering
//! fixes their numeric ids inside the engine — and therefore the round-robin
//! visiting order and every report — so a scenario file pins a run
//! completely.
//!
//! Dotted-path overrides (`scheduler.discipline=rr`) edit the parsed
//! document before it is interpreted, last one wins, which lets one file
//! drive a whole family of runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mdrr_core::amc::{BurstProfile, ChannelParams, CodingRate};
use mdrr_core::disciplines::{Discipline, DrrMode, LowClassPolicy, PriorityMode, WeightFormula};
use mdrr_core::flow::ServiceClass;
use mdrr_core::frame::FrameConfig;
use mdrr_core::sim::{
    ConfigErrors, FlowConfig, SchedulerConfig, SimConfig, StationConfig, TrafficPattern,
    RATE_SCALE_ONE,
};
use mdrr_core::time::{Tick, TICKS_PER_SEC};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ticks per millisecond, for the frame-duration and latency keys.
const TICKS_PER_MS: u64 = TICKS_PER_SEC / 1000;

/// Why a scenario could not be turned into a runnable configuration.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("{0}")]
    Config(#[from] ConfigErrors),
    #[error("no scenario file or bundled scenario named {name:?} (bundled: {known})")]
    Unknown { name: String, known: String },
    #[error("cannot encode scenario: {0}")]
    Encode(#[from] toml::ser::Error),
}

impl ScenarioError {
    fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            key: key.into(),
            message: message.into(),
        }
    }
}

/// A scenario shipped inside the binary, runnable by name alone.
pub struct BundledScenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

/// The scenarios built into the binary. `list-scenarios` prints this table;
/// `run`, `sweep` and `validate` accept any `name` here in place of a path.
pub const BUNDLED: &[BundledScenario] = &[
    BundledScenario {
        name: "paper_sec7",
        summary: "six voice stations at increasing distance, 96 kbps each, \
                  channel-aware deficit scheduling",
        text: include_str!("../scenarios/paper_sec7.scn"),
    },
    BundledScenario {
        name: "rr_fig6",
        summary: "plain round robin over one 100-byte flow and four 50-byte \
                  flows, all saturated",
        text: include_str!("../scenarios/rr_fig6.scn"),
    },
    BundledScenario {
        name: "drr_trace",
        summary: "single deficit queue, quantum 500, three 200-byte packets \
                  — a minimal deficit-counter walkthrough",
        text: include_str!("../scenarios/drr_trace.scn"),
    },
    BundledScenario {
        name: "overload_fairness",
        summary: "six polled flows plus two best-effort flows offered more \
                  than the uplink carries; sim.overload_factor scales the \
                  pressure",
        text: include_str!("../scenarios/overload_fairness.scn"),
    },
];

/// Looks up a bundled scenario by name, with or without the `.scn` suffix.
pub fn bundled(name: &str) -> Option<&'static BundledScenario> {
    let stem = name.strip_suffix(".scn").unwrap_or(name);
    BUNDLED.iter().find(|b| b.name == stem)
}

/// Resolves a scenario argument: an existing file wins, otherwise a bundled
/// name is accepted. Returns a display label and the scenario text.
pub fn resolve_source(arg: &str) -> Result<(String, String), ScenarioError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        return Ok((arg.to_string(), text));
    }
    if let Some(b) = bundled(arg) {
        return Ok((b.name.to_string(), b.text.to_string()));
    }
    Err(ScenarioError::Unknown {
        name: arg.to_string(),
        known: BUNDLED
            .iter()
            .map(|b| b.name)
            .collect::<Vec<_>>()
            .join(", "),
    })
}

/// Splits a `key=value` override argument.
pub fn split_override(raw: &str) -> Result<(String, String), ScenarioError> {
    match raw.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ScenarioError::invalid(
            raw,
            "overrides take the form key.path=value",
        )),
    }
}

/// Sets one dotted-path key in a parsed document, creating intermediate
/// tables as needed. The value is parsed as a TOML literal when possible
/// (`2.0` → float, `240` → integer) and kept as a string otherwise, so
/// `scheduler.discipline=rr` needs no quoting.
pub fn apply_override(doc: &mut toml::Value, key: &str, raw: &str) -> Result<(), ScenarioError> {
    let segments: Vec<&str> = key.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ScenarioError::invalid(key, "empty path segment"));
    }
    let mut node = doc;
    let mut walked = String::new();
    for seg in &segments[..segments.len() - 1] {
        let table = node.as_table_mut().ok_or_else(|| {
            ScenarioError::invalid(key, format!("{walked} is not a table"))
        })?;
        node = table
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        if !walked.is_empty() {
            walked.push('.');
        }
        walked.push_str(seg);
    }
    let last = segments[segments.len() - 1];
    let table = node
        .as_table_mut()
        .ok_or_else(|| ScenarioError::invalid(key, format!("{walked} is not a table")))?;
    table.insert(last.to_string(), parse_literal(raw));
    Ok(())
}

fn parse_literal(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Parses scenario text, applies overrides in order, and returns the fully
/// validated configuration.
pub fn parse_scenario(
    text: &str,
    overrides: &[(String, String)],
) -> Result<SimConfig, ScenarioError> {
    let mut value: toml::Value = toml::from_str(text)?;
    for (key, raw) in overrides {
        apply_override(&mut value, key, raw)?;
    }
    let doc: ScenarioDoc = value.try_into()?;
    let config = doc.into_config()?;
    config.validate()?;
    Ok(config)
}

/// Resolves `arg` (path or bundled name), parses it with `overrides`, and
/// returns the display label alongside the configuration.
pub fn load(arg: &str, overrides: &[(String, String)]) -> Result<(String, SimConfig), ScenarioError> {
    let (label, text) = resolve_source(arg)?;
    Ok((label, parse_scenario(&text, overrides)?))
}

/// Renders a configuration back into scenario text. Loading the result
/// reproduces the configuration exactly as long as its stations and flows
/// are already in lexicographic name order — the order every load produces.
pub fn write_scenario(config: &SimConfig) -> Result<String, ScenarioError> {
    let doc = ScenarioDoc::from_config(config)?;
    Ok(toml::to_string_pretty(&doc)?)
}

// --- document schema -------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    frame: FrameSection,
    sim: SimSection,
    #[serde(default)]
    channel: ChannelSection,
    #[serde(default)]
    scheduler: SchedulerSection,
    #[serde(default)]
    profiles: Vec<ProfileSection>,
    #[serde(default)]
    stations: BTreeMap<String, StationSection>,
    #[serde(default)]
    flows: BTreeMap<String, FlowSection>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameSection {
    duration_ms: f64,
    symbols_per_frame: u32,
    mtu_bytes: u32,
    data_subcarriers: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    duration_s: f64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_overload_factor")]
    overload_factor: f64,
}

fn default_seed() -> u64 {
    1
}

fn default_overload_factor() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ChannelSection {
    c0_db: f64,
    ref_distance_m: f64,
    pathloss_exponent: f64,
    noise_sigma_db: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let p = ChannelParams::default();
        ChannelSection {
            c0_db: p.c0_db,
            ref_distance_m: p.ref_distance_m,
            pathloss_exponent: p.pathloss_exponent,
            noise_sigma_db: p.noise_sigma_db,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SchedulerSection {
    discipline: String,
    drr_mode: String,
    priority_mode: String,
    low_class_policy: String,
    weight_formula: String,
    cqich_period_frames: u64,
}

impl Default for SchedulerSection {
    fn default() -> Self {
        SchedulerSection {
            discipline: "mdrr".into(),
            drr_mode: "classic".into(),
            priority_mode: "strict".into(),
            low_class_policy: "round-robin".into(),
            weight_formula: "cinr".into(),
            cqich_period_frames: 1,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSection {
    name: String,
    modulation_bits: u32,
    coding_rate: String,
    entry_db: f64,
    exit_db: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StationSection {
    distance_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowSection {
    station: String,
    class: String,
    max_sustained_kbps: f64,
    min_reserved_kbps: f64,
    #[serde(default = "default_max_latency_ms")]
    max_latency_ms: f64,
    #[serde(default = "default_queue_capacity")]
    queue_capacity: usize,
    #[serde(default = "default_wrr_weight")]
    wrr_weight: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quantum_bytes: Option<u64>,
    traffic: TrafficSection,
}

fn default_max_latency_ms() -> f64 {
    30.0
}

fn default_queue_capacity() -> usize {
    100
}

fn default_wrr_weight() -> u32 {
    1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficSection {
    kind: String,
    rate_kbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    packet_bytes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_bytes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_bytes: Option<u32>,
    #[serde(default)]
    start_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stop_s: Option<f64>,
}

// --- unit conversions ------------------------------------------------------

fn finite_nonneg(key: &str, value: f64) -> Result<f64, ScenarioError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ScenarioError::invalid(
            key,
            "must be a finite, nonnegative number",
        ))
    }
}

fn secs_to_ticks(key: &str, secs: f64) -> Result<Tick, ScenarioError> {
    Ok((finite_nonneg(key, secs)? * TICKS_PER_SEC as f64).round() as Tick)
}

fn ms_to_ticks(key: &str, ms: f64) -> Result<Tick, ScenarioError> {
    Ok((finite_nonneg(key, ms)? * TICKS_PER_MS as f64).round() as Tick)
}

fn kbps_to_bps(key: &str, kbps: f64) -> Result<u64, ScenarioError> {
    Ok((finite_nonneg(key, kbps)? * 1000.0).round() as u64)
}

fn ticks_to_secs_f(ticks: Tick) -> f64 {
    ticks as f64 / TICKS_PER_SEC as f64
}

fn ticks_to_ms_f(ticks: Tick) -> f64 {
    ticks as f64 / TICKS_PER_MS as f64
}

fn bps_to_kbps_f(bps: u64) -> f64 {
    bps as f64 / 1000.0
}

// --- enum spellings --------------------------------------------------------

fn parse_variant<T: Copy>(
    key: &str,
    value: &str,
    table: &[(&str, T)],
) -> Result<T, ScenarioError> {
    let lower = value.to_ascii_lowercase();
    table
        .iter()
        .find(|(name, _)| *name == lower)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let expected: Vec<&str> = table.iter().map(|(name, _)| *name).collect();
            ScenarioError::invalid(
                key,
                format!("unknown value {value:?}; expected one of: {}", expected.join(", ")),
            )
        })
}

const DISCIPLINES: &[(&str, Discipline)] = &[
    ("rr", Discipline::Rr),
    ("wrr", Discipline::Wrr),
    ("drr", Discipline::Drr),
    ("mdrr", Discipline::Mdrr),
];

const DRR_MODES: &[(&str, DrrMode)] =
    &[("classic", DrrMode::Classic), ("overdraw", DrrMode::Overdraw)];

const PRIORITY_MODES: &[(&str, PriorityMode)] = &[
    ("strict", PriorityMode::Strict),
    ("alternate", PriorityMode::Alternate),
];

const LOW_CLASS_POLICIES: &[(&str, LowClassPolicy)] = &[
    ("round-robin", LowClassPolicy::RoundRobin),
    ("mdrr", LowClassPolicy::Mdrr),
];

const WEIGHT_FORMULAS: &[(&str, WeightFormula)] =
    &[("basic", WeightFormula::Basic), ("cinr", WeightFormula::Cinr)];

const CLASSES: &[(&str, ServiceClass)] = &[
    ("ugs", ServiceClass::Ugs),
    ("ertps", ServiceClass::ErtPs),
    ("rtps", ServiceClass::RtPs),
    ("nrtps", ServiceClass::NrtPs),
    ("be", ServiceClass::Be),
];

fn variant_name<T: Copy + PartialEq>(table: &[(&'static str, T)], value: T) -> &'static str {
    table
        .iter()
        .find(|(_, v)| *v == value)
        .map(|(name, _)| *name)
        .expect("every variant has a spelling")
}

/// Canonical scenario-file spelling of a scheduling discipline.
pub fn discipline_name(value: Discipline) -> &'static str {
    variant_name(DISCIPLINES, value)
}

/// Canonical scenario-file spelling of a deficit accounting mode.
pub fn drr_mode_name(value: DrrMode) -> &'static str {
    variant_name(DRR_MODES, value)
}

/// Canonical scenario-file spelling of a priority handling mode.
pub fn priority_mode_name(value: PriorityMode) -> &'static str {
    variant_name(PRIORITY_MODES, value)
}

/// Canonical scenario-file spelling of a low-tier service policy.
pub fn low_class_policy_name(value: LowClassPolicy) -> &'static str {
    variant_name(LOW_CLASS_POLICIES, value)
}

/// Canonical scenario-file spelling of a weight formula.
pub fn weight_formula_name(value: WeightFormula) -> &'static str {
    variant_name(WEIGHT_FORMULAS, value)
}

// --- document <-> config ---------------------------------------------------

impl ScenarioDoc {
    fn into_config(self) -> Result<SimConfig, ScenarioError> {
        let frame = FrameConfig {
            frame_ticks: ms_to_ticks("frame.duration_ms", self.frame.duration_ms)?,
            symbols_per_frame: self.frame.symbols_per_frame,
            mtu_bytes: self.frame.mtu_bytes,
            data_subcarriers: self.frame.data_subcarriers,
        };

        let channel = ChannelParams {
            c0_db: self.channel.c0_db,
            ref_distance_m: self.channel.ref_distance_m,
            pathloss_exponent: self.channel.pathloss_exponent,
            noise_sigma_db: self.channel.noise_sigma_db,
        };

        let scheduler = SchedulerConfig {
            discipline: parse_variant("scheduler.discipline", &self.scheduler.discipline, DISCIPLINES)?,
            drr_mode: parse_variant("scheduler.drr_mode", &self.scheduler.drr_mode, DRR_MODES)?,
            priority_mode: parse_variant(
                "scheduler.priority_mode",
                &self.scheduler.priority_mode,
                PRIORITY_MODES,
            )?,
            low_class_policy: parse_variant(
                "scheduler.low_class_policy",
                &self.scheduler.low_class_policy,
                LOW_CLASS_POLICIES,
            )?,
            weight_formula: parse_variant(
                "scheduler.weight_formula",
                &self.scheduler.weight_formula,
                WEIGHT_FORMULAS,
            )?,
            cqich_period_frames: self.scheduler.cqich_period_frames,
        };

        let profiles = self
            .profiles
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let coding_rate: CodingRate = p.coding_rate.parse().map_err(|e| {
                    ScenarioError::invalid(format!("profiles[{i}].coding_rate"), format!("{e}"))
                })?;
                Ok(BurstProfile {
                    name: p.name,
                    modulation_bits: p.modulation_bits,
                    coding_rate,
                    entry_db: p.entry_db,
                    exit_db: p.exit_db,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        let stations: Vec<StationConfig> = self
            .stations
            .iter()
            .map(|(name, s)| StationConfig {
                name: name.clone(),
                distance_m: s.distance_m,
            })
            .collect();
        let station_index: BTreeMap<&str, usize> = stations
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.as_str(), i))
            .collect();

        let mut flows = Vec::with_capacity(self.flows.len());
        for (name, f) in &self.flows {
            let key = |suffix: &str| format!("flows.{name}.{suffix}");
            let station = *station_index.get(f.station.as_str()).ok_or_else(|| {
                ScenarioError::invalid(key("station"), format!("unknown station {:?}", f.station))
            })?;
            let class = parse_variant(&key("class"), &f.class, CLASSES)?;
            let rate_bps = kbps_to_bps(&key("traffic.rate_kbps"), f.traffic.rate_kbps)?;
            let pattern = match f.traffic.kind.as_str() {
                "cbr" => {
                    if f.traffic.min_bytes.is_some() || f.traffic.max_bytes.is_some() {
                        return Err(ScenarioError::invalid(
                            key("traffic.min_bytes"),
                            "only used when kind = \"variable-cbr\"",
                        ));
                    }
                    let packet_bytes = f.traffic.packet_bytes.ok_or_else(|| {
                        ScenarioError::invalid(
                            key("traffic.packet_bytes"),
                            "required when kind = \"cbr\"",
                        )
                    })?;
                    TrafficPattern::Cbr {
                        rate_bps,
                        packet_bytes,
                    }
                }
                "variable-cbr" => {
                    if f.traffic.packet_bytes.is_some() {
                        return Err(ScenarioError::invalid(
                            key("traffic.packet_bytes"),
                            "only used when kind = \"cbr\"",
                        ));
                    }
                    let min_bytes = f.traffic.min_bytes.ok_or_else(|| {
                        ScenarioError::invalid(
                            key("traffic.min_bytes"),
                            "required when kind = \"variable-cbr\"",
                        )
                    })?;
                    let max_bytes = f.traffic.max_bytes.ok_or_else(|| {
                        ScenarioError::invalid(
                            key("traffic.max_bytes"),
                            "required when kind = \"variable-cbr\"",
                        )
                    })?;
                    TrafficPattern::VariableCbr {
                        rate_bps,
                        min_bytes,
                        max_bytes,
                    }
                }
                other => {
                    return Err(ScenarioError::invalid(
                        key("traffic.kind"),
                        format!("unknown value {other:?}; expected \"cbr\" or \"variable-cbr\""),
                    ))
                }
            };
            flows.push(FlowConfig {
                name: name.clone(),
                station,
                class,
                max_sustained_bps: kbps_to_bps(&key("max_sustained_kbps"), f.max_sustained_kbps)?,
                min_reserved_bps: kbps_to_bps(&key("min_reserved_kbps"), f.min_reserved_kbps)?,
                max_latency_ticks: ms_to_ticks(&key("max_latency_ms"), f.max_latency_ms)?,
                queue_capacity: f.queue_capacity,
                pattern,
                start: secs_to_ticks(&key("traffic.start_s"), f.traffic.start_s)?,
                stop: f
                    .traffic
                    .stop_s
                    .map(|s| secs_to_ticks(&key("traffic.stop_s"), s))
                    .transpose()?,
                wrr_weight: f.wrr_weight,
                quantum_bytes: f.quantum_bytes,
            });
        }

        Ok(SimConfig {
            duration_ticks: secs_to_ticks("sim.duration_s", self.sim.duration_s)?,
            seed: self.sim.seed,
            rate_scale: (finite_nonneg("sim.overload_factor", self.sim.overload_factor)?
                * RATE_SCALE_ONE as f64)
                .round() as u64,
            frame,
            channel,
            profiles,
            stations,
            flows,
            scheduler,
        })
    }

    fn from_config(config: &SimConfig) -> Result<Self, ScenarioError> {
        let frame = FrameSection {
            duration_ms: ticks_to_ms_f(config.frame.frame_ticks),
            symbols_per_frame: config.frame.symbols_per_frame,
            mtu_bytes: config.frame.mtu_bytes,
            data_subcarriers: config.frame.data_subcarriers,
        };
        let sim = SimSection {
            duration_s: ticks_to_secs_f(config.duration_ticks),
            seed: config.seed,
            overload_factor: config.rate_scale as f64 / RATE_SCALE_ONE as f64,
        };
        let channel = ChannelSection {
            c0_db: config.channel.c0_db,
            ref_distance_m: config.channel.ref_distance_m,
            pathloss_exponent: config.channel.pathloss_exponent,
            noise_sigma_db: config.channel.noise_sigma_db,
        };
        let scheduler = SchedulerSection {
            discipline: variant_name(DISCIPLINES, config.scheduler.discipline).into(),
            drr_mode: variant_name(DRR_MODES, config.scheduler.drr_mode).into(),
            priority_mode: variant_name(PRIORITY_MODES, config.scheduler.priority_mode).into(),
            low_class_policy: variant_name(LOW_CLASS_POLICIES, config.scheduler.low_class_policy)
                .into(),
            weight_formula: variant_name(WEIGHT_FORMULAS, config.scheduler.weight_formula).into(),
            cqich_period_frames: config.scheduler.cqich_period_frames,
        };
        let profiles = config
            .profiles
            .iter()
            .map(|p| ProfileSection {
                name: p.name.clone(),
                modulation_bits: p.modulation_bits,
                coding_rate: p.coding_rate.to_string(),
                entry_db: p.entry_db,
                exit_db: p.exit_db,
            })
            .collect();
        let stations: BTreeMap<String, StationSection> = config
            .stations
            .iter()
            .map(|s| {
                (
                    s.name.clone(),
                    StationSection {
                        distance_m: s.distance_m,
                    },
                )
            })
            .collect();
        let mut flows = BTreeMap::new();
        for f in &config.flows {
            let station = config.stations.get(f.station).ok_or_else(|| {
                ScenarioError::invalid(
                    format!("flows.{}.station", f.name),
                    format!("no station at index {}", f.station),
                )
            })?;
            let traffic = match f.pattern {
                TrafficPattern::Cbr {
                    rate_bps,
                    packet_bytes,
                } => TrafficSection {
                    kind: "cbr".into(),
                    rate_kbps: bps_to_kbps_f(rate_bps),
                    packet_bytes: Some(packet_bytes),
                    min_bytes: None,
                    max_bytes: None,
                    start_s: ticks_to_secs_f(f.start),
                    stop_s: f.stop.map(ticks_to_secs_f),
                },
                TrafficPattern::VariableCbr {
                    rate_bps,
                    min_bytes,
                    max_bytes,
                } => TrafficSection {
                    kind: "variable-cbr".into(),
                    rate_kbps: bps_to_kbps_f(rate_bps),
                    packet_bytes: None,
                    min_bytes: Some(min_bytes),
                    max_bytes: Some(max_bytes),
                    start_s: ticks_to_secs_f(f.start),
                    stop_s: f.stop.map(ticks_to_secs_f),
                },
            };
            flows.insert(
                f.name.clone(),
                FlowSection {
                    station: station.name.clone(),
                    class: variant_name(CLASSES, f.class).into(),
                    max_sustained_kbps: bps_to_kbps_f(f.max_sustained_bps),
                    min_reserved_kbps: bps_to_kbps_f(f.min_reserved_bps),
                    max_latency_ms: ticks_to_ms_f(f.max_latency_ticks),
                    queue_capacity: f.queue_capacity,
                    wrr_weight: f.wrr_weight,
                    quantum_bytes: f.quantum_bytes,
                    traffic,
                },
            );
        }
        Ok(ScenarioDoc {
            frame,
            sim,
            channel,
            scheduler,
            profiles,
            stations,
            flows,
        })
    }
}
