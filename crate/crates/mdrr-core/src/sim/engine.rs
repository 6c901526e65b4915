//! The discrete-event engine: frame starts, channel reports, and packet
//! arrivals on one time-ordered heap, driven to the end of the run.
//!
//! Determinism is load-bearing. Events at the same tick process in a fixed
//! rank order (frame boundary, then reports, then arrivals), ties within a
//! rank break on insertion order, and every random draw comes from a
//! per-flow or per-station ChaCha stream derived from the one seed — so the
//! same configuration always yields the same [`SimResult`], bit for bit.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amc::{cinr_from_distance, cqich_report, path_cinr_db, ProfileSet};
use crate::disciplines::{
    mdrr_quantum, mtmr_sps, weight_basic, weight_cinr, DeficitQueue, Discipline, SchedulerState,
    WeightFormula,
};
use crate::flow::{QosParams, ServiceClass, ServiceFlow};
use crate::frame::{bytes_to_symbols, FrameBudget};
use crate::packet::{FlowId, Packet, StationId};
use crate::sim::config::{ConfigErrors, SimConfig};
use crate::sim::traffic::{generate_traffic, TrafficSource};
use crate::station::MobileStation;
use crate::time::Tick;

/// Offset separating station shadowing streams from flow traffic streams in
/// the per-seed ChaCha stream space.
const NOISE_STREAM_BASE: u64 = 1 << 32;

/// What can happen in the simulated network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// A frame boundary: the scheduler builds the uplink grant for the
    /// frame starting now.
    FrameStart { frame: u64 },
    /// A station's channel-quality report slot.
    CqichReport { frame: u64, station: StationId },
    /// A packet enters its flow's queue.
    PacketArrival { packet: Packet },
    /// End of the run; nothing after this tick is simulated.
    SimEnd,
}

impl EventKind {
    /// Tie-break rank for events sharing a tick. The frame is scheduled
    /// first, so a report or arrival landing exactly on the boundary only
    /// affects the *next* frame.
    fn rank(&self) -> u8 {
        match self {
            EventKind::FrameStart { .. } => 0,
            EventKind::CqichReport { .. } => 1,
            EventKind::PacketArrival { .. } => 2,
            EventKind::SimEnd => 3,
        }
    }
}

/// A scheduled event, ordered by `(time, rank, insertion sequence)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub time: Tick,
    seq: u64,
    pub kind: EventKind,
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.kind.rank(), self.seq).cmp(&(other.time, other.kind.rank(), other.seq))
    }
}

/// Everything recorded about one flow over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub flow_id: FlowId,
    pub name: String,
    pub station_id: StationId,
    pub class: ServiceClass,
    /// Packets the source offered (admitted or not).
    pub generated: u64,
    /// Packets tail-dropped at the full queue.
    pub dropped: u64,
    /// Packets still queued when the run ended.
    pub queued_at_end: u64,
    pub bytes_delivered: u64,
    /// Delivered packets in service order, each stamped with its dequeue
    /// time (the end of the frame that granted it).
    pub delivered: Vec<Packet>,
    /// Bytes granted per frame.
    pub per_frame_bytes: Vec<u64>,
    /// Queue length right after each frame's grant.
    pub per_frame_queue: Vec<u32>,
}

/// Channel and weight trace, one row per flow per frame. `deficit_bytes`
/// is the credit left *after* the frame's service.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub frame: u64,
    pub flow_id: FlowId,
    pub station_id: StationId,
    pub cinr_db: f64,
    pub reported_cinr_db: f64,
    pub profile_index: usize,
    pub weight_percent: f64,
    pub quantum_bytes: u64,
    pub deficit_bytes: i64,
}

/// A deficit stall observed in some frame: a head packet larger than its
/// queue's quantum, which the classic serve test can never pass in one
/// visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StallRecord {
    pub frame: u64,
    pub flow_id: FlowId,
    pub packet_bytes: u32,
    pub quantum_bytes: u64,
}

/// Where a station ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct StationResult {
    pub station_id: StationId,
    pub name: String,
    pub distance_m: f64,
    pub final_cinr_db: f64,
    pub final_profile: usize,
}

/// The complete output of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub duration_ticks: Tick,
    pub frame_ticks: Tick,
    pub symbols_per_frame: u32,
    /// Symbols granted in each frame; never exceeds `symbols_per_frame`.
    pub symbols_used: Vec<u64>,
    pub flows: Vec<FlowResult>,
    pub stations: Vec<StationResult>,
    pub trace: Vec<TraceRecord>,
    pub stalls: Vec<StallRecord>,
}

impl SimResult {
    pub fn frames(&self) -> u64 {
        self.symbols_used.len() as u64
    }

    pub fn flow(&self, name: &str) -> Option<&FlowResult> {
        self.flows.iter().find(|f| f.name == name)
    }
}

/// Runs the configuration to completion. Validates first; a clean
/// configuration cannot fail mid-run.
pub fn run(config: &SimConfig) -> Result<SimResult, ConfigErrors> {
    config.validate()?;
    let ladder = ProfileSet::new(config.profiles.clone()).expect("ladder was validated");
    let frame = config.frame;
    let nframes = frame.frames_in(config.duration_ticks);
    let subcarriers = frame.data_subcarriers;
    let capacity_sps = frame.total_capacity_sps();
    let is_mdrr = config.scheduler.discipline == Discipline::Mdrr;

    // Stations start on the most robust profile with their pathloss CINR on
    // record, as if they had just entered the network.
    let mut stations: Vec<MobileStation> = config
        .stations
        .iter()
        .enumerate()
        .map(|(id, s)| {
            MobileStation::new(
                id as StationId,
                s.name.clone(),
                s.distance_m,
                path_cinr_db(s.distance_m, &config.channel),
            )
        })
        .collect();
    let mut noise_rngs: Vec<ChaCha8Rng> = (0..stations.len())
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(NOISE_STREAM_BASE + id as u64);
            rng
        })
        .collect();

    // One queue per flow, in declaration order; flow ids are dense indices.
    let queues: Vec<DeficitQueue> = config
        .flows
        .iter()
        .enumerate()
        .map(|(id, f)| {
            let qos = QosParams {
                max_sustained_bps: f.max_sustained_bps,
                min_reserved_bps: f.min_reserved_bps,
                max_latency_ticks: f.max_latency_ticks,
            };
            let flow =
                ServiceFlow::new(id as FlowId, f.station as StationId, f.class, qos, f.queue_capacity);
            stations[f.station].flows.push(id as FlowId);
            DeficitQueue::new(flow)
                .with_quantum(f.quantum_bytes.unwrap_or(frame.mtu_bytes as u64))
                .with_wrr_weight(f.wrr_weight)
        })
        .collect();
    let mut scheduler = SchedulerState::new(config.scheduler.discipline, queues)
        .with_drr_mode(config.scheduler.drr_mode)
        .with_priority_mode(config.scheduler.priority_mode)
        .with_low_class_policy(config.scheduler.low_class_policy);

    // Pre-build the whole event list: frame boundaries, report slots, and
    // every arrival, then heapify once.
    let mut events: Vec<Event> = Vec::new();
    let mut seq = 0u64;
    let mut next_seq = || {
        seq += 1;
        seq
    };
    for f in 0..nframes {
        events.push(Event {
            time: f * frame.frame_ticks,
            seq: next_seq(),
            kind: EventKind::FrameStart { frame: f },
        });
    }
    let period = config.scheduler.cqich_period_frames;
    for f in (0..nframes).step_by(period as usize) {
        for station in 0..stations.len() as StationId {
            events.push(Event {
                time: f * frame.frame_ticks,
                seq: next_seq(),
                kind: EventKind::CqichReport { frame: f, station },
            });
        }
    }
    let mut next_packet_id = 0u64;
    for (id, f) in config.flows.iter().enumerate() {
        let source = TrafficSource {
            flow_id: id as FlowId,
            pattern: f.pattern,
            start: f.start,
            stop: f.stop,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(id as u64);
        for arrival in generate_traffic(&source, 0..config.duration_ticks, config.rate_scale, &mut rng)
        {
            let packet = Packet::new(next_packet_id, id as FlowId, arrival.size_bytes, arrival.time);
            next_packet_id += 1;
            events.push(Event {
                time: arrival.time,
                seq: next_seq(),
                kind: EventKind::PacketArrival { packet },
            });
        }
    }
    events.push(Event { time: config.duration_ticks, seq: next_seq(), kind: EventKind::SimEnd });
    let mut heap: BinaryHeap<Reverse<Event>> = events.into_iter().map(Reverse).collect();

    // Per-flow accounting, indexed by flow id.
    let nflows = config.flows.len();
    let mut generated = vec![0u64; nflows];
    let mut bytes_delivered = vec![0u64; nflows];
    let mut delivered: Vec<Vec<Packet>> = vec![Vec::new(); nflows];
    let mut per_frame_bytes: Vec<Vec<u64>> = vec![vec![0; nframes as usize]; nflows];
    let mut per_frame_queue: Vec<Vec<u32>> = vec![vec![0; nframes as usize]; nflows];
    let mut symbols_used = vec![0u64; nframes as usize];
    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut stalls: Vec<StallRecord> = Vec::new();

    while let Some(Reverse(event)) = heap.pop() {
        match event.kind {
            EventKind::SimEnd => break,
            EventKind::PacketArrival { packet } => {
                generated[packet.flow_id as usize] += 1;
                scheduler.enqueue(packet);
            }
            EventKind::CqichReport { frame: f, station } => {
                let st = &mut stations[station as usize];
                if let Some(report) = cqich_report(&st.channel, f, period) {
                    st.channel.apply_report(report, &ladder);
                }
            }
            EventKind::FrameStart { frame: f } => {
                // The CINR each station experiences during this frame. The
                // scheduler only ever sees the *reported* value.
                for (sid, st) in stations.iter_mut().enumerate() {
                    st.channel.cinr_db =
                        cinr_from_distance(st.distance_m, &config.channel, &mut noise_rngs[sid]);
                }
                // Under MDRR, weights and quanta follow the channel reports
                // frame by frame.
                if is_mdrr {
                    for q in scheduler.queues_mut() {
                        let st = &stations[q.flow.station_id as usize];
                        let profile = ladder.get(st.channel.profile_index);
                        let demand = mtmr_sps(q.flow.qos.min_reserved_bps, profile, subcarriers);
                        let weight = match config.scheduler.weight_formula {
                            WeightFormula::Basic => weight_basic(demand, capacity_sps),
                            WeightFormula::Cinr => {
                                weight_cinr(demand, capacity_sps, st.channel.reported_cinr_db)
                            }
                        }
                        .expect("validation bounds the reserved rate under the robust profile");
                        q.weight_percent = weight;
                        q.quantum_bytes = mdrr_quantum(weight, frame.mtu_bytes);
                    }
                }
                // A packet's symbol cost depends on its station's profile,
                // frozen for the duration of the frame.
                let profile_of: Vec<usize> = scheduler
                    .queues()
                    .iter()
                    .map(|q| stations[q.flow.station_id as usize].channel.profile_index)
                    .collect();
                let mut budget = FrameBudget::new(frame.symbols_per_frame);
                let service = scheduler.schedule_frame(&mut budget, |p: &Packet| {
                    bytes_to_symbols(p.size_bytes, ladder.get(profile_of[p.flow_id as usize]), subcarriers)
                });
                // Granted packets transmit within the frame; they count as
                // delivered at its end.
                let frame_end = (f + 1) * frame.frame_ticks;
                for mut p in service.served {
                    p.dequeued_at = Some(frame_end);
                    let id = p.flow_id as usize;
                    bytes_delivered[id] += p.size_bytes as u64;
                    per_frame_bytes[id][f as usize] += p.size_bytes as u64;
                    delivered[id].push(p);
                }
                for s in service.stalls {
                    stalls.push(StallRecord {
                        frame: f,
                        flow_id: s.flow_id,
                        packet_bytes: s.packet_bytes,
                        quantum_bytes: s.quantum_bytes,
                    });
                }
                symbols_used[f as usize] = budget.used();
                for q in scheduler.queues() {
                    let id = q.queue_id();
                    per_frame_queue[id as usize][f as usize] = q.flow.len() as u32;
                    let st = &stations[q.flow.station_id as usize];
                    trace.push(TraceRecord {
                        frame: f,
                        flow_id: id,
                        station_id: q.flow.station_id,
                        cinr_db: st.channel.cinr_db,
                        reported_cinr_db: st.channel.reported_cinr_db,
                        profile_index: st.channel.profile_index,
                        weight_percent: q.weight_percent,
                        quantum_bytes: q.quantum_bytes,
                        deficit_bytes: q.deficit_bytes,
                    });
                }
            }
        }
    }

    let flows = config
        .flows
        .iter()
        .enumerate()
        .map(|(id, f)| {
            let index = scheduler.queue_index(id as FlowId).expect("flow ids are dense");
            let q = &scheduler.queues()[index];
            FlowResult {
                flow_id: id as FlowId,
                name: f.name.clone(),
                station_id: f.station as StationId,
                class: f.class,
                generated: generated[id],
                dropped: q.flow.dropped,
                queued_at_end: q.flow.len() as u64,
                bytes_delivered: bytes_delivered[id],
                delivered: core::mem::take(&mut delivered[id]),
                per_frame_bytes: core::mem::take(&mut per_frame_bytes[id]),
                per_frame_queue: core::mem::take(&mut per_frame_queue[id]),
            }
        })
        .collect();
    let stations = stations
        .iter()
        .map(|st| StationResult {
            station_id: st.station_id,
            name: st.name.clone(),
            distance_m: st.distance_m,
            final_cinr_db: st.channel.cinr_db,
            final_profile: st.channel.profile_index,
        })
        .collect();

    Ok(SimResult {
        duration_ticks: config.duration_ticks,
        frame_ticks: frame.frame_ticks,
        symbols_per_frame: frame.symbols_per_frame,
        symbols_used,
        flows,
        stations,
        trace,
        stalls,
    })
}
