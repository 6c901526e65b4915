//! The four uplink queue disciplines — round robin, weighted round robin,
//! deficit round robin, and modified deficit round robin — as pure
//! scheduling policies over sets of deficit queues.
//!
//! The policies know nothing about simulated time. Each call works against
//! a [`FrameBudget`] of OFDMA symbols and a caller-supplied cost function
//! mapping a packet to its symbol count (which depends on the burst profile
//! of the station behind the queue). When the budget cannot cover the next
//! packet of the queue under service, the visit *suspends*: the round
//! pointer pins to that queue and its accumulated deficit survives, so the
//! next frame resumes exactly where this one stopped instead of handing the
//! front of every frame to the same low-numbered queues.

mod weights;

pub use weights::{mdrr_quantum, mtmr_sps, weight_basic, weight_cinr, WeightError, WeightFormula};

use alloc::vec::Vec;

use crate::flow::{PriorityClass, ServiceFlow};
use crate::frame::FrameBudget;
use crate::packet::{FlowId, Packet};

/// Which policy arbitrates the queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    Rr,
    Wrr,
    Drr,
    Mdrr,
}

/// Serve test used by the deficit-based disciplines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DrrMode {
    /// A packet is sent only while the deficit covers its whole size, so
    /// the counter never goes negative. This is the variant with the
    /// provable fairness bound and the default.
    #[default]
    Classic,
    /// A visit that opens with positive deficit keeps sending until the
    /// counter goes negative *after* a send, overdrawing by at most one
    /// packet; the negative balance carries into the next visit.
    Overdraw,
}

/// How the two priority tiers share a frame under MDRR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PriorityMode {
    /// The high tier is drained completely before the low tier sends
    /// anything; a high arrival reclaims the link after at most one more
    /// low packet.
    #[default]
    Strict,
    /// One high-tier deficit visit alternates with one low-tier visit.
    Alternate,
}

/// Policy for the low-priority (best effort) tier under MDRR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LowClassPolicy {
    /// Plain round robin, one packet per visit (the default).
    #[default]
    RoundRobin,
    /// Deficit rounds with the same quanta machinery as the high tier.
    Mdrr,
}

/// A service flow together with the scheduling state the deficit
/// disciplines keep for it.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficitQueue {
    pub flow: ServiceFlow,
    /// Packets granted per WRR visit. Ignored by the other disciplines.
    pub wrr_weight: u32,
    /// Capacity share in percent; informational except that the engine
    /// derives `quantum_bytes` from it each frame under MDRR.
    pub weight_percent: f64,
    /// Bytes of credit added when a deficit visit opens.
    pub quantum_bytes: u64,
    /// Accumulated credit in bytes. Non-negative in [`DrrMode::Classic`];
    /// may dip one packet below zero in [`DrrMode::Overdraw`]. Reset to
    /// zero whenever the queue runs empty, so an idle flow cannot hoard
    /// credit.
    pub deficit_bytes: i64,
    /// A visit is open from the moment its quantum is added until the
    /// serve loop closes it. It stays open across a budget suspension so
    /// the resumed visit does not collect a second quantum.
    visit_open: bool,
    served_in_visit: u64,
}

impl DeficitQueue {
    pub fn new(flow: ServiceFlow) -> Self {
        DeficitQueue {
            flow,
            wrr_weight: 1,
            weight_percent: 0.0,
            quantum_bytes: 0,
            deficit_bytes: 0,
            visit_open: false,
            served_in_visit: 0,
        }
    }

    pub fn with_quantum(mut self, quantum_bytes: u64) -> Self {
        self.quantum_bytes = quantum_bytes;
        self
    }

    pub fn with_wrr_weight(mut self, weight: u32) -> Self {
        self.wrr_weight = weight;
        self
    }

    pub fn queue_id(&self) -> FlowId {
        self.flow.flow_id
    }

    pub fn class(&self) -> PriorityClass {
        self.flow.class.priority()
    }

    fn close_visit(&mut self) {
        self.visit_open = false;
        self.served_in_visit = 0;
    }
}

/// A queue whose head packet can never clear the serve test in one visit:
/// under [`DrrMode::Classic`] a packet larger than the quantum must wait
/// for the deficit to build up over several rounds. Reported so oversized
/// packets surface as a diagnostic instead of a silent throughput cliff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StallDiagnostic {
    pub flow_id: FlowId,
    pub packet_bytes: u32,
    pub quantum_bytes: u64,
}

/// Everything one frame's scheduling pass produced: the packets granted in
/// service order (each packet names its flow) and any stall diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameService {
    pub served: Vec<Packet>,
    pub stalls: Vec<StallDiagnostic>,
}

impl FrameService {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bytes granted to one flow in this pass.
    pub fn bytes_for(&self, flow_id: FlowId) -> u64 {
        self.served
            .iter()
            .filter(|p| p.flow_id == flow_id)
            .map(|p| p.size_bytes as u64)
            .sum()
    }
}

/// Result of one deficit round: how many packets it served and whether it
/// suspended on the frame budget (leaving the pointer pinned).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStatus {
    pub served: usize,
    pub suspended: bool,
}

/// One deficit round's service list, as returned by the public
/// [`SchedulerState::drr_round`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub served: Vec<Packet>,
    pub suspended: bool,
    pub stalls: Vec<StallDiagnostic>,
}

/// How a single queue visit ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VisitEnd {
    /// Queue was empty with no visit in progress; deficit untouched.
    Skipped,
    /// The serve loop ran to its natural end (deficit spent, queue empty,
    /// or serve test failed); the visit is closed.
    Completed,
    /// The frame budget could not cover the next packet; the visit stays
    /// open and the pointer stays on this queue.
    Suspended,
}

/// Outcome of advancing to and visiting the next backlogged queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Visit {
    /// No queue in the pool has packets.
    Idle,
    Completed { served: usize },
    Suspended { served: usize },
}

/// Which queue pool an operation works on: one priority tier, or the whole
/// set for the tier-blind disciplines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pool {
    High,
    Low,
    All,
}

impl Pool {
    fn of(class: Option<PriorityClass>) -> Pool {
        match class {
            Some(PriorityClass::High) => Pool::High,
            Some(PriorityClass::Low) => Pool::Low,
            None => Pool::All,
        }
    }
}

/// Mutable view over one pool: the member queues, their service order, and
/// the round pointer that persists across frames.
struct PoolView<'a> {
    queues: &'a mut [DeficitQueue],
    members: &'a [usize],
    ptr: &'a mut usize,
}

impl PoolView<'_> {
    fn len(&self) -> usize {
        self.members.len()
    }

    fn any_backlogged(&self) -> bool {
        self.members.iter().any(|&i| !self.queues[i].flow.is_empty())
    }

    /// Whether future rounds could still make progress: some backlogged
    /// member has a positive quantum, so its deficit keeps growing until
    /// the serve test passes.
    fn progress_possible(&self) -> bool {
        self.members
            .iter()
            .any(|&i| !self.queues[i].flow.is_empty() && self.queues[i].quantum_bytes > 0)
    }

    /// Slot of the first backlogged member at or after `from`, cycling
    /// through the pool at most once.
    fn next_backlogged_slot(&self, from: usize) -> Option<usize> {
        let n = self.members.len();
        (0..n)
            .map(|k| (from + k) % n)
            .find(|&slot| !self.queues[self.members[slot]].flow.is_empty())
    }

    /// Round-robin selection: the first backlogged queue at or after the
    /// pointer. Advances the pointer past the returned queue; the caller
    /// dequeues exactly one packet per visit.
    fn rr_select(&mut self) -> Option<usize> {
        let slot = self.next_backlogged_slot(*self.ptr)?;
        *self.ptr = (slot + 1) % self.members.len();
        Some(self.members[slot])
    }

    /// Weighted selection: like [`rr_select`](Self::rr_select) but also
    /// reports how many packets the visit may dequeue.
    fn wrr_select(&mut self) -> Option<(usize, u32)> {
        let qi = self.rr_select()?;
        let weight = self.queues[qi].wrr_weight;
        debug_assert!(weight >= 1, "WRR weights are validated to be >= 1");
        Some((qi, weight))
    }

    /// Serves exactly one packet round-robin, skipping queues that are
    /// empty or whose head does not fit the remaining budget. The pointer
    /// only commits past the queue that was actually served — probing must
    /// not steal anyone's turn, or the service order would drift across
    /// frames. Returns whether anything was sent.
    fn rr_serve_one<F>(&mut self, budget: &mut FrameBudget, cost: &F, out: &mut FrameService) -> bool
    where
        F: Fn(&Packet) -> u64,
    {
        let n = self.members.len();
        for k in 0..n {
            let slot = (*self.ptr + k) % n;
            let qi = self.members[slot];
            let Some(head) = self.queues[qi].flow.head() else {
                continue;
            };
            let c = cost(head);
            if budget.fits(c) {
                budget.consume(c);
                let pkt = self.queues[qi].flow.dequeue().expect("head checked above");
                out.served.push(pkt);
                *self.ptr = (slot + 1) % n;
                return true;
            }
        }
        false
    }

    /// One full deficit round: every member is visited once starting at the
    /// round pointer, backlogged ones collect their quantum and serve while
    /// the mode's test permits. Suspends early (pointer pinned, visit left
    /// open) if the budget cannot cover the packet under service.
    fn drr_round<F>(
        &mut self,
        mode: DrrMode,
        budget: &mut FrameBudget,
        cost: &F,
        out: &mut FrameService,
    ) -> RoundStatus
    where
        F: Fn(&Packet) -> u64,
    {
        let n = self.members.len();
        if n == 0 {
            return RoundStatus { served: 0, suspended: false };
        }
        let before = out.served.len();
        let mut suspended = false;
        for _ in 0..n {
            let slot = *self.ptr;
            let qi = self.members[slot];
            match visit_queue(&mut self.queues[qi], mode, budget, cost, out) {
                VisitEnd::Suspended => {
                    suspended = true;
                    break;
                }
                VisitEnd::Completed | VisitEnd::Skipped => {
                    *self.ptr = (slot + 1) % n;
                }
            }
        }
        RoundStatus { served: out.served.len() - before, suspended }
    }

    /// Advances to the next backlogged queue (or resumes a suspended
    /// visit) and runs a single deficit visit there.
    fn drr_visit_next<F>(
        &mut self,
        mode: DrrMode,
        budget: &mut FrameBudget,
        cost: &F,
        out: &mut FrameService,
    ) -> Visit
    where
        F: Fn(&Packet) -> u64,
    {
        let n = self.members.len();
        if n == 0 {
            return Visit::Idle;
        }
        let mut slot = *self.ptr;
        if !self.queues[self.members[slot]].visit_open {
            match self.next_backlogged_slot(slot) {
                Some(s) => slot = s,
                None => return Visit::Idle,
            }
        }
        *self.ptr = slot;
        let qi = self.members[slot];
        let before = out.served.len();
        match visit_queue(&mut self.queues[qi], mode, budget, cost, out) {
            VisitEnd::Suspended => Visit::Suspended { served: out.served.len() - before },
            VisitEnd::Completed | VisitEnd::Skipped => {
                *self.ptr = (slot + 1) % n;
                Visit::Completed { served: out.served.len() - before }
            }
        }
    }
}

/// Runs one deficit visit on a single queue: add the quantum (unless
/// resuming a suspended visit), serve while the mode's test permits and
/// the budget fits, and reset the deficit if the queue empties.
fn visit_queue<F>(
    q: &mut DeficitQueue,
    mode: DrrMode,
    budget: &mut FrameBudget,
    cost: &F,
    out: &mut FrameService,
) -> VisitEnd
where
    F: Fn(&Packet) -> u64,
{
    if q.flow.is_empty() && !q.visit_open {
        return VisitEnd::Skipped;
    }
    if !q.visit_open {
        q.deficit_bytes += q.quantum_bytes as i64;
        q.visit_open = true;
        q.served_in_visit = 0;
    }
    loop {
        let Some(head) = q.flow.head() else {
            // Served the whole backlog: surrender leftover credit so an
            // idle queue cannot bank it against the others.
            q.deficit_bytes = 0;
            q.close_visit();
            return VisitEnd::Completed;
        };
        let size = head.size_bytes;
        let permitted = match mode {
            DrrMode::Classic => q.deficit_bytes >= size as i64,
            DrrMode::Overdraw => {
                if q.served_in_visit == 0 {
                    q.deficit_bytes > 0
                } else {
                    q.deficit_bytes >= 0
                }
            }
        };
        if !permitted {
            if mode == DrrMode::Classic
                && size as u64 > q.quantum_bytes
                && !out.stalls.iter().any(|s| s.flow_id == q.flow.flow_id)
            {
                out.stalls.push(StallDiagnostic {
                    flow_id: q.flow.flow_id,
                    packet_bytes: size,
                    quantum_bytes: q.quantum_bytes,
                });
            }
            q.close_visit();
            return VisitEnd::Completed;
        }
        let c = cost(head);
        if !budget.fits(c) {
            return VisitEnd::Suspended;
        }
        budget.consume(c);
        let pkt = q.flow.dequeue().expect("head checked above");
        q.deficit_bytes -= size as i64;
        q.served_in_visit += 1;
        out.served.push(pkt);
    }
}

/// The scheduler: its discipline and modes, the queues partitioned into
/// priority tiers, and the round pointers that persist across frames.
///
/// Queues are ordered by ascending flow id within each tier (and across
/// the whole set for the tier-blind disciplines).
#[derive(Debug, Clone)]
pub struct SchedulerState {
    pub discipline: Discipline,
    pub drr_mode: DrrMode,
    pub priority_mode: PriorityMode,
    pub low_class_policy: LowClassPolicy,
    queues: Vec<DeficitQueue>,
    high_members: Vec<usize>,
    low_members: Vec<usize>,
    all_members: Vec<usize>,
    high_ptr: usize,
    low_ptr: usize,
    all_ptr: usize,
}

impl SchedulerState {
    pub fn new(discipline: Discipline, mut queues: Vec<DeficitQueue>) -> Self {
        queues.sort_unstable_by_key(|q| q.queue_id());
        let high_members: Vec<usize> = queues
            .iter()
            .enumerate()
            .filter(|(_, q)| q.class() == PriorityClass::High)
            .map(|(i, _)| i)
            .collect();
        let low_members: Vec<usize> = queues
            .iter()
            .enumerate()
            .filter(|(_, q)| q.class() == PriorityClass::Low)
            .map(|(i, _)| i)
            .collect();
        let all_members: Vec<usize> = (0..queues.len()).collect();
        SchedulerState {
            discipline,
            drr_mode: DrrMode::default(),
            priority_mode: PriorityMode::default(),
            low_class_policy: LowClassPolicy::default(),
            queues,
            high_members,
            low_members,
            all_members,
            high_ptr: 0,
            low_ptr: 0,
            all_ptr: 0,
        }
    }

    pub fn with_drr_mode(mut self, mode: DrrMode) -> Self {
        self.drr_mode = mode;
        self
    }

    pub fn with_priority_mode(mut self, mode: PriorityMode) -> Self {
        self.priority_mode = mode;
        self
    }

    pub fn with_low_class_policy(mut self, policy: LowClassPolicy) -> Self {
        self.low_class_policy = policy;
        self
    }

    pub fn queues(&self) -> &[DeficitQueue] {
        &self.queues
    }

    pub fn queues_mut(&mut self) -> &mut [DeficitQueue] {
        &mut self.queues
    }

    /// Index of a flow's queue, if the flow is scheduled here.
    pub fn queue_index(&self, flow_id: FlowId) -> Option<usize> {
        self.queues.binary_search_by_key(&flow_id, |q| q.queue_id()).ok()
    }

    /// Hands an arriving packet to its flow's queue; returns whether it
    /// was admitted (tail drop otherwise). Panics if no queue carries the
    /// packet's flow id — arrivals for unknown flows are a caller bug.
    pub fn enqueue(&mut self, packet: Packet) -> bool {
        let idx = self
            .queue_index(packet.flow_id)
            .expect("arrival for a flow this scheduler does not carry");
        self.queues[idx].flow.enqueue(packet)
    }

    pub fn total_backlog(&self) -> usize {
        self.queues.iter().map(|q| q.flow.len()).sum()
    }

    fn view(&mut self, pool: Pool) -> PoolView<'_> {
        match pool {
            Pool::High => PoolView {
                queues: &mut self.queues,
                members: &self.high_members,
                ptr: &mut self.high_ptr,
            },
            Pool::Low => PoolView {
                queues: &mut self.queues,
                members: &self.low_members,
                ptr: &mut self.low_ptr,
            },
            Pool::All => PoolView {
                queues: &mut self.queues,
                members: &self.all_members,
                ptr: &mut self.all_ptr,
            },
        }
    }

    /// Round-robin selection over one tier (`None` = the whole set).
    /// Returns the index into [`queues`](Self::queues) of the first
    /// backlogged queue at or after the round pointer and advances the
    /// pointer past it; `None` iff every queue in the pool is empty.
    pub fn rr_select(&mut self, class: Option<PriorityClass>) -> Option<usize> {
        self.view(Pool::of(class)).rr_select()
    }

    /// Weighted round-robin selection: the queue index plus the number of
    /// packets the visit may dequeue (its WRR weight).
    pub fn wrr_select(&mut self, class: Option<PriorityClass>) -> Option<(usize, u32)> {
        self.view(Pool::of(class)).wrr_select()
    }

    /// Runs one deficit round over a pool and returns the packets it
    /// granted in service order.
    pub fn drr_round<F>(
        &mut self,
        class: Option<PriorityClass>,
        budget: &mut FrameBudget,
        cost: F,
    ) -> RoundOutcome
    where
        F: Fn(&Packet) -> u64,
    {
        let mode = self.drr_mode;
        let mut out = FrameService::new();
        let status = self.view(Pool::of(class)).drr_round(mode, budget, &cost, &mut out);
        RoundOutcome {
            served: out.served,
            suspended: status.suspended,
            stalls: out.stalls,
        }
    }

    /// Full MDRR pass for one frame: deficit rounds over the high tier and
    /// round-robin (or deficit, per [`LowClassPolicy`]) over the low tier,
    /// arbitrated by the priority mode.
    pub fn mdrr_schedule<F>(&mut self, budget: &mut FrameBudget, cost: F) -> FrameService
    where
        F: Fn(&Packet) -> u64,
    {
        let mut out = FrameService::new();
        match self.priority_mode {
            PriorityMode::Strict => self.strict_pass(budget, &cost, &mut out),
            PriorityMode::Alternate => self.alternate_pass(budget, &cost, &mut out),
        }
        out
    }

    /// Schedules one frame under whichever discipline this state carries.
    pub fn schedule_frame<F>(&mut self, budget: &mut FrameBudget, cost: F) -> FrameService
    where
        F: Fn(&Packet) -> u64,
    {
        match self.discipline {
            Discipline::Rr => {
                let mut out = FrameService::new();
                let mut pool = self.view(Pool::All);
                while pool.rr_serve_one(budget, &cost, &mut out) {}
                out
            }
            Discipline::Wrr => {
                let mut out = FrameService::new();
                self.wrr_frame(budget, &cost, &mut out);
                out
            }
            Discipline::Drr => {
                let mut out = FrameService::new();
                let mode = self.drr_mode;
                let mut pool = self.view(Pool::All);
                drr_drain(&mut pool, mode, budget, &cost, &mut out);
                out
            }
            Discipline::Mdrr => self.mdrr_schedule(budget, cost),
        }
    }

    fn wrr_frame<F>(&mut self, budget: &mut FrameBudget, cost: &F, out: &mut FrameService)
    where
        F: Fn(&Packet) -> u64,
    {
        let pool = self.view(Pool::All);
        let n = pool.len();
        // Each outer pass runs one weighted visit. Like plain round robin,
        // probing never moves the pointer: a queue whose head cannot fit
        // keeps its turn for the next frame.
        'visits: loop {
            for k in 0..n {
                let slot = (*pool.ptr + k) % n;
                let qi = pool.members[slot];
                let weight = pool.queues[qi].wrr_weight;
                let mut served_here = 0;
                for _ in 0..weight {
                    let Some(head) = pool.queues[qi].flow.head() else {
                        break;
                    };
                    let c = cost(head);
                    if !budget.fits(c) {
                        break;
                    }
                    budget.consume(c);
                    let pkt = pool.queues[qi].flow.dequeue().expect("head checked above");
                    out.served.push(pkt);
                    served_here += 1;
                }
                if served_here > 0 {
                    *pool.ptr = (slot + 1) % n;
                    continue 'visits;
                }
            }
            return;
        }
    }

    fn strict_pass<F>(&mut self, budget: &mut FrameBudget, cost: &F, out: &mut FrameService)
    where
        F: Fn(&Packet) -> u64,
    {
        let mode = self.drr_mode;
        let low_policy = self.low_class_policy;
        loop {
            // The high tier owns the frame while it has anything to send.
            if self.view(Pool::High).any_backlogged() {
                let mut high = self.view(Pool::High);
                let status = high.drr_round(mode, budget, cost, out);
                if status.suspended {
                    return;
                }
                if status.served == 0 && !high.progress_possible() {
                    return;
                }
                continue;
            }
            // High tier idle: the low tier may use the remainder — one
            // packet at a time under round robin, so a high arrival gets
            // the link back after at most the packet in flight.
            let mut low = self.view(Pool::Low);
            if !low.any_backlogged() {
                return;
            }
            match low_policy {
                LowClassPolicy::RoundRobin => {
                    if !low.rr_serve_one(budget, cost, out) {
                        return;
                    }
                }
                LowClassPolicy::Mdrr => {
                    let status = low.drr_round(mode, budget, cost, out);
                    if status.suspended {
                        return;
                    }
                    if status.served == 0 && !low.progress_possible() {
                        return;
                    }
                }
            }
        }
    }

    fn alternate_pass<F>(&mut self, budget: &mut FrameBudget, cost: &F, out: &mut FrameService)
    where
        F: Fn(&Packet) -> u64,
    {
        let mode = self.drr_mode;
        let low_policy = self.low_class_policy;
        loop {
            let mut progressed = 0;
            // Deficit accumulation (a visit that closed without serving
            // but grew the queue's credit) justifies another pass even
            // when nothing was sent this time around.
            let mut accumulating = false;

            let mut high = self.view(Pool::High);
            match high.drr_visit_next(mode, budget, cost, out) {
                Visit::Idle => {}
                Visit::Suspended { served } => progressed += served,
                Visit::Completed { served } => {
                    progressed += served;
                    if served == 0 && high.progress_possible() {
                        accumulating = true;
                    }
                }
            }

            let mut low = self.view(Pool::Low);
            match low_policy {
                LowClassPolicy::RoundRobin => {
                    if low.any_backlogged() && low.rr_serve_one(budget, cost, out) {
                        progressed += 1;
                    }
                }
                LowClassPolicy::Mdrr => match low.drr_visit_next(mode, budget, cost, out) {
                    Visit::Idle => {}
                    Visit::Suspended { served } => progressed += served,
                    Visit::Completed { served } => {
                        progressed += served;
                        if served == 0 && low.progress_possible() {
                            accumulating = true;
                        }
                    }
                },
            }

            if progressed == 0 && !accumulating {
                return;
            }
        }
    }
}

/// Deficit rounds until the pool drains, the budget suspends a visit, or
/// no further progress is possible.
fn drr_drain<F>(
    pool: &mut PoolView<'_>,
    mode: DrrMode,
    budget: &mut FrameBudget,
    cost: &F,
    out: &mut FrameService,
) where
    F: Fn(&Packet) -> u64,
{
    loop {
        if !pool.any_backlogged() {
            return;
        }
        let status = pool.drr_round(mode, budget, cost, out);
        if status.suspended {
            return;
        }
        if status.served == 0 && !pool.progress_possible() {
            return;
        }
    }
}
