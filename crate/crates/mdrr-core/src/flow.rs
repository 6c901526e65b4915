//! Service flows: the uplink queues the scheduler arbitrates between.

use alloc::collections::VecDeque;

use crate::packet::{FlowId, Packet, StationId};

/// Scheduling service a flow is provisioned under.
///
/// The scheduler implemented here arbitrates polling-service and
/// best-effort traffic; `Ugs` and `ErtPs` are carried so configurations can
/// name them, but validation rejects flows that use them because grant
/// periods for unsolicited services are outside this model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServiceClass {
    Ugs,
    ErtPs,
    RtPs,
    NrtPs,
    Be,
}

impl ServiceClass {
    pub fn name(&self) -> &'static str {
        match self {
            ServiceClass::Ugs => "UGS",
            ServiceClass::ErtPs => "ertPS",
            ServiceClass::RtPs => "rtPS",
            ServiceClass::NrtPs => "nrtPS",
            ServiceClass::Be => "BE",
        }
    }

    /// Whether the frame scheduler knows how to serve this class.
    pub fn is_schedulable(&self) -> bool {
        matches!(
            self,
            ServiceClass::RtPs | ServiceClass::NrtPs | ServiceClass::Be
        )
    }

    /// Priority tier the class maps to: polling services ride the
    /// high-priority tier, best effort the low one.
    pub fn priority(&self) -> PriorityClass {
        match self {
            ServiceClass::Be => PriorityClass::Low,
            _ => PriorityClass::High,
        }
    }
}

/// Two-tier priority split used by the class-aware disciplines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorityClass {
    High,
    Low,
}

/// Provisioned QoS parameters of a flow. Rates are in bits per second,
/// latency in ticks; the scheduler derives its per-flow weights from
/// `min_reserved_bps`, while `max_sustained_bps` and `max_latency_ticks`
/// describe the contract the offered load is expected to honour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosParams {
    pub max_sustained_bps: u64,
    pub min_reserved_bps: u64,
    pub max_latency_ticks: u64,
}

/// One uplink queue: a FIFO of packets with a fixed capacity and tail-drop
/// admission, plus the identity and QoS contract of the flow feeding it.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceFlow {
    pub flow_id: FlowId,
    pub station_id: StationId,
    pub class: ServiceClass,
    pub qos: QosParams,
    capacity: usize,
    queue: VecDeque<Packet>,
    pub dropped: u64,
}

impl ServiceFlow {
    pub fn new(
        flow_id: FlowId,
        station_id: StationId,
        class: ServiceClass,
        qos: QosParams,
        capacity: usize,
    ) -> Self {
        ServiceFlow {
            flow_id,
            station_id,
            class,
            qos,
            capacity,
            queue: VecDeque::new(),
            dropped: 0,
        }
    }

    /// Appends a packet, or tail-drops it (counting the drop) when the
    /// queue is at capacity. Returns whether the packet was admitted.
    pub fn enqueue(&mut self, packet: Packet) -> bool {
        if self.queue.len() >= self.capacity {
            self.dropped += 1;
            false
        } else {
            self.queue.push_back(packet);
            true
        }
    }

    pub fn head(&self) -> Option<&Packet> {
        self.queue.front()
    }

    pub fn dequeue(&mut self) -> Option<Packet> {
        self.queue.pop_front()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn backlog_bytes(&self) -> u64 {
        self.queue.iter().map(|p| p.size_bytes as u64).sum()
    }
}
