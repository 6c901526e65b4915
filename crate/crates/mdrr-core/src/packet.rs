//! Packets and the identifiers that tie them to flows and stations.

use crate::time::Tick;

/// Index of a service flow within a simulation. Flows are numbered densely
/// from zero in configuration order, so the id doubles as a vector index.
pub type FlowId = u32;

/// Index of a mobile station within a simulation, numbered like [`FlowId`].
pub type StationId = u32;

/// A MAC SDU travelling through one uplink queue.
///
/// `created_at` is the arrival instant at the station queue; `dequeued_at`
/// is set by the engine when the packet is granted and transmitted (the end
/// of the frame that served it) and stays `None` while the packet waits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub id: u64,
    pub flow_id: FlowId,
    pub size_bytes: u32,
    pub created_at: Tick,
    pub dequeued_at: Option<Tick>,
}

impl Packet {
    pub fn new(id: u64, flow_id: FlowId, size_bytes: u32, created_at: Tick) -> Self {
        Packet {
            id,
            flow_id,
            size_bytes,
            created_at,
            dequeued_at: None,
        }
    }

    /// Queueing delay in ticks, once the packet has been served.
    pub fn delay(&self) -> Option<Tick> {
        self.dequeued_at.map(|t| t - self.created_at)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_is_none_until_served() {
        let mut p = Packet::new(0, 0, 1500, 1_000);
        assert_eq!(p.delay(), None);
        p.dequeued_at = Some(501_000);
        assert_eq!(p.delay(), Some(500_000));
    }
}
