//! Mobile stations: the radio endpoints whose channel quality drives
//! profile selection and, under MDRR, queue weights.

use alloc::string::String;
use alloc::vec::Vec;

use crate::amc::ChannelState;
use crate::packet::{FlowId, StationId};

/// One subscriber station: its position (which fixes the deterministic
/// part of its channel), its channel state as tracked by the base station,
/// and the uplink flows it originates.
#[derive(Debug, Clone, PartialEq)]
pub struct MobileStation {
    pub station_id: StationId,
    pub name: String,
    pub distance_m: f64,
    pub channel: ChannelState,
    pub flows: Vec<FlowId>,
}

impl MobileStation {
    pub fn new(
        station_id: StationId,
        name: String,
        distance_m: f64,
        initial_cinr_db: f64,
    ) -> Self {
        MobileStation {
            station_id,
            name,
            distance_m,
            channel: ChannelState::new(initial_cinr_db),
            flows: Vec::new(),
        }
    }
}
