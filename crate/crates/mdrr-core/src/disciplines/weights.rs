//! Weight and quantum derivation for the MDRR discipline.
//!
//! Each queue's quantum grows linearly with its weight percentage; the
//! weight itself is the share of total uplink symbol capacity the flow's
//! minimum reserved rate demands, optionally topped up with a bonus for
//! stations reporting a strong channel so they can capitalize on their
//! efficient burst profiles.

use core::fmt;

use crate::amc::BurstProfile;

/// Bytes of quantum granted per weight percentage point.
const BYTES_PER_WEIGHT_POINT: f64 = 512.0;

/// Lower anchor of the CINR bonus range: at or below this report the bonus
/// is zero.
const CINR_BONUS_FLOOR_DB: f64 = 12.0;
/// Width of the CINR range over which the bonus scales, in dB.
const CINR_BONUS_SPAN_DB: f64 = 22.0;
/// Largest value of the normalized CINR term.
const CINR_BONUS_MAX: f64 = 3.5;
/// Weight percentage points granted per unit of the normalized CINR term.
const CINR_BONUS_GAIN: f64 = 3.0;

/// Which weight derivation the engine applies each frame under MDRR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightFormula {
    /// Reserved-rate share of capacity only ([`weight_basic`]).
    Basic,
    /// Reserved-rate share plus the CINR bonus ([`weight_cinr`]); the
    /// default, since rewarding good channels is the point of the modified
    /// discipline.
    #[default]
    Cinr,
}

/// Error deriving a weight from a flow's reserved rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightError {
    /// Total system capacity must be positive.
    NonPositiveCapacity { tsc_sps: f64 },
    /// A single flow's reserved rate may not exceed the system capacity.
    DemandExceedsCapacity { mtmr_sps: f64, tsc_sps: f64 },
    /// Reserved rates are nonnegative by construction.
    NegativeDemand { mtmr_sps: f64 },
}

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightError::NonPositiveCapacity { tsc_sps } => {
                write!(f, "total system capacity must be positive, got {tsc_sps} symbols/s")
            }
            WeightError::DemandExceedsCapacity { mtmr_sps, tsc_sps } => write!(
                f,
                "reserved rate of {mtmr_sps} symbols/s exceeds the system capacity of {tsc_sps} symbols/s"
            ),
            WeightError::NegativeDemand { mtmr_sps } => {
                write!(f, "reserved rate must be nonnegative, got {mtmr_sps} symbols/s")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WeightError {}

/// Symbols per second a flow's minimum reserved bit rate occupies under the
/// given burst profile. A robust profile carries fewer bits per symbol, so
/// the same reserved rate translates into a larger symbol demand — which is
/// exactly what earns far-away stations their larger weight.
pub fn mtmr_sps(min_reserved_bps: u64, profile: &BurstProfile, data_subcarriers: u32) -> f64 {
    min_reserved_bps as f64 / profile.bits_per_symbol(data_subcarriers)
}

/// Base weight: the flow's reserved symbol rate as a percentage of total
/// system capacity.
pub fn weight_basic(mtmr_sps: f64, tsc_sps: f64) -> Result<f64, WeightError> {
    if tsc_sps.is_nan() || tsc_sps <= 0.0 {
        return Err(WeightError::NonPositiveCapacity { tsc_sps });
    }
    if mtmr_sps < 0.0 {
        return Err(WeightError::NegativeDemand { mtmr_sps });
    }
    if mtmr_sps > tsc_sps {
        return Err(WeightError::DemandExceedsCapacity { mtmr_sps, tsc_sps });
    }
    Ok(mtmr_sps / tsc_sps * 100.0)
}

/// Channel-aware weight: the base weight plus a bonus that grows linearly
/// with the reported CINR. The bonus term normalizes the report onto
/// [0, 3.5] across the 12–34 dB range (clamped outside it) and contributes
/// three weight points per unit, so a station at the top of the range gains
/// 10.5 points over one at the bottom.
pub fn weight_cinr(mtmr_sps: f64, tsc_sps: f64, cinr_db: f64) -> Result<f64, WeightError> {
    let base = weight_basic(mtmr_sps, tsc_sps)?;
    let raw = (cinr_db - CINR_BONUS_FLOOR_DB) / CINR_BONUS_SPAN_DB * CINR_BONUS_MAX;
    let bonus = raw.clamp(0.0, CINR_BONUS_MAX);
    Ok(base + bonus * CINR_BONUS_GAIN)
}

/// Quantum in bytes for a queue of the given weight: one MTU so every visit
/// can move at least one packet, plus 512 bytes per weight point, rounded
/// to the nearest byte.
pub fn mdrr_quantum(weight_percent: f64, mtu_bytes: u32) -> u64 {
    debug_assert!(weight_percent >= 0.0, "weights are nonnegative");
    libm::round(mtu_bytes as f64 + BYTES_PER_WEIGHT_POINT * weight_percent) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amc::CodingRate;
    use alloc::string::ToString;

    #[test]
    fn quantum_is_mtu_plus_512_per_point() {
        assert_eq!(mdrr_quantum(0.0, 1500), 1500);
        assert_eq!(mdrr_quantum(10.0, 1500), 6620);
        assert_eq!(mdrr_quantum(2.5, 2048), 3328);
        // Fractional weights round to the nearest byte.
        assert_eq!(mdrr_quantum(0.001, 1500), 1501);
    }

    #[test]
    fn quantum_never_below_mtu() {
        for w in 0..400 {
            let w = w as f64 * 0.25;
            assert!(mdrr_quantum(w, 1500) >= 1500);
        }
    }

    #[test]
    fn base_weight_is_capacity_share() {
        assert_eq!(weight_basic(1000.0, 10_000.0).unwrap(), 10.0);
        assert_eq!(weight_basic(0.0, 10_000.0).unwrap(), 0.0);
        assert_eq!(weight_basic(10_000.0, 10_000.0).unwrap(), 100.0);
    }

    #[test]
    fn base_weight_rejects_bad_inputs() {
        assert_eq!(
            weight_basic(1.0, 0.0),
            Err(WeightError::NonPositiveCapacity { tsc_sps: 0.0 })
        );
        assert_eq!(
            weight_basic(11.0, 10.0),
            Err(WeightError::DemandExceedsCapacity { mtmr_sps: 11.0, tsc_sps: 10.0 })
        );
        assert_eq!(
            weight_basic(-1.0, 10.0),
            Err(WeightError::NegativeDemand { mtmr_sps: -1.0 })
        );
    }

    #[test]
    fn cinr_weight_anchors() {
        // At the 12 dB floor the bonus vanishes: equal to the base weight.
        let w = weight_cinr(1000.0, 10_000.0, 12.0).unwrap();
        assert!((w - 10.0).abs() < 1e-12);
        // At the 34 dB ceiling the bonus saturates at 3.5 * 3 = 10.5 points.
        let w = weight_cinr(1000.0, 10_000.0, 34.0).unwrap();
        assert!((w - 20.5).abs() < 1e-12);
        // Midpoint: 23 dB is 11/22 of the span, so 1.75 * 3 = 5.25 points.
        let w = weight_cinr(0.0, 10_000.0, 23.0).unwrap();
        assert!((w - 5.25).abs() < 1e-12);
    }

    #[test]
    fn cinr_weight_clamps_outside_range() {
        let base = weight_basic(500.0, 10_000.0).unwrap();
        assert_eq!(weight_cinr(500.0, 10_000.0, -40.0).unwrap(), base);
        assert_eq!(weight_cinr(500.0, 10_000.0, 5.0).unwrap(), base);
        assert_eq!(
            weight_cinr(500.0, 10_000.0, 60.0).unwrap(),
            weight_cinr(500.0, 10_000.0, 34.0).unwrap()
        );
    }

    #[test]
    fn cinr_weight_is_monotone() {
        let mut prev = f64::NEG_INFINITY;
        let mut cinr = 0.0;
        while cinr <= 40.0 {
            let w = weight_cinr(200.0, 4200.0, cinr).unwrap();
            assert!(w >= prev, "weight must not decrease with CINR (at {cinr} dB)");
            prev = w;
            cinr += 0.5;
        }
    }

    #[test]
    fn symbol_demand_grows_on_robust_profiles() {
        let robust = BurstProfile {
            name: "QPSK 1/2".to_string(),
            modulation_bits: 2,
            coding_rate: CodingRate::new(1, 2),
            entry_db: 5.0,
            exit_db: 0.0,
        };
        let efficient = BurstProfile {
            name: "16-QAM 3/4".to_string(),
            modulation_bits: 4,
            coding_rate: CodingRate::new(3, 4),
            entry_db: 24.0,
            exit_db: 16.0,
        };
        // 120 kbps over 800 bits/symbol = 150 symbols/s on QPSK 1/2 but
        // only 50 symbols/s on 16-QAM 3/4.
        assert_eq!(mtmr_sps(120_000, &robust, 800), 150.0);
        assert_eq!(mtmr_sps(120_000, &efficient, 800), 50.0);
        // Equal reserved rates: the robust profile earns at least the
        // efficient one's weight.
        let w_robust = weight_basic(mtmr_sps(120_000, &robust, 800), 4200.0).unwrap();
        let w_eff = weight_basic(mtmr_sps(120_000, &efficient, 800), 4200.0).unwrap();
        assert!(w_robust >= w_eff);
    }
}
