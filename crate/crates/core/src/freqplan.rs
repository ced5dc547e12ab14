//! LO selection for down-converting a 2.4 GHz WiFi channel into the VLC
//! front-end passband and back up at the receiver.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub const LO_STEP_MHZ: f64 = 25.0;
pub const LO_MAX_MHZ: f64 = 4400.0;
pub const DEFAULT_FRONTEND_BW_MHZ: f64 = 100.0;

/// Synthesizer limits the plan is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoConstraints {
    pub step_mhz: f64,
    pub max_mhz: f64,
    /// When false, LO values off the step grid are accepted.
    pub enforce_grid: bool,
}

impl Default for LoConstraints {
    fn default() -> Self {
        Self { step_mhz: LO_STEP_MHZ, max_mhz: LO_MAX_MHZ, enforce_grid: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Tx,
    Rx,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Tx => "TX",
            Side::Rx => "RX",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ChannelOutOfRange(u32),
    BandwidthUnsupported(f64),
    IfNotPositive { if_mhz: f64 },
    IfBelowDc { low_edge_mhz: f64 },
    IfAboveFrontend { high_edge_mhz: f64, frontend_bw_mhz: f64 },
    LoOffGrid { side: Side, lo_mhz: f64, step_mhz: f64 },
    LoAboveMax { side: Side, lo_mhz: f64, max_mhz: f64 },
    /// RX LO does not translate the IF back to the RX channel center.
    RxMismatch { expected_lo_mhz: f64, lo_mhz: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ChannelOutOfRange(c) => write!(f, "channel {c} outside 1..=13"),
            Violation::BandwidthUnsupported(bw) => write!(f, "channel bandwidth {bw} MHz not 20 or 40"),
            Violation::IfNotPositive { if_mhz } => write!(f, "IF center {if_mhz} MHz is not positive"),
            Violation::IfBelowDc { low_edge_mhz } => {
                write!(f, "IF band lower edge {low_edge_mhz} MHz below DC")
            }
            Violation::IfAboveFrontend { high_edge_mhz, frontend_bw_mhz } => write!(
                f,
                "IF band upper edge {high_edge_mhz} MHz exceeds front-end bandwidth {frontend_bw_mhz} MHz"
            ),
            Violation::LoOffGrid { side, lo_mhz, step_mhz } => {
                write!(f, "{side} LO {lo_mhz} MHz not a multiple of {step_mhz} MHz")
            }
            Violation::LoAboveMax { side, lo_mhz, max_mhz } => {
                write!(f, "{side} LO {lo_mhz} MHz exceeds {max_mhz} MHz")
            }
            Violation::RxMismatch { expected_lo_mhz, lo_mhz } => write!(
                f,
                "RX LO {lo_mhz} MHz does not map the IF to the RX channel (needs {expected_lo_mhz} MHz)"
            ),
        }
    }
}

/// Center frequency of a 2.4 GHz channel (1..=13) in MHz.
pub fn channel_center(channel: u32) -> Result<f64> {
    if !(1..=13).contains(&channel) {
        return Err(Error::FrequencyPlan(alloc::vec![Violation::ChannelOutOfRange(channel)]));
    }
    Ok(2407.0 + 5.0 * channel as f64)
}

/// Center of the occupied band: the primary channel for 20 MHz, the primary
/// plus 10 MHz (secondary above) for 40 MHz.
pub fn band_center(channel: u32, channel_bw_mhz: f64) -> Result<f64> {
    let c = channel_center(channel)?;
    Ok(if channel_bw_mhz == 40.0 { c + 10.0 } else { c })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan {
    pub wifi_channel_tx: u32,
    pub wifi_channel_rx: u32,
    pub channel_center_tx_mhz: f64,
    pub channel_center_rx_mhz: f64,
    pub lo_tx_mhz: f64,
    pub lo_rx_mhz: f64,
    pub if_center_mhz: f64,
    pub channel_bw_mhz: f64,
    pub frontend_bw_mhz: f64,
}

impl FrequencyPlan {
    /// IF produced by down-converting the TX channel.
    pub fn down_convert(&self, rf_mhz: f64) -> f64 {
        rf_mhz - self.lo_tx_mhz
    }

    /// RF produced by up-converting an IF with the RX LO.
    pub fn up_convert(&self, if_mhz: f64) -> f64 {
        if_mhz + self.lo_rx_mhz
    }

    pub fn validate(&self, limits: &LoConstraints) -> core::result::Result<(), Vec<Violation>> {
        validate(self, limits)
    }
}

fn on_grid(f: f64, step: f64) -> bool {
    let r = f / step;
    libm::fabs(r - libm::round(r)) < 1e-9
}

/// Checks every plan invariant and returns all violations.
pub fn validate(plan: &FrequencyPlan, limits: &LoConstraints) -> core::result::Result<(), Vec<Violation>> {
    let mut v = Vec::new();
    let bw = plan.channel_bw_mhz;
    if bw != 20.0 && bw != 40.0 {
        v.push(Violation::BandwidthUnsupported(bw));
    }
    let if_mhz = plan.channel_center_tx_mhz - plan.lo_tx_mhz;
    if !(if_mhz > 0.0) {
        v.push(Violation::IfNotPositive { if_mhz });
    }
    let low = if_mhz - bw / 2.0;
    let high = if_mhz + bw / 2.0;
    if low < 0.0 {
        v.push(Violation::IfBelowDc { low_edge_mhz: low });
    }
    if high > plan.frontend_bw_mhz {
        v.push(Violation::IfAboveFrontend { high_edge_mhz: high, frontend_bw_mhz: plan.frontend_bw_mhz });
    }
    for (side, lo) in [(Side::Tx, plan.lo_tx_mhz), (Side::Rx, plan.lo_rx_mhz)] {
        if limits.enforce_grid && !on_grid(lo, limits.step_mhz) {
            v.push(Violation::LoOffGrid { side, lo_mhz: lo, step_mhz: limits.step_mhz });
        }
        if lo > limits.max_mhz {
            v.push(Violation::LoAboveMax { side, lo_mhz: lo, max_mhz: limits.max_mhz });
        }
    }
    let expected_rx = plan.channel_center_rx_mhz - if_mhz;
    if libm::fabs(expected_rx - plan.lo_rx_mhz) > 1e-9 {
        v.push(Violation::RxMismatch { expected_lo_mhz: expected_rx, lo_mhz: plan.lo_rx_mhz });
    }
    if libm::fabs(plan.if_center_mhz - if_mhz) > 1e-9 {
        v.push(Violation::IfNotPositive { if_mhz: plan.if_center_mhz });
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Chooses LO frequencies for a TX/RX channel pair.
///
/// With `target_if_mhz = None` the largest IF center that keeps both LOs on
/// the grid and the IF band inside the front-end passband is selected.
pub fn plan(
    channel_tx: u32,
    channel_rx: u32,
    channel_bw_mhz: f64,
    frontend_bw_mhz: f64,
    target_if_mhz: Option<f64>,
    limits: &LoConstraints,
) -> Result<FrequencyPlan> {
    let mut pre = Vec::new();
    if channel_bw_mhz != 20.0 && channel_bw_mhz != 40.0 {
        pre.push(Violation::BandwidthUnsupported(channel_bw_mhz));
    }
    for c in [channel_tx, channel_rx] {
        if !(1..=13).contains(&c) {
            pre.push(Violation::ChannelOutOfRange(c));
        }
    }
    if !pre.is_empty() {
        return Err(Error::FrequencyPlan(pre));
    }
    let c_tx = band_center(channel_tx, channel_bw_mhz)?;
    let c_rx = band_center(channel_rx, channel_bw_mhz)?;
    let build = |if_mhz: f64| FrequencyPlan {
        wifi_channel_tx: channel_tx,
        wifi_channel_rx: channel_rx,
        channel_center_tx_mhz: c_tx,
        channel_center_rx_mhz: c_rx,
        lo_tx_mhz: c_tx - if_mhz,
        lo_rx_mhz: c_rx - if_mhz,
        if_center_mhz: if_mhz,
        channel_bw_mhz,
        frontend_bw_mhz,
    };

    if let Some(if_mhz) = target_if_mhz {
        let p = build(if_mhz);
        return validate(&p, limits).map(|_| p).map_err(Error::FrequencyPlan);
    }

    // IF candidates such that the TX LO lands on the grid, largest first.
    let step = if limits.enforce_grid { limits.step_mhz } else { 1.0 };
    let max_if = frontend_bw_mhz - channel_bw_mhz / 2.0;
    let lo_min = libm::ceil((c_tx - max_if) / step) * step;
    let mut lo = lo_min;
    let mut last_err = None;
    while c_tx - lo >= channel_bw_mhz / 2.0 {
        let p = build(c_tx - lo);
        match validate(&p, limits) {
            Ok(()) => return Ok(p),
            Err(v) => last_err = Some(v),
        }
        lo += step;
    }
    Err(Error::FrequencyPlan(last_err.unwrap_or_else(|| {
        // No candidate at all: the channel cannot fit into the front-end.
        validate(&build(channel_bw_mhz / 2.0), limits).err().unwrap_or_default()
    })))
}

/// The prototype's setup: channel 1 down to 37 MHz IF and back up on channel 6.
pub fn default_plan() -> FrequencyPlan {
    plan(1, 6, 20.0, DEFAULT_FRONTEND_BW_MHZ, Some(37.0), &LoConstraints::default())
        .expect("reference plan is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_centers() {
        assert_eq!(channel_center(1).unwrap(), 2412.0);
        assert_eq!(channel_center(6).unwrap(), 2437.0);
        assert_eq!(channel_center(13).unwrap(), 2472.0);
        assert!(channel_center(0).is_err());
        assert!(channel_center(14).is_err());
    }

    #[test]
    fn reference_plan() {
        let p = default_plan();
        assert_eq!(p.lo_tx_mhz, 2375.0);
        assert_eq!(p.lo_rx_mhz, 2400.0);
        assert_eq!(p.if_center_mhz, 37.0);
        assert_eq!(p.down_convert(2412.0), 37.0);
        assert_eq!(p.up_convert(37.0), 2437.0);
        assert!(p.validate(&LoConstraints::default()).is_ok());
    }

    #[test]
    fn symmetric_auto_plan() {
        let p = plan(1, 1, 20.0, 100.0, None, &LoConstraints::default()).unwrap();
        assert_eq!(p.lo_tx_mhz, p.lo_rx_mhz);
        assert_eq!(p.if_center_mhz, 87.0);
    }

    #[test]
    fn infeasible_bandwidth() {
        let err = plan(1, 1, 40.0, 30.0, None, &LoConstraints::default()).unwrap_err();
        match err {
            Error::FrequencyPlan(v) => {
                assert!(v.iter().any(|x| matches!(x, Violation::IfAboveFrontend { .. })), "{v:?}")
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn grid_violation_only_when_enforced() {
        let mut p = default_plan();
        p.lo_tx_mhz = 2380.0;
        p.if_center_mhz = 32.0;
        p.lo_rx_mhz = 2405.0;
        let v = p.validate(&LoConstraints::default()).unwrap_err();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| matches!(x, Violation::LoOffGrid { .. })));
        let relaxed = LoConstraints { enforce_grid: false, ..Default::default() };
        assert!(p.validate(&relaxed).is_ok());
    }

    #[test]
    fn five_ghz_lo_exceeds_synthesizer() {
        let p = FrequencyPlan {
            wifi_channel_tx: 36,
            wifi_channel_rx: 36,
            channel_center_tx_mhz: 5180.0,
            channel_center_rx_mhz: 5180.0,
            lo_tx_mhz: 5143.0,
            lo_rx_mhz: 5143.0,
            if_center_mhz: 37.0,
            channel_bw_mhz: 20.0,
            frontend_bw_mhz: 100.0,
        };
        let v = p.validate(&LoConstraints::default()).unwrap_err();
        assert!(v.iter().any(|x| matches!(x, Violation::LoAboveMax { side: Side::Tx, .. })));
        assert!(v.iter().any(|x| alloc::format!("{x}").contains("exceeds 4400 MHz")));
    }

    #[test]
    fn off_grid_channel_pair_is_infeasible() {
        assert!(plan(1, 2, 20.0, 100.0, None, &LoConstraints::default()).is_err());
    }
}
