//! The full TX -> VLC -> RX chain with probe taps.

use alloc::vec;
use alloc::vec::Vec;

use super::probe::{probe_stats, ProbeReference, ProbeStats};
use super::stages::{
    add_phase_noise, add_white_noise, agc_normalize, amplify_clip, attenuate, led_channel, mix,
    MixDirection, Mixer,
};
use super::ChainConfig;
use crate::error::{Error, Result};
use crate::freqplan::Violation;
use crate::math::{db_to_lin, lin_to_db};
use crate::noise::{complex_gaussian, mix_seed, rng_from_seed, SimRng};
use crate::waveform::Waveform;

/// Tolerance on the RF center the RX mixer must land on.
const RX_CENTER_TOLERANCE_HZ: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProbePoint {
    /// NIC transmitter output.
    A,
    /// Down-mixer output (IF).
    B,
    /// Power amplifier output. Not observable on the bench; model prediction.
    C,
    /// Photodiode / TIA output.
    D,
    /// Up-mixer output, at the receiving NIC antenna port.
    E,
}

impl ProbePoint {
    pub const ALL: [ProbePoint; 5] = [Self::A, Self::B, Self::C, Self::D, Self::E];

    pub fn label(self) -> char {
        match self {
            Self::A => 'A',
            Self::B => 'B',
            Self::C => 'C',
            Self::D => 'D',
            Self::E => 'E',
        }
    }

    pub fn from_label(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.label() == c.to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCapture {
    pub point: ProbePoint,
    pub waveform: Waveform,
    pub stats: Option<ProbeStats>,
    /// True when the point has no bench counterpart.
    pub predicted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    /// AGC-normalized waveform handed to the receiving NIC.
    pub rx: Waveform,
    /// Data-field power at the receiving NIC input, dBm.
    pub rssi_dbm: f64,
    pub captures: Vec<ProbeCapture>,
}

impl ChainOutput {
    pub fn capture(&self, point: ProbePoint) -> Option<&ProbeCapture> {
        self.captures.iter().find(|c| c.point == point)
    }
}

// Phase-noise variances are specified per 50 ns; rescale to the sample period.
fn per_sample(var: f64, w: &Waveform) -> f64 {
    var * 20e6 / w.sample_rate
}

fn stage_rng(seed: u64, stage: u64) -> SimRng {
    rng_from_seed(mix_seed(seed, stage))
}

/// Propagates a unit-power NIC waveform through the chain.
///
/// The input's data field is taken to leave the NIC at `tx_power_dbm`.
/// Every random stage draws from its own stream derived from `seed`, so a
/// given seed always reproduces the same output and changing one stage does
/// not disturb the noise of the others.
pub fn run_chain(
    input: &Waveform,
    cfg: &ChainConfig,
    taps: &[ProbePoint],
    seed: u64,
    reference: Option<&ProbeReference>,
) -> Result<ChainOutput> {
    cfg.validate()?;
    let mut captures = vec![];
    let mut tap = |point: ProbePoint, w: &Waveform| -> Result<()> {
        if taps.contains(&point) {
            let stats = reference.map(|r| probe_stats(w, r)).transpose()?;
            captures.push(ProbeCapture {
                point,
                waveform: w.clone(),
                stats,
                predicted: point == ProbePoint::C,
            });
        }
        Ok(())
    };

    // NIC transmitter: absolute level, TX noise and oscillator drift.
    let mut w = input.clone();
    w.ref_power_dbm += cfg.tx_power_dbm - input.data_power_dbm();
    w.center_hz = cfg.rf_tx_hz;
    let tx_noise = cfg.tx_power_dbm - cfg.nic_tx_snr_db - lin_to_db(w.sample_rate / 20e6);
    add_white_noise(&mut w, tx_noise, &mut stage_rng(seed, 1));
    let var = per_sample(cfg.nic_phase_noise_var, &w);
    add_phase_noise(&mut w, var, &mut stage_rng(seed, 2));
    tap(ProbePoint::A, &w)?;

    let w = attenuate(&w, cfg.attenuator_db)?;
    let mixer = Mixer {
        lo_hz: cfg.lo_tx_hz,
        lo_offset_hz: cfg.lo_tx_offset_hz,
        conversion_loss_db: cfg.mixer_conversion_loss_db,
        phase_noise_var: per_sample(cfg.phase_noise_var, &w),
        frontend_bw_hz: cfg.frontend_bw_hz,
    };
    let mut w = mix(&w, &mixer, MixDirection::Down, &mut stage_rng(seed, 3))?;
    add_white_noise(&mut w, cfg.if_noise_dbm, &mut stage_rng(seed, 4));
    tap(ProbePoint::B, &w)?;

    let w = if cfg.pa_gain_db > 0.0 {
        amplify_clip(&w, cfg.pa_gain_db, cfg.pa_clip_backoff_db, cfg.pa_model)?
    } else {
        w
    };
    tap(ProbePoint::C, &w)?;

    let w = led_channel(&w, cfg, &mut stage_rng(seed, 5))?;
    tap(ProbePoint::D, &w)?;

    let mixer = Mixer { lo_hz: cfg.lo_rx_hz, lo_offset_hz: cfg.lo_rx_offset_hz, ..mixer };
    let mut w = mix(&w, &mixer, MixDirection::Up, &mut stage_rng(seed, 6))?;
    if (w.center_hz - cfg.rf_rx_hz).abs() > RX_CENTER_TOLERANCE_HZ {
        return Err(Error::FrequencyPlan(vec![Violation::RxMismatch {
            expected_lo_mhz: (cfg.rf_rx_hz - (w.center_hz - cfg.lo_rx_hz)) / 1e6,
            lo_mhz: cfg.lo_rx_hz / 1e6,
        }]));
    }
    add_white_noise(&mut w, cfg.rx_mixer_noise_dbm, &mut stage_rng(seed, 7));
    tap(ProbePoint::E, &w)?;

    let rssi_dbm = w.data_power_dbm();
    add_white_noise(&mut w, cfg.nic_rx_noise_dbm, &mut stage_rng(seed, 9));
    let mut rx = agc_normalize(&w, cfg.agc_target_power)?;
    // Receiver implementation floor: noise proportional to the normalized level.
    if cfg.nic_rx_evm_db > f64::NEG_INFINITY {
        let var = cfg.agc_target_power * db_to_lin(cfg.nic_rx_evm_db);
        let mut rng = stage_rng(seed, 8);
        for s in &mut rx.samples {
            *s += complex_gaussian(&mut rng, var);
        }
    }
    Ok(ChainOutput { rx, rssi_dbm, captures })
}
