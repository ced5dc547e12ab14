//! Analog TX -> VLC -> RX chain between two WiFi NICs.
//!
//! Signal flow, with the probe points in brackets:
//!
//! ```text
//! NIC TX [A] -> attenuator -> down-mixer [B] -> PA [C] -> LED / optics / PD [D]
//!     -> up-mixer [E] -> NIC RX noise -> AGC -> NIC RX distortion -> decoder
//! ```
//!
//! All stages work on the complex envelope referenced to the nominal carrier
//! (`Waveform::center_hz` tracks it). The LED stage can optionally run on a
//! real IF-passband signal to check the equivalent-baseband shortcut.

mod chain;
mod passband;
mod probe;
mod stages;

pub use chain::{run_chain, ChainOutput, ProbeCapture, ProbePoint};
pub use passband::led_passband;
pub use probe::{probe_measure, probe_stats, ProbeMeasurement, ProbeReference, ProbeStats};
pub use stages::{
    add_phase_noise, add_white_noise, agc_normalize, amplify, amplify_clip, attenuate, led_channel,
    mix, path_loss, MixDirection, Mixer,
};

use crate::error::{Error, Result};
use crate::freqplan::FrequencyPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaModel {
    /// Ideal limiter: magnitude capped, phase kept.
    Hard,
    /// Rapp soft limiter with smoothness 2.
    Rapp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpticalMode {
    /// Flat complex gain plus AWGN on the complex envelope.
    Baseband,
    /// Real signal at the IF center, biased and clipped at the LED.
    IfPassband,
}

/// Full parameterization of the analog chain. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    /// NIC output power for a unit-power data field, dBm.
    pub tx_power_dbm: f64,
    /// Signal-to-noise ratio of the NIC transmitter output, dB.
    pub nic_tx_snr_db: f64,
    /// Wiener phase-noise increment variance of the NIC oscillator, rad² per 50 ns.
    pub nic_phase_noise_var: f64,
    pub attenuator_db: f64,
    /// Conversion loss of each mixer, dB.
    pub mixer_conversion_loss_db: f64,
    /// Noise floor added at the down-mixer output, dBm in 20 MHz.
    pub if_noise_dbm: f64,
    /// Noise floor added at the up-mixer output, dBm in 20 MHz.
    pub rx_mixer_noise_dbm: f64,
    pub rf_tx_hz: f64,
    pub rf_rx_hz: f64,
    pub lo_tx_hz: f64,
    pub lo_rx_hz: f64,
    /// LO frequency errors relative to the plan, Hz.
    pub lo_tx_offset_hz: f64,
    pub lo_rx_offset_hz: f64,
    /// Wiener phase-noise increment variance of each mixer LO, rad² per 50 ns.
    pub phase_noise_var: f64,
    /// Amplifier gain; 0 dB means the PA is bypassed.
    pub pa_gain_db: f64,
    /// Saturation level above the PA input RMS amplitude, dB.
    pub pa_clip_backoff_db: f64,
    pub pa_model: PaModel,
    /// LED DC operating point on the normalized [0, 1] drive range.
    pub led_bias: f64,
    /// Enforce non-negative LED drive (passband mode).
    pub led_clip: bool,
    /// Input power mapping to an LED drive RMS of 1.0, dBm.
    pub led_full_scale_dbm: f64,
    pub optical_mode: OpticalMode,
    pub distance_m: f64,
    pub lens: bool,
    pub lens_gain_db: f64,
    /// Path loss at the reference distance, dB.
    pub path_loss_ref_db: f64,
    pub path_loss_ref_m: f64,
    /// Distance exponent of the path-loss law (2 = inverse square).
    pub path_loss_exponent: f64,
    /// Photodiode / TIA noise floor, dBm in 20 MHz.
    pub pd_noise_floor_dbm: f64,
    /// Mean power the AGC normalizes the data field to.
    pub agc_target_power: f64,
    /// Input noise of the receiving NIC, dBm in 20 MHz. Added after tap E,
    /// so the probe does not see it.
    pub nic_rx_noise_dbm: f64,
    /// Distortion floor of the receiving NIC relative to the signal, dB.
    pub nic_rx_evm_db: f64,
    pub frontend_bw_hz: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 1.18,
            nic_tx_snr_db: 32.32,
            nic_phase_noise_var: 1.37e-5,
            attenuator_db: 15.0,
            mixer_conversion_loss_db: 5.6,
            if_noise_dbm: -56.8,
            rx_mixer_noise_dbm: -68.7,
            rf_tx_hz: 2412e6,
            rf_rx_hz: 2437e6,
            lo_tx_hz: 2375e6,
            lo_rx_hz: 2400e6,
            lo_tx_offset_hz: 0.0,
            lo_rx_offset_hz: 0.0,
            phase_noise_var: 1e-7,
            pa_gain_db: 0.0,
            pa_clip_backoff_db: 3.0,
            pa_model: PaModel::Hard,
            led_bias: 0.5,
            led_clip: true,
            led_full_scale_dbm: 0.0,
            optical_mode: OpticalMode::Baseband,
            distance_m: 0.5,
            lens: false,
            lens_gain_db: 5.7,
            path_loss_ref_db: 22.26,
            path_loss_ref_m: 1.0,
            path_loss_exponent: 2.0,
            pd_noise_floor_dbm: -60.0,
            agc_target_power: 1.0,
            nic_rx_noise_dbm: -64.5,
            nic_rx_evm_db: -24.5,
            frontend_bw_hz: 100e6,
        }
    }
}

impl ChainConfig {
    /// A chain with no loss, no gain, no noise and no distortion.
    pub fn identity() -> Self {
        Self {
            tx_power_dbm: 0.0,
            nic_tx_snr_db: f64::INFINITY,
            nic_phase_noise_var: 0.0,
            attenuator_db: 0.0,
            mixer_conversion_loss_db: 0.0,
            if_noise_dbm: f64::NEG_INFINITY,
            rx_mixer_noise_dbm: f64::NEG_INFINITY,
            phase_noise_var: 0.0,
            pa_gain_db: 0.0,
            distance_m: 1.0,
            path_loss_ref_db: 0.0,
            path_loss_ref_m: 1.0,
            pd_noise_floor_dbm: f64::NEG_INFINITY,
            nic_rx_noise_dbm: f64::NEG_INFINITY,
            nic_rx_evm_db: f64::NEG_INFINITY,
            ..Self::default()
        }
    }

    /// Applies the LOs and RF centers of a frequency plan.
    pub fn with_plan(mut self, plan: &FrequencyPlan) -> Self {
        self.rf_tx_hz = plan.channel_center_tx_mhz * 1e6;
        self.rf_rx_hz = plan.channel_center_rx_mhz * 1e6;
        self.lo_tx_hz = plan.lo_tx_mhz * 1e6;
        self.lo_rx_hz = plan.lo_rx_mhz * 1e6;
        self.frontend_bw_hz = plan.frontend_bw_mhz * 1e6;
        self
    }

    /// PD noise floor scaled to a channel bandwidth.
    pub fn noise_floor_dbm(&self, bandwidth_hz: f64) -> f64 {
        self.pd_noise_floor_dbm + crate::math::lin_to_db(bandwidth_hz / 20e6)
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &'static str); 8] = [
            (self.attenuator_db >= 0.0, "attenuator_db must be >= 0"),
            (self.mixer_conversion_loss_db >= 0.0, "mixer_conversion_loss_db must be >= 0"),
            (self.distance_m > 0.0, "distance_m must be > 0"),
            (self.frontend_bw_hz > 0.0, "frontend_bw_hz must be > 0"),
            ((0.0..=1.0).contains(&self.led_bias), "led_bias must be in [0, 1]"),
            (self.pa_gain_db >= 0.0, "pa_gain_db must be >= 0"),
            (self.path_loss_ref_m > 0.0, "path_loss_ref_m must be > 0"),
            (
                self.phase_noise_var >= 0.0 && self.nic_phase_noise_var >= 0.0,
                "phase noise variance must be >= 0",
            ),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::InvalidParameter(what));
            }
        }
        if !(self.agc_target_power > 0.0) {
            return Err(Error::InvalidParameter("agc_target_power must be > 0"));
        }
        Ok(())
    }

    /// Nominal pre-AGC power at the RX NIC input for a data field leaving
    /// the NIC at `tx_power_dbm`, ignoring noise and PA compression.
    pub fn nominal_rssi_dbm(&self) -> Result<f64> {
        Ok(self.tx_power_dbm - self.attenuator_db - 2.0 * self.mixer_conversion_loss_db
            + self.pa_gain_db
            - path_loss(self.distance_m, self.lens, self)?)
    }
}
