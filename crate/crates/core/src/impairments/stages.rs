//! Individual chain stages.

use alloc::vec;
use num_complex::Complex64;

use super::{ChainConfig, OpticalMode, PaModel};
use crate::error::{Error, Result};
use crate::freqplan::Violation;
use crate::math::{db_to_amp, db_to_lin, lin_to_db, mean_power};
use crate::noise::{complex_gaussian, gaussian, SimRng};
use crate::waveform::Waveform;

const RAPP_SMOOTHNESS: f64 = 2.0;

fn data_power(w: &Waveform) -> f64 {
    let start = w.data_start.unwrap_or(0).min(w.samples.len());
    mean_power(&w.samples[start..])
}

/// Passive loss: samples scale by 10^(-db/20).
pub fn attenuate(w: &Waveform, db: f64) -> Result<Waveform> {
    if !(db >= 0.0) {
        return Err(Error::InvalidParameter("attenuation must be >= 0 dB"));
    }
    let mut out = w.clone();
    out.scale(db_to_amp(-db));
    Ok(out)
}

/// Linear gain: samples scale by 10^(db/20).
pub fn amplify(w: &Waveform, db: f64) -> Result<Waveform> {
    if !(db >= 0.0) {
        return Err(Error::InvalidParameter("gain must be >= 0 dB"));
    }
    let mut out = w.clone();
    out.scale(db_to_amp(db));
    Ok(out)
}

/// Adds white Gaussian noise whose power in 20 MHz is `noise_dbm`; the total
/// over the sample bandwidth scales with the sample rate.
pub fn add_white_noise(w: &mut Waveform, noise_dbm: f64, rng: &mut SimRng) {
    if noise_dbm == f64::NEG_INFINITY {
        return;
    }
    let total_dbm = noise_dbm + lin_to_db(w.sample_rate / 20e6);
    let var = db_to_lin(total_dbm - w.ref_power_dbm);
    for s in &mut w.samples {
        *s += complex_gaussian(rng, var);
    }
}

/// Multiplies by exp(j theta[n]) where theta is a Wiener process with
/// per-sample increment variance `var`, starting from zero.
pub fn add_phase_noise(w: &mut Waveform, var: f64, rng: &mut SimRng) {
    if var <= 0.0 {
        return;
    }
    let sd = libm::sqrt(var);
    let mut theta = 0.0;
    for s in &mut w.samples {
        theta += sd * gaussian(rng);
        *s *= Complex64::new(libm::cos(theta), libm::sin(theta));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixDirection {
    Up,
    Down,
}

/// One mixer with its LO.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixer {
    pub lo_hz: f64,
    /// LO error relative to the plan.
    pub lo_offset_hz: f64,
    pub conversion_loss_db: f64,
    pub phase_noise_var: f64,
    /// Upper edge of the IF passband the down-converted band must fit in.
    pub frontend_bw_hz: f64,
}

/// Frequency translation on the complex envelope.
///
/// The nominal center moves by the LO frequency; an LO error shows up as a
/// residual rotation of the envelope, and LO phase noise as a Wiener phase
/// process. Conversion loss scales the amplitude.
pub fn mix(w: &Waveform, mixer: &Mixer, direction: MixDirection, rng: &mut SimRng) -> Result<Waveform> {
    if !(mixer.conversion_loss_db >= 0.0) {
        return Err(Error::InvalidParameter("conversion loss must be >= 0 dB"));
    }
    let mut out = w.clone();
    let (center, offset) = match direction {
        MixDirection::Down => (w.center_hz - mixer.lo_hz, -mixer.lo_offset_hz),
        MixDirection::Up => (w.center_hz + mixer.lo_hz, mixer.lo_offset_hz),
    };
    if direction == MixDirection::Down {
        let half = w.sample_rate / 2.0;
        let mut v = vec![];
        if !(center > 0.0) {
            v.push(Violation::IfNotPositive { if_mhz: center / 1e6 });
        }
        if center - half < 0.0 {
            v.push(Violation::IfBelowDc { low_edge_mhz: (center - half) / 1e6 });
        }
        if center + half > mixer.frontend_bw_hz {
            v.push(Violation::IfAboveFrontend {
                high_edge_mhz: (center + half) / 1e6,
                frontend_bw_mhz: mixer.frontend_bw_hz / 1e6,
            });
        }
        if !v.is_empty() {
            return Err(Error::FrequencyPlan(v));
        }
    }
    out.center_hz = center;
    out.scale(db_to_amp(-mixer.conversion_loss_db));
    if offset != 0.0 {
        let step = 2.0 * core::f64::consts::PI * offset / w.sample_rate;
        for (n, s) in out.samples.iter_mut().enumerate() {
            let a = step * n as f64;
            *s *= Complex64::new(libm::cos(a), libm::sin(a));
        }
    }
    add_phase_noise(&mut out, mixer.phase_noise_var, rng);
    Ok(out)
}

/// Gain followed by a magnitude limiter whose saturation amplitude sits
/// `clip_backoff_db` above the input RMS amplitude.
pub fn amplify_clip(w: &Waveform, gain_db: f64, clip_backoff_db: f64, model: PaModel) -> Result<Waveform> {
    if !(gain_db >= 0.0) {
        return Err(Error::InvalidParameter("PA gain must be >= 0 dB"));
    }
    let g = db_to_amp(gain_db);
    let a_max = libm::sqrt(data_power(w)) * db_to_amp(clip_backoff_db);
    let mut out = w.clone();
    if a_max <= 0.0 {
        out.scale(g);
        return Ok(out);
    }
    for s in &mut out.samples {
        let y = *s * g;
        let r = y.norm();
        *s = match model {
            PaModel::Hard if r > a_max => y * (a_max / r),
            PaModel::Hard => y,
            PaModel::Rapp => {
                let p2 = 2.0 * RAPP_SMOOTHNESS;
                y / libm::pow(1.0 + libm::pow(r / a_max, p2), 1.0 / p2)
            }
        };
    }
    Ok(out)
}

/// Optical path loss in dB: `L0 + 10 n log10(d / d0)`, minus the lens gain.
pub fn path_loss(distance_m: f64, lens: bool, cfg: &ChainConfig) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::InvalidParameter("distance must be > 0"));
    }
    let lens_gain = if lens { cfg.lens_gain_db } else { 0.0 };
    Ok(cfg.path_loss_ref_db
        + 10.0 * cfg.path_loss_exponent * libm::log10(distance_m / cfg.path_loss_ref_m)
        - lens_gain)
}

/// LED, free-space optical link and photodiode/TIA.
///
/// The optical segment is frequency-flat: a real gain of `-path_loss` dB and
/// white noise at the PD noise floor. In [`OpticalMode::IfPassband`] the
/// signal first passes through the biased, non-negative LED drive on a real
/// IF carrier.
pub fn led_channel(w: &Waveform, cfg: &ChainConfig, rng: &mut SimRng) -> Result<Waveform> {
    if !(0.0..=1.0).contains(&cfg.led_bias) {
        return Err(Error::InvalidParameter("led_bias must be in [0, 1]"));
    }
    let mut out = match cfg.optical_mode {
        OpticalMode::Baseband => w.clone(),
        OpticalMode::IfPassband => super::passband::led_passband(w, cfg)?,
    };
    out.scale(db_to_amp(-path_loss(cfg.distance_m, cfg.lens, cfg)?));
    add_white_noise(&mut out, cfg.pd_noise_floor_dbm, rng);
    Ok(out)
}

/// Scales the data field to `target` mean power. The reference level moves
/// the other way, so absolute power readings are unchanged.
pub fn agc_normalize(w: &Waveform, target: f64) -> Result<Waveform> {
    let p = data_power(w);
    if !(p > 0.0) {
        return Err(Error::ZeroPower);
    }
    if !(target > 0.0) {
        return Err(Error::InvalidParameter("AGC target must be > 0"));
    }
    let g = libm::sqrt(target / p);
    let mut out = w.clone();
    out.scale(g);
    out.ref_power_dbm -= 20.0 * libm::log10(g);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::rng_from_seed;
    use alloc::vec::Vec;

    fn unit_waveform() -> Waveform {
        let samples: Vec<Complex64> = (0..4096)
            .map(|i| {
                let a = i as f64 * 0.37;
                Complex64::new(libm::cos(a), libm::sin(a * 1.7)) * libm::sqrt(2.0) * 0.5
                    + Complex64::new(libm::sin(a * 0.3), 0.0) * 0.5
            })
            .collect();
        let mut w = Waveform::new(samples, 20e6, 0.0).unwrap();
        let p = w.mean_power();
        w.scale(1.0 / libm::sqrt(p));
        w
    }

    #[test]
    fn attenuation_scales_power() {
        let w = unit_waveform();
        assert_eq!(attenuate(&w, 0.0).unwrap(), w);
        let a = attenuate(&w, 15.0).unwrap();
        assert!((a.mean_power() - libm::pow(10.0, -1.5)).abs() < 1e-12);
        assert!((a.power_dbm() - (w.power_dbm() - 15.0)).abs() < 1e-9);
        let back = amplify(&a, 15.0).unwrap();
        for (x, y) in back.samples.iter().zip(&w.samples) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!(attenuate(&w, -1.0).is_err());
    }

    #[test]
    fn mixer_translates_center_and_applies_loss() {
        let mut w = unit_waveform();
        w.center_hz = 2412e6;
        let mixer = Mixer {
            lo_hz: 2375e6,
            lo_offset_hz: 0.0,
            conversion_loss_db: 5.6,
            phase_noise_var: 0.0,
            frontend_bw_hz: 100e6,
        };
        let mut rng = rng_from_seed(1);
        let d = mix(&w, &mixer, MixDirection::Down, &mut rng).unwrap();
        assert!((d.center_hz - 37e6).abs() < 1e-3);
        assert!((w.power_dbm() - d.power_dbm() - 5.6).abs() < 1e-9);

        let ideal = Mixer { conversion_loss_db: 0.0, ..mixer };
        let same = mix(&w, &ideal, MixDirection::Down, &mut rng).unwrap();
        assert_eq!(same.samples, w.samples);

        let narrow = Mixer { frontend_bw_hz: 40e6, ..mixer };
        assert!(matches!(mix(&w, &narrow, MixDirection::Down, &mut rng), Err(Error::FrequencyPlan(_))));
    }

    #[test]
    fn generous_backoff_is_linear() {
        let w = unit_waveform();
        let y = amplify_clip(&w, 5.0, 40.0, PaModel::Hard).unwrap();
        let lin = amplify(&w, 5.0).unwrap();
        assert_eq!(y.samples, lin.samples);
    }

    #[test]
    fn clipping_caps_magnitude_and_keeps_phase() {
        let w = unit_waveform();
        let y = amplify_clip(&w, 20.0, 3.0, PaModel::Hard).unwrap();
        let a_max = db_to_amp(3.0);
        for (a, b) in y.samples.iter().zip(&w.samples) {
            assert!(a.norm() <= a_max + 1e-12);
            if b.norm() > 1e-9 {
                assert!((a.arg() - b.arg()).abs() < 1e-9);
            }
        }
        let r = amplify_clip(&w, 20.0, 3.0, PaModel::Rapp).unwrap();
        assert!(r.samples.iter().all(|s| s.norm() <= a_max + 1e-12));
    }

    #[test]
    fn path_loss_law() {
        let cfg = ChainConfig::default();
        let l1 = path_loss(0.25, false, &cfg).unwrap();
        let l2 = path_loss(0.5, false, &cfg).unwrap();
        assert!((l2 - l1 - 20.0 * libm::log10(2.0)).abs() < 1e-12);
        assert!(path_loss(0.0, false, &cfg).is_err());
        let with_lens = ChainConfig { lens_gain_db: 7.0, ..cfg.clone() };
        assert!((path_loss(1.0, true, &with_lens).unwrap() - (cfg.path_loss_ref_db - 7.0)).abs() < 1e-12);
    }

    #[test]
    fn agc_is_idempotent_and_keeps_absolute_power() {
        let mut w = unit_waveform();
        w.ref_power_dbm = -24.53;
        w.scale(0.01);
        let before = w.power_dbm();
        let a = agc_normalize(&w, 1.0).unwrap();
        assert!((a.mean_power() - 1.0).abs() < 1e-12);
        assert!((a.power_dbm() - before).abs() < 1e-9);
        let b = agc_normalize(&a, 1.0).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x - y).norm() < 1e-12);
        }
        let unit = agc_normalize(&unit_waveform(), 1.0).unwrap();
        for (x, y) in unit.samples.iter().zip(&unit_waveform().samples) {
            assert!((x - y).norm() < 1e-12);
        }
        let mut zero = w.clone();
        zero.scale(0.0);
        assert_eq!(agc_normalize(&zero, 1.0).unwrap_err(), Error::ZeroPower);
    }

    #[test]
    fn led_bias_range_checked() {
        let w = unit_waveform();
        let cfg = ChainConfig { led_bias: 1.5, ..ChainConfig::default() };
        assert!(led_channel(&w, &cfg, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn identity_optical_link() {
        let w = unit_waveform();
        let cfg = ChainConfig::identity();
        let out = led_channel(&w, &cfg, &mut rng_from_seed(0)).unwrap();
        for (x, y) in out.samples.iter().zip(&w.samples) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
