//! Real IF-passband model of the LED drive.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::ChainConfig;
use crate::error::{Error, Result};
use crate::math::db_to_lin;
use crate::waveform::Waveform;

/// Minimum simulation rate for the real IF signal.
const PASSBAND_MIN_RATE_HZ: f64 = 200e6;
/// Filter half-length in input-rate samples.
const HALF_TAPS: usize = 32;
const KAISER_BETA: f64 = 8.0;

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let q = x * x / 4.0;
    for k in 1..64 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser-windowed sinc with cutoff at 1/(2 factor) of the fast rate.
/// Unit gain at the original sample instants.
fn lowpass(factor: usize) -> Vec<f64> {
    let half = (HALF_TAPS * factor) as isize;
    let norm = bessel_i0(KAISER_BETA);
    (-half..=half)
        .map(|n| {
            let x = n as f64 / factor as f64;
            let sinc = if n == 0 { 1.0 } else { libm::sin(PI * x) / (PI * x) };
            let r = n as f64 / half as f64;
            sinc * bessel_i0(KAISER_BETA * libm::sqrt((1.0 - r * r).max(0.0))) / norm
        })
        .collect()
}

/// Runs the LED on a real IF signal.
///
/// The envelope is interpolated to at least 200 MHz, placed on a real carrier
/// at `center_hz`, scaled so `led_full_scale_dbm` maps to unit drive RMS,
/// offset by `led_bias` and clipped at zero drive (when `led_clip`). The bias
/// is then removed and the result translated back to the envelope at the
/// input rate. Without clipping this reproduces the input up to filter
/// ripple.
pub fn led_passband(w: &Waveform, cfg: &ChainConfig) -> Result<Waveform> {
    let fs = w.sample_rate;
    let f_if = w.center_hz;
    if !(f_if - fs / 2.0 >= 0.0) {
        return Err(Error::InvalidParameter("passband LED needs a positive IF band"));
    }
    let mut factor = libm::ceil(PASSBAND_MIN_RATE_HZ / fs) as usize;
    while (factor as f64) * fs / 2.0 <= f_if + fs / 2.0 {
        factor += 1;
    }
    let fast = fs * factor as f64;
    let h = lowpass(factor);
    let half = (h.len() / 2) as isize;
    let n_in = w.samples.len();
    let n_fast = n_in * factor;

    // Envelope units -> normalized drive.
    let drive_scale = libm::sqrt(db_to_lin(w.ref_power_dbm - cfg.led_full_scale_dbm));
    let w_c = 2.0 * PI * f_if / fast;

    let mut real = Vec::with_capacity(n_fast);
    for m in 0..n_fast as isize {
        // Polyphase interpolation: only taps landing on input samples count.
        let u = factor as isize;
        let j_lo = -(half - m).div_euclid(u);
        let j_hi = (m + half).div_euclid(u);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in j_lo.max(0)..=j_hi.min(n_in as isize - 1) {
            acc += w.samples[j as usize] * h[(m - j * u + half) as usize];
        }
        let a = w_c * m as f64;
        let s = core::f64::consts::SQRT_2 * (acc.re * libm::cos(a) - acc.im * libm::sin(a));
        let mut d = cfg.led_bias + drive_scale * s;
        if cfg.led_clip && d < 0.0 {
            d = 0.0;
        }
        real.push((d - cfg.led_bias) / drive_scale);
    }

    // Down-convert, lowpass and decimate.
    let mut out = Vec::with_capacity(n_in);
    for i in 0..n_in as isize {
        let c = i * factor as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        let lo = (c - half).max(0);
        let hi = (c + half).min(n_fast as isize - 1);
        for m in lo..=hi {
            let a = w_c * m as f64;
            acc += Complex64::new(libm::cos(a), -libm::sin(a)) * (real[m as usize] * h[(c - m + half) as usize]);
        }
        out.push(acc * (core::f64::consts::SQRT_2 / factor as f64));
    }
    Ok(Waveform { samples: out, ..w.clone() })
}
