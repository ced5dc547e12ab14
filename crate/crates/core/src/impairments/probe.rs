//! Instrument-style measurements at the chain probe points.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::lin_to_db;
use crate::phy::crc::append_fcs;
use crate::phy::ofdm::{demodulate_window, preamble_len, Layout};
use crate::phy::rx::{data_aided_evm, estimate_channel};
use crate::phy::tx::{data_symbols, generate_ppdu_seeded, DEFAULT_SCRAMBLER_SEED};
use crate::phy::PpduConfig;
use crate::waveform::Waveform;

/// A known test frame: its configuration, waveform and transmitted
/// data-subcarrier symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReference {
    pub cfg: PpduConfig,
    pub ppdu: Waveform,
    pub symbols: Vec<Vec<Complex64>>,
}

impl ProbeReference {
    pub fn new(payload: &[u8], cfg: &PpduConfig) -> Result<Self> {
        let ppdu = generate_ppdu_seeded(payload, cfg, DEFAULT_SCRAMBLER_SEED)?;
        let symbols = data_symbols(&append_fcs(payload), cfg, DEFAULT_SCRAMBLER_SEED)?;
        Ok(Self { cfg: *cfg, ppdu, symbols })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeStats {
    /// Mean data-field power, dBm.
    pub rx_power_dbm: f64,
    /// Noise over the sample bandwidth from the unused subcarriers, dBm.
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub evm_percent: f64,
}

/// Probe statistics plus the per-tap arrays behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeMeasurement {
    pub stats: ProbeStats,
    /// Equalized data-subcarrier symbols after the gain fit, symbol-major.
    pub points: Vec<Complex64>,
    /// Received power per data subcarrier (ascending index), dBm.
    pub subcarrier_power_dbm: Vec<f64>,
}

/// Measures power, noise, SNR and EVM of a capture of `reference`.
///
/// Like a vector signal analyser in its default setup, the EVM uses a
/// training-field channel estimate and a per-subcarrier gain fit over the
/// whole frame, without symbol-by-symbol pilot phase tracking. Slow phase
/// drift therefore shows up as EVM here while the decoding receiver tracks
/// it out.
pub fn probe_stats(capture: &Waveform, reference: &ProbeReference) -> Result<ProbeStats> {
    probe_measure(capture, reference).map(|m| m.stats)
}

/// [`probe_stats`] with the constellation and per-subcarrier power.
pub fn probe_measure(capture: &Waveform, reference: &ProbeReference) -> Result<ProbeMeasurement> {
    let cfg = &reference.cfg;
    let layout = Layout::new(cfg.bandwidth);
    let n = layout.fft_size;
    let n_used = layout.n_used();
    let cp = cfg.guard_interval.cp_len(n);
    let sym_len = n + cp;
    let start = preamble_len(cfg.bandwidth);
    let n_sym = reference.symbols.len();
    let end = start + n_sym * sym_len;
    if capture.samples.len() < end {
        return Err(Error::Length { expected: end, got: capture.samples.len() });
    }
    let s = &capture.samples;
    let h = estimate_channel(s, &layout);
    let data_bins: Vec<usize> = layout.data.iter().map(|&k| layout.bin(k)).collect();

    let mut null_energy = 0.0;
    let mut equalized = Vec::with_capacity(n_sym);
    for i in 0..n_sym {
        let y = demodulate_window(s, start + i * sym_len + cp, n, n_used);
        null_energy += layout.null_bins.iter().map(|&b| y[b].norm_sqr()).sum::<f64>();
        equalized.push(
            data_bins
                .iter()
                .map(|&b| if h[b].norm_sqr() > 0.0 { y[b] / h[b] } else { y[b] })
                .collect::<Vec<_>>(),
        );
    }
    let (evm_percent, points) = data_aided_evm(&equalized, &reference.symbols);
    // Data-aided power per subcarrier: |sum y x*|^2 / (sum |x|^2)^2 scaled to dBm.
    let subcarrier_power_dbm = (0..data_bins.len())
        .map(|k| {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for (z, x) in equalized.iter().zip(&reference.symbols) {
                let y = z[k] * h[data_bins[k]];
                num += y * x[k].conj();
                den += x[k].norm_sqr();
            }
            let g = if den > 0.0 { num.norm_sqr() / (den * den) } else { 0.0 };
            capture.ref_power_dbm + lin_to_db(g / n_used as f64)
        })
        .collect();
    let noise_per_bin = (null_energy / (n_sym * layout.null_bins.len()) as f64).max(1e-30);
    let noise_dbm = capture.ref_power_dbm + lin_to_db(noise_per_bin * n as f64 / n_used as f64);
    let rx_power_dbm = capture.ref_power_dbm + lin_to_db(crate::math::mean_power(&s[start..end]));
    Ok(ProbeMeasurement {
        stats: ProbeStats { rx_power_dbm, noise_dbm, snr_db: rx_power_dbm - noise_dbm, evm_percent },
        points,
        subcarrier_power_dbm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impairments::{add_phase_noise, add_white_noise};
    use crate::noise::rng_from_seed;
    use crate::phy::{Bandwidth, GuardInterval};

    fn reference() -> ProbeReference {
        let cfg = PpduConfig::for_payload(3, Bandwidth::MHz20, GuardInterval::Long, 500).unwrap();
        let payload: Vec<u8> = (0..500).map(|i| (i * 13 + 1) as u8).collect();
        ProbeReference::new(&payload, &cfg).unwrap()
    }

    #[test]
    fn clean_capture() {
        let r = reference();
        let m = probe_measure(&r.ppdu, &r).unwrap();
        let st = m.stats;
        assert!(st.evm_percent < 1e-6);
        assert!(st.rx_power_dbm.abs() < 0.5);
        assert_eq!(m.points.len(), 52 * r.symbols.len());
        let flat = -lin_to_db(56.0);
        assert!(m.subcarrier_power_dbm.iter().all(|p| (p - flat).abs() < 1e-6));
    }

    #[test]
    fn awgn_snr_and_evm() {
        let r = reference();
        let mut w = r.ppdu.clone();
        add_white_noise(&mut w, -25.0, &mut rng_from_seed(4));
        let st = probe_stats(&w, &r).unwrap();
        assert!((st.snr_db - 25.0).abs() < 0.7, "{st:?}");
        // EVM over occupied tones sees the in-band share of the noise.
        let expect = 100.0 * libm::sqrt(libm::pow(10.0, -25.0 / 10.0) * 56.0 / 64.0);
        assert!((st.evm_percent - expect).abs() / expect < 0.15, "{} vs {expect}", st.evm_percent);
    }

    #[test]
    fn drift_raises_probe_evm() {
        let r = reference();
        let mut w = r.ppdu.clone();
        add_phase_noise(&mut w, 1e-5, &mut rng_from_seed(9));
        let st = probe_stats(&w, &r).unwrap();
        assert!(st.evm_percent > 2.0);
        assert!(st.snr_db > 40.0);
    }
}
