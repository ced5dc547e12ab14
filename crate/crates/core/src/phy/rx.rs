//! Genie-synchronized PPDU receiver.
//!
//! Frame timing, carrier frequency and the [`PpduConfig`] are known
//! out-of-band. The receiver estimates one complex tap per subcarrier from the
//! long training fields, removes the common phase error of every data symbol
//! with the pilots, and runs soft-decision Viterbi decoding.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::convolutional::conv_encode;
use super::crc::check_fcs;
use super::interleaver::Interleaver;
use super::mcs::{PpduConfig, SERVICE_BITS};
use super::modulation::{demap_symbols, map_symbols};
use super::ofdm::{demodulate_window, ht_ltf_window, l_ltf_windows, preamble_len, Layout};
use super::scrambler::Scrambler;
use super::tx::bits_to_bytes;
use super::viterbi::{viterbi_decode, Termination};
use crate::error::{Error, Result};
use crate::math::lin_to_db;

/// Minimum normalized correlation between the two L-LTF symbols.
const LTF_CORRELATION_MIN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct RxStats {
    /// Mean data-field power before any receiver gain, dBm.
    pub rssi_dbm: f64,
    /// Noise power over the sample bandwidth, estimated on the null
    /// subcarriers, dBm.
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub evm_percent: f64,
    /// Received power per occupied subcarrier (ascending index), dBm.
    pub per_subcarrier_power: Vec<f64>,
    pub fcs_ok: bool,
    /// Equalized data-subcarrier symbols, symbol-major.
    pub constellation_points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RxFrame {
    /// PSDU without the FCS.
    pub payload: Vec<u8>,
    pub stats: RxStats,
}

/// Channel estimate per FFT bin (zero where no training tone exists).
pub(crate) fn estimate_channel(samples: &[Complex64], layout: &Layout) -> Vec<Complex64> {
    let bw = layout.bandwidth;
    let n = layout.fft_size;
    let ht_ref = layout.ht_ltf();
    let y = demodulate_window(samples, ht_ltf_window(bw), n, layout.n_used());
    let mut h: Vec<Complex64> = y
        .iter()
        .zip(&ht_ref)
        .map(|(y, r)| if r.norm_sqr() > 0.0 { y / r } else { Complex64::new(0.0, 0.0) })
        .collect();

    // Average in the two legacy long symbols where they overlap.
    let l_ref = layout.l_ltf();
    let legacy_used = l_ref.iter().filter(|v| v.norm_sqr() > 0.0).count();
    let [w1, w2] = l_ltf_windows(bw);
    let y1 = demodulate_window(samples, w1, n, legacy_used);
    let y2 = demodulate_window(samples, w2, n, legacy_used);
    for b in 0..n {
        if l_ref[b].norm_sqr() > 0.0 && ht_ref[b].norm_sqr() > 0.0 {
            h[b] = (h[b] + y1[b] / l_ref[b] + y2[b] / l_ref[b]) / 3.0;
        }
    }
    h
}

fn ltf_correlation(samples: &[Complex64], bw: super::mcs::Bandwidth) -> f64 {
    let n = bw.fft_size();
    let [w1, w2] = l_ltf_windows(bw);
    let a = &samples[w1..w1 + n];
    let b = &samples[w2..w2 + n];
    let c: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    let pa: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let pb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if pa <= 0.0 || pb <= 0.0 {
        return 0.0;
    }
    c.norm() / libm::sqrt(pa * pb)
}

/// Demodulates, equalizes and decodes one PPDU.
///
/// A frame that is found but fails the FCS check is returned with
/// `fcs_ok = false`; a waveform in which no frame can be found is an
/// [`Error::SyncNotFound`].
pub fn receive_ppdu(w: &crate::Waveform, cfg: &PpduConfig) -> Result<RxFrame> {
    cfg.validate()?;
    let bw = cfg.bandwidth;
    if (w.sample_rate - bw.sample_rate()).abs() > 1e-6 * bw.sample_rate() {
        return Err(Error::SampleRate { expected: bw.sample_rate(), got: w.sample_rate });
    }
    let layout = Layout::new(bw);
    let n = layout.fft_size;
    let cp = cfg.guard_interval.cp_len(n);
    let sym_len = n + cp;
    let n_sym = cfg.n_symbols();
    let data_start = preamble_len(bw);
    let samples = &w.samples;
    if samples.len() < data_start + n_sym * sym_len {
        return Err(Error::SyncNotFound);
    }
    if !(ltf_correlation(samples, bw) >= LTF_CORRELATION_MIN) {
        return Err(Error::SyncNotFound);
    }

    let h = estimate_channel(samples, &layout);
    if layout.used().iter().any(|&k| h[layout.bin(k)].norm_sqr() == 0.0) {
        return Err(Error::SyncNotFound);
    }

    let n_used = layout.n_used();
    let data_bins: Vec<usize> = layout.data.iter().map(|&k| layout.bin(k)).collect();
    let pilot_bins: Vec<usize> = layout.pilots.iter().map(|&k| layout.bin(k)).collect();

    // FFT every data symbol once.
    let spectra: Vec<Vec<Complex64>> = (0..n_sym)
        .map(|s| demodulate_window(samples, data_start + s * sym_len + cp, n, n_used))
        .collect();

    // In-band noise power from the null bins.
    let null_energy: f64 = spectra
        .iter()
        .flat_map(|y| layout.null_bins.iter().map(move |&b| y[b].norm_sqr()))
        .sum();
    let noise_per_bin = (null_energy / (n_sym * layout.null_bins.len()) as f64).max(1e-30);

    let mut equalized: Vec<Vec<Complex64>> = Vec::with_capacity(n_sym);
    let noise_var: Vec<f64> = data_bins.iter().map(|&b| noise_per_bin / h[b].norm_sqr()).collect();
    let il = Interleaver::new(&cfg.mcs, bw);
    let mut llrs = Vec::with_capacity(n_sym * cfg.n_cbps());
    for (s, y) in spectra.iter().enumerate() {
        let pilots = layout.pilot_values(s);
        let cpe: Complex64 = pilot_bins
            .iter()
            .zip(&pilots)
            .map(|(&b, &p)| y[b] / h[b] * p)
            .sum();
        let derotate = if cpe.norm() > 0.0 { cpe.conj() / cpe.norm() } else { Complex64::new(1.0, 0.0) };
        let z: Vec<Complex64> = data_bins.iter().map(|&b| y[b] / h[b] * derotate).collect();
        let block = demap_symbols(&z, &noise_var, cfg.mcs.modulation)?;
        llrs.extend(il.deinterleave(&block)?);
        equalized.push(z);
    }

    let scrambled = viterbi_decode(&llrs, cfg.mcs.coding_rate, Termination::Best)?;

    // The SERVICE field is all zeros before scrambling, so its first seven
    // bits are the scrambler state.
    let state = scrambled[..7].iter().fold(0u8, |acc, &b| (acc << 1) | b);
    let (payload, fcs_ok) = match Scrambler::new(state) {
        Ok(mut s) => {
            let end = SERVICE_BITS + 8 * cfg.psdu_length;
            let bits: Vec<u8> = scrambled[7..end].iter().map(|b| b ^ s.next_bit()).collect();
            let mut psdu = bits_to_bytes(&bits[SERVICE_BITS - 7..]);
            let ok = check_fcs(&psdu);
            psdu.truncate(cfg.payload_length());
            (psdu, ok)
        }
        Err(_) => (vec![0u8; cfg.payload_length()], false),
    };

    // Reference constellation from the decoded stream.
    let coded = conv_encode(&scrambled, cfg.mcs.coding_rate)?;
    let reference: Vec<Vec<Complex64>> = coded
        .chunks_exact(cfg.n_cbps())
        .map(|blk| map_symbols(&il.interleave(blk)?, cfg.mcs.modulation))
        .collect::<Result<_>>()?;
    let (evm_percent, constellation_points) = data_aided_evm(&equalized, &reference);

    let ref_dbm = w.ref_power_dbm;
    let data_power = crate::math::mean_power(&samples[data_start..data_start + n_sym * sym_len]);
    let rssi_dbm = ref_dbm + lin_to_db(data_power);
    // Per-bin noise scaled to the whole sample bandwidth.
    let noise_dbm = ref_dbm + lin_to_db(noise_per_bin * n as f64 / n_used as f64);
    let per_subcarrier_power = layout
        .used()
        .iter()
        .map(|&k| ref_dbm + lin_to_db(h[layout.bin(k)].norm_sqr() / n_used as f64))
        .collect();

    Ok(RxFrame {
        payload,
        stats: RxStats {
            rssi_dbm,
            noise_dbm,
            snr_db: rssi_dbm - noise_dbm,
            evm_percent,
            per_subcarrier_power,
            fcs_ok,
            constellation_points,
        },
    })
}

/// EVM after a per-subcarrier least-squares gain refit against `reference`.
/// Returns the percentage and the refitted symbols.
pub(crate) fn data_aided_evm(
    symbols: &[Vec<Complex64>],
    reference: &[Vec<Complex64>],
) -> (f64, Vec<Complex64>) {
    let n_sc = symbols.first().map_or(0, |s| s.len());
    let mut gain = vec![Complex64::new(1.0, 0.0); n_sc];
    for (k, g) in gain.iter_mut().enumerate() {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (z, x) in symbols.iter().zip(reference) {
            num += z[k] * x[k].conj();
            den += x[k].norm_sqr();
        }
        if den > 0.0 && num.norm() > 0.0 {
            *g = num / den;
        }
    }
    let mut err = 0.0;
    let mut power = 0.0;
    let mut points = Vec::with_capacity(symbols.len() * n_sc);
    for (z, x) in symbols.iter().zip(reference) {
        for k in 0..n_sc {
            let c = z[k] / gain[k];
            err += (c - x[k]).norm_sqr();
            power += x[k].norm_sqr();
            points.push(c);
        }
    }
    let evm = if power > 0.0 { 100.0 * libm::sqrt(err / power) } else { 0.0 };
    (evm, points)
}
