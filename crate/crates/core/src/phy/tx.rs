//! PSDU to complex-baseband PPDU.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::convolutional::conv_encode;
use super::crc::append_fcs;
use super::interleaver::Interleaver;
use super::mcs::{PpduConfig, SERVICE_BITS, TAIL_BITS};
use super::modulation::map_symbols;
use super::ofdm::{modulate_symbol, preamble, Layout};
use super::scrambler::scramble;
use crate::error::{Error, Result};
use crate::waveform::Waveform;

pub const DEFAULT_SCRAMBLER_SEED: u8 = 0b101_1101;

/// Bytes to bits, least significant bit first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).map(move |i| (b >> i) & 1)).collect()
}

pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b & 1) << i)))
        .collect()
}

/// Scrambled, tail-zeroed data-field bits for a PSDU (FCS included).
pub fn data_field_bits(psdu: &[u8], cfg: &PpduConfig, seed: u8) -> Result<Vec<u8>> {
    let total = cfg.n_symbols() * cfg.n_dbps();
    let mut bits = vec![0u8; SERVICE_BITS];
    bits.extend(bytes_to_bits(psdu));
    let tail_at = bits.len();
    bits.resize(total, 0);
    let mut scrambled = scramble(&bits, seed)?;
    scrambled[tail_at..tail_at + TAIL_BITS].fill(0);
    Ok(scrambled)
}

/// Constellation values of every data symbol, one `Vec` per OFDM symbol.
pub fn data_symbols(psdu: &[u8], cfg: &PpduConfig, seed: u8) -> Result<Vec<Vec<Complex64>>> {
    let bits = data_field_bits(psdu, cfg, seed)?;
    let coded = conv_encode(&bits, cfg.mcs.coding_rate)?;
    let il = Interleaver::new(&cfg.mcs, cfg.bandwidth);
    coded
        .chunks_exact(cfg.n_cbps())
        .map(|block| map_symbols(&il.interleave(block)?, cfg.mcs.modulation))
        .collect()
}

/// Appends the FCS to `payload` and builds the PPDU with the default scrambler seed.
pub fn generate_ppdu(payload: &[u8], cfg: &PpduConfig) -> Result<Waveform> {
    generate_ppdu_seeded(payload, cfg, DEFAULT_SCRAMBLER_SEED)
}

pub fn generate_ppdu_seeded(payload: &[u8], cfg: &PpduConfig, seed: u8) -> Result<Waveform> {
    cfg.validate()?;
    if payload.len() + 4 != cfg.psdu_length {
        return Err(Error::PsduLength { len: payload.len() + 4, max: cfg.max_psdu_length() });
    }
    let psdu = append_fcs(payload);
    let symbols = data_symbols(&psdu, cfg, seed)?;

    let layout = Layout::new(cfg.bandwidth);
    let n = layout.fft_size;
    let mut samples = preamble(&layout);
    let data_start = samples.len();
    let sym_len = n + cfg.guard_interval.cp_len(n);
    samples.reserve(symbols.len() * sym_len);

    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for (idx, values) in symbols.iter().enumerate() {
        bins.fill(Complex64::new(0.0, 0.0));
        for (&k, &v) in layout.data.iter().zip(values) {
            bins[layout.bin(k)] = v;
        }
        for (&k, p) in layout.pilots.iter().zip(layout.pilot_values(idx)) {
            bins[layout.bin(k)] = Complex64::new(p, 0.0);
        }
        modulate_symbol(&bins, cfg.guard_interval, layout.n_used(), &mut samples);
    }

    let mut w = Waveform::new(samples, cfg.bandwidth.sample_rate(), 0.0)?;
    w.data_start = Some(data_start);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::mcs::{Bandwidth, GuardInterval};
    use crate::phy::ofdm::preamble_len;

    #[test]
    fn bit_order_round_trip() {
        let b = [0x01u8, 0x80, 0xA5];
        let bits = bytes_to_bits(&b);
        assert_eq!(&bits[..8], &[1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(bits_to_bytes(&bits), b);
    }

    #[test]
    fn duration_follows_symbol_count() {
        let cfg = PpduConfig::for_payload(3, Bandwidth::MHz20, GuardInterval::Long, 1000).unwrap();
        let w = generate_ppdu(&[0x5A; 1000], &cfg).unwrap();
        // Independent arithmetic: 16-QAM 1/2 carries 104 data bits per symbol.
        let n_sym = (16 + 8 * (1000 + 4) + 6usize).div_ceil(104);
        assert_eq!(n_sym, 78);
        assert_eq!(w.len(), preamble_len(Bandwidth::MHz20) + n_sym * 80);
        assert!((w.duration_s() - (36e-6 + 78.0 * 4e-6)).abs() < 1e-12);
    }

    #[test]
    fn data_power_is_unity() {
        let cfg = PpduConfig::for_payload(5, Bandwidth::MHz40, GuardInterval::Short, 1500).unwrap();
        let payload: Vec<u8> = (0..1500).map(|i| (i * 37 % 251) as u8).collect();
        let w = generate_ppdu(&payload, &cfg).unwrap();
        let p = crate::math::mean_power(&w.samples[w.data_start.unwrap()..]);
        assert!((p - 1.0).abs() < 0.03, "{p}");
    }

    #[test]
    fn payload_length_must_match_config() {
        let cfg = PpduConfig::for_payload(0, Bandwidth::MHz20, GuardInterval::Long, 10).unwrap();
        assert!(generate_ppdu(&[0; 11], &cfg).is_err());
    }
}
