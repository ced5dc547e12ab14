//! Gray-mapped BPSK/QPSK/16-QAM/64-QAM with unit average energy, and a
//! max-log soft demapper.

use alloc::vec::Vec;
use num_complex::Complex64;

use super::mcs::Modulation;
use crate::error::{Error, Result};

/// Amplitude levels per axis indexed by the axis bit label (MSB first).
const PAM2: [f64; 2] = [-1.0, 1.0];
const PAM4: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];
const PAM8: [f64; 8] = [-7.0, -5.0, -1.0, -3.0, 7.0, 5.0, 1.0, 3.0];

fn axis(m: Modulation) -> (&'static [f64], usize, f64) {
    match m {
        Modulation::Bpsk => (&PAM2, 1, 1.0),
        Modulation::Qpsk => (&PAM2, 1, libm::sqrt(2.0)),
        Modulation::Qam16 => (&PAM4, 2, libm::sqrt(10.0)),
        Modulation::Qam64 => (&PAM8, 3, libm::sqrt(42.0)),
    }
}

fn label(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
}

/// Maps bits (one per byte) to constellation points.
pub fn map_symbols(bits: &[u8], m: Modulation) -> Result<Vec<Complex64>> {
    let n_bpsc = m.bits_per_symbol();
    if !bits.len().is_multiple_of(n_bpsc) {
        return Err(Error::Length { expected: bits.len().div_ceil(n_bpsc) * n_bpsc, got: bits.len() });
    }
    let (levels, per_axis, norm) = axis(m);
    Ok(bits
        .chunks_exact(n_bpsc)
        .map(|c| {
            if m == Modulation::Bpsk {
                Complex64::new(levels[label(c)], 0.0)
            } else {
                let i = levels[label(&c[..per_axis])];
                let q = levels[label(&c[per_axis..])];
                Complex64::new(i / norm, q / norm)
            }
        })
        .collect())
}

/// All points of a constellation, indexed by their bit label.
pub fn constellation(m: Modulation) -> Vec<Complex64> {
    let n = m.bits_per_symbol();
    (0..1usize << n)
        .map(|v| {
            let bits: Vec<u8> = (0..n).rev().map(|k| ((v >> k) & 1) as u8).collect();
            map_symbols(&bits, m).expect("exact length")[0]
        })
        .collect()
}

/// Nearest constellation point.
pub fn slice(y: Complex64, m: Modulation) -> Complex64 {
    let (levels, _, norm) = axis(m);
    let nearest = |v: f64| {
        levels
            .iter()
            .map(|l| l / norm)
            .min_by(|a, b| libm::fabs(a - v).total_cmp(&libm::fabs(b - v)))
            .expect("non-empty")
    };
    match m {
        Modulation::Bpsk => Complex64::new(nearest(y.re), 0.0),
        _ => Complex64::new(nearest(y.re), nearest(y.im)),
    }
}

fn axis_llrs(y: f64, levels: &[f64], per_axis: usize, norm: f64, noise_var: f64, out: &mut Vec<f64>) {
    for bit in 0..per_axis {
        let shift = per_axis - 1 - bit;
        let mut d0 = f64::INFINITY;
        let mut d1 = f64::INFINITY;
        for (lab, &l) in levels.iter().enumerate() {
            let d = (y - l / norm) * (y - l / norm);
            if (lab >> shift) & 1 == 0 {
                d0 = d0.min(d);
            } else {
                d1 = d1.min(d);
            }
        }
        out.push((d0 - d1) / noise_var);
    }
}

/// Max-log LLRs, positive favouring bit 1. `noise_var` is E|n|² per symbol.
pub fn demap_symbols(symbols: &[Complex64], noise_var: &[f64], m: Modulation) -> Result<Vec<f64>> {
    if symbols.len() != noise_var.len() {
        return Err(Error::Length { expected: symbols.len(), got: noise_var.len() });
    }
    let (levels, per_axis, norm) = axis(m);
    let mut out = Vec::with_capacity(symbols.len() * m.bits_per_symbol());
    for (y, &nv) in symbols.iter().zip(noise_var) {
        let nv = nv.max(1e-12);
        axis_llrs(y.re, levels, per_axis, norm, nv, &mut out);
        if m != Modulation::Bpsk {
            axis_llrs(y.im, levels, per_axis, norm, nv, &mut out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Modulation; 4] = [Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64];

    #[test]
    fn bpsk_mapping() {
        let s = map_symbols(&[0, 1], Modulation::Bpsk).unwrap();
        assert_eq!(s, [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn unit_average_energy() {
        for m in ALL {
            let pts = constellation(m);
            let p = pts.iter().map(|c| c.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((p - 1.0).abs() < 1e-12, "{m:?}: {p}");
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for m in [Modulation::Qam16, Modulation::Qam64] {
            let pts = constellation(m);
            let dmin = 2.0 / axis(m).2;
            for (a, pa) in pts.iter().enumerate() {
                for (b, pb) in pts.iter().enumerate() {
                    if ((pa - pb).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((a ^ b).count_ones(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn hard_round_trip_is_identity() {
        let mut x: u64 = 0xDEADBEEF;
        let bits: Vec<u8> = (0..10_008)
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (x >> 63) as u8
            })
            .collect();
        for m in ALL {
            let n = bits.len() / m.bits_per_symbol() * m.bits_per_symbol();
            let syms = map_symbols(&bits[..n], m).unwrap();
            let nv = alloc::vec![1.0; syms.len()];
            let llr = demap_symbols(&syms, &nv, m).unwrap();
            let hard: Vec<u8> = llr.iter().map(|&l| (l > 0.0) as u8).collect();
            assert_eq!(hard, bits[..n]);
        }
    }

    #[test]
    fn length_checked() {
        assert!(map_symbols(&[0, 1, 1], Modulation::Qam16).is_err());
    }
}
