//! 802.11n subcarrier layout, training fields and OFDM symbol (de)modulation.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::mcs::{Bandwidth, GuardInterval};
use super::scrambler::pilot_polarity;
use crate::fft::{fft, ifft};

/// Legacy long training sequence on subcarriers -26..=26.
const L_LTF: [i8; 53] = [
    1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 0, 1, -1, -1,
    1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1,
];

/// Fill tones of the 40 MHz HT-LTF on -5..=-2 and 2..=5.
const HT_LTF_40_FILL: [(i32, i8); 8] = [(-5, -1), (-4, -1), (-3, -1), (-2, 1), (2, -1), (3, 1), (4, 1), (5, -1)];

/// Nonzero L-STF tones on -26..=26 (every fourth subcarrier), as multiples of (1 + j).
const L_STF: [(i32, i8); 12] = [
    (-24, 1), (-20, -1), (-16, 1), (-12, -1), (-8, -1), (-4, 1),
    (4, -1), (8, -1), (12, 1), (16, 1), (20, 1), (24, 1),
];

/// Subcarrier map for one bandwidth.
#[derive(Debug, Clone)]
pub struct Layout {
    pub bandwidth: Bandwidth,
    pub fft_size: usize,
    /// Logical indices of data subcarriers, ascending.
    pub data: Vec<i32>,
    /// Logical indices of pilot subcarriers, ascending.
    pub pilots: Vec<i32>,
    /// Per-pilot base pattern for single-stream transmission.
    pub pilot_pattern: Vec<f64>,
    /// FFT bins carrying nothing in HT data symbols.
    pub null_bins: Vec<usize>,
    polarity: [f64; 127],
}

impl Layout {
    pub fn new(bandwidth: Bandwidth) -> Self {
        let (fft_size, edge, pilots, pattern): (usize, i32, Vec<i32>, Vec<f64>) = match bandwidth {
            Bandwidth::MHz20 => (64, 28, vec![-21, -7, 7, 21], vec![1.0, 1.0, 1.0, -1.0]),
            Bandwidth::MHz40 => (
                128,
                58,
                vec![-53, -25, -11, 11, 25, 53],
                vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
            ),
        };
        let inner = match bandwidth {
            Bandwidth::MHz20 => 0,
            Bandwidth::MHz40 => 1,
        };
        let used = |k: i32| k.abs() > inner && k.abs() <= edge;
        let data: Vec<i32> = (-edge..=edge).filter(|&k| used(k) && !pilots.contains(&k)).collect();
        let n = fft_size as i32;
        let null_bins = (-n / 2..n / 2)
            .filter(|&k| !used(k))
            .map(|k| k.rem_euclid(n) as usize)
            .collect();
        debug_assert_eq!(data.len(), bandwidth.n_data_subcarriers());
        Self {
            bandwidth,
            fft_size,
            data,
            pilots,
            pilot_pattern: pattern,
            null_bins,
            polarity: pilot_polarity(),
        }
    }

    #[inline]
    pub fn bin(&self, k: i32) -> usize {
        k.rem_euclid(self.fft_size as i32) as usize
    }

    /// Number of occupied (data + pilot) subcarriers.
    pub fn n_used(&self) -> usize {
        self.data.len() + self.pilots.len()
    }

    /// Data and pilot subcarriers in ascending order.
    pub fn used(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.data.iter().chain(self.pilots.iter()).copied().collect();
        v.sort_unstable();
        v
    }

    /// Pilot values for data symbol `n` (0-based), HT-mixed polarity offset 3.
    pub fn pilot_values(&self, n: usize) -> Vec<f64> {
        let p = self.polarity[(n + 3) % 127];
        let np = self.pilots.len();
        (0..np).map(|i| p * self.pilot_pattern[(n + i) % np]).collect()
    }

    /// HT-LTF values indexed by FFT bin (zero on unused bins).
    pub fn ht_ltf(&self) -> Vec<Complex64> {
        let mut bins = vec![Complex64::new(0.0, 0.0); self.fft_size];
        match self.bandwidth {
            Bandwidth::MHz20 => {
                for (i, &v) in L_LTF.iter().enumerate() {
                    bins[self.bin(i as i32 - 26)] = Complex64::new(v as f64, 0.0);
                }
                for (k, v) in [(-28, 1.0), (-27, 1.0), (27, -1.0), (28, -1.0)] {
                    bins[self.bin(k)] = Complex64::new(v, 0.0);
                }
            }
            Bandwidth::MHz40 => {
                // L-LTF copies centred on -32 and +32 with their DC tones set,
                // plus the fill tones around DC.
                for half in [-32, 32] {
                    for (i, &v) in L_LTF.iter().enumerate() {
                        let v = if v == 0 { 1 } else { v };
                        bins[self.bin(half + i as i32 - 26)] = Complex64::new(v as f64, 0.0);
                    }
                }
                for (k, v) in HT_LTF_40_FILL {
                    bins[self.bin(k)] = Complex64::new(v as f64, 0.0);
                }
            }
        }
        bins
    }

    /// Legacy field tones, duplicated with a 90 degree upper-half rotation at 40 MHz.
    fn legacy(&self, tones: &[(i32, Complex64)]) -> Vec<Complex64> {
        let mut bins = vec![Complex64::new(0.0, 0.0); self.fft_size];
        match self.bandwidth {
            Bandwidth::MHz20 => {
                for &(k, v) in tones {
                    bins[self.bin(k)] = v;
                }
            }
            Bandwidth::MHz40 => {
                for &(k, v) in tones {
                    bins[self.bin(k - 32)] = v;
                    bins[self.bin(k + 32)] = v * Complex64::new(0.0, 1.0);
                }
            }
        }
        bins
    }

    pub fn l_ltf(&self) -> Vec<Complex64> {
        let tones: Vec<(i32, Complex64)> = L_LTF
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i as i32 - 26, Complex64::new(v as f64, 0.0)))
            .collect();
        self.legacy(&tones)
    }

    pub fn l_stf(&self) -> Vec<Complex64> {
        let tones: Vec<(i32, Complex64)> = L_STF
            .iter()
            .map(|&(k, s)| (k, Complex64::new(s as f64, s as f64)))
            .collect();
        self.legacy(&tones)
    }

    /// Placeholder SIG-field symbol: BPSK on the legacy 52-tone grid driven by
    /// a fixed pseudo-random sequence. Receivers here never decode it.
    pub fn sig_symbol(&self, salt: usize) -> Vec<Complex64> {
        let tones: Vec<(i32, Complex64)> = (-26..=26)
            .filter(|&k| k != 0)
            .enumerate()
            .map(|(i, k)| (k, Complex64::new(self.polarity[(i + 7 * salt) % 127], 0.0)))
            .collect();
        self.legacy(&tones)
    }
}

/// Time-domain symbol of `len` samples (cyclic extension of one IFFT period),
/// scaled to unit mean power over the occupied tones.
pub fn synthesize(bins: &[Complex64], cp: usize, len: usize) -> Vec<Complex64> {
    let n = bins.len();
    let used = bins.iter().filter(|b| b.norm_sqr() > 0.0).map(|b| b.norm_sqr()).sum::<f64>();
    let mut body = bins.to_vec();
    ifft(&mut body);
    let scale = if used > 0.0 { 1.0 / libm::sqrt(used) } else { 0.0 };
    (0..len).map(|i| body[(i + n - cp % n) % n] * scale).collect()
}

/// OFDM-modulates one data symbol given per-bin values.
pub fn modulate_symbol(bins: &[Complex64], gi: GuardInterval, n_used: usize, out: &mut Vec<Complex64>) {
    let n = bins.len();
    let cp = gi.cp_len(n);
    let mut body = bins.to_vec();
    ifft(&mut body);
    let scale = 1.0 / libm::sqrt(n_used as f64);
    out.extend(body[n - cp..].iter().map(|s| s * scale));
    out.extend(body.iter().map(|s| s * scale));
}

/// Inverse of [`synthesize`] / [`modulate_symbol`] for the FFT window
/// starting at `start`: returns per-bin values such that a clean symbol
/// comes back with the transmitted constellation values.
pub fn demodulate_window(samples: &[Complex64], start: usize, n: usize, n_used: usize) -> Vec<Complex64> {
    let mut buf = samples[start..start + n].to_vec();
    fft(&mut buf);
    let scale = libm::sqrt(n_used as f64) / n as f64;
    for b in &mut buf {
        *b *= scale;
    }
    buf
}

/// Preamble field lengths in samples: (L-STF, L-LTF, L-SIG, HT-SIG, HT-STF, HT-LTF).
pub fn preamble_lengths(bw: Bandwidth) -> [usize; 6] {
    let s = bw.fft_size() / 64;
    [160 * s, 160 * s, 80 * s, 160 * s, 80 * s, 80 * s]
}

pub fn preamble_len(bw: Bandwidth) -> usize {
    preamble_lengths(bw).iter().sum()
}

/// Offset of the HT-LTF FFT window from the start of the PPDU.
pub fn ht_ltf_window(bw: Bandwidth) -> usize {
    let l = preamble_lengths(bw);
    l[..5].iter().sum::<usize>() + bw.fft_size() / 4
}

/// Offsets of the two L-LTF FFT windows.
pub fn l_ltf_windows(bw: Bandwidth) -> [usize; 2] {
    let l = preamble_lengths(bw);
    let start = l[0] + bw.fft_size() / 2;
    [start, start + bw.fft_size()]
}

/// Builds the full preamble.
pub fn preamble(layout: &Layout) -> Vec<Complex64> {
    let bw = layout.bandwidth;
    let n = layout.fft_size;
    let lens = preamble_lengths(bw);
    let mut out = Vec::with_capacity(preamble_len(bw));
    // L-STF: ten repetitions of a 16-sample (20 MHz) period.
    out.extend(synthesize(&layout.l_stf(), 0, lens[0]));
    // L-LTF: double-length guard then two long symbols.
    out.extend(synthesize(&layout.l_ltf(), n / 2, lens[1]));
    out.extend(synthesize(&layout.sig_symbol(0), n / 4, lens[2]));
    out.extend(synthesize(&layout.sig_symbol(1), n / 4, lens[3] / 2));
    out.extend(synthesize(&layout.sig_symbol(2), n / 4, lens[3] / 2));
    out.extend(synthesize(&layout.l_stf(), 0, lens[4]));
    out.extend(synthesize(&layout.ht_ltf(), n / 4, lens[5]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcarrier_counts() {
        for bw in Bandwidth::ALL {
            let l = Layout::new(bw);
            assert_eq!(l.data.len(), bw.n_data_subcarriers());
            assert_eq!(l.pilots.len(), bw.n_pilots());
            assert_eq!(l.null_bins.len() + l.n_used(), l.fft_size);
            let ltf = l.ht_ltf();
            for k in l.used() {
                assert_eq!(ltf[l.bin(k)].norm(), 1.0, "{bw:?} k={k}");
            }
            for &b in &l.null_bins {
                assert_eq!(ltf[b].norm(), 0.0);
            }
        }
        assert_eq!(Layout::new(Bandwidth::MHz20).null_bins.len(), 8);
        assert_eq!(Layout::new(Bandwidth::MHz40).null_bins.len(), 14);
    }

    #[test]
    fn preamble_has_nominal_length_and_power() {
        for bw in Bandwidth::ALL {
            let l = Layout::new(bw);
            let p = preamble(&l);
            assert_eq!(p.len(), preamble_len(bw));
            assert_eq!(p.len() as f64 / bw.sample_rate(), 36e-6);
            let pw = crate::math::mean_power(&p);
            assert!((pw - 1.0).abs() < 0.05, "{bw:?}: {pw}");
        }
    }

    #[test]
    fn ltf_windows_recover_training_values() {
        for bw in Bandwidth::ALL {
            let l = Layout::new(bw);
            let p = preamble(&l);
            let n_used = l.n_used();
            let ht = demodulate_window(&p, ht_ltf_window(bw), l.fft_size, n_used);
            let reference = l.ht_ltf();
            for k in l.used() {
                let b = l.bin(k);
                assert!((ht[b] - reference[b]).norm() < 1e-9);
            }
            let legacy = l.l_ltf();
            let legacy_used = legacy.iter().filter(|v| v.norm() > 0.0).count();
            for w in l_ltf_windows(bw) {
                let y = demodulate_window(&p, w, l.fft_size, legacy_used);
                for (a, b) in y.iter().zip(&legacy) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }
}
