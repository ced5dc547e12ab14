use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{lin_to_db, mean_power};

/// Complex-baseband sample stream.
///
/// `ref_power_dbm` is the physical power that a mean `|x|²` of 1 represents,
/// so the absolute power of any segment is `ref_power_dbm + 10 log10(mean |x|²)`.
/// Gains that change the physical level scale the samples; gains that only
/// renormalize the numeric range (AGC) move `ref_power_dbm` instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub ref_power_dbm: f64,
    /// Nominal RF/IF center frequency the samples are referenced to, in Hz.
    pub center_hz: f64,
    /// Index of the first data-field sample, when the waveform is a PPDU.
    pub data_start: Option<usize>,
}

impl Waveform {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, ref_power_dbm: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Length { expected: 1, got: 0 });
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample"));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidParameter("sample rate must be positive"));
        }
        Ok(Self {
            samples,
            sample_rate,
            ref_power_dbm,
            center_hz: 0.0,
            data_start: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Mean |x|² over the whole waveform.
    pub fn mean_power(&self) -> f64 {
        mean_power(&self.samples)
    }

    /// Absolute mean power of the whole waveform in dBm.
    pub fn power_dbm(&self) -> f64 {
        self.ref_power_dbm + lin_to_db(self.mean_power())
    }

    /// Absolute mean power of the data field (whole waveform when unknown).
    pub fn data_power_dbm(&self) -> f64 {
        let start = self.data_start.unwrap_or(0).min(self.samples.len());
        self.ref_power_dbm + lin_to_db(mean_power(&self.samples[start..]))
    }

    pub fn scale(&mut self, amplitude: f64) {
        for s in &mut self.samples {
            *s *= amplitude;
        }
    }
}
