//! Decibel helpers over `libm`.

use num_complex::Complex64;

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

#[inline]
pub fn db_to_amp(db: f64) -> f64 {
    libm::pow(10.0, db / 20.0)
}

#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * libm::log10(lin)
}

/// Mean of |x|² over a slice; 0 for an empty slice.
pub fn mean_power(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64
}
