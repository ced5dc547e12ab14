//! In-place radix-2 FFT for the OFDM symbol sizes (64 and 128 points).

use core::f64::consts::PI;
use num_complex::Complex64;

/// Forward transform, no scaling.
pub fn fft(buf: &mut [Complex64]) {
    transform(buf, false);
}

/// Inverse transform, no scaling (caller divides by N as needed).
pub fn ifft(buf: &mut [Complex64]) {
    transform(buf, true);
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT size must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let w_len = Complex64::new(libm::cos(ang), libm::sin(ang));
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}
