//! Seeded randomness shared by the chain model and the experiments.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Circularly-symmetric complex Gaussian sample with E|n|² = `variance`.
#[inline]
pub fn complex_gaussian(rng: &mut SimRng, variance: f64) -> Complex64 {
    let s = libm::sqrt(variance / 2.0);
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

/// Uniform random bytes.
pub fn rand_bytes(rng: &mut SimRng, len: usize) -> alloc::vec::Vec<u8> {
    use rand::RngCore;
    let mut v = alloc::vec![0u8; len];
    rng.fill_bytes(&mut v);
    v
}

#[inline]
pub fn gaussian(rng: &mut SimRng) -> f64 {
    StandardNormal.sample(rng)
}
