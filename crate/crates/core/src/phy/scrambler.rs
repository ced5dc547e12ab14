//! x^7 + x^4 + 1 data scrambler.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Seven-bit LFSR. Bit 6 of the state holds x7, bit 0 holds x1.
#[derive(Debug, Clone, Copy)]
pub struct Scrambler {
    state: u8,
}

impl Scrambler {
    pub fn new(seed: u8) -> Result<Self> {
        let state = seed & 0x7F;
        if state == 0 {
            return Err(Error::ZeroScramblerSeed);
        }
        Ok(Self { state })
    }

    #[inline]
    pub fn next_bit(&mut self) -> u8 {
        let fb = ((self.state >> 6) ^ (self.state >> 3)) & 1;
        self.state = ((self.state << 1) | fb) & 0x7F;
        fb
    }
}

/// XORs `bits` (one bit per byte, 0 or 1) with the scrambler sequence.
pub fn scramble(bits: &[u8], seed: u8) -> Result<Vec<u8>> {
    let mut s = Scrambler::new(seed)?;
    Ok(bits.iter().map(|b| b ^ s.next_bit()).collect())
}

/// 127-periodic ±1 pilot polarity sequence (scrambler seeded with all ones,
/// 0 maps to +1).
pub fn pilot_polarity() -> [f64; 127] {
    let mut s = Scrambler::new(0x7F).expect("nonzero");
    let mut out = [0.0; 127];
    for p in &mut out {
        *p = if s.next_bit() == 0 { 1.0 } else { -1.0 };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_seed_rejected() {
        assert_eq!(scramble(&[0, 1], 0).unwrap_err(), Error::ZeroScramblerSeed);
        assert!(Scrambler::new(0x80).is_err());
    }

    #[test]
    fn sequence_has_period_127() {
        let zeros = [0u8; 254];
        let seq = scramble(&zeros, 0x5D).unwrap();
        assert_eq!(seq[..127], seq[127..]);
        assert_eq!(seq[..127].iter().filter(|&&b| b == 1).count(), 64);
    }

    #[test]
    fn all_ones_seed_prefix() {
        let seq = scramble(&[0u8; 8], 0x7F).unwrap();
        assert_eq!(seq, [0, 0, 0, 0, 1, 1, 1, 0]);
    }
}
