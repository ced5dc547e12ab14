//! K = 7 binary convolutional code (generators 133, 171 octal) with the
//! 802.11 puncturing patterns.

use alloc::vec::Vec;

use super::mcs::CodeRate;
use crate::error::{Error, Result};

pub const CONSTRAINT_LENGTH: usize = 7;
pub const N_STATES: usize = 1 << (CONSTRAINT_LENGTH - 1);
pub const G0: u8 = 0o133;
pub const G1: u8 = 0o171;

/// Encoder output pair for `input` entering from `state`.
///
/// The shift register holds the current input at bit 6 and the oldest bit at
/// bit 0; `state` is the six most recent previous inputs (bit 5 newest).
#[inline]
pub fn branch_output(state: usize, input: u8) -> (u8, u8) {
    let reg = ((input as u32) << 6) | state as u32;
    (
        ((reg & G0 as u32).count_ones() & 1) as u8,
        ((reg & G1 as u32).count_ones() & 1) as u8,
    )
}

#[inline]
pub fn next_state(state: usize, input: u8) -> usize {
    ((input as usize) << 5) | (state >> 1)
}

/// Keep-mask over the mother-code stream A1 B1 A2 B2 ... for one period.
pub const fn puncture_pattern(rate: CodeRate) -> &'static [bool] {
    match rate {
        CodeRate::R1_2 => &[true, true],
        CodeRate::R2_3 => &[true, true, true, false],
        CodeRate::R3_4 => &[true, true, true, false, false, true],
        CodeRate::R5_6 => &[true, true, true, false, false, true, true, false, false, true],
    }
}

/// Rate-1/2 mother code, no puncturing. Starts from the zero state and does
/// not append tail bits.
pub fn encode_mother(bits: &[u8]) -> Vec<u8> {
    let mut state = 0usize;
    let mut out = Vec::with_capacity(bits.len() * 2);
    for &b in bits {
        let (a, c) = branch_output(state, b & 1);
        out.push(a);
        out.push(c);
        state = next_state(state, b & 1);
    }
    out
}

/// Encodes and punctures; output length is `bits.len() / rate`.
pub fn conv_encode(bits: &[u8], rate: CodeRate) -> Result<Vec<u8>> {
    let (num, _) = rate.ratio();
    if !bits.len().is_multiple_of(num) {
        return Err(Error::NonIntegralPuncture { input: bits.len() });
    }
    let pattern = puncture_pattern(rate);
    Ok(encode_mother(bits)
        .into_iter()
        .zip(pattern.iter().cycle())
        .filter_map(|(b, &keep)| keep.then_some(b))
        .collect())
}

/// Expands punctured soft values back onto the mother-code stream, inserting
/// zero (erasure) where bits were removed.
pub fn depuncture(values: &[f64], rate: CodeRate) -> Result<Vec<f64>> {
    let pattern = puncture_pattern(rate);
    let kept = pattern.iter().filter(|&&k| k).count();
    if !values.len().is_multiple_of(kept) {
        return Err(Error::Length {
            expected: values.len().div_ceil(kept) * kept,
            got: values.len(),
        });
    }
    let mut out = Vec::with_capacity(values.len() / kept * pattern.len());
    let mut it = values.iter();
    while it.len() > 0 {
        for &keep in pattern {
            out.push(if keep { *it.next().expect("length checked") } else { 0.0 });
        }
    }
    Ok(out)
}
