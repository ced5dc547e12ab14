//! Soft-decision Viterbi decoder for the K = 7 code.

use alloc::vec;
use alloc::vec::Vec;

use super::convolutional::{branch_output, depuncture, next_state, N_STATES};
use super::mcs::CodeRate;
use crate::error::Result;

/// How the trellis ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Trace back from state 0 (tail bits were appended).
    Zero,
    /// Trace back from the best-metric state.
    Best,
}

/// Decodes punctured soft values. Positive values favour bit 1.
///
/// Path metrics are correlations, so ties resolve towards the predecessor
/// with the smaller state index, and the final state likewise.
pub fn viterbi_decode(llrs: &[f64], rate: CodeRate, termination: Termination) -> Result<Vec<u8>> {
    let mother = depuncture(llrs, rate)?;
    Ok(decode_mother(&mother, termination))
}

/// Hard-decision convenience wrapper: bits become ±1 soft values.
pub fn viterbi_decode_hard(bits: &[u8], rate: CodeRate, termination: Termination) -> Result<Vec<u8>> {
    let soft: Vec<f64> = bits.iter().map(|&b| if b & 1 == 1 { 1.0 } else { -1.0 }).collect();
    viterbi_decode(&soft, rate, termination)
}

fn decode_mother(mother: &[f64], termination: Termination) -> Vec<u8> {
    let n = mother.len() / 2;
    if n == 0 {
        return Vec::new();
    }

    // Predecessor table: next state s is reached from (s & 31) << 1 | x with
    // input s >> 5.
    let mut outputs = [[(0u8, 0u8); 2]; N_STATES];
    for (s, out) in outputs.iter_mut().enumerate() {
        let input = (s >> 5) as u8;
        for (x, o) in out.iter_mut().enumerate() {
            let prev = ((s & 31) << 1) | x;
            debug_assert_eq!(next_state(prev, input), s);
            *o = branch_output(prev, input);
        }
    }

    let mut metric = [f64::NEG_INFINITY; N_STATES];
    metric[0] = 0.0;
    let mut next = [0.0f64; N_STATES];
    let mut decisions: Vec<u64> = vec![0; n];

    for (t, pair) in mother.chunks_exact(2).enumerate() {
        let (la, lb) = (pair[0], pair[1]);
        // Gain for every (a, b) output combination.
        let gain = [[-la - lb, -la + lb], [la - lb, la + lb]];
        let mut dec = 0u64;
        for s in 0..N_STATES {
            let p0 = (s & 31) << 1;
            let (a0, b0) = outputs[s][0];
            let (a1, b1) = outputs[s][1];
            let m0 = metric[p0] + gain[a0 as usize][b0 as usize];
            let m1 = metric[p0 | 1] + gain[a1 as usize][b1 as usize];
            if m1 > m0 {
                next[s] = m1;
                dec |= 1 << s;
            } else {
                next[s] = m0;
            }
        }
        decisions[t] = dec;
        // Renormalize to keep magnitudes bounded on long frames.
        let top = next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (m, v) in metric.iter_mut().zip(next.iter()) {
            *m = v - top;
        }
    }

    let mut state = match termination {
        Termination::Zero => 0,
        Termination::Best => {
            let mut best = 0;
            for s in 1..N_STATES {
                if metric[s] > metric[best] {
                    best = s;
                }
            }
            best
        }
    };

    let mut bits = vec![0u8; n];
    for t in (0..n).rev() {
        bits[t] = (state >> 5) as u8;
        let x = ((decisions[t] >> state) & 1) as usize;
        state = ((state & 31) << 1) | x;
    }
    bits
}
