//! Per-symbol block interleaver for one HT spatial stream.

use alloc::vec;
use alloc::vec::Vec;

use super::mcs::{Bandwidth, McsParams};
use crate::error::{Error, Result};

/// Precomputed forward permutation: input bit `k` goes to output `perm[k]`.
#[derive(Debug, Clone)]
pub struct Interleaver {
    perm: Vec<usize>,
}

impl Interleaver {
    pub fn new(mcs: &McsParams, bw: Bandwidth) -> Self {
        let n_cbps = mcs.n_cbps(bw);
        let n_bpsc = mcs.n_bpsc();
        let (n_col, n_row) = match bw {
            Bandwidth::MHz20 => (13, 4 * n_bpsc),
            Bandwidth::MHz40 => (18, 6 * n_bpsc),
        };
        debug_assert_eq!(n_col * n_row, n_cbps);
        let s = (n_bpsc / 2).max(1);
        let perm = (0..n_cbps)
            .map(|k| {
                let i = n_row * (k % n_col) + k / n_col;
                s * (i / s) + (i + n_cbps - (n_col * i / n_cbps)) % s
            })
            .collect();
        Self { perm }
    }

    pub fn block_len(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy + Default>(&self, block: &[T]) -> Result<Vec<T>> {
        self.check(block.len())?;
        let mut out = vec![T::default(); block.len()];
        for (k, &v) in block.iter().enumerate() {
            out[self.perm[k]] = v;
        }
        Ok(out)
    }

    pub fn deinterleave<T: Copy + Default>(&self, block: &[T]) -> Result<Vec<T>> {
        self.check(block.len())?;
        Ok(self.perm.iter().map(|&j| block[j]).collect())
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.perm.len() {
            return Err(Error::Length { expected: self.perm.len(), got: len });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrong_block_length_rejected() {
        let il = Interleaver::new(&McsParams::new(0).unwrap(), Bandwidth::MHz20);
        assert!(il.interleave(&[0u8; 51]).is_err());
        assert!(il.deinterleave(&[0.0f64; 53]).is_err());
    }
}
