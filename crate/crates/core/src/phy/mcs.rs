//! Single-stream 802.11n MCS table and PPDU parameters.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    /// Coded bits per subcarrier.
    pub const fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeRate {
    R1_2,
    R2_3,
    R3_4,
    R5_6,
}

impl CodeRate {
    pub const ALL: [CodeRate; 4] = [CodeRate::R1_2, CodeRate::R2_3, CodeRate::R3_4, CodeRate::R5_6];

    /// (numerator, denominator)
    pub const fn ratio(self) -> (usize, usize) {
        match self {
            CodeRate::R1_2 => (1, 2),
            CodeRate::R2_3 => (2, 3),
            CodeRate::R3_4 => (3, 4),
            CodeRate::R5_6 => (5, 6),
        }
    }

    pub fn as_f64(self) -> f64 {
        let (n, d) = self.ratio();
        n as f64 / d as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bandwidth {
    MHz20,
    MHz40,
}

impl Bandwidth {
    pub const ALL: [Bandwidth; 2] = [Bandwidth::MHz20, Bandwidth::MHz40];

    pub const fn mhz(self) -> u32 {
        match self {
            Bandwidth::MHz20 => 20,
            Bandwidth::MHz40 => 40,
        }
    }

    pub fn from_mhz(mhz: u32) -> Option<Self> {
        match mhz {
            20 => Some(Bandwidth::MHz20),
            40 => Some(Bandwidth::MHz40),
            _ => None,
        }
    }

    pub const fn sample_rate(self) -> f64 {
        match self {
            Bandwidth::MHz20 => 20e6,
            Bandwidth::MHz40 => 40e6,
        }
    }

    pub const fn fft_size(self) -> usize {
        match self {
            Bandwidth::MHz20 => 64,
            Bandwidth::MHz40 => 128,
        }
    }

    /// Data subcarriers per OFDM symbol.
    pub const fn n_data_subcarriers(self) -> usize {
        match self {
            Bandwidth::MHz20 => 52,
            Bandwidth::MHz40 => 108,
        }
    }

    pub const fn n_pilots(self) -> usize {
        match self {
            Bandwidth::MHz20 => 4,
            Bandwidth::MHz40 => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GuardInterval {
    Short,
    Long,
}

impl GuardInterval {
    pub const ALL: [GuardInterval; 2] = [GuardInterval::Short, GuardInterval::Long];

    /// Cyclic prefix length in samples for the given FFT size.
    pub const fn cp_len(self, fft_size: usize) -> usize {
        match self {
            GuardInterval::Short => fft_size / 8,
            GuardInterval::Long => fft_size / 4,
        }
    }

    /// OFDM symbol duration in microseconds.
    pub const fn symbol_us(self) -> f64 {
        match self {
            GuardInterval::Short => 3.6,
            GuardInterval::Long => 4.0,
        }
    }
}

/// Modulation and coding for one single-stream HT MCS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct McsParams {
    pub index: u8,
    pub modulation: Modulation,
    pub coding_rate: CodeRate,
}

impl McsParams {
    pub fn new(index: u8) -> Result<Self> {
        use CodeRate::*;
        use Modulation::*;
        let (modulation, coding_rate) = match index {
            0 => (Bpsk, R1_2),
            1 => (Qpsk, R1_2),
            2 => (Qpsk, R3_4),
            3 => (Qam16, R1_2),
            4 => (Qam16, R3_4),
            5 => (Qam64, R2_3),
            6 => (Qam64, R3_4),
            7 => (Qam64, R5_6),
            _ => return Err(Error::InvalidMcs(index)),
        };
        Ok(Self { index, modulation, coding_rate })
    }

    pub fn all() -> impl Iterator<Item = McsParams> {
        (0..8).map(|i| McsParams::new(i).expect("0..8 is valid"))
    }

    pub const fn n_bpsc(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    pub const fn n_cbps(&self, bw: Bandwidth) -> usize {
        self.n_bpsc() * bw.n_data_subcarriers()
    }

    pub const fn n_dbps(&self, bw: Bandwidth) -> usize {
        let (num, den) = self.coding_rate.ratio();
        self.n_cbps(bw) * num / den
    }

    /// PHY rate in Mbit/s.
    pub fn data_rate_mbps(&self, bw: Bandwidth, gi: GuardInterval) -> f64 {
        self.n_dbps(bw) as f64 / gi.symbol_us()
    }
}

/// Longest frame (preamble included) the PPDU may occupy, in microseconds.
pub const MAX_PPDU_DURATION_US: f64 = 5484.0;

/// HT-mixed preamble: L-STF, L-LTF, L-SIG, HT-SIG, HT-STF, one HT-LTF.
pub const PREAMBLE_US: f64 = 8.0 + 8.0 + 4.0 + 8.0 + 4.0 + 4.0;

pub const SERVICE_BITS: usize = 16;
pub const TAIL_BITS: usize = 6;
pub const FCS_BYTES: usize = 4;

/// Parameters the receiver learns out-of-band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpduConfig {
    pub mcs: McsParams,
    pub bandwidth: Bandwidth,
    pub guard_interval: GuardInterval,
    /// PSDU length in bytes, FCS included.
    pub psdu_length: usize,
}

impl PpduConfig {
    pub fn new(
        mcs: McsParams,
        bandwidth: Bandwidth,
        guard_interval: GuardInterval,
        psdu_length: usize,
    ) -> Result<Self> {
        let cfg = Self { mcs, bandwidth, guard_interval, psdu_length };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config for a payload of `payload_len` bytes plus the FCS.
    pub fn for_payload(
        mcs_index: u8,
        bandwidth: Bandwidth,
        guard_interval: GuardInterval,
        payload_len: usize,
    ) -> Result<Self> {
        Self::new(McsParams::new(mcs_index)?, bandwidth, guard_interval, payload_len + FCS_BYTES)
    }

    pub fn validate(&self) -> Result<()> {
        let max = self.max_psdu_length();
        if self.psdu_length < FCS_BYTES || self.psdu_length > max {
            return Err(Error::PsduLength { len: self.psdu_length, max });
        }
        Ok(())
    }

    pub fn payload_length(&self) -> usize {
        self.psdu_length - FCS_BYTES
    }

    pub fn n_dbps(&self) -> usize {
        self.mcs.n_dbps(self.bandwidth)
    }

    pub fn n_cbps(&self) -> usize {
        self.mcs.n_cbps(self.bandwidth)
    }

    /// Number of data OFDM symbols.
    pub fn n_symbols(&self) -> usize {
        n_symbols_for(self.psdu_length, self.n_dbps())
    }

    pub fn duration_us(&self) -> f64 {
        PREAMBLE_US + self.n_symbols() as f64 * self.guard_interval.symbol_us()
    }

    /// Largest PSDU (FCS included) whose PPDU fits the duration bound and the
    /// 16-bit HT length field.
    pub fn max_psdu_length(&self) -> usize {
        let max_sym = ((MAX_PPDU_DURATION_US - PREAMBLE_US) / self.guard_interval.symbol_us()
            + 1e-9) as usize;
        let bits = max_sym * self.n_dbps() - SERVICE_BITS - TAIL_BITS;
        (bits / 8).min(65_535)
    }
}

pub(crate) fn n_symbols_for(psdu_length: usize, n_dbps: usize) -> usize {
    (SERVICE_BITS + 8 * psdu_length + TAIL_BITS).div_ceil(n_dbps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ndbps_is_integral_fraction_of_ncbps() {
        for mcs in McsParams::all() {
            for bw in Bandwidth::ALL {
                let (n, d) = mcs.coding_rate.ratio();
                assert_eq!(mcs.n_dbps(bw) * d, mcs.n_cbps(bw) * n);
            }
        }
    }

    #[test]
    fn anchor_rates() {
        let m0 = McsParams::new(0).unwrap();
        let m7 = McsParams::new(7).unwrap();
        assert_eq!(m0.modulation, Modulation::Bpsk);
        assert_eq!(m0.coding_rate, CodeRate::R1_2);
        assert_eq!(m7.modulation, Modulation::Qam64);
        assert!((m7.data_rate_mbps(Bandwidth::MHz40, GuardInterval::Short) - 150.0).abs() < 1e-9);
        assert!((m0.data_rate_mbps(Bandwidth::MHz20, GuardInterval::Short) - 7.2).abs() < 0.05);
        assert!((m0.data_rate_mbps(Bandwidth::MHz20, GuardInterval::Long) - 6.5).abs() < 1e-9);
        assert!(McsParams::new(8).is_err());
    }

    #[test]
    fn psdu_bounds() {
        let cfg = PpduConfig::for_payload(0, Bandwidth::MHz20, GuardInterval::Long, 1000).unwrap();
        assert_eq!(cfg.psdu_length, 1004);
        assert!(cfg.duration_us() <= MAX_PPDU_DURATION_US);
        let max = cfg.max_psdu_length();
        let at_max = PpduConfig { psdu_length: max, ..cfg };
        assert!(at_max.duration_us() <= MAX_PPDU_DURATION_US);
        let over = PpduConfig { psdu_length: max + 1, ..cfg };
        assert!(over.validate().is_err());
        assert!(over.duration_us() > MAX_PPDU_DURATION_US || max == 65_535);
        assert!(PpduConfig::new(cfg.mcs, cfg.bandwidth, cfg.guard_interval, 3).is_err());
    }
}
