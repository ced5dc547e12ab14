use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the modem, the chain model and the frequency planner.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scrambler seed of zero locks the LFSR.
    ZeroScramblerSeed,
    /// Bit, byte or sample count does not fit the operation.
    Length { expected: usize, got: usize },
    /// Punctured output would not be an integral number of bits.
    NonIntegralPuncture { input: usize },
    /// MCS index outside 0..=7.
    InvalidMcs(u8),
    /// PSDU violates the length bounds of the PPDU.
    PsduLength { len: usize, max: usize },
    /// Waveform sample rate does not match the PPDU bandwidth.
    SampleRate { expected: f64, got: f64 },
    /// Receiver could not find the frame in the waveform.
    SyncNotFound,
    /// A parameter is outside its valid range.
    InvalidParameter(&'static str),
    /// Waveform has zero power where a nonzero one is required.
    ZeroPower,
    /// A frequency plan violates at least one hardware constraint.
    FrequencyPlan(alloc::vec::Vec<crate::freqplan::Violation>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroScramblerSeed => write!(f, "scrambler seed must be nonzero"),
            Error::Length { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::NonIntegralPuncture { input } => {
                write!(f, "{input} bits do not puncture to an integral length")
            }
            Error::InvalidMcs(i) => write!(f, "MCS index {i} outside 0..=7"),
            Error::PsduLength { len, max } => {
                write!(f, "PSDU length {len} outside 0..={max} bytes")
            }
            Error::SampleRate { expected, got } => {
                write!(f, "sample rate {got} Hz does not match {expected} Hz")
            }
            Error::SyncNotFound => write!(f, "frame not found in waveform"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::ZeroPower => write!(f, "waveform has zero power"),
            Error::FrequencyPlan(v) => {
                write!(f, "frequency plan infeasible:")?;
                for violation in v {
                    write!(f, " {violation};")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
