//! Link-level model of a WiFi-over-VLC transceiver chain.
//!
//! The crate is `no_std` (with `alloc`) and contains three parts:
//!
//! * [`phy`]: a single-stream 802.11n baseband transmitter and a
//!   genie-synchronized receiver (scrambler, BCC + puncturing, soft Viterbi,
//!   interleaver, QAM mapping, OFDM with pilots, CRC-32 FCS).
//! * [`impairments`]: the analog chain between two NICs (attenuator, mixers,
//!   power amplifier, LED front-end and optical path, photodiode, AGC) with
//!   capture taps at probe points A to E.
//! * [`freqplan`]: LO selection and validation for the IF conversion.
//!
//! Everything is a pure function of its inputs plus an explicit seed.

#![cfg_attr(not(feature = "std"), no_std)]
// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod freqplan;
pub mod impairments;
pub mod math;
pub mod noise;
pub mod phy;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use waveform::Waveform;
