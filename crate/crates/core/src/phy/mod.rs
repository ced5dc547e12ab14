//! Single-stream 802.11n baseband modem.

pub mod convolutional;
pub mod crc;
pub mod interleaver;
pub mod mcs;
pub mod modulation;
pub mod ofdm;
pub mod rx;
pub mod scrambler;
pub mod tx;
pub mod viterbi;

pub use convolutional::conv_encode;
pub use crc::fcs_crc32;
pub use interleaver::Interleaver;
pub use mcs::{Bandwidth, CodeRate, GuardInterval, McsParams, Modulation, PpduConfig};
pub use modulation::{demap_symbols, map_symbols};
pub use rx::{receive_ppdu, RxFrame, RxStats};
pub use scrambler::scramble;
pub use tx::{generate_ppdu, generate_ppdu_seeded};
pub use viterbi::{viterbi_decode, viterbi_decode_hard, Termination};
