//! Experiments, file formats and configuration for the WiFi-over-VLC link
//! simulator. The signal processing lives in `wov-core`.

// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;

pub use error::{SimError, SimResult};
