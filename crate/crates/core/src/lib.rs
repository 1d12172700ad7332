//! Simulation toolkit for an IEEE 802.11ad preamble-based pulse-Doppler radar
//! used to aid beam alignment in vehicle-to-infrastructure links.
//!
//! The crate is organised around the processing chain:
//!
//! - [`waveform`]: Golay complementary pairs, CPHY/SCPHY preambles and
//!   RRC/RC pulse shaping.
//! - [`channel`]: multi-target echo simulation of a P-pulse preamble train.
//! - [`estimator`]: Golay matched filtering, delay-Doppler map and CFAR.
//! - [`planner`]: PRI/CPI/resolution trade-offs, radar sector geometry and
//!   duty ratio.
//! - [`link`]: link budget, MCS selection and average rate over a pass.
//! - [`mac`]: beacon-interval overhead accounting and misalignment Monte Carlo.

pub mod channel;
pub mod consts;
pub mod error;
pub mod estimator;
pub mod io;
pub mod link;
pub mod mac;
pub mod planner;
pub mod waveform;

pub use error::{Error, Result};
