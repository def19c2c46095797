//! Simulation of space-time-coded harmonic-steering transmitter arrays:
//! switching schedule design, harmonic spectra, radiation patterns,
//! switch-loss circuit model and amplitude modulation by duty cycle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array_model;
pub mod circuit_model;
pub mod error;
pub mod harmonic_analysis;
pub mod io;
pub mod modulation;
pub mod reference;
pub mod schedule_design;
pub mod verify;

pub use error::{Error, Result};
