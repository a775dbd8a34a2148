//! Simulation toolkit for excitation-conserving XY models in a linear
//! (Stark) potential on ladder-shaped qubit arrays.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: device graphs, potentials, fixed-excitation sector bases,
//!   sparse Hamiltonians and states.
//! * [`evolution`]: dense eigenbasis and Krylov propagation, quench runner.
//! * [`observables`]: densities, Hamming distance, imbalance, QFI,
//!   correlations, fits and spectra.
//! * [`spectral`]: gap-ratio statistics, eigenstate expectation values,
//!   overlap distributions and fragment classification.
//! * [`protocol`]: initial-state selection and ensemble quench runs.
//! * [`cli`]: the command-line front end driving the other modules.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod evolution;
pub mod model;
pub mod observables;
pub mod protocol;
pub mod spectral;

pub use error::{Error, Result};
