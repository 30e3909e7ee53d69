//! Weakly interacting Bose gas in a random potential.
//!
//! The crate covers the disorder-generated length and energy scales, analytic
//! predictions for localized and fragmented states, synthesis of Gaussian random
//! potentials, single-particle spectra, Gross–Pitaevskii ground states and fragment
//! analysis of converged densities.

pub mod analytic;
pub mod disorder;
pub mod error;
mod fft;
pub mod fragments;
pub mod grid;
pub mod meanfield;
pub mod scales;
pub mod spectrum;
pub mod stats;
pub mod warning;

pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use scales::{derive_scales, DisorderSpec, PhysicalParams, Scales};
pub use warning::{DomainWarning, WarningCode};
