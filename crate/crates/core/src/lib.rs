//! Pseudo-spectral simulator for a Navier-Stokes / phase-field crystal model on periodic boxes.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod galerkin;
pub mod integrator;
pub mod io;
pub mod model;
pub(crate) mod par;
pub mod spectral;

pub use error::{Error, Result};
