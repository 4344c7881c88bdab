//! Explicit solutions, phase-space constants and Fourier propagators for the
//! linearized 3D Euler equations about a uniform mean flow.

pub mod cli;
pub mod error;
pub mod field;
pub mod model;
pub mod phase_spaces;
pub mod solutions;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
