//! Transporting the spin of a relativistic particle along classical rays.

pub mod dirac_oscillator;
pub mod dopri5;
pub mod em;
pub mod error;
pub mod pauli;
pub mod potential;
pub mod ray;
pub mod scenario;
pub mod spin_transport;
pub mod verify;

pub use error::{Error, Result};
