//! Adiabatic dynamics of the generalized harmonic oscillator and its relatives:
//! integration, phase decomposition, canonical equivalences and last-multiplier checks.

pub mod dynamics;
pub mod error;
pub mod lagrange;
pub mod phases;
pub mod quadrature;
pub mod schedules;
pub mod spline;
pub mod transforms;

pub use error::{Error, Result};
