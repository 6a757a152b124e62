//! Quantum dynamics of a two-component dark-state polariton in a washboard
//! magnetic field.
//!
//! The crate is organised bottom-up:
//!
//! * [`units`] fixes the internal unit system (ħ = 1, energies as angular
//!   frequencies in rad·s⁻¹, forces in rad·s⁻¹·m⁻¹).
//! * [`eit`] turns atomic and optical inputs into effective polariton
//!   parameters (mixing angle, group velocity, mass, forces, Bloch frequency).
//! * [`bands`] solves the Kronig-Penney band structure of the periodic
//!   potential felt by the second component.
//! * [`bessel`] provides integer-order Bessel functions of the first kind.
//! * [`lattice`] holds the single-band tilted tight-binding model with its
//!   exact Bessel propagator, a split-step numerical propagator and the
//!   analytic Bloch-oscillation trajectory.
//! * [`continuum`] propagates the full continuum Schrödinger equation on a
//!   grid and serves as the first-principles cross-check.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod bessel;
pub mod continuum;
pub mod eit;
pub mod error;
pub mod lattice;
pub mod series;
pub mod units;

pub use error::{Error, Result};
pub use series::TrajectorySeries;

/// Library version, recorded in run provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
