//! Spectral laboratory for glued cone geometries.
//!
//! The crate computes, from the form spectrum of a compact cross-section, the
//! spectrum of the cone boundary operator, reduces the Hodge-de Rham operator
//! to scalar radial channels `-u'' + gamma(gamma+1)/r^2 u = lambda u`, solves
//! the channel eigenproblems at finite gluing scale eps by two independent
//! routes (closed-form Bessel shooting and extrapolated finite differences),
//! assembles the limit operator selected by the extension space W, and
//! measures spectral convergence rates, small-eigenvalue laws and integer
//! cohomology predictions.

pub mod bessel;
pub mod channel;
pub mod cli;
pub mod config;
pub mod convergence;
pub mod cross_section;
pub mod error;
pub mod quad;
pub mod radial;
pub mod report;
pub mod rng;
pub mod spectra;
pub mod topology;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
