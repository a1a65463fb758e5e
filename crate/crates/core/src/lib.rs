//! Numerical verification toolkit for free-energy upper bounds of dilute
//! Bose gases at positive temperature.

pub mod bound;
pub mod config;
pub mod contraction;
pub mod entropy;
pub mod error;
pub mod fock;
pub mod ideal_gas;
pub mod lattice;
pub mod lattice_sums;
pub mod scattering;
pub mod shells;
pub mod stochastic;
pub mod numerics;

pub use error::{Error, Result};
