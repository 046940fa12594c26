//! Connection coefficients between ultraspherical polynomials and their
//! argument-doubled counterparts, with the difference operators, identities
//! and asymptotics they satisfy.
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod coeffs;
pub mod error;
pub mod identities;
pub mod orthopoly;
pub mod quadrature;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};
