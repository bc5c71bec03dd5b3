//! Driven-system ergodicity numerics.
//!
//! Builds temporal ensembles of states and evolution operators for kicked and
//! quasiperiodic drives and compares their moments with Haar values.
//! Everything here is `no_std` with `alloc`; file formats and the CLI live in
//! the `qergo` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod drives;
pub mod ergodicity;
mod error;
mod fmath;
pub mod euler;
pub mod haar;
pub mod lattice;
pub mod qcore;
pub mod quadrature;
pub mod spinchain;
pub mod stats;

pub use error::{Error, Result};
pub use fmath::wrap_angle;
pub use qcore::{ComplexMatrix, StateVector, C64};
