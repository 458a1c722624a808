//! Density-matrix simulation of variational circuits whose two-qubit gates are
//! executed remotely through a possibly adversarial entanglement resource.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command-line driver live in the `kraus-vqa` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod ansatz;
pub mod channel;
pub mod error;
pub mod expressibility;
pub mod gates;
pub mod haar;
pub mod local;
pub mod matrix;
pub mod protocol;
pub mod seed;
pub mod state;
pub mod stats;
pub mod trainability;
pub mod vqe;

pub use channel::KrausChannel;
pub use error::{Error, Result};
pub use gates::Pauli;
pub use matrix::ComplexMatrix;
pub use state::{DensityMatrix, Observable};
