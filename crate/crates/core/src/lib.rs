//! Bidirectional algorithmic cooling on diagonal qubit states.
//!
//! The crate is `no_std` (it needs `alloc`). All states handled here are
//! diagonal in the computational basis, so a state of `n` qubits is a
//! probability vector of length `2^n` and every compression unitary is a
//! permutation of that vector.
//!
//! Index convention: qubit 1 (the target) is the most significant bit and
//! index 0 is `|0…0⟩`. Reset qubits occupy the last positions of the string.
//!
//! Modules:
//! - [`state`]: polarizations, diagonal states, tensor products, partial traces.
//! - [`permutation`]: basis permutations and their composition.
//! - [`single_shot`]: optimal bidirectional single-shot entropy compression.
//! - [`bqr`]: the bidirectional quantum refrigerator with qubit recycling.
//! - [`klocal`]: the 3-local staircase variant and its Fibonacci asymptotics.
//! - [`sampling`]: shot-noise bounds, exact sign-error probabilities and
//!   seeded Monte Carlo experiments.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bqr;
mod error;
pub mod klocal;
mod math;
pub mod permutation;
pub mod sampling;
pub mod single_shot;
pub mod state;

pub use error::{Error, Result};
pub use permutation::Permutation;
pub use state::{DiagonalState, Polarization, TargetMarginal};

/// Tolerance on total probability used when validating states.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
