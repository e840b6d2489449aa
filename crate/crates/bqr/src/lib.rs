//! Command-line companion to `bqr-core`: parameter sweeps, figure data in
//! CSV/JSON, invariant suites and parallel shot sampling.

pub mod cli;
pub mod error;
pub mod figures;
pub mod grid;
pub mod sample;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{CliError, CliResult};
pub use sweep::SweepSpec;
