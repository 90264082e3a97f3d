//! Command-line front end for `splitpack-core`: solving, verification,
//! generators, normalization and randomized experiments.

pub mod budget;
pub mod commands;
pub mod error;
pub mod experiment;

pub use commands::{run, Cli};
pub use error::CliError;
