//! Command-line companion to `deqmi`: JSON model configs, CSV output,
//! parallel Monte Carlo, and the oracle checks run by `deqmi selftest`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use error::CliError;
