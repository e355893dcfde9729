//! Scenario harness for the `qinfer` toolkit.
//!
//! Every subcommand reads one JSON config, runs a scenario and writes CSV or
//! JSON tables into an output directory. Outputs depend only on the config
//! and seed, never on the number of worker threads.

pub mod error;
pub mod scenarios;

pub use error::{CliError, CliResult};
pub use scenarios::{run_choi_roundtrip, run_discrimination, run_mle_experiment, run_qfi_sweep, RunOptions};
