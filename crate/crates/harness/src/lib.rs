//! Configuration, presets, ledgers and commands of the `oldroyd` CLI.

pub mod commands;
pub mod config;
pub mod error;
pub mod ledger;
pub mod presets;
pub mod report;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
