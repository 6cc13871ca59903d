//! Scenario files, output formats and subcommands of the `nuwalk` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use config::ScenarioConfig;
pub use error::{CliError, CliResult};
