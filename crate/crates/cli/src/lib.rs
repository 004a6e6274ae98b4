//! Command-line layer over the powerbasket engine: run configuration,
//! subcommands and table output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;

pub use config::RunConfig;
pub use error::CliError;
