//! Command-line front end: run configuration, command implementations and output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Format, ModeKind, RunConfig};
pub use error::{CliError, Result};
pub use output::Report;
