//! File formats, experiment configuration and the command-line front end
//! for `skillxfer-core`.

pub mod cli;
pub mod config;
mod error;
pub mod formats;

pub use error::{CliError, ConfigViolation, Result};
