//! Batch experiment harness around `osim-core`: configuration, the
//! `generate` / `select` / `evaluate` / `compare` commands and their outputs.

pub mod commands;
pub mod config;
pub mod error;

pub use error::{CliError, CliResult};
