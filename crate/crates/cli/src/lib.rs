//! Command-line workbench and read-only HTTP layer for roadsight.

pub mod args;
pub mod commands;
pub mod failure;
pub mod serve;

pub use failure::{CliError, CliResult};
