//! Command-line front end: model files in, JSON reports and CSV time series out.

pub mod commands;
pub mod error;
pub mod model;
pub mod report;

pub use error::{CliError, CliResult};
