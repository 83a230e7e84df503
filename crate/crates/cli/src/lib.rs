//! Library side of the `pkit` command-line tool.

pub mod commands;
pub mod error;
pub mod format;
pub mod fuzz;
pub mod problem;

pub use error::{CliError, CliResult};
