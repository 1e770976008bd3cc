//! Sweeps, tables and validation reports behind the `cvtele` command.

pub mod error;
pub mod format;
pub mod reports;
pub mod sweeps;

pub use error::{CliError, Result};
