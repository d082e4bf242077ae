//! File formats, output helpers and the commands behind the `ramify` binary.

pub mod commands;
pub mod error;
pub mod format;
pub mod schema;
pub mod svg;

pub use error::{CliError, ExitCode};
