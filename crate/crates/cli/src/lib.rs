//! Command-line front end for boxlab: box files, analysis reports and
//! the `make` / `analyze` / `verify` commands.

pub mod boxfile;
pub mod commands;
pub mod error;
pub mod report;

pub use boxfile::{BoxFile, ParseError};
pub use commands::{run, Cli, Outcome};
pub use error::CliError;
pub use report::{Report, Witness};
