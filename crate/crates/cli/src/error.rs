use crate::boxfile::ParseError;
use std::path::PathBuf;

/// Everything that ends a command with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("malformed report: {0}")]
    Report(String),
    #[error("stale digest: {path} changed since the report was written (expected {expected}, found {found})")]
    StaleDigest { path: PathBuf, expected: String, found: String },
    #[error(transparent)]
    Core(#[from] boxlab::Error),
    #[error("LP error: {0}")]
    Lp(#[from] boxlab::lp::LpError),
}
