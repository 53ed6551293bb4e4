//! Command-line front end: configuration, CSV ingestion and one function per
//! subcommand. The binary in `main.rs` only parses arguments and maps errors
//! to exit codes.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;

pub use config::{Format, RunConfig};
pub use error::{CliError, CliResult};
pub use ingest::{ingest_csv, IngestSpec};
