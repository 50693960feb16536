//! Library half of the `qwalk2` binary: configuration resolution, the
//! subcommand implementations, and the deterministic serializers. The
//! binary in `main.rs` only parses arguments, sizes the thread pool, and
//! maps errors to exit codes (1 validation, 2 numerical tolerance, 3 I/O).

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, Result};
