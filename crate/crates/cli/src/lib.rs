//! Library side of the `gzgw` command-line tool: run configuration, the
//! seeded verification suite and its JSON report, and the subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suite;

pub use config::{RunConfig, Tolerances};
pub use error::{CliError, CliResult};
pub use report::{CheckRecord, Report};
pub use suite::run_verify;
