//! Command-line front end for `cluster-bounds`: argument parsing, the
//! serializable records behind csv/json output, and the command runners.

pub mod args;
pub mod commands;
pub mod records;

pub use args::Cli;
pub use commands::{run, Report, Status, UsageError};
