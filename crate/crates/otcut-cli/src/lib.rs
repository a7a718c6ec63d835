//! Command implementations behind the `otcut` binary.

pub mod args;
pub mod report;
pub mod run;

pub use args::{Cli, Command};
pub use report::RunReport;
pub use run::{dispatch, CliError};
