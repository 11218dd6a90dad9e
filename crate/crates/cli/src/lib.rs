//! Command-line front end: shape and function files, reports, commands.

mod cli;
pub mod formats;
pub mod report;

pub use cli::run_cli;
