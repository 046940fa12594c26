//! Command-line front end and file formats for `ultracc-core`.

pub mod cli;
pub mod error;
pub mod figures;
pub mod format;
pub mod suites;

pub use error::CliError;
