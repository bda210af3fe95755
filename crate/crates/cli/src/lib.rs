//! Command-line frontend for `qtime-core`: QMAT/QPOVM file I/O, per-state
//! analyses, certificate pipelines and seeded ensemble runs.

pub mod commands;
pub mod ensemble;
pub mod error;
pub mod qmat;

pub use commands::{run, Cli, Command};
pub use error::{CliError, ParseError};
