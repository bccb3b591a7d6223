//! Configuration files, CSV/JSON/SVG output, the command line and the acceptance
//! driver built on top of `encircle-core`.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod examples;
pub mod output;
pub mod svg;

pub use error::{CliError, CliResult};
