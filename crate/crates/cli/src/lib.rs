//! Configuration, initial conditions and run orchestration for the `elsim`
//! command-line driver.

pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod suites;

pub use config::{load_config, RunConfig};
pub use error::{CliError, CliResult};
