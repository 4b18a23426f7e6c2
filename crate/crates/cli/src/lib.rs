//! Configuration, experiment runners and CSV output for the `ddsim` command.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod scenarios;

pub use config::ExperimentConfig;
pub use error::{CliError, ConfigError};
pub use run::{run, Command};
