//! Experiment runner for the qbattery engine: config parsing, figure
//! presets, sweeps and scaling studies, CSV and manifest output.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{parse_config, parse_config_with, ExperimentConfig, Mode, Overrides};
pub use error::{CliError, Result};
pub use output::{run, Manifest, RunReport};
