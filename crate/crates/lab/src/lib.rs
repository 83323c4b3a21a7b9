//! Command line, configuration, file formats and experiment drivers for
//! [`ptlab_core`].
//!
//! * [`config`]: the TOML experiment configuration and its overrides.
//! * [`formats`]: readers and writers for every emitted artifact.
//! * [`parallel`]: the worker pool behind grid sweeps and time series.
//! * [`commands`]: one driver per subcommand.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
