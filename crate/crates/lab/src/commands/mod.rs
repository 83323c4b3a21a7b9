//! Experiment drivers behind the subcommands. Each `run` computes, writes its
//! artifacts into `output.dir` and returns the computed data; invariant
//! violations are listed in the outcome's `failures`.

pub mod diagnostics;
pub mod exponent;
pub mod matrix_dump;
pub mod pseudospectrum;
pub mod wkb_certify;

use std::path::PathBuf;

use crate::config::ExperimentConfig;
use crate::error::Result;

pub const COMMANDS: [&str; 5] = ["pseudospectrum", "wkb-certify", "exponent", "diagnostics", "matrix-dump"];

/// Files written and invariant violations found by one command.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Summary> {
    std::fs::create_dir_all(&cfg.output.dir)?;
    match cfg.command.as_str() {
        "pseudospectrum" => pseudospectrum::run(cfg).map(|o| o.summary),
        "wkb-certify" => wkb_certify::run(cfg).map(|o| o.summary),
        "exponent" => exponent::run(cfg).map(|o| o.summary),
        "diagnostics" => diagnostics::run(cfg).map(|o| o.summary),
        "matrix-dump" => matrix_dump::run(cfg),
        other => Err(crate::error::LabError::validation(format!("unknown command `{other}`"))),
    }
}
