use ptlab_core::operator::build_hamiltonian;

use super::Summary;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats::{read_matrix_text, write_matrix_text};

/// Writes `matrix.txt` with the `N`-truncation of the configured operator.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary> {
    let a = build_hamiltonian(&cfg.spec()?, cfg.operator.dim)?;
    let path = cfg.output.dir.join("matrix.txt");
    write_matrix_text(&path, &a)?;
    let mut summary = Summary { files: vec![path.clone()], ..Summary::default() };
    if read_matrix_text(&path)? != a {
        summary.failures.push(String::from("matrix.txt does not read back to the assembled matrix"));
    }
    Ok(summary)
}
