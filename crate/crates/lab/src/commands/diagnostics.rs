use ptlab_core::operator::build_hamiltonian;
use ptlab_core::semigroup::SemigroupCurve;
use ptlab_core::spectral::{compute_spectrum, tameness_test, EigenReport, TamenessVerdict};

use super::pseudospectrum::eigen_rows;
use super::Summary;
use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::formats::{
    write_eigenvalues_csv, write_json, write_semigroup_csv, EigenEntry, EigenReportFile, ReportHeader, SemigroupRow,
    SemigroupSummary, TamenessRecord,
};
use crate::parallel::WorkerPool;

pub struct DiagnosticsOutcome {
    pub eigen: EigenReport,
    pub tameness: Option<TamenessVerdict>,
    pub curves: Vec<SemigroupCurve>,
    pub report: EigenReportFile,
    pub summary: Summary,
}

pub fn semigroup_rows(curves: &[SemigroupCurve]) -> Vec<SemigroupRow> {
    curves
        .iter()
        .flat_map(|c| {
            let norms = c.norms();
            (0..c.times.len()).map(move |j| SemigroupRow {
                dim: c.matrix_dim,
                t: c.times[j],
                norm: norms[j],
                log10_norm: c.log10_norms[j],
                overflow: c.overflow[j],
            })
        })
        .collect()
}

pub fn tameness_record(v: &TamenessVerdict) -> TamenessRecord {
    TamenessRecord {
        verdict: v.label().to_string(),
        polynomial_fit: v.polynomial_fit.into(),
        exponential_fit: v.exponential_fit.into(),
        alpha_max: v.alpha_max,
        a_max: v.a_max,
        polynomial_bound_violated: v.polynomial_bound_violated,
        exponential_preferred: v.exponential_preferred,
        tame: v.tame,
    }
}

/// Sup of each curve strictly increases along the dimension ladder.
pub fn sup_increasing(curves: &[SemigroupCurve]) -> bool {
    curves.windows(2).all(|w| w[1].sup_log10() > w[0].sup_log10())
}

/// Eigen report at `N`, tameness verdict and the semigroup ladder.
pub fn compute(cfg: &ExperimentConfig) -> Result<DiagnosticsOutcome> {
    let pool = WorkerPool::new(cfg.output.threads)?;
    let spec = cfg.spec()?;
    let d = &cfg.diagnostics;
    let eigen = compute_spectrum(&spec, cfg.operator.dim, d.k_max)?;
    let mut warnings = Vec::new();
    if eigen.k_max_clipped {
        warnings.push(format!("k_max {} clipped to N/4 = {}", d.k_max, eigen.k_max));
    }
    let tameness = match tameness_test(&eigen, d.alpha_max, d.a_max) {
        Ok(v) => Some(v),
        Err(e @ ptlab_core::Error::InsufficientData(_)) => {
            warnings.push(format!("tameness test skipped: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let mut curves = Vec::with_capacity(d.dims.len());
    for &n in &d.dims {
        curves.push(pool.semigroup(&build_hamiltonian(&spec, n)?, d.t_max, d.steps)?);
    }
    let mut failures = Vec::new();
    if eigen.projection_norms.iter().any(|&p| p < 1.0 - 1e-10) {
        failures.push(String::from("a spectral projection norm is below 1"));
    }
    if curves.iter().any(|c| c.log10_norms[0] != 0.0) {
        failures.push(String::from("semigroup norm at t = 0 differs from 1"));
    }
    let eigenvalues = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, z)| EigenEntry {
            k: k + 1,
            re: z.re,
            im: z.im,
            overlap: eigen.overlaps[k],
            proj_norm: eigen.projection_norms[k],
            residual: eigen.residuals[k],
            converged: eigen.converged[k],
        })
        .collect();
    let report = EigenReportFile {
        header: ReportHeader::new(cfg),
        matrix_dim: eigen.matrix_dim,
        reference_dim: eigen.reference_dim,
        k_max: eigen.k_max,
        k_max_clipped: eigen.k_max_clipped,
        eigenvalues,
        converged_count: eigen.converged_count,
        defective: eigen.defective.clone(),
        conjugation_defect: eigen.conjugation_defect,
        tameness: tameness.as_ref().map(tameness_record),
        semigroup: curves
            .iter()
            .map(|c| SemigroupSummary { dim: c.matrix_dim, sup_log10_norm: c.sup_log10(), overflow: c.overflow.iter().any(|&o| o) })
            .collect(),
        semigroup_sup_increasing: sup_increasing(&curves),
        warnings: warnings.clone(),
    };
    if eigen.eigenvalues.is_empty() {
        return Err(LabError::numerical("no eigenvalues computed"));
    }
    Ok(DiagnosticsOutcome { eigen, tameness, curves, report, summary: Summary { files: Vec::new(), failures, warnings } })
}

/// Writes `eigen_report.json`, `eigenvalues.csv` and `semigroup.csv`.
pub fn run(cfg: &ExperimentConfig) -> Result<DiagnosticsOutcome> {
    let mut out = compute(cfg)?;
    let dir = &cfg.output.dir;
    let files = vec![dir.join("eigen_report.json"), dir.join("eigenvalues.csv"), dir.join("semigroup.csv")];
    write_json(&files[0], &out.report)?;
    write_eigenvalues_csv(&files[1], &eigen_rows(&out.eigen))?;
    write_semigroup_csv(&files[2], &semigroup_rows(&out.curves))?;
    out.summary.files = files;
    Ok(out)
}
