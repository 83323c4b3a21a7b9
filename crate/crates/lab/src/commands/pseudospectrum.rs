use std::time::Instant;

use ptlab_core::contour::{extract_contours, nesting_check, polylines_well_formed, ContourSet};
use ptlab_core::operator::build_hamiltonian;
use ptlab_core::pseudospectrum::{trust_mask, ResolventGrid};
use ptlab_core::sandwich::{sandwich_check, NumericalRangeHull, DEFAULT_ANGLES};
use ptlab_core::spectral::{compare_sizes, eigensystem, reference_dim, EigenReport, Eigensystem};
use ptlab_core::Complex64;

use super::Summary;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats::{
    write_eigenvalues_csv, write_grid_csv, write_json, ContoursFile, EigenRow, LevelSummary, PseudospectrumReport,
    ReportHeader, SandwichSummary, Timing, TrustSummary,
};
use crate::parallel::WorkerPool;

pub struct PseudospectrumOutcome {
    pub grid: ResolventGrid,
    pub reference: ResolventGrid,
    pub contours: ContourSet,
    pub eigensystem: Eigensystem,
    pub eigen: EigenReport,
    pub report: PseudospectrumReport,
    pub summary: Summary,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn eigen_rows(report: &EigenReport) -> Vec<EigenRow> {
    report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, z)| EigenRow {
            k: k + 1,
            re: z.re,
            im: z.im,
            proj_norm: report.projection_norms[k],
            converged: report.converged[k],
        })
        .collect()
}

fn level_summary(grid: &ResolventGrid, contours: &ContourSet, idx: usize) -> LevelSummary {
    let eps = contours.epsilon_levels[idx];
    let lines = &contours.polylines[idx];
    let nx = grid.nx();
    LevelSummary {
        epsilon: eps,
        polylines: lines.len(),
        open_polylines: lines.iter().filter(|p| !p.closed).count(),
        reaches_right_edge: (0..grid.ny()).any(|iy| grid.value(nx - 1, iy) > 1.0 / eps),
        has_exterior: grid.values.iter().any(|&v| v <= 1.0 / eps),
    }
}

/// Grid at `N` and `1.5N`, contours, eigenvalues and the inclusion checks.
pub fn compute(cfg: &ExperimentConfig) -> Result<PseudospectrumOutcome> {
    let start = Instant::now();
    let pool = WorkerPool::new(cfg.output.threads)?;
    let spec = cfg.spec()?;
    let n = cfg.operator.dim;
    let n_ref = reference_dim(n);
    let a = build_hamiltonian(&spec, n)?;
    let a_ref = build_hamiltonian(&spec, n_ref)?;
    let window = cfg.window();
    let grid = pool.sweep(&a, &window)?;
    let reference = pool.sweep(&a_ref, &window)?;

    let eig_start = Instant::now();
    let limit = n / 4;
    let k = cfg.pseudospectrum.k_max.min(limit);
    let mut warnings = Vec::new();
    if cfg.pseudospectrum.k_max > limit {
        warnings.push(format!("k_max {} clipped to N/4 = {limit}", cfg.pseudospectrum.k_max));
    }
    let (coarse, fine) = pool.join(|| eigensystem(&a, k), || eigensystem(&a_ref, k + 4));
    let (coarse, fine) = (coarse?, fine?);
    let eigen = compare_sizes(&coarse, &fine, cfg.pseudospectrum.k_max > limit);
    let hull = NumericalRangeHull::compute(&a, DEFAULT_ANGLES)?;
    let eigen_seconds = eig_start.elapsed().as_secs_f64();

    let epsilons = cfg.epsilons();
    let contours = extract_contours(&grid, &epsilons)?;
    let nesting = nesting_check(&grid, &epsilons);
    let sandwich = sandwich_check(&coarse.all_eigenvalues, &hull, &grid, cfg.pseudospectrum.sandwich_epsilon);
    let trust = trust_mask(&grid, &reference, cfg.pseudospectrum.trust_tolerance)?;
    let lipschitz_violations = grid.lipschitz_violations();
    let levels: Vec<LevelSummary> = (0..epsilons.len()).map(|i| level_summary(&grid, &contours, i)).collect();

    let mut failures = Vec::new();
    if lipschitz_violations > 0 {
        failures.push(format!("{lipschitz_violations} adjacent grid pairs violate the 1-Lipschitz bound"));
    }
    if nesting.violations > 0 {
        failures.push(format!("{} nesting violations between consecutive levels", nesting.violations));
    }
    if !sandwich.is_clean() {
        failures.push(format!(
            "sandwich check: {} spectrum and {} numerical-range violations",
            sandwich.spectrum_violations.len(),
            sandwich.numerical_range_violations.len()
        ));
    }
    if !contours.polylines.iter().all(|lines| polylines_well_formed(&grid, lines)) {
        failures.push(String::from("a contour polyline is neither closed nor ends on the window boundary"));
    }

    let report = PseudospectrumReport {
        header: ReportHeader::new(cfg),
        matrix_dim: n,
        timing: Timing {
            sweep_seconds: grid.sweep_seconds,
            reference_sweep_seconds: reference.sweep_seconds,
            eigen_seconds,
            total_seconds: start.elapsed().as_secs_f64(),
        },
        trust: TrustSummary {
            tolerance: cfg.pseudospectrum.trust_tolerance,
            reference_dim: n_ref,
            trusted_count: trust.trusted_count,
            total: trust.trusted.len(),
            bounding_box: trust.bounding_box.map(|(a, b, c, d)| [a, b, c, d]),
            trusted_re_max: trust.trusted_re_max,
        },
        sandwich: SandwichSummary {
            epsilon: sandwich.epsilon,
            points_checked: sandwich.points_checked,
            spectrum_violations: sandwich.spectrum_violations.iter().copied().map(pair).collect(),
            numerical_range_violations: sandwich.numerical_range_violations.iter().copied().map(pair).collect(),
        },
        lipschitz_violations,
        nesting_samples: nesting.samples,
        nesting_violations: nesting.violations,
        all_levels_open_rightward: levels.iter().all(|l| l.open_polylines > 0 && l.reaches_right_edge && l.has_exterior),
        levels,
        converged_eigenvalues: eigen.converged_count,
        invariants_ok: failures.is_empty(),
        failures: failures.clone(),
    };
    Ok(PseudospectrumOutcome {
        grid,
        reference,
        contours,
        eigensystem: coarse,
        eigen,
        report,
        summary: Summary { files: Vec::new(), failures, warnings },
    })
}

/// Writes `grid.csv`, `grid_reference.csv`, `contours.json`, `eigenvalues.csv` and `report.json`.
pub fn run(cfg: &ExperimentConfig) -> Result<PseudospectrumOutcome> {
    let mut out = compute(cfg)?;
    let dir = &cfg.output.dir;
    let files = [
        dir.join("grid.csv"),
        dir.join("grid_reference.csv"),
        dir.join("contours.json"),
        dir.join("eigenvalues.csv"),
        dir.join("report.json"),
    ];
    write_grid_csv(&files[0], &out.grid)?;
    write_grid_csv(&files[1], &out.reference)?;
    write_json(&files[2], &ContoursFile::from_set(&out.contours, out.grid.matrix_dim))?;
    write_eigenvalues_csv(&files[3], &eigen_rows(&out.eigen))?;
    write_json(&files[4], &out.report)?;
    out.summary.files = files.to_vec();
    Ok(out)
}
