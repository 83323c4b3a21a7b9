use ptlab_core::fit::linear_fit;
use ptlab_core::operator::build_hamiltonian;
use ptlab_core::resolvent::{smallest_singular_value, InverseIterationOptions};
use ptlab_core::scaling::{calibrate_b, log_power_exponent};
use ptlab_core::{Complex64, Error as CoreError, PotentialSpec};

use super::Summary;
use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::formats::{write_frontier_csv, write_json, ExponentFitFile, FrontierRow, RegionFile, ReportHeader};
use crate::parallel::WorkerPool;

pub struct ExponentOutcome {
    pub rows: Vec<FrontierRow>,
    pub fit: ExponentFitFile,
    pub summary: Summary,
}

/// `s_min(A_N - λ)` with `N ← ceil(1.5 N)` until two consecutive sizes agree
/// to the relative `agreement`, or `N` would exceed `dim_max`.
/// Returns `(s_min, N, trusted)`.
pub fn escalated_smin(spec: &PotentialSpec, lambda: Complex64, dim_start: usize, dim_max: usize, agreement: f64) -> Result<(f64, usize, bool)> {
    let opts = InverseIterationOptions::default();
    let smin = |n: usize| -> Result<Option<f64>> {
        match smallest_singular_value(&build_hamiltonian(spec, n)?, lambda, &opts) {
            Ok(e) => Ok(Some(e.s_min)),
            Err(CoreError::AtEigenvalue(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    let mut n = dim_start;
    let mut prev = smin(n)?;
    loop {
        let next = (3 * n).div_ceil(2);
        if next > dim_max {
            return Ok((prev.unwrap_or(0.0), n, false));
        }
        let cur = smin(next)?;
        if let (Some(a), Some(b)) = (prev, cur) {
            if (a - b).abs() <= agreement * b {
                return Ok((b, next, true));
            }
        }
        n = next;
        prev = cur;
    }
}

pub fn ray_radii(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| r_min * (r_max / r_min).powf(k as f64 / (points - 1) as f64)).collect()
}

/// Ray sweep, the three fits and the calibrated region.
pub fn compute(cfg: &ExperimentConfig) -> Result<ExponentOutcome> {
    let pool = WorkerPool::new(cfg.output.threads)?;
    let spec = cfg.spec()?;
    let control_spec = PotentialSpec::new(0.0, spec.n)?;
    let e = &cfg.exponent;
    let radii = ray_radii(e.r_min, e.r_max, e.points);
    let control = build_hamiltonian(&control_spec, e.dim_start)?;
    let rows = pool
        .map(&radii, |&r| -> Result<FrontierRow> {
            let lambda = Complex64::from_polar(r, e.theta);
            let (eps, dim, trusted) = escalated_smin(&spec, lambda, e.dim_start, e.dim_max, e.agreement)?;
            let control_epsilon = smallest_singular_value(&control, lambda, &InverseIterationOptions::default())?.s_min;
            Ok(FrontierRow { abs_lambda: r, re: lambda.re, im: lambda.im, epsilon: eps, dim, trusted, control_epsilon })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let used: Vec<&FrontierRow> = rows.iter().filter(|r| r.trusted && r.epsilon > 0.0 && r.epsilon < 1.0).collect();
    if used.len() < 3 {
        return Err(LabError::numerical(format!("only {} trusted ray points with epsilon < 1; need 3", used.len())));
    }
    let x: Vec<f64> = used.iter().map(|r| r.abs_lambda.ln()).collect();
    let corrected: Vec<f64> = used.iter().map(|r| ((1.0 / r.epsilon).ln() + r.abs_lambda.ln()).ln()).collect();
    let raw: Vec<f64> = used.iter().map(|r| (1.0 / r.epsilon).ln().ln()).collect();
    let exponent_fit = linear_fit(&x, &corrected)?;
    let raw_fit = linear_fit(&x, &raw)?;
    let cx: Vec<f64> = rows.iter().map(|r| r.abs_lambda.ln()).collect();
    let cy: Vec<f64> = rows.iter().map(|r| r.control_epsilon.ln()).collect();
    let control_fit = linear_fit(&cx, &cy)?;
    let log_correction_max = used.iter().map(|r| r.abs_lambda.ln() / (1.0 / r.epsilon).ln()).fold(0.0, f64::max);

    let region_exponent = log_power_exponent(spec.n);
    let frontier: Vec<(f64, f64)> = used.iter().map(|r| (r.epsilon, r.abs_lambda)).collect();
    let b = calibrate_b(&frontier, region_exponent, cfg.region.margin)?;
    let region = RegionFile { A: cfg.region.a_const, B: b, delta: cfg.region.delta, epsilon: cfg.region.epsilon, exponent: region_exponent };
    let untrusted: Vec<f64> = rows.iter().filter(|r| !r.trusted).map(|r| r.abs_lambda).collect();
    let mut warnings = Vec::new();
    if !untrusted.is_empty() {
        warnings.push(format!("{} ray points excluded: N escalation reached dim_max", untrusted.len()));
    }
    let fit = ExponentFitFile {
        header: ReportHeader::new(cfg),
        theta: e.theta,
        exponent: exponent_fit.slope,
        exponent_fit: exponent_fit.into(),
        exponent_raw: raw_fit.slope,
        raw_fit: raw_fit.into(),
        target: 1.0 / region_exponent,
        log_correction_max,
        control_exponent: control_fit.slope,
        control_fit: control_fit.into(),
        trusted_points: used.len(),
        untrusted_abs_lambda: untrusted,
        region,
    };
    Ok(ExponentOutcome { rows, fit, summary: Summary { files: Vec::new(), failures: Vec::new(), warnings } })
}

/// Writes `frontier.csv`, `fit.json` and `region.json`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExponentOutcome> {
    let mut out = compute(cfg)?;
    let dir = &cfg.output.dir;
    let files = vec![dir.join("frontier.csv"), dir.join("fit.json"), dir.join("region.json")];
    write_frontier_csv(&files[0], &out.rows)?;
    write_json(&files[1], &out.fit)?;
    write_json(&files[2], &out.fit.region)?;
    out.summary.files = files;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_are_geometric() {
        let r = ray_radii(10.0, 60.0, 3);
        assert!((r[1] - 600f64.sqrt()).abs() < 1e-12 && (r[2] - 60.0).abs() < 1e-12);
    }
}
