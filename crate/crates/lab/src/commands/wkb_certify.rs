use ptlab_core::hermite::project;
use ptlab_core::operator::build_hamiltonian;
use ptlab_core::resolvent::{smallest_singular_value, vector_residual, InverseIterationOptions};
use ptlab_core::scaling::{calibrate_b, log_power_exponent, unscale_pseudomode, ScalingParams, UnscaledMode};
use ptlab_core::wkb::{run_ladder, LadderOptions, LadderReport};
use ptlab_core::Error as CoreError;

use super::Summary;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats::{
    write_json, write_pseudomode_csv, CertificateEntry, CertificateFile, FitRecord, PhysicalPoint, RegionFile, ReportHeader,
};

pub struct WkbOutcome {
    pub ladder: LadderReport,
    pub unscaled: Vec<UnscaledMode>,
    pub certificate: CertificateFile,
    pub summary: Summary,
}

pub fn ladder_options(cfg: &ExperimentConfig) -> LadderOptions {
    LadderOptions {
        transport_order: cfg.wkb.transport_order,
        plateau_fraction: cfg.wkb.plateau_fraction,
        cross_check_count: cfg.wkb.cross_check_count,
        ..LadderOptions::default()
    }
}

fn pseudomode_name(k: usize) -> String {
    format!("pseudomode_{k}.csv")
}

/// Ladder, unscaled points, resolvent cross-link and the calibrated region.
pub fn compute(cfg: &ExperimentConfig) -> Result<WkbOutcome> {
    let spec = cfg.spec()?;
    let lambda = cfg.lambda0();
    let ladder = run_ladder(lambda, &cfg.wkb.h, &spec, &ladder_options(cfg))?;
    let decay = ladder.decay_constant();
    let a = build_hamiltonian(&spec, cfg.wkb.crosslink_dim)?;
    let mut warnings = ladder.warnings.clone();
    let mut failures = Vec::new();
    let mut unscaled = Vec::with_capacity(ladder.modes.len());
    let mut entries = Vec::with_capacity(ladder.modes.len());
    for (k, (entry, mode)) in ladder.entries.iter().zip(&ladder.modes).enumerate() {
        let params = ScalingParams::from_h(entry.h, spec.n)?;
        let un = unscale_pseudomode(mode, &params)?;
        let v = project(&un.samples, a.dim());
        let vr = vector_residual(&a, un.lambda_phys, &v);
        let s_min = match smallest_singular_value(&a, un.lambda_phys, &InverseIterationOptions::default()) {
            Ok(e) => Some(e.s_min),
            Err(CoreError::AtEigenvalue(_)) => None,
            Err(e) => return Err(e.into()),
        };
        if entry.eikonal_residual >= 1e-10 {
            failures.push(format!("eikonal residual {:e} at h = {}", entry.eikonal_residual, entry.h));
        }
        if s_min.is_some_and(|s| s > vr * (1.0 + 1e-9)) {
            failures.push(format!("s_min exceeds the pseudomode residual at h = {}", entry.h));
        }
        let r = &entry.residual;
        entries.push(CertificateEntry {
            lambda: [lambda.re, lambda.im],
            h: entry.h,
            x0: entry.point.x0,
            xi0: entry.point.xi0,
            R0: entry.r0,
            C2: entry.c2,
            N_trunc: entry.n_trunc,
            C1_fit: entry.c1_fit,
            residual_algebraic: r.algebraic,
            residual_direct: r.direct,
            norm: entry.norm,
            slope_fit: ladder.fit.map(|f| f.slope),
            residual_ratio: r.ratio,
            residual_interior: r.interior,
            residual_commutator: r.commutator,
            cross_checked: r.cross_checked,
            truncation_cap: entry.truncation_cap,
            eikonal_residual: entry.eikonal_residual,
            transport_residual: entry.transport_residual,
            norm_over_h_quarter: entry.norm_over_h_quarter(),
            norm_lower_bound: entry.norm_bounds.lower,
            norm_gaussian: entry.norm_bounds.gaussian,
            norm_upper_bound: entry.norm_bounds.upper,
            pseudomode_file: pseudomode_name(k),
            physical: PhysicalPoint {
                tau: params.tau,
                lambda_phys: [un.lambda_phys.re, un.lambda_phys.im],
                epsilon: un.residual_phys,
                inequality_margin: decay.map(|c| un.inequality_margin(&params, c)),
                crosslink_dim: a.dim(),
                vector_residual: vr,
                s_min,
                agreement_factor: vr / un.residual_phys,
            },
        });
        unscaled.push(un);
    }
    let exponent = log_power_exponent(spec.n);
    let frontier: Vec<(f64, f64)> = unscaled.iter().map(|u| (u.residual_phys, u.lambda_phys.norm())).collect();
    let region = match calibrate_b(&frontier, exponent, cfg.region.margin) {
        Ok(b) => Some(RegionFile { A: cfg.region.a_const, B: b, delta: cfg.region.delta, epsilon: cfg.region.epsilon, exponent }),
        Err(e) => {
            warnings.push(format!("region not calibrated: {e}"));
            None
        }
    };
    let certificate = CertificateFile {
        header: ReportHeader::new(cfg),
        lambda: [lambda.re, lambda.im],
        slope_fit: ladder.fit.map(|f| f.slope),
        fit: ladder.fit.map(FitRecord::from),
        C: decay,
        strictly_decreasing: ladder.strictly_decreasing(),
        norm_band: ladder.norm_band(),
        warnings: warnings.clone(),
        entries,
        region,
    };
    Ok(WkbOutcome { ladder, unscaled, certificate, summary: Summary { files: Vec::new(), failures, warnings } })
}

/// Writes `certificate.json`, `region.json` (when calibrated) and, per `h`,
/// `pseudomode_<k>.csv` and `pseudomode_<k>_physical.csv`.
pub fn run(cfg: &ExperimentConfig) -> Result<WkbOutcome> {
    let mut out = compute(cfg)?;
    let dir = &cfg.output.dir;
    let mut files = Vec::new();
    for (k, (mode, un)) in out.ladder.modes.iter().zip(&out.unscaled).enumerate() {
        let p = dir.join(pseudomode_name(k));
        write_pseudomode_csv(&p, &mode.samples)?;
        files.push(p);
        let p = dir.join(format!("pseudomode_{k}_physical.csv"));
        write_pseudomode_csv(&p, &un.samples)?;
        files.push(p);
    }
    let p = dir.join("certificate.json");
    write_json(&p, &out.certificate)?;
    files.push(p);
    if let Some(region) = &out.certificate.region {
        let p = dir.join("region.json");
        write_json(&p, region)?;
        files.push(p);
    }
    out.summary.files = files;
    Ok(out)
}
