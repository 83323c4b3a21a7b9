//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status if
//! any criterion fails.

use std::time::Instant;

use ptlab::commands::{diagnostics, exponent, pseudospectrum, wkb_certify};
use ptlab::config::ExperimentConfig;
use ptlab::parallel::WorkerPool;
use ptlab_core::operator::{build_hamiltonian, hermitian_part, pt_symmetry_defect};
use ptlab_core::pseudospectrum::{sweep_grid, Window};
use ptlab_core::scaling::{operator_identity_defect, random_coefficients};
use ptlab_core::spectral::{compute_spectrum, tameness_test, EigenReport};
use ptlab_core::{Complex64, PotentialSpec};

type Outcome = Result<String, String>;

struct Suite {
    failed: usize,
}

impl Suite {
    /// `shared_seconds` is time spent on inputs computed once for several criteria.
    fn check(&mut self, id: usize, name: &str, limit_seconds: f64, shared_seconds: f64, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut result = f();
        let secs = start.elapsed().as_secs_f64() + shared_seconds;
        if result.is_ok() && secs > limit_seconds {
            result = Err(format!("runtime {secs:.1} s exceeds {limit_seconds} s"));
        }
        match result {
            Ok(detail) => println!("PASS [{id:>2}] {name}: {detail} ({secs:.1} s)"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL [{id:>2}] {name}: {detail} ({secs:.1} s)");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn defaults(command: &str) -> ExperimentConfig {
    ExperimentConfig::resolve(None, &[], command).expect("default configuration is valid")
}

fn oscillator_oracle() -> Outcome {
    let spec = PotentialSpec::new(0.0, 1).map_err(|e| e.to_string())?;
    let report = compute_spectrum(&spec, 200, 20).map_err(|e| e.to_string())?;
    let mut ev_err = 0.0f64;
    let mut p_err = 0.0f64;
    for (k, (z, p)) in report.eigenvalues.iter().zip(&report.projection_norms).enumerate() {
        let exact = (2 * k + 1) as f64;
        ev_err = ev_err.max((z - exact).norm() / exact);
        p_err = p_err.max((p - 1.0).abs());
    }
    ensure(report.eigenvalues.len() == 20, || format!("only {} eigenvalues", report.eigenvalues.len()))?;
    ensure(ev_err < 1e-10, || format!("eigenvalue relative error {ev_err:e}"))?;
    ensure(p_err < 1e-10, || format!("projection norm error {p_err:e}"))?;
    let a = build_hamiltonian(&spec, 200).map_err(|e| e.to_string())?;
    let window = Window { re_min: -3.3, re_max: 41.7, im_min: -5.1, im_max: 5.3, nx: 46, ny: 27 };
    let grid = sweep_grid(&a, &window).map_err(|e| e.to_string())?;
    let mut grid_err = 0.0f64;
    for (z, v) in grid.samples() {
        let dist = (0..200).map(|k| (z - (2 * k + 1) as f64).norm()).fold(f64::INFINITY, f64::min);
        grid_err = grid_err.max((v - 1.0 / dist).abs() * dist);
    }
    ensure(grid_err < 1e-8, || format!("grid deviates from the distance map by {grid_err:e}"))?;
    Ok(format!("eigenvalue error {ev_err:.1e}, projection error {p_err:.1e}, grid error {grid_err:.1e}"))
}

fn structure_invariants() -> Outcome {
    for (beta, n) in [(1.0, 1u32), (1.0, 2)] {
        for dim in [100usize, 400] {
            let spec = PotentialSpec::new(beta, n).map_err(|e| e.to_string())?;
            let a = build_hamiltonian(&spec, dim).map_err(|e| e.to_string())?;
            let tag = format!("beta={beta}, n={n}, N={dim}");
            let pt = pt_symmetry_defect(&a);
            ensure(pt == 0.0, || format!("{tag}: PT defect {pt:e}"))?;
            let bw = a.effective_bandwidth();
            ensure(bw == (2 * n + 1) as usize, || format!("{tag}: bandwidth {bw}"))?;
            let h = hermitian_part(&a);
            for (r, c, v) in h.entries() {
                let expected = if r == c { Complex64::new((2 * r + 1) as f64, 0.0) } else { Complex64::new(0.0, 0.0) };
                ensure(v == expected, || format!("{tag}: Hermitian part entry ({r},{c}) = {v}"))?;
            }
        }
    }
    Ok(String::from("PT defect 0, bandwidth 2n+1, Hermitian part diag(2k+1) exactly"))
}

fn eigenvalue_reality(report: &EigenReport) -> Outcome {
    ensure(report.matrix_dim == 600 && report.reference_dim == 900, || String::from("unexpected sizes"))?;
    ensure(report.eigenvalues.len() == 10, || format!("{} eigenvalues", report.eigenvalues.len()))?;
    ensure(report.converged.iter().all(|&c| c), || format!("only {} of 10 converged", report.converged_count))?;
    let im_max = report.eigenvalues.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    ensure(im_max < 1e-6, || format!("max |Im| = {im_max:e}"))?;
    Ok(format!(
        "10 of 10 converged against N=900, max |Im| = {im_max:.1e}, lambda_1 = {:.8}, lambda_10 = {:.6}",
        report.eigenvalues[0].re, report.eigenvalues[9].re
    ))
}

fn basis_failure(report: &EigenReport) -> Outcome {
    let p = &report.projection_norms;
    ensure(p.len() >= 10, || String::from("fewer than 10 projection norms"))?;
    ensure(report.converged[2..10].iter().all(|&c| c), || String::from("some k in [3, 10] did not converge"))?;
    ensure(p[2..10].windows(2).all(|w| w[1] > w[0]), || format!("norms not increasing: {:?}", &p[2..10]))?;
    let ratio = p[9] / p[2];
    ensure(ratio > 10.0, || format!("|P_10|/|P_3| = {ratio}"))?;
    let v = tameness_test(report, 3.0, 10.0).map_err(|e| e.to_string())?;
    let (re, rp) = (v.exponential_fit.r_squared, v.polynomial_fit.r_squared);
    ensure(re > rp, || format!("exponential R2 {re} does not beat polynomial R2 {rp}"))?;
    Ok(format!("|P_3| = {:.4}, |P_10| = {:.4e}, ratio {ratio:.3e}, R2 exponential {re:.4} vs polynomial {rp:.4}", p[2], p[9]))
}

fn wkb_ladder(norm_only: bool, cert: &ptlab::formats::CertificateFile) -> Outcome {
    ensure(cert.entries.len() == 5, || format!("{} ladder entries", cert.entries.len()))?;
    if norm_only {
        ensure(cert.norm_band < 3.0, || format!("norm band {}", cert.norm_band))?;
        let q: Vec<String> = cert.entries.iter().map(|e| format!("{:.4}", e.norm_over_h_quarter)).collect();
        return Ok(format!("|psi|/h^(1/4) = [{}], band factor {:.4}", q.join(", "), cert.norm_band));
    }
    ensure(cert.strictly_decreasing, || String::from("residual ratios are not strictly decreasing"))?;
    let fit = cert.fit.ok_or("no decay fit")?;
    ensure(fit.slope < 0.0 && fit.r_squared > 0.99, || format!("slope {} with R2 {}", fit.slope, fit.r_squared))?;
    let c = cert.C.ok_or("no decay constant")?;
    ensure(c > 1.0, || format!("C = {c}"))?;
    let mut worst = 1.0f64;
    for e in &cert.entries[..3] {
        let f = (e.residual_algebraic / e.residual_direct).max(e.residual_direct / e.residual_algebraic);
        worst = worst.max(f);
        ensure(f <= 3.0, || format!("h = {}: algebraic {:e} vs direct {:e}", e.h, e.residual_algebraic, e.residual_direct))?;
    }
    let ratios: Vec<String> = cert.entries.iter().map(|e| format!("{:.3e}", e.residual_ratio)).collect();
    Ok(format!(
        "ratios [{}], slope {:.5}, R2 {:.5}, C = {c:.4}, cross-check factor {worst:.6}",
        ratios.join(", "),
        fit.slope,
        fit.r_squared
    ))
}

fn scaling_identity() -> Outcome {
    let mut parts = Vec::new();
    for (tau, seed) in [(2.0, 1u64), (5.0, 2)] {
        let v = random_coefficients(200, seed);
        let nodes = (56.0 * tau / 0.01) as usize + 1;
        let d = operator_identity_defect(&PotentialSpec::cubic(), tau, &v, 28.0, nodes).map_err(|e| e.to_string())?;
        ensure(d < 1e-8, || format!("tau = {tau}: relative defect {d:e}"))?;
        parts.push(format!("tau = {tau}: {d:.2e}"));
    }
    Ok(format!("relative defect {}", parts.join(", ")))
}

fn exponent_experiment() -> Outcome {
    let out = exponent::compute(&defaults("exponent")).map_err(|e| e.to_string())?;
    let f = &out.fit;
    ensure(f.trusted_points >= 3, || format!("{} trusted points", f.trusted_points))?;
    ensure((0.70..=0.95).contains(&f.exponent), || {
        format!("exponent {} (uncorrected {}) outside [0.70, 0.95]", f.exponent, f.exponent_raw)
    })?;
    ensure((f.control_exponent - 1.0).abs() <= 0.05, || format!("control exponent {}", f.control_exponent))?;
    Ok(format!(
        "exponent {:.4} (R2 {:.5}, target {:.4}, uncorrected {:.4}), control {:.4}, {} trusted points",
        f.exponent, f.exponent_fit.r_squared, f.target, f.exponent_raw, f.control_exponent, f.trusted_points
    ))
}

fn semigroup_growth() -> Outcome {
    let pool = WorkerPool::new(0).map_err(|e| e.to_string())?;
    let dims = [100usize, 200, 400];
    let mut curves = Vec::new();
    for &n in &dims {
        let a = build_hamiltonian(&PotentialSpec::cubic(), n).map_err(|e| e.to_string())?;
        curves.push(pool.semigroup(&a, 5.0, 20).map_err(|e| e.to_string())?);
    }
    let sups: Vec<f64> = curves.iter().map(|c| c.log10_norms.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    ensure(diagnostics::sup_increasing(&curves), || format!("sup log10 norms {sups:?} not increasing"))?;
    let mut unitary_err = 0.0f64;
    for &n in &dims {
        let a = build_hamiltonian(&PotentialSpec::new(0.0, 1).map_err(|e| e.to_string())?, n).map_err(|e| e.to_string())?;
        let c = pool.semigroup(&a, 5.0, 20).map_err(|e| e.to_string())?;
        for &l in &c.log10_norms {
            unitary_err = unitary_err.max((10f64.powf(l) - 1.0).abs());
        }
    }
    ensure(unitary_err <= 1e-10, || format!("beta = 0 norm deviates from 1 by {unitary_err:e}"))?;
    let s: Vec<String> = sups.iter().map(|v| format!("{v:.1}")).collect();
    Ok(format!("sup log10 norm over N = 100, 200, 400: [{}]; beta = 0 deviation {unitary_err:.1e}", s.join(", ")))
}

fn contour_reproduction() -> Outcome {
    let cfg = defaults("pseudospectrum");
    let out = pseudospectrum::compute(&cfg).map_err(|e| e.to_string())?;
    let r = &out.report;
    let eps = cfg.epsilons();
    ensure(r.matrix_dim == 400, || format!("N = {}", r.matrix_dim))?;
    ensure(r.levels.len() == eps.len(), || format!("{} levels", r.levels.len()))?;
    let (lo, hi) = (eps[0], eps[eps.len() - 1]);
    ensure((lo - 1e-7).abs() < 1e-20 && (hi - 10.0).abs() < 1e-12, || format!("ladder spans {lo}..{hi}"))?;
    ensure(r.nesting_samples > 0 && r.nesting_violations == 0, || format!("{} nesting violations", r.nesting_violations))?;
    let bad: Vec<f64> = r
        .levels
        .iter()
        .filter(|l| !(l.open_polylines > 0 && l.reaches_right_edge && l.has_exterior))
        .map(|l| l.epsilon)
        .collect();
    ensure(bad.is_empty() && r.all_levels_open_rightward, || format!("levels not opening rightward: {bad:?}"))?;
    ensure(r.failures.is_empty(), || format!("invariant failures: {:?}", r.failures))?;
    Ok(format!(
        "{} levels from {lo:e} to {hi:e}, all open and exiting the right edge, {} nesting samples without violation, grid {}x{}",
        r.levels.len(),
        r.nesting_samples,
        cfg.window.nx,
        cfg.window.ny
    ))
}

fn main() {
    let mut suite = Suite { failed: 0 };
    suite.check(1, "harmonic oscillator oracle", 30.0, 0.0, oscillator_oracle);
    suite.check(2, "structure invariants", 5.0, 0.0, structure_invariants);

    let start = Instant::now();
    let cubic = compute_spectrum(&PotentialSpec::cubic(), 600, 10);
    let shared = start.elapsed().as_secs_f64();
    suite.check(3, "eigenvalue reality", 300.0, shared, || eigenvalue_reality(cubic.as_ref().map_err(|e| e.to_string())?));

    let start = Instant::now();
    let wkb = wkb_certify::compute(&defaults("wkb-certify"));
    let wkb_seconds = start.elapsed().as_secs_f64();
    let cert = wkb.as_ref().map(|o| &o.certificate).map_err(|e| e.to_string());
    suite.check(4, "WKB residual decay", 120.0, wkb_seconds, || wkb_ladder(false, cert.clone()?));
    suite.check(5, "pseudomode norm law", 120.0, wkb_seconds, || wkb_ladder(true, cert.clone()?));

    suite.check(6, "scaling identity", 10.0, 0.0, scaling_identity);
    suite.check(7, "exponent experiment", 1200.0, 0.0, exponent_experiment);
    suite.check(8, "basis failure", 300.0, shared, || basis_failure(cubic.as_ref().map_err(|e| e.to_string())?));
    suite.check(9, "semigroup growth", 600.0, 0.0, semigroup_growth);
    suite.check(10, "pseudospectrum contours", 1800.0, 0.0, contour_reproduction);

    println!("{} of 10 criteria passed", 10 - suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
