//! Every artifact a command writes is read back through the crate's own
//! readers and compared with the in-memory result.

use std::path::Path;

use ptlab::commands::{diagnostics, exponent, matrix_dump, pseudospectrum, wkb_certify};
use ptlab::config::ExperimentConfig;
use ptlab::formats::*;
use ptlab_core::operator::build_hamiltonian;

fn config(command: &str, dir: &Path, overrides: &[&str]) -> ExperimentConfig {
    let mut all: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    all.push(format!("output.dir=\"{}\"", dir.display()));
    ExperimentConfig::resolve(None, &all, command).unwrap()
}

fn same_values(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x.is_nan() && y.is_nan()))
}

#[test]
fn pseudospectrum_artifacts_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        "pseudospectrum",
        tmp.path(),
        &[
            "operator.dim=60",
            "window.re_min=-2",
            "window.re_max=12",
            "window.im_min=-3",
            "window.im_max=3",
            "window.nx=24",
            "window.ny=16",
            "pseudospectrum.epsilons=[0.001, 0.01, 0.1]",
            "pseudospectrum.k_max=6",
        ],
    );
    let out = pseudospectrum::run(&cfg).unwrap();
    let dir = tmp.path();

    let grid = read_grid_csv(&dir.join("grid.csv"), out.grid.matrix_dim).unwrap();
    assert_eq!(grid.re_axis, out.grid.re_axis);
    assert_eq!(grid.im_axis, out.grid.im_axis);
    assert!(same_values(&grid.values, &out.grid.values));
    let reference = read_grid_csv(&dir.join("grid_reference.csv"), out.reference.matrix_dim).unwrap();
    assert!(same_values(&reference.values, &out.reference.values));

    let contours: ContoursFile = read_json(&dir.join("contours.json")).unwrap();
    assert_eq!(contours.to_set(), out.contours);
    assert_eq!(contours, ContoursFile::from_set(&out.contours, out.grid.matrix_dim));

    let rows = read_eigenvalues_csv(&dir.join("eigenvalues.csv")).unwrap();
    assert_eq!(rows, pseudospectrum::eigen_rows(&out.eigen));
    assert_eq!(rows[0].k, 1);

    let report: PseudospectrumReport = read_json(&dir.join("report.json")).unwrap();
    assert!(report.header.verify());
    assert_eq!(report.header.config, cfg);
    assert_eq!(report, out.report);
}

#[test]
fn wkb_artifacts_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("wkb-certify", tmp.path(), &["wkb.h=[0.05, 0.04, 0.03]", "wkb.crosslink_dim=200"]);
    let out = wkb_certify::run(&cfg).unwrap();
    let dir = tmp.path();

    let cert: CertificateFile = read_json(&dir.join("certificate.json")).unwrap();
    assert!(cert.header.verify());
    assert_eq!(cert, out.certificate);
    for (k, entry) in cert.entries.iter().enumerate() {
        let f = read_pseudomode_csv(&dir.join(&entry.pseudomode_file)).unwrap();
        let mode = &out.ladder.modes[k].samples;
        assert_eq!(f.nodes(), mode.nodes());
        assert_eq!(f.values(), mode.values());
        assert!((f.l2_norm() - entry.norm).abs() <= 1e-12 * entry.norm);
        let phys = read_pseudomode_csv(&dir.join(format!("pseudomode_{k}_physical.csv"))).unwrap();
        assert_eq!(phys.values(), out.unscaled[k].samples.values());
    }
    let region: RegionFile = read_json(&dir.join("region.json")).unwrap();
    assert_eq!(Some(region), cert.region);
}

#[test]
fn exponent_artifacts_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("exponent", tmp.path(), &["exponent.points=4", "exponent.r_max=20", "exponent.dim_start=120"]);
    let out = exponent::run(&cfg).unwrap();
    let dir = tmp.path();

    let rows = read_frontier_csv(&dir.join("frontier.csv")).unwrap();
    assert_eq!(rows, out.rows);
    let fit: ExponentFitFile = read_json(&dir.join("fit.json")).unwrap();
    assert!(fit.header.verify());
    assert_eq!(fit, out.fit);
    let region: RegionFile = read_json(&dir.join("region.json")).unwrap();
    assert_eq!(region, fit.region);
}

#[test]
fn diagnostics_artifacts_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        "diagnostics",
        tmp.path(),
        &["operator.dim=80", "diagnostics.k_max=6", "diagnostics.dims=[20, 40]", "diagnostics.steps=5"],
    );
    let out = diagnostics::run(&cfg).unwrap();
    let dir = tmp.path();

    let report: EigenReportFile = read_json(&dir.join("eigen_report.json")).unwrap();
    assert!(report.header.verify());
    assert_eq!(report, out.report);
    let rows = read_eigenvalues_csv(&dir.join("eigenvalues.csv")).unwrap();
    assert_eq!(rows.len(), report.eigenvalues.len());
    for (r, e) in rows.iter().zip(&report.eigenvalues) {
        assert_eq!((r.k, r.re, r.im, r.proj_norm, r.converged), (e.k, e.re, e.im, e.proj_norm, e.converged));
    }
    let semigroup = read_semigroup_csv(&dir.join("semigroup.csv")).unwrap();
    assert_eq!(semigroup, diagnostics::semigroup_rows(&out.curves));
}

#[test]
fn matrix_dump_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("matrix-dump", tmp.path(), &["operator.dim=30", "operator.n=2", "operator.beta=0.5"]);
    matrix_dump::run(&cfg).unwrap();
    let back = read_matrix_text(&tmp.path().join("matrix.txt")).unwrap();
    let a = build_hamiltonian(&cfg.spec().unwrap(), 30).unwrap();
    assert_eq!(back.to_dense(), a.to_dense());
    assert_eq!(back.bandwidth(), a.bandwidth());
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = config("exponent", Path::new("out"), &["exponent.theta=0.3", "region.bound=\"half-pi\""]);
    let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.content_hash(), cfg.content_hash());
}
