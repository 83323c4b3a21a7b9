//! Writers and readers for every artifact the commands emit.
//!
//! CSV files carry a fixed header line; numbers are written in Rust's
//! shortest round-trip form, so reading a file back reproduces the values
//! bit for bit. JSON documents are `serde` structs defined here.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ptlab_core::banded::{BandedComplexMatrix, BasisTag};
use ptlab_core::contour::{ContourSet, Polyline};
use ptlab_core::pseudospectrum::ResolventGrid;
use ptlab_core::{Complex64, GridFunction};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};

pub const GRID_HEADER: &str = "re,im,resolvent_norm";
pub const EIGENVALUES_HEADER: &str = "k, re, im, proj_norm, converged";
pub const PSEUDOMODE_HEADER: &str = "x, re_psi, im_psi";
pub const SEMIGROUP_HEADER: &str = "N,t,norm,log10_norm,overflow";
pub const FRONTIER_HEADER: &str = "abs_lambda,re,im,epsilon,dim,trusted,control_epsilon";

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn csv_reader(path: &Path, header: &str) -> Result<csv::Reader<File>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let expected: Vec<&str> = header.split(',').map(str::trim).collect();
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != expected {
        return Err(LabError::validation(format!("{}: expected header `{header}`, found `{}`", path.display(), found.join(","))));
    }
    Ok(r)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| LabError::validation(format!("{}: bad field {i} in record {:?}", path.display(), rec)))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

/// Provenance block embedded in every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub command: String,
    pub version: String,
    pub content_hash: String,
    pub config: ExperimentConfig,
}

impl ReportHeader {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        ReportHeader {
            command: cfg.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            content_hash: cfg.content_hash(),
            config: cfg.clone(),
        }
    }

    /// The stored hash matches the embedded configuration.
    pub fn verify(&self) -> bool {
        self.config.content_hash() == self.content_hash
    }
}

// ---------------------------------------------------------------- grid CSV

pub fn write_grid_csv(path: &Path, grid: &ResolventGrid) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{GRID_HEADER}")?;
    for (z, v) in grid.samples() {
        writeln!(w, "{},{},{}", z.re, z.im, v)?;
    }
    w.flush()?;
    Ok(())
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn read_grid_csv(path: &Path, matrix_dim: usize) -> Result<ResolventGrid> {
    let mut r = csv_reader(path, GRID_HEADER)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push((field::<f64>(&rec, 0, path)?, field::<f64>(&rec, 1, path)?, field::<f64>(&rec, 2, path)?));
    }
    let re_axis = sorted_unique(rows.iter().map(|r| r.0).collect());
    let im_axis = sorted_unique(rows.iter().map(|r| r.1).collect());
    let (nx, ny) = (re_axis.len(), im_axis.len());
    if nx * ny != rows.len() {
        return Err(LabError::validation(format!("{}: points do not form a rectangular grid", path.display())));
    }
    let mut values = vec![f64::NAN; nx * ny];
    for (k, &(re, im, v)) in rows.iter().enumerate() {
        let (ix, iy) = (k % nx, k / nx);
        if re_axis[ix] != re || im_axis[iy] != im {
            return Err(LabError::validation(format!("{}: points are not in row-major order", path.display())));
        }
        values[k] = v;
    }
    Ok(ResolventGrid { re_axis, im_axis, values, matrix_dim, sweep_seconds: 0.0 })
}

// ------------------------------------------------------------ contour JSON

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineRecord {
    pub closed: bool,
    /// `[re, im]` pairs.
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourLevel {
    pub epsilon: f64,
    pub log10_epsilon: f64,
    pub polylines: Vec<PolylineRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContoursFile {
    pub matrix_dim: usize,
    pub levels: Vec<ContourLevel>,
}

impl ContoursFile {
    pub fn from_set(set: &ContourSet, matrix_dim: usize) -> Self {
        let levels = set
            .epsilon_levels
            .iter()
            .zip(&set.polylines)
            .map(|(&epsilon, lines)| ContourLevel {
                epsilon,
                log10_epsilon: epsilon.log10(),
                polylines: lines
                    .iter()
                    .map(|p| PolylineRecord { closed: p.closed, vertices: p.vertices.iter().map(|z| [z.re, z.im]).collect() })
                    .collect(),
            })
            .collect();
        ContoursFile { matrix_dim, levels }
    }

    pub fn to_set(&self) -> ContourSet {
        ContourSet {
            epsilon_levels: self.levels.iter().map(|l| l.epsilon).collect(),
            polylines: self
                .levels
                .iter()
                .map(|l| {
                    l.polylines
                        .iter()
                        .map(|p| Polyline { closed: p.closed, vertices: p.vertices.iter().map(|v| Complex64::new(v[0], v[1])).collect() })
                        .collect()
                })
                .collect(),
        }
    }
}

// --------------------------------------------------------- eigenvalues CSV

/// One line of the eigenvalue table; `k` counts from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRow {
    pub k: usize,
    pub re: f64,
    pub im: f64,
    pub proj_norm: f64,
    pub converged: bool,
}

pub fn write_eigenvalues_csv(path: &Path, rows: &[EigenRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{EIGENVALUES_HEADER}")?;
    for r in rows {
        writeln!(w, "{}, {}, {}, {}, {}", r.k, r.re, r.im, r.proj_norm, r.converged)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_eigenvalues_csv(path: &Path) -> Result<Vec<EigenRow>> {
    let mut r = csv_reader(path, EIGENVALUES_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(EigenRow {
            k: field(&rec, 0, path)?,
            re: field(&rec, 1, path)?,
            im: field(&rec, 2, path)?,
            proj_norm: field(&rec, 3, path)?,
            converged: field(&rec, 4, path)?,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------- pseudomode CSV

pub fn write_pseudomode_csv(path: &Path, f: &GridFunction) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{PSEUDOMODE_HEADER}")?;
    for (x, v) in f.nodes().iter().zip(f.values()) {
        writeln!(w, "{}, {}, {}", x, v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Samples with trapezoid weights on the stored nodes.
pub fn read_pseudomode_csv(path: &Path) -> Result<GridFunction> {
    let mut r = csv_reader(path, PSEUDOMODE_HEADER)?;
    let (mut x, mut v) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        x.push(field(&rec, 0, path)?);
        v.push(Complex64::new(field(&rec, 1, path)?, field(&rec, 2, path)?));
    }
    Ok(GridFunction::with_trapezoid(x, v)?)
}

// ----------------------------------------------------------- semigroup CSV

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupRow {
    pub dim: usize,
    pub t: f64,
    /// `‖exp(-itA)‖`, infinite when it overflows `f64`.
    pub norm: f64,
    pub log10_norm: f64,
    pub overflow: bool,
}

pub fn write_semigroup_csv(path: &Path, rows: &[SemigroupRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{SEMIGROUP_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.dim, r.t, r.norm, r.log10_norm, r.overflow)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_semigroup_csv(path: &Path) -> Result<Vec<SemigroupRow>> {
    let mut r = csv_reader(path, SEMIGROUP_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(SemigroupRow {
            dim: field(&rec, 0, path)?,
            t: field(&rec, 1, path)?,
            norm: field(&rec, 2, path)?,
            log10_norm: field(&rec, 3, path)?,
            overflow: field(&rec, 4, path)?,
        });
    }
    Ok(out)
}

// ------------------------------------------------------------ frontier CSV

/// One ray point of the exponent experiment; `epsilon = s_min(A_N - λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierRow {
    pub abs_lambda: f64,
    pub re: f64,
    pub im: f64,
    pub epsilon: f64,
    pub dim: usize,
    pub trusted: bool,
    /// `s_min` of the `β = 0` operator at the same point.
    pub control_epsilon: f64,
}

pub fn write_frontier_csv(path: &Path, rows: &[FrontierRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{FRONTIER_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{},{}", r.abs_lambda, r.re, r.im, r.epsilon, r.dim, r.trusted, r.control_epsilon)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_frontier_csv(path: &Path) -> Result<Vec<FrontierRow>> {
    let mut r = csv_reader(path, FRONTIER_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(FrontierRow {
            abs_lambda: field(&rec, 0, path)?,
            re: field(&rec, 1, path)?,
            im: field(&rec, 2, path)?,
            epsilon: field(&rec, 3, path)?,
            dim: field(&rec, 4, path)?,
            trusted: field(&rec, 5, path)?,
            control_epsilon: field(&rec, 6, path)?,
        });
    }
    Ok(out)
}

// ------------------------------------------------------------- matrix text

/// Header `N bandwidth`, then `row col re im` for every stored entry in
/// row-major band order.
pub fn write_matrix_text(path: &Path, a: &BandedComplexMatrix) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{} {}", a.dim(), a.bandwidth())?;
    for (r, c, v) in a.entries() {
        writeln!(w, "{} {} {} {}", r, c, v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_text(path: &Path) -> Result<BandedComplexMatrix> {
    let bad = |m: String| LabError::validation(format!("{}: {m}", path.display()));
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
    let hv: Vec<usize> = header.split_whitespace().map(|s| s.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad(format!("bad header `{header}`")))?;
    let [dim, bw] = hv[..] else {
        return Err(bad(format!("header must be `N bandwidth`, got `{header}`")));
    };
    let mut a = BandedComplexMatrix::zeros(dim, bw);
    a.basis_tag = BasisTag::Hermite;
    let mut expected = (0..dim).flat_map(|r| (r.saturating_sub(bw)..(r + bw + 1).min(dim)).map(move |c| (r, c)));
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(bad(format!("entry line must be `row col re im`, got `{line}`")));
        }
        let (r, c): (usize, usize) = (t[0].parse().map_err(|_| bad(line.clone()))?, t[1].parse().map_err(|_| bad(line.clone()))?);
        let (re, im): (f64, f64) = (t[2].parse().map_err(|_| bad(line.clone()))?, t[3].parse().map_err(|_| bad(line.clone()))?);
        if expected.next() != Some((r, c)) {
            return Err(bad(format!("entry ({r}, {c}) out of band order")));
        }
        a.set(r, c, Complex64::new(re, im));
    }
    if expected.next().is_some() {
        return Err(bad("missing band entries".into()));
    }
    Ok(a)
}

// ------------------------------------------------- JSON report documents

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl From<ptlab_core::fit::LinearFit> for FitRecord {
    fn from(f: ptlab_core::fit::LinearFit) -> Self {
        FitRecord { slope: f.slope, intercept: f.intercept, r_squared: f.r_squared, points: f.points }
    }
}

/// Parameters of the region `{|λ| > A, |arg λ| < bound - δ, |λ| ≥ B (log 1/ε)^exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct RegionFile {
    pub A: f64,
    pub B: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalPoint {
    pub tau: f64,
    pub lambda_phys: [f64; 2],
    /// `τ^{2n+1}` times the semiclassical residual ratio.
    pub epsilon: f64,
    /// `log(1/ε) - log(h^e C^{1/h})`, present when a decay fit exists.
    pub inequality_margin: Option<f64>,
    pub crosslink_dim: usize,
    /// `‖(A_N - λ_phys) v‖ / ‖v‖` for the Hermite projection `v` of the unscaled mode.
    pub vector_residual: f64,
    /// `s_min(A_N - λ_phys)`; absent when `λ_phys` is an eigenvalue to working precision.
    pub s_min: Option<f64>,
    /// `vector_residual / epsilon`.
    pub agreement_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CertificateEntry {
    pub lambda: [f64; 2],
    pub h: f64,
    pub x0: f64,
    pub xi0: f64,
    pub R0: f64,
    pub C2: f64,
    pub N_trunc: usize,
    pub C1_fit: f64,
    pub residual_algebraic: f64,
    pub residual_direct: f64,
    pub norm: f64,
    pub slope_fit: Option<f64>,
    pub residual_ratio: f64,
    pub residual_interior: f64,
    pub residual_commutator: f64,
    pub cross_checked: bool,
    pub truncation_cap: usize,
    pub eikonal_residual: f64,
    pub transport_residual: f64,
    pub norm_over_h_quarter: f64,
    pub norm_lower_bound: f64,
    pub norm_gaussian: f64,
    pub norm_upper_bound: f64,
    pub pseudomode_file: String,
    pub physical: PhysicalPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CertificateFile {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub lambda: [f64; 2],
    pub slope_fit: Option<f64>,
    pub fit: Option<FitRecord>,
    /// `C = e^{-slope}`.
    pub C: Option<f64>,
    pub strictly_decreasing: bool,
    pub norm_band: f64,
    pub warnings: Vec<String>,
    pub entries: Vec<CertificateEntry>,
    pub region: Option<RegionFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub epsilon: f64,
    pub polylines: usize,
    pub open_polylines: usize,
    /// Some grid point of the right window edge lies in the ε-pseudospectrum.
    pub reaches_right_edge: bool,
    /// Some grid point of the window lies outside the ε-pseudospectrum.
    pub has_exterior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustSummary {
    pub tolerance: f64,
    pub reference_dim: usize,
    pub trusted_count: usize,
    pub total: usize,
    /// `[re_min, re_max, im_min, im_max]` of the trusted points.
    pub bounding_box: Option<[f64; 4]>,
    pub trusted_re_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSummary {
    pub epsilon: f64,
    pub points_checked: usize,
    pub spectrum_violations: Vec<[f64; 2]>,
    pub numerical_range_violations: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub sweep_seconds: f64,
    pub reference_sweep_seconds: f64,
    pub eigen_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub matrix_dim: usize,
    pub timing: Timing,
    pub trust: TrustSummary,
    pub sandwich: SandwichSummary,
    pub lipschitz_violations: usize,
    pub nesting_samples: usize,
    pub nesting_violations: usize,
    pub levels: Vec<LevelSummary>,
    /// Every level is open, reaches the right edge and leaves part of the window outside.
    pub all_levels_open_rightward: bool,
    pub converged_eigenvalues: usize,
    pub invariants_ok: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub k: usize,
    pub re: f64,
    pub im: f64,
    pub overlap: f64,
    pub proj_norm: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TamenessRecord {
    pub verdict: String,
    pub polynomial_fit: FitRecord,
    pub exponential_fit: FitRecord,
    pub alpha_max: f64,
    pub a_max: f64,
    pub polynomial_bound_violated: bool,
    pub exponential_preferred: bool,
    pub tame: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSummary {
    pub dim: usize,
    pub sup_log10_norm: f64,
    pub overflow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReportFile {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub matrix_dim: usize,
    pub reference_dim: usize,
    pub k_max: usize,
    pub k_max_clipped: bool,
    pub eigenvalues: Vec<EigenEntry>,
    pub converged_count: usize,
    pub defective: Vec<usize>,
    pub conjugation_defect: f64,
    pub tameness: Option<TamenessRecord>,
    pub semigroup: Vec<SemigroupSummary>,
    pub semigroup_sup_increasing: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFitFile {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub theta: f64,
    /// Slope of `log(log(1/ε) + log|λ|)` against `log|λ|`.
    pub exponent: f64,
    pub exponent_fit: FitRecord,
    /// Slope of `log log(1/ε)` against `log|λ|`.
    pub exponent_raw: f64,
    pub raw_fit: FitRecord,
    pub target: f64,
    /// Largest `log|λ| / log(1/ε)` over the trusted points.
    pub log_correction_max: f64,
    /// Slope of `log ε` against `log|λ|` for `β = 0`.
    pub control_exponent: f64,
    pub control_fit: FitRecord,
    pub trusted_points: usize,
    pub untrusted_abs_lambda: Vec<f64>,
    pub region: RegionFile,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_reader_rejects_disorder() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        std::fs::write(&p, "2 1\n0 1 0 0\n0 0 1 0\n1 0 0 0\n1 1 3 0\n").unwrap();
        assert!(read_matrix_text(&p).is_err());
        std::fs::write(&p, "2 1\n0 0 1 0\n0 1 0 0\n1 0 0 0\n1 1 3 0\n").unwrap();
        let a = read_matrix_text(&p).unwrap();
        assert_eq!(a.get(1, 1), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        std::fs::write(&p, "a,b,c\n1,2,3\n").unwrap();
        assert!(read_grid_csv(&p, 1).is_err());
    }
}
