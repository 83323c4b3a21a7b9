use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::certify::{certify_residual, ResidualReport};
use super::phase::{build_phase, WindowSearch};
use super::pseudomode::{assemble_with_nodes, NormBounds, WkbPseudomode, FINE_NODES};
use super::transport::solve_transport;
use super::turning::{solve_turning_point, SymbolPoint};
use crate::error::{invalid, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderOptions {
    pub search: WindowSearch,
    pub transport_order: usize,
    pub plateau_fraction: f64,
    pub fine_nodes: usize,
    /// Number of largest `h` at which the algebraic and direct residuals must agree.
    pub cross_check_count: usize,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions {
            search: WindowSearch::default(),
            transport_order: 12,
            plateau_fraction: 0.5,
            fine_nodes: FINE_NODES,
            cross_check_count: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderEntry {
    pub h: f64,
    pub point: SymbolPoint,
    pub r0: f64,
    pub c2: f64,
    pub n_trunc: usize,
    pub truncation_cap: usize,
    pub c1_fit: f64,
    pub eikonal_residual: f64,
    pub transport_residual: f64,
    pub norm: f64,
    pub norm_bounds: NormBounds,
    pub residual: ResidualReport,
}

impl LadderEntry {
    pub fn norm_over_h_quarter(&self) -> f64 {
        self.norm / self.h.powf(0.25)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport {
    pub lambda: Complex64,
    /// Entries ordered by decreasing `h`.
    pub entries: Vec<LadderEntry>,
    pub modes: Vec<WkbPseudomode>,
    /// `log(ratio) ≈ intercept + slope / h`, present with at least 3 entries.
    pub fit: Option<LinearFit>,
    pub warnings: Vec<String>,
}

impl LadderReport {
    /// `C = e^{-slope}` in `ratio ≈ C^{-1/h}`.
    pub fn decay_constant(&self) -> Option<f64> {
        self.fit.map(|f| (-f.slope).exp())
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].residual.ratio < w[0].residual.ratio)
    }

    /// `max/min` of `‖ψ_h‖ / h^{1/4}` across the ladder.
    pub fn norm_band(&self) -> f64 {
        let v: Vec<f64> = self.entries.iter().map(|e| e.norm_over_h_quarter()).collect();
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max) / v.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The full pipeline at one `h`.
pub fn certified_mode(
    lambda: Complex64,
    h: f64,
    spec: &PotentialSpec,
    opts: &LadderOptions,
    cross_check: bool,
) -> Result<WkbPseudomode> {
    let sc = spec.with_h(h)?;
    let pt = solve_turning_point(lambda, h, &sc)?;
    let phase = build_phase(&pt, &sc, &opts.search)?;
    let amps = solve_transport(&phase, opts.transport_order)?;
    let mode = assemble_with_nodes(&phase, &amps, h, opts.plateau_fraction, opts.fine_nodes)?;
    let report = certify_residual(&mode, &sc, cross_check)?;
    Ok(mode.with_residual(report))
}

pub fn run_ladder(lambda: Complex64, hs: &[f64], spec: &PotentialSpec, opts: &LadderOptions) -> Result<LadderReport> {
    if hs.is_empty() {
        return Err(invalid("the h ladder is empty"));
    }
    let mut sorted = hs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    let mut entries = Vec::with_capacity(sorted.len());
    let mut modes = Vec::with_capacity(sorted.len());
    for (k, &h) in sorted.iter().enumerate() {
        let mode = certified_mode(lambda, h, spec, opts, k < opts.cross_check_count)?;
        let sc = spec.with_h(h)?;
        let residual = mode.residual.expect("certified mode carries a residual");
        entries.push(LadderEntry {
            h,
            point: mode.phase.point,
            r0: mode.phase.r0,
            c2: mode.phase.c2,
            n_trunc: mode.n_trunc,
            truncation_cap: mode.truncation_cap,
            c1_fit: mode.amplitudes.c1_estimate,
            eikonal_residual: mode.phase.eikonal_residual(&sc),
            transport_residual: mode.amplitudes.residuals.iter().copied().fold(0.0, f64::max),
            norm: mode.norm,
            norm_bounds: mode.norm_bounds,
            residual,
        });
        modes.push(mode);
    }
    let mut warnings = Vec::new();
    let fit = if entries.len() >= 3 {
        let x: Vec<f64> = entries.iter().map(|e| 1.0 / e.h).collect();
        let y: Vec<f64> = entries.iter().map(|e| e.residual.ratio.ln()).collect();
        Some(linear_fit(&x, &y)?)
    } else {
        warnings.push(String::from("decay fit needs at least 3 values of h; no fit reported"));
        None
    };
    Ok(LadderReport { lambda, entries, modes, fit, warnings })
}
