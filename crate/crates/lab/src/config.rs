//! Experiment configuration: one TOML file with flat sections, overridden by
//! `section.key=value` assignments from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ptlab_core::scaling::{in_region_with, ArgBound};
use ptlab_core::{Complex64, PotentialSpec};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSection {
    pub beta: f64,
    pub n: u32,
    /// Hermite truncation size `N`.
    pub dim: usize,
}

impl Default for OperatorSection {
    fn default() -> Self {
        OperatorSection { beta: 1.0, n: 1, dim: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowSection {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for WindowSection {
    fn default() -> Self {
        WindowSection { re_min: -12.0, re_max: 60.0, im_min: -12.0, im_max: 12.0, nx: 200, ny: 160 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PseudospectrumSection {
    /// Explicit levels; when empty the ladder `10^log10_min, …, 10^log10_max` is used.
    pub epsilons: Vec<f64>,
    pub log10_min: f64,
    pub log10_max: f64,
    pub log10_step: f64,
    /// Relative change between `N` and `1.5N` below which a grid value is trusted.
    pub trust_tolerance: f64,
    pub sandwich_epsilon: f64,
    pub k_max: usize,
}

impl Default for PseudospectrumSection {
    fn default() -> Self {
        PseudospectrumSection {
            epsilons: Vec::new(),
            log10_min: -7.0,
            log10_max: 1.0,
            log10_step: 0.25,
            trust_tolerance: 0.01,
            sandwich_epsilon: 0.1,
            k_max: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WkbSection {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub h: Vec<f64>,
    pub plateau_fraction: f64,
    pub transport_order: usize,
    pub cross_check_count: usize,
    /// Truncation size for the resolvent cross-link of unscaled pseudomodes.
    pub crosslink_dim: usize,
}

impl Default for WkbSection {
    fn default() -> Self {
        WkbSection {
            lambda_re: 2.0,
            lambda_im: 1.0,
            h: vec![0.05, 0.04, 0.03, 0.025, 0.02],
            plateau_fraction: 0.5,
            transport_order: 12,
            cross_check_count: 3,
            crosslink_dim: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentSection {
    pub theta: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub dim_start: usize,
    pub dim_max: usize,
    /// Relative agreement between `N` and `1.5N` required to trust a point.
    pub agreement: f64,
}

impl Default for ExponentSection {
    fn default() -> Self {
        ExponentSection { theta: 0.2, r_min: 10.0, r_max: 60.0, points: 12, dim_start: 200, dim_max: 1600, agreement: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionSection {
    pub delta: f64,
    pub a_const: f64,
    /// `"arctan"` or `"half-pi"`.
    pub bound: String,
    /// `ε` at which the exported region is evaluated.
    pub epsilon: f64,
    /// Factor applied to the largest admissible `B`.
    pub margin: f64,
}

impl Default for RegionSection {
    fn default() -> Self {
        RegionSection { delta: 0.1, a_const: 10.0, bound: String::from("arctan"), epsilon: 1e-6, margin: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub k_max: usize,
    pub alpha_max: f64,
    pub a_max: f64,
    /// Truncation sizes of the semigroup curves.
    pub dims: Vec<usize>,
    pub t_max: f64,
    pub steps: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection { k_max: 10, alpha_max: 3.0, a_max: 10.0, dims: vec![100, 200, 400], t_max: 5.0, steps: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Worker threads; 0 lets the pool choose.
    pub threads: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), threads: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: String,
    pub operator: OperatorSection,
    pub window: WindowSection,
    pub pseudospectrum: PseudospectrumSection,
    pub wkb: WkbSection,
    pub exponent: ExponentSection,
    pub region: RegionSection,
    pub diagnostics: DiagnosticsSection,
    pub output: OutputSection,
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies `section.key=value` (or top-level `key=value`) to a TOML table.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| LabError::validation(format!("override `{assignment}` is not of the form key=value")))?;
    let value = parse_value(raw.trim());
    let path: Vec<&str> = key.trim().split('.').collect();
    match path.as_slice() {
        [k] => {
            table.insert((*k).to_string(), value);
        }
        [section, k] => {
            let entry = table.entry((*section).to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(t) => {
                    t.insert((*k).to_string(), value);
                }
                _ => return Err(LabError::validation(format!("`{section}` is not a section"))),
            }
        }
        _ => return Err(LabError::validation(format!("override key `{key}` must be `section.key`"))),
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses TOML text, rejecting unknown keys.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| LabError::validation(format!("malformed config: {e}")))?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| LabError::validation(format!("invalid config: {e}")))
    }

    /// File (if any), then overrides in order, then validation for `command`.
    pub fn resolve(path: Option<&Path>, overrides: &[String], command: &str) -> Result<Self> {
        let mut table = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| LabError::validation(format!("cannot read config {}: {e}", p.display())))?
                .parse::<toml::Table>()
                .map_err(|e| LabError::validation(format!("malformed config: {e}")))?,
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        table.insert("command".into(), toml::Value::String(command.to_string()));
        let cfg = Self::from_table(table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("configuration serializes");
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(canonical.as_bytes());
        hex::encode(h.finalize())
    }

    pub fn spec(&self) -> Result<PotentialSpec> {
        Ok(PotentialSpec::new(self.operator.beta, self.operator.n)?)
    }

    pub fn lambda0(&self) -> Complex64 {
        Complex64::new(self.wkb.lambda_re, self.wkb.lambda_im)
    }

    pub fn arg_bound(&self) -> Result<ArgBound> {
        ArgBound::parse(&self.region.bound)
            .ok_or_else(|| LabError::validation(format!("region.bound must be \"arctan\" or \"half-pi\", got \"{}\"", self.region.bound)))
    }

    pub fn epsilons(&self) -> Vec<f64> {
        let p = &self.pseudospectrum;
        if !p.epsilons.is_empty() {
            return p.epsilons.clone();
        }
        let count = ((p.log10_max - p.log10_min) / p.log10_step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| 10f64.powf(p.log10_min + p.log10_step * k as f64)).collect()
    }

    pub fn window(&self) -> ptlab_core::pseudospectrum::Window {
        let w = &self.window;
        ptlab_core::pseudospectrum::Window { re_min: w.re_min, re_max: w.re_max, im_min: w.im_min, im_max: w.im_max, nx: w.nx, ny: w.ny }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(LabError::validation(m.to_string()));
        let spec = self.spec()?;
        let bw = spec.odd_power() as usize;
        if self.operator.dim < bw + 1 {
            return bad("operator.dim must be at least 2n+2");
        }
        self.window().validate()?;
        let p = &self.pseudospectrum;
        if p.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("pseudospectrum.epsilons must be positive");
        }
        if p.epsilons.is_empty() && !(p.log10_step > 0.0 && p.log10_max >= p.log10_min) {
            return bad("pseudospectrum log10 ladder must have positive step and log10_max >= log10_min");
        }
        if !(p.trust_tolerance > 0.0) || !(p.sandwich_epsilon > 0.0) {
            return bad("pseudospectrum tolerances must be positive");
        }
        let w = &self.wkb;
        if w.h.is_empty() || w.h.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return bad("wkb.h must be a non-empty list of positive values");
        }
        if !(w.plateau_fraction > 0.0 && w.plateau_fraction < 1.0) {
            return bad("wkb.plateau_fraction must lie in (0, 1)");
        }
        if w.transport_order == 0 || w.crosslink_dim < bw + 1 {
            return bad("wkb.transport_order must be positive and wkb.crosslink_dim at least 2n+2");
        }
        let e = &self.exponent;
        if !(e.r_min > 0.0 && e.r_max > e.r_min) || e.points < 2 {
            return bad("exponent needs 0 < r_min < r_max and at least 2 points");
        }
        if e.dim_start < bw + 1 || e.dim_max < e.dim_start || !(e.agreement > 0.0) {
            return bad("exponent needs 2n+2 <= dim_start <= dim_max and positive agreement");
        }
        let r = &self.region;
        if !(r.delta >= 0.0 && r.delta < std::f64::consts::FRAC_PI_2) {
            return bad("region.delta must lie in [0, pi/2)");
        }
        if !(r.a_const > 0.0) || !(r.epsilon > 0.0 && r.epsilon < 1.0) || !(r.margin > 0.0 && r.margin <= 1.0) {
            return bad("region needs a_const > 0, 0 < epsilon < 1 and 0 < margin <= 1");
        }
        self.arg_bound()?;
        let d = &self.diagnostics;
        if d.k_max == 0 || d.dims.is_empty() || d.dims.iter().any(|&n| n < bw + 1) {
            return bad("diagnostics needs k_max > 0 and every dim at least 2n+2");
        }
        if !(d.t_max > 0.0) || d.steps == 0 || !(d.alpha_max >= 0.0) || !(d.a_max > 0.0) {
            return bad("diagnostics needs t_max > 0, steps > 0, alpha_max >= 0 and a_max > 0");
        }
        match self.command.as_str() {
            "wkb-certify" => {
                if !in_region_with(self.lambda0(), 0.0, ArgBound::Arctan) {
                    return Err(LabError::validation(format!("lambda0 = {} is not in the region Lambda", self.lambda0())));
                }
            }
            "exponent" => {
                let ray = Complex64::from_polar(1.0, self.exponent.theta);
                if !in_region_with(ray, r.delta, self.arg_bound()?) {
                    return Err(LabError::validation(format!(
                        "ray angle theta = {} lies outside the region for delta = {}",
                        self.exponent.theta, r.delta
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
