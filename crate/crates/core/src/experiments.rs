// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven checks behind the `mollify-check`, `cover` and
//! `bracketing` verbs.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cover::{cover_experiment, CoverOptions, CoverReport};
use crate::error::{Error, Result};
use crate::framing::{build_framing, eigenvalue_bracketing_check, BracketingReport, DEFAULT_MARGIN};
use crate::grid::GridSpec;
use crate::mollify::{certify_mollifier_bounds, BoundReport, ClosedForm1d, MollifiedPotential1d};
use crate::params::{HolderClass, SemiclassicalParams};
use crate::potential::PotentialSpec;
use crate::weyl::{compare_phase_space, RateReport};

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn default_delta() -> f64 {
    1.0 / 3.0
}

/// Certification of f(x) = |x − center|^exponent, plus an optional
/// phase-space rate for a one-dimensional spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifyCheckConfig {
    pub name: String,
    pub exponent: f64,
    #[serde(default)]
    pub center: f64,
    pub regularity: HolderClass,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub alpha_max: Option<u32>,
    pub window: [f64; 2],
    #[serde(default)]
    pub phase_space: Option<PhaseSpaceConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceConfig {
    pub hbar: f64,
    #[serde(default)]
    pub gamma: f64,
    pub half_width: f64,
    pub cells: usize,
    pub epsilons: Vec<f64>,
    pub potential: PotentialSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct MollifyCheckReport {
    pub bounds: BoundReport,
    pub phase_space: Option<RateReport>,
    pub pass: bool,
}

impl MollifyCheckConfig {
    pub fn load(path: &Path) -> Result<Self> {
        load(path)
    }
}

pub fn run_mollify_check(cfg: &MollifyCheckConfig) -> Result<MollifyCheckReport> {
    let (c, s) = (cfg.center, cfg.exponent);
    let f = ClosedForm1d::new(move |x: f64| (x - c).abs().powf(s), vec![c]);
    let alpha_max = cfg.alpha_max.unwrap_or(cfg.regularity.k + 1);
    let bounds = certify_mollifier_bounds(&f, cfg.regularity, &cfg.epsilons, alpha_max, (cfg.window[0], cfg.window[1]))?;
    let phase_space = match &cfg.phase_space {
        None => None,
        Some(p) => Some(phase_space_rate(p)?),
    };
    let pass = bounds.pass && phase_space.as_ref().is_none_or(|r| r.pass);
    Ok(MollifyCheckReport {
        bounds,
        phase_space,
        pass,
    })
}

/// |Weyl(V_ε) − Weyl(V)| against ε for the closed-form mollification.
pub fn phase_space_rate(p: &PhaseSpaceConfig) -> Result<RateReport> {
    if p.potential.dim != 1 {
        return Err(Error::Config("phase-space comparison uses one-dimensional specs".into()));
    }
    compare_phase_space(
        &p.potential,
        |e| MollifiedPotential1d::new(&p.potential, e),
        None,
        p.hbar,
        p.gamma,
        p.half_width,
        p.cells,
        p.potential.regularity,
        &p.epsilons,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverConfig {
    pub name: String,
    pub hbar: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub options: Option<CoverOptions>,
    pub potential: PotentialSpec,
    /// Directory for per-ℏ centre dumps.
    #[serde(default)]
    pub output_dir: Option<std::path::PathBuf>,
}

impl CoverConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: Self = load(path)?;
        if let (Some(dir), Some(base)) = (cfg.output_dir.as_mut(), path.parent()) {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverSummary {
    pub reports: Vec<CoverReport>,
    pub same_overlap: bool,
    pub pass: bool,
}

/// Largest admissible max/min spread of scaled derivatives across patches.
pub const DERIVATIVE_SPREAD_LIMIT: f64 = 10.0;

pub fn run_cover(cfg: &CoverConfig) -> Result<CoverSummary> {
    let opts = cfg.options.unwrap_or_default();
    let mut reports = Vec::new();
    for &h in &cfg.hbar {
        let params = SemiclassicalParams::new(h, cfg.delta, 0.0)?;
        let (r, patches) = cover_experiment(&cfg.potential, &params, &opts)?;
        if let Some(dir) = &cfg.output_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let p = dir.join(format!("{}-hbar{h}.csv", cfg.name));
            std::fs::write(&p, crate::cover::patches_csv(&patches)).map_err(|e| Error::io(&p, e))?;
        }
        reports.push(r);
    }
    let same_overlap = reports.windows(2).all(|w| w[0].overlap == w[1].overlap);
    let each = reports.iter().all(|r| {
        r.coverage == 1.0
            && r.overlap <= r.packing_bound
            && r.sum_error <= 1e-10
            && r.derivative_spread.iter().all(|&s| s <= DERIVATIVE_SPREAD_LIMIT)
    });
    Ok(CoverSummary {
        pass: each && same_overlap && !reports.is_empty(),
        reports,
        same_overlap,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketingConfig {
    pub name: String,
    pub hbar: f64,
    /// Mollification scale; defaults to ℏ^{1−δ} with δ = 1/3.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Nodes per axis of the framing grid.
    pub points: usize,
    /// Keep every `restrict`-th node for the eigenvalue check.
    #[serde(default = "one")]
    pub restrict: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub potential: PotentialSpec,
}

fn one() -> usize {
    1
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

impl BracketingConfig {
    pub fn load(path: &Path) -> Result<Self> {
        load(path)
    }
}

pub fn run_bracketing(cfg: &BracketingConfig) -> Result<BracketingReport> {
    let mut params = SemiclassicalParams::new(cfg.hbar, 1.0 / 3.0, 0.0)?;
    if let Some(e) = cfg.epsilon {
        params.epsilon = e;
    }
    let grid = GridSpec::new(cfg.potential.dim, cfg.potential.box_half_width, cfg.points)?;
    let framed = build_framing(&cfg.potential, &params, cfg.margin, &grid)?;
    let framed = if cfg.restrict > 1 { framed.restrict(cfg.restrict)? } else { framed };
    eigenvalue_bracketing_check(&framed, cfg.hbar)
}
