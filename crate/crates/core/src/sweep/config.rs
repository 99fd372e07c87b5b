// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configs.
//!
//! ```toml
//! name = "oscillator-2d"
//! gamma = 0.0
//! mode = "capped"            # or "sharp"
//! strategy = "oscillator"    # "grid" | "separable" | "oscillator"
//! theorem = "main"           # "main" | "main2" | "main3"
//! seed = 7
//! hbar = { start = 0.2, stop = 0.02, points = 8 }   # or an explicit list
//!
//! [oscillator]
//! dim = 2
//! lambda = 2.0
//!
//! [fit]
//! envelope_samples = 9
//!
//! [output]
//! csv = "out/oscillator-2d.csv"
//! json = "out/oscillator-2d.json"
//! ```
//!
//! `grid` runs read a `[potential]` table and `separable` runs a
//! `[separable]` table with `dim` and one or more `[[separable.factor]]`
//! entries (a single factor is repeated on every axis).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{HolderClass, ScalingMode};
use crate::potential::{PotentialSpec, SeparableSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Grid,
    Separable,
    Oscillator,
}

/// Which remainder rate the sweep is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// κ = 1 + γ.
    #[default]
    Main,
    /// κ = min(⅔(1+μ), 1).
    Main2,
    /// κ = min(⅔(2+μ), 1+γ).
    Main3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HbarList {
    Explicit(Vec<f64>),
    Geometric { start: f64, stop: f64, points: usize },
}

impl HbarList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            HbarList::Explicit(v) => v.clone(),
            HbarList::Geometric { start, stop, points } => {
                let n = *points;
                if n < 2 {
                    return vec![*start; n];
                }
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            *stop
                        } else {
                            start * (stop / start).powf(i as f64 / (n - 1) as f64)
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    /// Largest grid operator per sweep point.
    #[serde(default = "default_unknowns")]
    pub max_unknowns: usize,
    /// Largest number of eigenvalue sums in a separable composition.
    #[serde(default = "default_sums")]
    pub max_sums: usize,
}

fn default_unknowns() -> usize {
    2_000_000
}

fn default_sums() -> usize {
    crate::spectra::separable::DEFAULT_BUDGET
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_unknowns: default_unknowns(),
            max_sums: default_sums(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    /// Sub-samples per ℏ cell for the residual envelope; 0 fits pointwise.
    #[serde(default)]
    pub envelope_samples: usize,
    /// Verdict tolerance in slope units; defaults by strategy.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorCase {
    pub dim: usize,
    #[serde(default = "one")]
    pub lambda: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableCase {
    pub dim: usize,
    #[serde(rename = "factor")]
    pub factors: Vec<PotentialSpec>,
}

impl SeparableCase {
    pub fn spec(&self) -> Result<SeparableSpec> {
        match self.factors.len() {
            1 => SeparableSpec::isotropic(self.factors[0].clone(), self.dim),
            n if n == self.dim => SeparableSpec::new(self.factors.clone()),
            n => Err(Error::Config(format!("separable case has {n} factors for dimension {}", self.dim))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub mode: ScalingMode,
    pub hbar: HbarList,
    pub strategy: Strategy,
    #[serde(default)]
    pub theorem: Theorem,
    #[serde(default)]
    pub seed: u64,
    /// Midpoint cells per axis for the Weyl integral.
    #[serde(default = "default_cells")]
    pub weyl_cells: usize,
    /// Also count with V_ε^± on grid runs.
    #[serde(default)]
    pub framed: bool,
    /// Record wall time per point. Off by default so reports are
    /// reproducible byte for byte.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub fit: FitOptions,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub oscillator: Option<OscillatorCase>,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub separable: Option<SeparableCase>,
    /// Directory that relative output paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_cells() -> usize {
    2000
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config; relative output paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Output paths with relative entries resolved.
    pub fn output_paths(&self) -> (Option<PathBuf>, Option<PathBuf>) {
        let resolve = |p: &Option<PathBuf>| {
            p.as_ref().map(|p| match &self.base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p.clone(),
            })
        };
        (resolve(&self.output.csv), resolve(&self.output.json))
    }

    pub fn hbars(&self) -> Vec<f64> {
        self.hbar.values()
    }

    /// Regularity used for the scaling rule and the predicted rate.
    pub fn regularity(&self) -> HolderClass {
        match self.strategy {
            Strategy::Oscillator => HolderClass { k: 2, mu: 1.0 },
            Strategy::Grid => self.potential.as_ref().map_or(HolderClass { k: 2, mu: 1.0 }, |p| p.regularity),
            Strategy::Separable => self
                .separable
                .as_ref()
                .and_then(|s| {
                    s.factors
                        .iter()
                        .map(|f| f.regularity)
                        .min_by(|a, b| a.order().total_cmp(&b.order()))
                })
                .unwrap_or(HolderClass { k: 2, mu: 1.0 }),
        }
    }

    pub fn dim(&self) -> usize {
        match self.strategy {
            Strategy::Oscillator => self.oscillator.map_or(0, |o| o.dim),
            Strategy::Grid => self.potential.as_ref().map_or(0, |p| p.dim),
            Strategy::Separable => self.separable.as_ref().map_or(0, |s| s.dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        crate::params::check_gamma(self.gamma).map_err(|e| Error::Config(e.to_string()))?;
        let h = self.hbars();
        if h.len() < 6 {
            return bad(format!("ℏ list has {} points; at least 6 are required", h.len()));
        }
        if h.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return bad("ℏ values must be positive and finite".into());
        }
        if h.windows(2).any(|w| w[1] >= w[0]) {
            return bad("ℏ list must be strictly decreasing".into());
        }
        if self.weyl_cells < 4 {
            return bad("weyl_cells must be at least 4".into());
        }
        match self.strategy {
            Strategy::Oscillator => {
                let Some(o) = self.oscillator else {
                    return bad("strategy \"oscillator\" needs an [oscillator] table".into());
                };
                if o.dim == 0 || !(o.lambda > 0.0) {
                    return bad("oscillator needs dim ≥ 1 and λ > 0".into());
                }
            }
            Strategy::Grid => {
                let Some(p) = &self.potential else {
                    return bad("strategy \"grid\" needs a [potential] table".into());
                };
                p.validate()?;
                if p.dim > 3 {
                    return bad(format!("grid strategy supports d ≤ 3, got {}", p.dim));
                }
            }
            Strategy::Separable => {
                let Some(s) = &self.separable else {
                    return bad("strategy \"separable\" needs a [separable] table".into());
                };
                for f in &s.factors {
                    f.validate()?;
                    if f.dim != 1 {
                        return bad("separable factors must be one-dimensional".into());
                    }
                }
                s.spec()?;
            }
        }
        if self.budget.max_unknowns == 0 || self.budget.max_sums == 0 {
            return bad("budgets must be positive".into());
        }
        Ok(())
    }
}
