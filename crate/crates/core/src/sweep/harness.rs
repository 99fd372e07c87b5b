// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! ℏ-sweeps: counted traces against Weyl terms, and log-log rate fits.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::framing::{build_framing, DEFAULT_MARGIN};
use crate::grid::{GridSpec, SampledField};
use crate::params::{choose_scaling, HolderClass, ScalingRule};
use crate::potential::{Potential, PotentialSpec, SeparableSpec};
use crate::spectra::inertia::inertia_count;
use crate::spectra::operator::{assemble_from_field, assemble_unchecked, required_spacing, SparseSymOperator};
use crate::spectra::oscillator::{oscillator_lattice_count, oscillator_weyl, residual_envelope};
use crate::spectra::riesz::{riesz_mean_layer_cake, LayerCakeOptions};
use crate::spectra::separable::{separable_count, separable_riesz};
use crate::spectra::tridiag::{eigenvalue, eigenvalues_below};
use crate::spectra::Spectrum;
use crate::weyl::{separable_weyl_integral, weyl_term_quadrature};

use super::config::{Strategy, SweepConfig, Theorem};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "ROUGHWEYL_THREADS";

/// Verdict tolerance in slope units for oracle runs.
pub const ORACLE_TOLERANCE: f64 = 0.15;
/// Verdict tolerance in slope units for discretized runs.
pub const GRID_TOLERANCE: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub hbar: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub trace: f64,
    pub weyl: f64,
    /// |trace − weyl|.
    pub residual: f64,
    /// Largest residual over sub-samples of the ℏ cell, when requested.
    pub envelope: Option<f64>,
    /// Traces of the framed operators, [Tr H_ε⁺, Tr H_ε⁻].
    pub band: Option<[f64; 2]>,
    pub method: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub hbar: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStatus {
    Complete,
    Partial,
    Empty,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<Skipped>,
    pub status: SweepStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictedExponent {
    pub kappa: f64,
    /// κ − d, the expected slope of log R against log ℏ.
    pub exponent: f64,
    pub warnings: Vec<String>,
    /// Set when a precondition of the rate statement fails.
    pub exploratory: bool,
}

/// Predicted ℏ-exponent κ − d of the remainder.
pub fn predicted_exponent(gamma: f64, hc: HolderClass, d: usize, theorem: Theorem) -> PredictedExponent {
    let mu = hc.mu;
    let mut warnings = Vec::new();
    let kappa = match theorem {
        Theorem::Main => {
            if gamma == 0.0 {
                if d < 3 {
                    warnings.push(format!("γ = 0 rate needs d ≥ 3, got d = {d}"));
                }
                if hc.k == 1 && mu < 0.5 {
                    warnings.push(format!("γ = 0 rate needs k + μ ≥ 3/2, got k = 1, μ = {mu}"));
                }
            } else {
                if d < 4 {
                    warnings.push(format!("γ > 0 rate needs d ≥ 4, got d = {d}"));
                }
                let needed = (1.5 * gamma - 0.5).max(0.0);
                if hc.k < 2 || (hc.k == 2 && mu < needed) {
                    warnings.push(format!("γ = {gamma} rate needs k = 2 and μ ≥ {needed}, got k = {}, μ = {mu}", hc.k));
                }
            }
            1.0 + gamma
        }
        Theorem::Main2 => {
            if gamma != 0.0 {
                warnings.push(format!("counting-function rate is stated for γ = 0, got γ = {gamma}"));
            }
            if d < 3 {
                warnings.push(format!("counting-function rate needs d ≥ 3, got d = {d}"));
            }
            if hc.k != 1 {
                warnings.push(format!("counting-function rate is stated for k = 1, got k = {}", hc.k));
            }
            (2.0 / 3.0 * (1.0 + mu)).min(1.0)
        }
        Theorem::Main3 => {
            if !(gamma > 0.0) {
                warnings.push(format!("Riesz-mean rate needs γ ∈ (0, 1], got γ = {gamma}"));
            }
            if d < 4 {
                warnings.push(format!("Riesz-mean rate needs d ≥ 4, got d = {d}"));
            }
            if hc.k != 2 {
                warnings.push(format!("Riesz-mean rate is stated for k = 2, got k = {}", hc.k));
            }
            (2.0 / 3.0 * (2.0 + mu)).min(1.0 + gamma)
        }
    };
    PredictedExponent {
        kappa,
        exponent: kappa - d as f64,
        exploratory: !warnings.is_empty(),
        warnings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Every residual vanished; nothing to fit.
    Exact,
    /// Fewer than four non-zero residuals.
    Insufficient,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Exact)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub slope: Option<f64>,
    /// Twice the slope's standard error.
    pub half_width: Option<f64>,
    pub points: usize,
    pub excluded: Vec<f64>,
    pub predicted: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Residuals below this fraction of the Weyl term are treated as exact.
const ZERO_RESIDUAL: f64 = 1e-9;

fn fit_value(r: &SweepRecord) -> f64 {
    r.envelope.unwrap_or(r.residual)
}

/// Least-squares slope of log R against log ℏ, using the envelope where
/// present. Verdict PASS iff slope ≥ predicted − tolerance.
pub fn fit_exponent(records: &[SweepRecord], predicted: f64, tolerance: f64) -> ExponentReport {
    let mut pts = Vec::new();
    let mut excluded = Vec::new();
    for r in records {
        let v = fit_value(r);
        if v <= ZERO_RESIDUAL * r.weyl.abs().max(1.0) {
            excluded.push(r.hbar);
        } else {
            pts.push((r.hbar.ln(), v.ln()));
        }
    }
    let mut notes = Vec::new();
    if !excluded.is_empty() {
        notes.push(format!("{} zero residual(s) excluded from the fit", excluded.len()));
    }
    let base = ExponentReport {
        slope: None,
        half_width: None,
        points: pts.len(),
        excluded,
        predicted,
        tolerance,
        verdict: Verdict::Insufficient,
        notes,
    };
    if pts.is_empty() {
        let mut rep = base;
        rep.verdict = if records.is_empty() { Verdict::Insufficient } else { Verdict::Exact };
        rep.notes.push(if records.is_empty() { "no records".into() } else { "exact regime".into() });
        return rep;
    }
    if pts.len() < 4 {
        let mut rep = base;
        rep.notes.push(format!("only {} non-zero residuals; at least 4 are needed", pts.len()));
        return rep;
    }
    let (slope, _, se) = least_squares(&pts);
    ExponentReport {
        slope: Some(slope),
        half_width: Some(2.0 * se),
        verdict: if slope >= predicted - tolerance { Verdict::Pass } else { Verdict::Fail },
        ..base
    }
}

/// Thread pool sized from `ROUGHWEYL_THREADS`, or rayon's default.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} = {v:?} is not a thread count")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Resource(e.to_string()))
}

// Per-sweep data shared by all ℏ points.
enum Prepared {
    Oscillator { dim: usize, lambda: f64 },
    Grid { spec: PotentialSpec, weyl_unit: f64, deepest: f64 },
    Separable { spec: SeparableSpec, weyl_unit: f64 },
}

fn prepare(cfg: &SweepConfig) -> Result<Prepared> {
    match cfg.strategy {
        Strategy::Oscillator => {
            let o = cfg.oscillator.ok_or_else(|| Error::Config("missing [oscillator]".into()))?;
            Ok(Prepared::Oscillator { dim: o.dim, lambda: o.lambda })
        }
        Strategy::Grid => {
            let spec = cfg.potential.clone().ok_or_else(|| Error::Config("missing [potential]".into()))?;
            let cells = if spec.dim <= 2 { cfg.weyl_cells } else { cfg.weyl_cells.min(256) };
            let w = weyl_term_quadrature(&spec, None, 1.0, cfg.gamma, spec.box_half_width, cells)?;
            let probe = GridSpec::new(spec.dim, spec.box_half_width, if spec.dim == 1 { 4095 } else { 255 })?;
            let deepest = (-probe.sample(|x| spec.value_at(x)).min()).max(0.0);
            Ok(Prepared::Grid {
                spec,
                weyl_unit: w.value,
                deepest,
            })
        }
        Strategy::Separable => {
            let case = cfg.separable.as_ref().ok_or_else(|| Error::Config("missing [separable]".into()))?;
            let spec = case.spec()?;
            let weyl_unit = separable_weyl_integral(&spec, cfg.gamma, cfg.weyl_cells)?;
            Ok(Prepared::Separable { spec, weyl_unit })
        }
    }
}

/// Tr g_γ(H) for an assembled operator.
fn operator_trace(op: &SparseSymOperator, gamma: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(inertia_count(op, 0.0)? as f64);
    }
    if let Some((d, o)) = op.as_tridiagonal() {
        let vals = eigenvalues_below(&d, &o, 0.0, d.len())?;
        return Ok(vals.iter().map(|v| (-v).powf(gamma)).sum());
    }
    let t_max = (-op.gershgorin().0).max(0.0);
    riesz_mean_layer_cake(|e| inertia_count(op, e), t_max, gamma, LayerCakeOptions::default())
}

// Grid matching the resolution rule for the deepest well at this ℏ.
fn resolved_grid(dim: usize, half_width: f64, hbar: f64, deepest: f64) -> Result<GridSpec> {
    let h = required_spacing(hbar, deepest).min(half_width / 4.0);
    GridSpec::with_max_spacing(dim, half_width, h)
}

fn factor_spectrum(f: &PotentialSpec, hbar: f64, cutoff: Option<f64>, max_unknowns: usize) -> Result<Spectrum> {
    let b = f.box_half_width;
    let probe = GridSpec::new(1, b, 4095)?;
    let deepest = (-probe.sample(|x| f.value_at(x)).min()).max(0.0);
    let grid = resolved_grid(1, b, hbar, deepest * 1.01)?;
    if grid.len() > max_unknowns {
        return Err(Error::Resource(format!("factor grid of {} nodes exceeds the budget", grid.len())));
    }
    let op = assemble_from_field(&grid.sample(|x| f.value_at(x)), hbar)?;
    let (d, o) = op.as_tridiagonal().ok_or_else(|| Error::Internal("1D operator is not tridiagonal".into()))?;
    let values = match cutoff {
        Some(c) => eigenvalues_below(&d, &o, c, d.len())?,
        None => vec![eigenvalue(&d, &o, 0)],
    };
    Ok(Spectrum::new(values, Some(hbar), "grid-1d"))
}

fn separable_trace(spec: &SeparableSpec, hbar: f64, gamma: f64, cfg: &SweepConfig) -> Result<f64> {
    let budget = cfg.budget.max_unknowns;
    let lows: Vec<f64> = spec
        .factors
        .iter()
        .map(|f| factor_spectrum(f, hbar, None, budget).map(|s| s.values[0]))
        .collect::<Result<_>>()?;
    let total_low: f64 = lows.iter().sum();
    // Factor i contributes only levels below −Σ_{j≠i} λ₀(j).
    let spectra: Vec<Spectrum> = spec
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| factor_spectrum(f, hbar, Some(lows[i] - total_low + 1e-12), budget))
        .collect::<Result<_>>()?;
    if spectra.iter().any(|s| s.is_empty()) {
        return Ok(0.0);
    }
    let count = separable_count(&spectra, 0.0)?;
    if count > cfg.budget.max_sums as u64 {
        return Err(Error::Resource(format!(
            "{count} composed eigenvalues exceed the budget of {}",
            cfg.budget.max_sums
        )));
    }
    if gamma == 0.0 {
        Ok(count as f64)
    } else {
        separable_riesz(&spectra, gamma)
    }
}

struct PointValue {
    trace: f64,
    weyl: f64,
    band: Option<[f64; 2]>,
    method: &'static str,
}

fn evaluate(prep: &Prepared, cfg: &SweepConfig, rule: &ScalingRule, hbar: f64) -> Result<PointValue> {
    let gamma = cfg.gamma;
    match prep {
        Prepared::Oscillator { dim, lambda } => Ok(PointValue {
            trace: oscillator_lattice_count(*dim, hbar, *lambda, gamma)?,
            weyl: oscillator_weyl(*dim, hbar, *lambda, gamma)?,
            band: None,
            method: "lattice",
        }),
        Prepared::Grid { spec, weyl_unit, deepest } => {
            let d = spec.dim;
            let weyl = weyl_unit / hbar.powi(d as i32);
            let grid = resolved_grid(d, spec.box_half_width, hbar, *deepest * 1.01)?;
            if grid.len() > cfg.budget.max_unknowns {
                return Err(Error::Resource(format!(
                    "grid of {} unknowns exceeds the budget of {}",
                    grid.len(),
                    cfg.budget.max_unknowns
                )));
            }
            let field = grid.sample(|x| spec.value_at(x));
            let op = assemble_from_field(&field, hbar)?;
            let trace = operator_trace(&op, gamma)?;
            let band = if cfg.framed {
                let params = rule.params(hbar)?;
                let framed = build_framing(spec, &params, DEFAULT_MARGIN, &grid)?;
                let tr = |f: &SampledField| assemble_unchecked(f, hbar).and_then(|o| operator_trace(&o, gamma));
                Some([tr(&framed.v_plus)?, tr(&framed.v_minus)?])
            } else {
                None
            };
            Ok(PointValue {
                trace,
                weyl,
                band,
                method: if d == 1 { "grid-sturm" } else { "grid-inertia" },
            })
        }
        Prepared::Separable { spec, weyl_unit } => Ok(PointValue {
            trace: separable_trace(spec, hbar, gamma, cfg)?,
            weyl: weyl_unit / hbar.powi(spec.factors.len() as i32),
            band: None,
            method: "separable",
        }),
    }
}

// Geometric sub-sample cell below each ℏ: [ℏ_{i+1}, ℏ_i], the last cell
// reusing the previous ratio.
fn cells(hbars: &[f64]) -> Vec<(f64, f64)> {
    let n = hbars.len();
    (0..n)
        .map(|i| {
            let lo = if i + 1 < n {
                hbars[i + 1]
            } else if n > 1 {
                hbars[i] * hbars[i] / hbars[i - 1]
            } else {
                hbars[i]
            };
            (lo, hbars[i])
        })
        .collect()
}

fn envelope(prep: &Prepared, cfg: &SweepConfig, rule: &ScalingRule, cell: (f64, f64), samples: usize) -> Result<f64> {
    if let Prepared::Oscillator { dim, lambda } = prep {
        return residual_envelope(*dim, *lambda, cfg.gamma, cell.0, cell.1, samples);
    }
    let mut sup = 0.0f64;
    for i in 0..samples {
        let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
        let h = cell.0 * (cell.1 / cell.0).powf(t);
        let v = evaluate(prep, cfg, rule, h)?;
        sup = sup.max((v.trace - v.weyl).abs());
    }
    Ok(sup)
}

fn run_point(prep: &Prepared, cfg: &SweepConfig, rule: &ScalingRule, hbar: f64, cell: (f64, f64)) -> Result<SweepRecord> {
    let start = Instant::now();
    let params = rule.params(hbar)?;
    let v = evaluate(prep, cfg, rule, hbar)?;
    let residual = (v.trace - v.weyl).abs();
    let env = match cfg.fit.envelope_samples {
        0 => None,
        s => Some(envelope(prep, cfg, rule, cell, s)?.max(residual)),
    };
    Ok(SweepRecord {
        hbar,
        epsilon: params.epsilon,
        delta: params.delta,
        trace: v.trace,
        weyl: v.weyl,
        residual,
        envelope: env,
        band: v.band,
        method: v.method.to_string(),
        seconds: if cfg.record_timing { start.elapsed().as_secs_f64() } else { 0.0 },
    })
}

/// Run every ℏ point of the sweep on the worker pool; records come back in
/// config order. Points that exceed a budget or cannot be resolved are
/// skipped with a reason.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let rule = choose_scaling(cfg.gamma, cfg.regularity(), cfg.mode)?;
    let prep = prepare(cfg)?;
    let hbars = cfg.hbars();
    let cells = cells(&hbars);
    let pool = thread_pool()?;
    let results: Vec<Result<SweepRecord>> = pool.install(|| {
        hbars
            .par_iter()
            .zip(cells.par_iter())
            .map(|(&h, &cell)| run_point(&prep, cfg, &rule, h, cell))
            .collect()
    });
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (h, r) in hbars.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e @ (Error::Resource(_) | Error::Precondition(_))) => skipped.push(Skipped {
                hbar: *h,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let status = match (records.is_empty(), skipped.is_empty()) {
        (true, _) => SweepStatus::Empty,
        (false, true) => SweepStatus::Complete,
        (false, false) => SweepStatus::Partial,
    };
    Ok(SweepOutcome { records, skipped, status })
}

/// Predicted rate and verdict tolerance for a config.
pub fn sweep_expectation(cfg: &SweepConfig) -> (PredictedExponent, f64) {
    let pred = predicted_exponent(cfg.gamma, cfg.regularity(), cfg.dim(), cfg.theorem);
    let tol = cfg.fit.tolerance.unwrap_or(match cfg.strategy {
        Strategy::Oscillator => ORACLE_TOLERANCE,
        _ => GRID_TOLERANCE,
    });
    (pred, tol)
}
