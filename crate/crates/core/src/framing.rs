// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Framing potentials V_ε^± = V¹_ε + V² ± C·ε^{k+μ}, which sandwich V
//! pointwise and hence bracket the spectrum of −ℏ²Δ + V by min-max.
//!
//! V¹ = Vφ is the part of V near the sublevel set, with φ = 1 on Ω_{3ν}
//! and supported in Ω_{4ν}; only V¹ is smoothed. V² = V(1 − φ) is kept.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{mask_distance, GridSpec, SampledField};
use crate::mollify::{mollify, KernelProfile, MollifierKernel};
use crate::params::{HolderClass, SemiclassicalParams};
use crate::potential::{sublevel_set, Potential, PotentialSpec};
use crate::spectra::dense::dense_spectrum;
use crate::spectra::inertia::inertia_count;
use crate::spectra::operator::assemble_unchecked;

/// Default relative margin on the measured shift constant.
pub const DEFAULT_MARGIN: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct FramedPotentials {
    pub v_minus: SampledField,
    pub v: SampledField,
    pub v_plus: SampledField,
    /// C with V_ε^± = V¹_ε + V² ± C ε^{k+μ}.
    pub shift_constant: f64,
    /// ε actually used (may be smaller than requested, see `halvings`).
    pub epsilon: f64,
    pub hc: HolderClass,
    pub tilde_nu: f64,
    /// Cutoff φ and the mollified inner part.
    pub phi: SampledField,
    pub v1_eps: SampledField,
    /// Radius of the mollifier that built φ.
    pub cutoff_scale: f64,
    /// How many times ε was halved to reach tail avoidance.
    pub halvings: u32,
}

/// Smooth cutoff: mollified indicator of Ω_{3.5ν}, equal to one on Ω_{3ν}
/// and supported in Ω_{4ν}. Returns the field and the mollifier radius.
pub fn sublevel_cutoff<P: Potential + ?Sized>(potential: &P, nu: f64, grid: &GridSpec) -> Result<(SampledField, f64)> {
    let m3 = sublevel_set(potential, 3.0 * nu, grid)?;
    let m35 = sublevel_set(potential, 3.5 * nu, grid)?;
    let m4 = sublevel_set(potential, 4.0 * nu, grid)?;
    if !m3.iter().any(|&b| b) {
        return Err(Error::Precondition("Ω_3ν is empty on the grid".into()));
    }
    let outside35: Vec<bool> = m35.iter().map(|&b| !b).collect();
    let outside4: Vec<bool> = m4.iter().map(|&b| !b).collect();
    if !outside4.iter().any(|&b| b) {
        return Err(Error::Precondition("Ω_4ν fills the whole grid".into()));
    }
    let d1 = mask_distance(grid, &m3, &outside35);
    let d2 = mask_distance(grid, &m35, &outside4);
    let radius = 0.9 * d1.min(d2);
    if radius < 8.0 * grid.spacing() {
        return Err(Error::Precondition(format!(
            "sublevel gaps ({d1:.3e}, {d2:.3e}) are too thin for grid spacing {:.3e}",
            grid.spacing()
        )));
    }
    let indicator = SampledField {
        grid: *grid,
        values: m35.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
    };
    let kernel = MollifierKernel::new(grid.dim, KernelProfile::Bump);
    // Snap round-off so that "identically one" is testable exactly.
    let phi = mollify(&indicator, radius, &kernel)?.map(|p| {
        if p > 1.0 - 1e-12 {
            1.0
        } else if p < 1e-12 {
            0.0
        } else {
            p
        }
    });
    Ok((phi, radius))
}

/// Build V_ε^± for `spec` on `grid`.
pub fn build_framing(spec: &PotentialSpec, params: &SemiclassicalParams, margin: f64, grid: &GridSpec) -> Result<FramedPotentials> {
    spec.validate()?;
    if !(margin >= 0.0) {
        return Err(Error::Domain("framing margin must be non-negative".into()));
    }
    let v = grid.sample(|x| spec.value_at(x));
    let (phi, cutoff_scale) = sublevel_cutoff(spec, spec.nu, grid)?;
    let v1 = v.zip_map(&phi, |a, p| a * p);
    let v2 = v.zip_map(&phi, |a, p| a * (1.0 - p));
    let kernel = MollifierKernel::for_class(grid.dim, spec.regularity);
    let order = spec.regularity.order();
    let tilde_nu = spec.nu / 2.0;
    let mut epsilon = params.epsilon;
    for halvings in 0..32 {
        let v1_eps = mollify(&v1, epsilon, &kernel)?;
        let sup = v1.max_abs_diff(&v1_eps);
        let scale = epsilon.powf(order);
        let c = sup / scale * (1.0 + margin);
        let shift = c * scale;
        let base = v1_eps.zip_map(&v2, |a, b| a + b);
        let v_minus = base.map(|x| x - shift);
        let v_plus = base.map(|x| x + shift);
        // Tail avoidance: where V_ε^− < 4ν̃ the cutoff must be identically one.
        let avoids = v_minus
            .values
            .iter()
            .zip(&phi.values)
            .all(|(&vm, &p)| vm >= 4.0 * tilde_nu || p == 1.0);
        if !avoids {
            epsilon *= 0.5;
            continue;
        }
        for i in 0..grid.len() {
            if !(v_minus.values[i] <= v.values[i] && v.values[i] <= v_plus.values[i]) {
                return Err(Error::Internal(format!(
                    "framing violated at node {i}: {} ≤ {} ≤ {} fails; increase the margin",
                    v_minus.values[i], v.values[i], v_plus.values[i]
                )));
            }
        }
        return Ok(FramedPotentials {
            v_minus,
            v,
            v_plus,
            shift_constant: c,
            epsilon,
            hc: spec.regularity,
            tilde_nu,
            phi,
            v1_eps,
            cutoff_scale,
            halvings,
        });
    }
    Err(Error::Precondition("tail avoidance not reached by shrinking ε".into()))
}

impl FramedPotentials {
    /// Restrict every field to the coarse grid whose nodes are every
    /// `factor`-th node of the current one. Pointwise framing is inherited.
    pub fn restrict(&self, factor: usize) -> Result<Self> {
        let fine = self.v.grid;
        if factor == 0 || (fine.points_per_axis + 1) % factor != 0 {
            return Err(Error::Domain(format!(
                "factor {factor} does not divide n + 1 = {}",
                fine.points_per_axis + 1
            )));
        }
        let coarse = GridSpec::new(fine.dim, fine.half_width, (fine.points_per_axis + 1) / factor - 1)?;
        let mut idx = vec![0usize; fine.dim];
        let map: Vec<usize> = (0..coarse.len())
            .map(|flat| {
                coarse.multi_index(flat, &mut idx);
                (0..fine.dim).map(|a| ((idx[a] + 1) * factor - 1) * fine.stride(a)).sum()
            })
            .collect();
        let pick = |f: &SampledField| SampledField {
            grid: coarse,
            values: map.iter().map(|&i| f.values[i]).collect(),
        };
        Ok(Self {
            v_minus: pick(&self.v_minus),
            v: pick(&self.v),
            v_plus: pick(&self.v_plus),
            phi: pick(&self.phi),
            v1_eps: pick(&self.v1_eps),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketingReport {
    pub order: usize,
    pub framing_violations: usize,
    pub eigenvalue_violations: usize,
    pub first_violation: Option<usize>,
    pub max_inversion: f64,
    pub tolerance: f64,
    pub count_minus: usize,
    pub count: usize,
    pub count_plus: usize,
    pub pass: bool,
}

/// Dense check that λ_j(H⁻) ≤ λ_j(H) ≤ λ_j(H⁺) for every j, together with
/// the counts N⁺(0) ≤ N(0) ≤ N⁻(0).
pub fn eigenvalue_bracketing_check(framed: &FramedPotentials, hbar: f64) -> Result<BracketingReport> {
    let order = framed.v.grid.len();
    if order > 3000 {
        return Err(Error::Resource(format!("bracketing check limited to 3000 unknowns, got {order}")));
    }
    let framing_violations = (0..order)
        .filter(|&i| !(framed.v_minus.values[i] <= framed.v.values[i] && framed.v.values[i] <= framed.v_plus.values[i]))
        .count();
    let h_minus = assemble_unchecked(&framed.v_minus, hbar)?;
    let h = assemble_unchecked(&framed.v, hbar)?;
    let h_plus = assemble_unchecked(&framed.v_plus, hbar)?;
    let (lm, l, lp) = (dense_spectrum(&h_minus)?, dense_spectrum(&h)?, dense_spectrum(&h_plus)?);
    let scale = h.norm_inf().max(h_plus.norm_inf()).max(1.0);
    let tolerance = 1e-10 * scale;
    let mut violations = 0;
    let mut first = None;
    let mut max_inv = 0.0f64;
    for j in 0..order {
        let inv = (lm.values[j] - l.values[j]).max(l.values[j] - lp.values[j]);
        max_inv = max_inv.max(inv);
        if inv > tolerance {
            violations += 1;
            first.get_or_insert(j);
        }
    }
    let count_minus = inertia_count(&h_minus, 0.0)?;
    let count = inertia_count(&h, 0.0)?;
    let count_plus = inertia_count(&h_plus, 0.0)?;
    Ok(BracketingReport {
        order,
        framing_violations,
        eigenvalue_violations: violations,
        first_violation: first,
        max_inversion: max_inv,
        tolerance,
        count_minus,
        count,
        count_plus,
        pass: framing_violations == 0 && violations == 0 && count_plus <= count && count <= count_minus,
    })
}

/// V^min = (min V − 1)·1_{Ω_{4ν}}; returns (N(0; H_ε⁻), N(0; H^min)).
pub fn crude_bound_counts(framed: &FramedPotentials, nu: f64, hbar: f64) -> Result<(usize, usize)> {
    let min_v = framed.v.min();
    let v_min = framed.v.map(|x| if x < 4.0 * nu { min_v - 1.0 } else { 0.0 });
    let n_minus = inertia_count(&assemble_unchecked(&framed.v_minus, hbar)?, 0.0)?;
    let n_min = inertia_count(&assemble_unchecked(&v_min, hbar)?, 0.0)?;
    Ok((n_minus, n_min))
}
