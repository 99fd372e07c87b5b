// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form rough test potentials.
//!
//! A [`PotentialSpec`] is a sum of smooth pieces (constants, quadratic wells,
//! per-axis polynomials) and Hölder bumps c·|x − a|^s·χ(|x − a|/R), where χ
//! is a smooth cutoff equal to one on [0, 1/2] and zero beyond 1. Values are
//! always computed in closed form, so the declared regularity is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::HolderClass;

/// A smooth piece of the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothTerm {
    Constant { value: f64 },
    /// Σ_i w_i x_i².
    Quadratic { weights: Vec<f64> },
    /// Σ_j c_j x_axis^j.
    AxisPolynomial { axis: usize, coeffs: Vec<f64> },
}

impl SmoothTerm {
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            SmoothTerm::Constant { value } => *value,
            SmoothTerm::Quadratic { weights } => weights.iter().zip(x).map(|(w, xi)| w * xi * xi).sum(),
            SmoothTerm::AxisPolynomial { axis, coeffs } => {
                let t = x[*axis];
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
        }
    }
}

/// c·|x − a|^s·χ(|x − a|/R).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpTerm {
    pub center: Vec<f64>,
    pub coeff: f64,
    pub exponent: f64,
    /// Cutoff radius R; defaults to a quarter of the distance to the nearest
    /// other bump centre, or half the evaluation box for a single bump.
    #[serde(default)]
    pub cutoff_radius: Option<f64>,
}

/// Smooth step: 1 on [0, 1/2], 0 on [1, ∞), C^∞ in between.
pub fn smooth_cutoff(t: f64) -> f64 {
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let psi = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let a = psi(1.0 - t);
    let b = psi(t - 0.5);
    a / (a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub dim: usize,
    #[serde(default)]
    pub smooth: Vec<SmoothTerm>,
    #[serde(default, rename = "bump")]
    pub bumps: Vec<BumpTerm>,
    /// Sublevel margin ν.
    pub nu: f64,
    pub regularity: HolderClass,
    /// Half-width B of the evaluation box [−B, B]^d.
    pub box_half_width: f64,
}

/// Anything that can be evaluated pointwise on its box.
pub trait Potential: Sync {
    fn dim(&self) -> usize;
    fn box_half_width(&self) -> f64;
    /// V(x) without the box check.
    fn value_at(&self, x: &[f64]) -> f64;
    /// Points where V may fail to be smooth (1D only; used to split quadrature).
    fn breakpoints_1d(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl PotentialSpec {
    /// Parse and validate a spec written as a TOML table.
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Check the structural invariants of the spec.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("potential dimension must be positive".into()));
        }
        if !(self.nu > 0.0) {
            return Err(Error::Config(format!("sublevel margin ν = {} must be positive", self.nu)));
        }
        if !(self.box_half_width > 0.0) {
            return Err(Error::Config("evaluation box half-width must be positive".into()));
        }
        HolderClass::new(self.regularity.k, self.regularity.mu).map_err(|e| Error::Config(e.to_string()))?;
        for term in &self.smooth {
            match term {
                SmoothTerm::Quadratic { weights } if weights.len() != self.dim => {
                    return Err(Error::Config(format!(
                        "quadratic term has {} weights for dimension {}",
                        weights.len(),
                        self.dim
                    )))
                }
                SmoothTerm::AxisPolynomial { axis, .. } if *axis >= self.dim => {
                    return Err(Error::Config(format!("polynomial axis {axis} out of range")))
                }
                _ => {}
            }
        }
        let order = self.regularity.order();
        for (i, bump) in self.bumps.iter().enumerate() {
            if bump.center.len() != self.dim {
                return Err(Error::Config(format!("bump {i} centre has wrong dimension")));
            }
            if (bump.exponent - order).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "bump {i} exponent {} differs from k + μ = {order}",
                    bump.exponent
                )));
            }
            if let Some(r) = bump.cutoff_radius {
                if !(r > 0.0) {
                    return Err(Error::Config(format!("bump {i} cutoff radius must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Cutoff radius actually used for bump `i`.
    pub fn cutoff_radius(&self, i: usize) -> f64 {
        if let Some(r) = self.bumps[i].cutoff_radius {
            return r;
        }
        let own = &self.bumps[i].center;
        let nearest = self
            .bumps
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| dist(own, &b.center))
            .fold(f64::INFINITY, f64::min);
        if nearest.is_finite() {
            0.25 * nearest
        } else {
            0.5 * self.box_half_width
        }
    }

    pub fn in_box(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.abs() <= self.box_half_width)
    }

    /// V at one point; points outside the evaluation box are a domain error.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if !self.in_box(x) {
            return Err(Error::Domain(format!(
                "point {x:?} outside the evaluation box [−{b}, {b}]^{d}",
                b = self.box_half_width,
                d = self.dim
            )));
        }
        Ok(self.value_at(x))
    }

    /// V at many points.
    pub fn eval(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        points.iter().map(|x| self.value(x)).collect()
    }

    /// The smooth part only (bumps removed).
    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        self.smooth.iter().map(|t| t.value(x)).sum()
    }

    fn bump_value(&self, i: usize, x: &[f64]) -> f64 {
        let b = &self.bumps[i];
        let r = dist(x, &b.center);
        let cutoff = smooth_cutoff(r / self.cutoff_radius(i));
        if cutoff == 0.0 {
            0.0
        } else {
            b.coeff * r.powf(b.exponent) * cutoff
        }
    }

    /// V ≥ 4ν on the boundary of the evaluation box, sampled on `n` points per
    /// edge direction; this is how boundedness of Ω_{4ν,V} is checked.
    pub fn check_confinement(&self, n: usize) -> Result<()> {
        let grid = GridSpec::new(self.dim, self.box_half_width, n.max(8))?;
        let mut x = vec![0.0; self.dim];
        for flat in 0..grid.len() {
            if !grid.is_edge_node(flat) {
                continue;
            }
            grid.point(flat, &mut x);
            let v = self.value_at(&x);
            if v < 4.0 * self.nu {
                return Err(Error::Config(format!(
                    "V = {v} < 4ν near the box boundary at {x:?}: Ω_4ν is not contained in the box"
                )));
            }
        }
        Ok(())
    }
}

impl Potential for PotentialSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn box_half_width(&self) -> f64 {
        self.box_half_width
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        let mut v = self.smooth_value(x);
        for i in 0..self.bumps.len() {
            v += self.bump_value(i, x);
        }
        v
    }

    fn breakpoints_1d(&self) -> Vec<f64> {
        if self.dim != 1 {
            return Vec::new();
        }
        self.bumps.iter().map(|b| b.center[0]).collect()
    }
}

/// V(x) = Σ_i v_i(x_i) built from one-dimensional factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableSpec {
    pub factors: Vec<PotentialSpec>,
}

impl SeparableSpec {
    pub fn new(factors: Vec<PotentialSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("separable spec needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
            if f.dim != 1 {
                return Err(Error::Config("separable factors must be one-dimensional".into()));
            }
        }
        Ok(Self { factors })
    }

    /// d copies of the same factor.
    pub fn isotropic(factor: PotentialSpec, dim: usize) -> Result<Self> {
        Self::new(vec![factor; dim])
    }
}

impl Potential for SeparableSpec {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn box_half_width(&self) -> f64 {
        self.factors.iter().map(|f| f.box_half_width).fold(f64::INFINITY, f64::min)
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, &xi)| f.value_at(&[xi])).sum()
    }
}

/// Mask of grid nodes where V < level.
pub fn sublevel_set<P: Potential + ?Sized>(potential: &P, level: f64, grid: &GridSpec) -> Result<Vec<bool>> {
    if !(level > 0.0) {
        return Err(Error::Domain(format!("sublevel level {level} must be positive")));
    }
    if grid.dim != potential.dim() {
        return Err(Error::Domain("grid and potential dimensions differ".into()));
    }
    if grid.half_width > potential.box_half_width() {
        return Err(Error::Domain("grid extends beyond the evaluation box".into()));
    }
    let mut x = vec![0.0; grid.dim];
    Ok((0..grid.len())
        .map(|i| {
            grid.point(i, &mut x);
            potential.value_at(&x) < level
        })
        .collect())
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Shipped example potentials.
pub mod catalog {
    use super::*;

    /// λ·(x² − 1)-free harmonic well Σ x_i² − λ.
    pub fn harmonic(dim: usize, lambda: f64, nu: f64, box_half_width: f64) -> PotentialSpec {
        PotentialSpec {
            dim,
            smooth: vec![
                SmoothTerm::Quadratic {
                    weights: vec![1.0; dim],
                },
                SmoothTerm::Constant { value: -lambda },
            ],
            bumps: Vec::new(),
            nu,
            regularity: HolderClass { k: 2, mu: 1.0 },
            box_half_width,
        }
    }

    /// x² − 1 + c·|x − a|^{k+μ}·χ, the one-dimensional rough well.
    pub fn rough_well_1d(k: u32, mu: f64, coeff: f64, center: f64, cutoff: f64) -> PotentialSpec {
        PotentialSpec {
            dim: 1,
            smooth: vec![
                SmoothTerm::Quadratic { weights: vec![1.0] },
                SmoothTerm::Constant { value: -1.0 },
            ],
            bumps: vec![BumpTerm {
                center: vec![center],
                coeff,
                exponent: f64::from(k) + mu,
                cutoff_radius: Some(cutoff),
            }],
            nu: 0.5,
            regularity: HolderClass { k, mu },
            box_half_width: 4.0,
        }
    }

    /// One-dimensional factor of the separable rough experiment:
    /// x⁴ + x²/2 − 0.4 + ½|x − 0.3|^{1+μ}·χ(|x − 0.3|/0.8), with k = 1.
    pub fn anharmonic_rough_factor(mu: f64) -> PotentialSpec {
        PotentialSpec {
            dim: 1,
            smooth: vec![SmoothTerm::AxisPolynomial {
                axis: 0,
                coeffs: vec![-0.4, 0.0, 0.5, 0.0, 1.0],
            }],
            bumps: vec![BumpTerm {
                center: vec![0.3],
                coeff: 0.5,
                exponent: 1.0 + mu,
                cutoff_radius: Some(0.8),
            }],
            nu: 0.25,
            regularity: HolderClass { k: 1, mu },
            box_half_width: 3.0,
        }
    }
}
