// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Exponential decay of eigenfunctions in the forbidden region, and the
//! localisation of traces that it implies.
//!
//! U = {V < ν} is the region outside of which V ≥ ν, U_a its open
//! a-neighbourhood and d(x) = dist(x, U_a). Eigenfunctions with energy
//! below ν/4 satisfy ‖e^{δ d/ℏ} ψ‖ ≤ C with δ = √ν/8.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::g_gamma;
use crate::potential::{smooth_cutoff, Potential};
use crate::spectra::operator::SparseSymOperator;
use crate::spectra::tridiag;

/// δ = √ν/8.
pub fn agmon_delta(nu: f64) -> f64 {
    nu.sqrt() / 8.0
}

/// Distance from each node to the set of nodes where `mask` holds, computed
/// exactly against the boundary nodes of the set. Nodes in the set get 0.
pub fn distance_field(grid: &GridSpec, mask: &[bool]) -> Vec<f64> {
    let d = grid.dim;
    let mut idx = vec![0usize; d];
    let mut boundary: Vec<Vec<f64>> = Vec::new();
    for flat in 0..grid.len() {
        if !mask[flat] {
            continue;
        }
        grid.multi_index(flat, &mut idx);
        let edge = (0..d).any(|a| {
            let s = grid.stride(a);
            (idx[a] > 0 && !mask[flat - s]) || (idx[a] + 1 < grid.points_per_axis && !mask[flat + s])
        });
        if edge {
            let mut x = vec![0.0; d];
            grid.point(flat, &mut x);
            boundary.push(x);
        }
    }
    let mut x = vec![0.0; d];
    (0..grid.len())
        .map(|flat| {
            if mask[flat] {
                return 0.0;
            }
            grid.point(flat, &mut x);
            boundary
                .iter()
                .map(|b| b.iter().zip(&x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect()
}

/// Mask of U_a = {x : dist(x, {V < ν}) < a} on the grid nodes.
pub fn enlarged_allowed_region<P: Potential + ?Sized>(potential: &P, nu: f64, a: f64, grid: &GridSpec) -> Result<Vec<bool>> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("enlargement a = {a} must be non-negative")));
    }
    let u = crate::potential::sublevel_set(potential, nu, grid)?;
    let dist = distance_field(grid, &u);
    Ok(dist.iter().map(|&r| r < a).collect())
}

/// ‖e^{δ d/ℏ} ψ‖ for an ℓ²-normalized nodal vector ψ (the grid measure is
/// absorbed in the normalization).
pub fn agmon_weighted_norm<P: Potential + ?Sized>(
    psi: &[f64],
    energy: f64,
    potential: &P,
    nu: f64,
    a: f64,
    hbar: f64,
    grid: &GridSpec,
) -> Result<f64> {
    if energy >= nu / 4.0 {
        return Err(Error::Precondition(format!("E = {energy} is not below ν/4 = {}", nu / 4.0)));
    }
    if psi.len() != grid.len() {
        return Err(Error::Domain("eigenvector length differs from the grid".into()));
    }
    let ua = enlarged_allowed_region(potential, nu, a, grid)?;
    let dist = distance_field(grid, &ua);
    let delta = agmon_delta(nu);
    let norm2: f64 = psi.iter().map(|v| v * v).sum();
    let weighted: f64 = psi
        .iter()
        .zip(&dist)
        .map(|(v, &r)| (v * (delta * r / hbar).exp()).powi(2))
        .sum();
    Ok((weighted / norm2).sqrt())
}

/// Least-squares slope of log|ψ| against |x| on each side of a 1D grid,
/// over nodes with |x| ≥ r where |ψ| is above `floor`·max|ψ|. Returns the
/// shallower (larger) of the two slopes.
pub fn outer_log_slope(psi: &[f64], grid: &GridSpec, r: f64, floor: f64) -> Result<f64> {
    if grid.dim != 1 {
        return Err(Error::Domain("log-slope fit is one-dimensional".into()));
    }
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = f64::NEG_INFINITY;
    for side in [-1.0, 1.0] {
        let pts: Vec<(f64, f64)> = (0..grid.points_per_axis)
            .filter_map(|i| {
                let x = grid.coord(i);
                let v = psi[i].abs();
                (x * side >= r && v > floor * peak && !grid.is_edge_node(i)).then(|| (x.abs(), v.ln()))
            })
            .collect();
        if pts.len() < 3 {
            return Err(Error::Numerical(format!("too few outer nodes above the floor on side {side}")));
        }
        worst = worst.max(crate::fit::least_squares(&pts).0);
    }
    Ok(worst)
}

/// The lowest `count` eigenpairs of a one-dimensional operator.
pub fn lowest_eigenpairs(op: &SparseSymOperator, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let (d, o) = op
        .as_tridiagonal()
        .ok_or_else(|| Error::Domain("operator is not tridiagonal".into()))?;
    let values = tridiag::lowest_eigenvalues(&d, &o, count)?;
    values
        .into_iter()
        .map(|l| tridiag::eigenvector(&d, &o, l).map(|v| (l, v)))
        .collect()
}

/// Smooth cutoff equal to one on U_a and vanishing beyond distance 2a from U.
pub fn localisation_cutoff(grid: &GridSpec, ua: &[bool], a: f64) -> Vec<f64> {
    distance_field(grid, ua)
        .into_iter()
        .map(|r| smooth_cutoff(0.5 + 0.5 * r / a))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalisationReport {
    pub trace: f64,
    pub localised_trace: f64,
    pub relative_defect: f64,
}

/// Compare Tr g_γ(H) with Tr[g_γ(H)φ] = Σ g_γ(E_n)⟨ψ_n, φψ_n⟩.
pub fn localisation_defect(pairs: &[(f64, Vec<f64>)], phi: &[f64], gamma: f64) -> LocalisationReport {
    let mut trace = 0.0;
    let mut local = 0.0;
    for (e, psi) in pairs {
        let g = g_gamma(*e, gamma);
        if g == 0.0 {
            continue;
        }
        let norm2: f64 = psi.iter().map(|v| v * v).sum();
        let inside: f64 = psi.iter().zip(phi).map(|(v, p)| p * v * v).sum();
        trace += g;
        local += g * inside / norm2;
    }
    LocalisationReport {
        trace,
        localised_trace: local,
        relative_defect: if trace > 0.0 { (trace - local).abs() / trace } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::catalog;
    use crate::spectra::operator::assemble_operator;

    #[test]
    fn distance_in_one_dimension() {
        let g = GridSpec::new(1, 2.0, 399).unwrap();
        let mask: Vec<bool> = g.axis_coords().iter().map(|x| x.abs() < 1.0).collect();
        let d = distance_field(&g, &mask);
        for (i, x) in g.axis_coords().iter().enumerate() {
            let expect = (x.abs() - 1.0).max(0.0);
            assert!((d[i] - expect).abs() <= g.spacing() + 1e-12, "x = {x}");
        }
    }

    #[test]
    fn weight_is_one_inside() {
        let v = catalog::harmonic(1, 1.0, 0.5, 4.0);
        let g = GridSpec::new(1, 4.0, 399).unwrap();
        let psi: Vec<f64> = g.axis_coords().iter().map(|x| if x.abs() < 0.5 { 1.0 } else { 0.0 }).collect();
        let n = agmon_weighted_norm(&psi, -0.5, &v, 0.5, 0.25, 0.1, &g).unwrap();
        assert!((n - 1.0).abs() < 1e-15);
        assert!(agmon_weighted_norm(&psi, 0.2, &v, 0.5, 0.25, 0.1, &g).is_err());
    }

    #[test]
    fn oscillator_ground_state_decays() {
        let hbar = 0.1;
        let v = catalog::harmonic(1, 1.0, 0.5, 4.0);
        let g = GridSpec::new(1, 4.0, 2000).unwrap();
        let op = assemble_operator(&v, &g, hbar).unwrap();
        let pairs = lowest_eigenpairs(&op, 2).unwrap();
        assert!((pairs[0].0 - (hbar - 1.0)).abs() < 1e-4);
        let r = 1.5f64.sqrt() + 0.25;
        let slope = outer_log_slope(&pairs[0].1, &g, r, 1e-250).unwrap();
        assert!(slope < -0.8 * agmon_delta(0.5) / hbar);
    }
}
