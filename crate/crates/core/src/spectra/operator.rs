// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Sparse symmetric operators, in particular the finite-difference
//! discretization of −ℏ²Δ + V with Dirichlet conditions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};
use crate::potential::Potential;

/// Symmetric sparse matrix: the diagonal plus strictly upper triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymOperator {
    order: usize,
    hbar: f64,
    diag: Vec<f64>,
    upper: Vec<(usize, usize, f64)>,
    grid: Option<GridSpec>,
}

impl SparseSymOperator {
    /// Build from the diagonal and upper-triangle entries (row < col).
    /// Duplicate positions are summed.
    pub fn from_parts(diag: Vec<f64>, mut upper: Vec<(usize, usize, f64)>, hbar: f64) -> Result<Self> {
        let order = diag.len();
        for &(i, j, v) in &upper {
            if i >= j || j >= order {
                return Err(Error::Domain(format!("entry ({i}, {j}) is not strictly upper")));
            }
            if !v.is_finite() {
                return Err(Error::Domain(format!("entry ({i}, {j}) is not finite")));
            }
        }
        upper.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        Ok(Self {
            order,
            hbar,
            diag,
            upper: merged,
            grid: None,
        })
    }

    /// Symmetric dense matrix as an operator; only the upper triangle is read.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Domain("matrix is not square".into()));
        }
        let n = m.nrows();
        let diag = (0..n).map(|i| m[(i, i)]).collect();
        let mut upper = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != 0.0 {
                    upper.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_parts(diag, upper, 0.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.grid.as_ref()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Strictly upper entries sorted by (row, col).
    pub fn upper(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    /// Every stored entry, both triangles.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<_> = self.diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        for &(i, j, v) in &self.upper {
            out.push((i, j, v));
            out.push((j, i, v));
        }
        out
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let key = (i.min(j), i.max(j));
        self.upper
            .binary_search_by_key(&key, |&(a, b, _)| (a, b))
            .map(|k| self.upper[k].2)
            .unwrap_or(0.0)
    }

    /// max |j − i| over stored entries.
    pub fn half_bandwidth(&self) -> usize {
        self.upper.iter().map(|&(i, j, _)| j - i).max().unwrap_or(0)
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        let mut rows: Vec<f64> = self.diag.iter().map(|v| v.abs()).collect();
        for &(i, j, v) in &self.upper {
            rows[i] += v.abs();
            rows[j] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.order];
        for &(i, j, v) in &self.upper {
            radius[i] += v.abs();
            radius[j] += v.abs();
        }
        let lo = self.diag.iter().zip(&radius).map(|(d, r)| d - r).fold(f64::INFINITY, f64::min);
        let hi = self.diag.iter().zip(&radius).map(|(d, r)| d + r).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// self + c·I.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d += c);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.order;
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        for &(i, j, v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.diag[i] * x[i];
        }
        for &(i, j, v) in &self.upper {
            y[i] += v * x[j];
            y[j] += v * x[i];
        }
    }

    /// Tridiagonal parts (diagonal, super-diagonal) when the bandwidth is one.
    pub fn as_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.half_bandwidth() > 1 {
            return None;
        }
        let mut off = vec![0.0; self.order.saturating_sub(1)];
        for &(i, _, v) in &self.upper {
            off[i] = v;
        }
        Some((self.diag.clone(), off))
    }
}

/// Grid spacing needed to resolve the deepest well: h ≤ ℏ/(8·√max V₋).
pub fn required_spacing(hbar: f64, max_negative_part: f64) -> f64 {
    if max_negative_part <= 0.0 {
        f64::INFINITY
    } else {
        hbar / (8.0 * max_negative_part.sqrt())
    }
}

/// Discretize −ℏ²Δ + V on the grid, enforcing the resolution rule.
pub fn assemble_operator<P: Potential + ?Sized>(potential: &P, grid: &GridSpec, hbar: f64) -> Result<SparseSymOperator> {
    let field = sample_potential(potential, grid)?;
    assemble_from_field(&field, hbar)
}

/// Discretize −ℏ²Δ + V for a sampled potential, enforcing the resolution rule.
pub fn assemble_from_field(field: &SampledField, hbar: f64) -> Result<SparseSymOperator> {
    let deepest = (-field.min()).max(0.0);
    let needed = required_spacing(hbar, deepest);
    let grid = field.grid;
    if grid.spacing() > needed {
        let n = (2.0 * grid.half_width / needed).ceil() as usize;
        return Err(Error::Precondition(format!(
            "grid spacing {:.3e} exceeds ℏ/(8√max V₋) = {needed:.3e}; need at least {n} points per axis",
            grid.spacing()
        )));
    }
    assemble_unchecked(field, hbar)
}

/// Discretize without the resolution rule. Operator ordering statements
/// (bracketing, constant shifts) hold at any resolution.
pub fn assemble_unchecked(field: &SampledField, hbar: f64) -> Result<SparseSymOperator> {
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("ℏ = {hbar} must be positive")));
    }
    let grid = field.grid;
    let h = grid.spacing();
    let coupling = hbar * hbar / (h * h);
    let d = grid.dim;
    let n = grid.points_per_axis;
    let diag: Vec<f64> = field.values.iter().map(|v| 2.0 * d as f64 * coupling + v).collect();
    let mut upper = Vec::with_capacity(d * grid.len());
    let mut idx = vec![0usize; d];
    for flat in 0..grid.len() {
        grid.multi_index(flat, &mut idx);
        for a in (0..d).rev() {
            if idx[a] + 1 < n {
                upper.push((flat, flat + grid.stride(a), -coupling));
            }
        }
    }
    Ok(SparseSymOperator {
        order: grid.len(),
        hbar,
        diag,
        upper,
        grid: Some(grid),
    })
}

pub(crate) fn sample_potential<P: Potential + ?Sized>(potential: &P, grid: &GridSpec) -> Result<SampledField> {
    if grid.dim != potential.dim() {
        return Err(Error::Domain("grid and potential dimensions differ".into()));
    }
    if grid.half_width > potential.box_half_width() + 1e-12 {
        return Err(Error::Domain("grid extends beyond the evaluation box".into()));
    }
    Ok(grid.sample(|x| potential.value_at(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{catalog, Potential};

    #[test]
    fn free_laplacian_matches_stencil_spectrum() {
        let grid = GridSpec::new(1, 1.0, 40).unwrap();
        let field = SampledField::constant(grid, 0.0);
        let op = assemble_from_field(&field, 0.3).unwrap();
        let eig = op.to_dense().symmetric_eigenvalues();
        let mut got: Vec<f64> = eig.iter().copied().collect();
        got.sort_by(f64::total_cmp);
        let h = grid.spacing();
        for (k, g) in got.iter().enumerate() {
            let kk = (k + 1) as f64;
            let exact = 0.09 * (2.0 / (h * h)) * (1.0 - (kk * std::f64::consts::PI * h / 2.0).cos());
            assert!((g - exact).abs() < 1e-10 * exact.max(1.0), "{k}: {g} vs {exact}");
        }
    }

    #[test]
    fn constant_shift_is_identity_shift() {
        let grid = GridSpec::new(2, 2.0, 10).unwrap();
        let v = catalog::harmonic(2, 1.0, 0.25, 3.0);
        let f = grid.sample(|x| v.value_at(x));
        let a = assemble_unchecked(&f, 0.5).unwrap();
        let b = assemble_unchecked(&f.map(|x| x + 0.7), 0.5).unwrap();
        assert_eq!(a.upper(), b.upper());
        for (x, y) in a.diag().iter().zip(b.diag()) {
            assert!((y - x - 0.7).abs() < 1e-14);
        }
        assert_eq!(a.shifted(0.7).upper(), b.upper());
    }

    #[test]
    fn symmetric_and_banded() {
        let grid = GridSpec::new(3, 1.0, 8).unwrap();
        let op = assemble_unchecked(&SampledField::constant(grid, 1.0), 0.1).unwrap();
        assert_eq!(op.half_bandwidth(), 64);
        let t = op.triplets();
        for &(i, j, v) in &t {
            assert_eq!(op.entry(j, i), v);
        }
        assert_eq!(t.len(), 512 + 2 * 3 * 8 * 8 * 7);
    }

    #[test]
    fn resolution_rule_is_enforced() {
        let v = catalog::harmonic(1, 1.0, 0.25, 3.0);
        let coarse = GridSpec::new(1, 3.0, 100).unwrap();
        let err = assemble_operator(&v, &coarse, 0.1).unwrap_err();
        assert!(err.to_string().contains("points per axis"), "{err}");
        let fine = GridSpec::new(1, 3.0, 500).unwrap();
        assert!(assemble_operator(&v, &fine, 0.1).is_ok());
    }
}
