// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Uniform tensor grids on the Dirichlet box [−L, L]^d and fields sampled
//! on their interior nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior nodes x_i = −L + (i+1)·h, i = 0..n, of the box [−L, L]^d with
/// h = 2L/(n+1). Flat indices run with axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("grid dimension must be positive".into()));
        }
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!("grid half-width {half_width} must be positive")));
        }
        if points_per_axis < 8 {
            return Err(Error::Domain(format!(
                "grid needs at least 8 points per axis, got {points_per_axis}"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            points_per_axis,
        })
    }

    /// Smallest grid with spacing at most `max_spacing`.
    pub fn with_max_spacing(dim: usize, half_width: f64, max_spacing: f64) -> Result<Self> {
        let n = ((2.0 * half_width / max_spacing).ceil() as usize).saturating_sub(1).max(8);
        let mut grid = Self::new(dim, half_width, n)?;
        while grid.spacing() > max_spacing {
            grid.points_per_axis += 1;
        }
        Ok(grid)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis as f64 + 1.0)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of the i-th node along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 1.0) * self.spacing()
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| self.coord(i)).collect()
    }

    /// Stride of axis `a` in the flat index.
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    pub fn multi_index(&self, flat: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            out[a] = rest % n;
            rest /= n;
        }
    }

    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            out[a] = self.coord(rest % n);
            rest /= n;
        }
    }

    /// Whether the node touches the Dirichlet boundary layer.
    pub fn is_edge_node(&self, flat: usize) -> bool {
        let n = self.points_per_axis;
        let mut rest = flat;
        for _ in 0..self.dim {
            let i = rest % n;
            if i == 0 || i + 1 == n {
                return true;
            }
            rest /= n;
        }
        false
    }

    /// Sample a function at every node.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> SampledField {
        let mut x = vec![0.0; self.dim];
        let values = (0..self.len())
            .map(|i| {
                self.point(i, &mut x);
                f(&x)
            })
            .collect();
        SampledField { grid: *self, values }
    }
}

/// Values of a real function on the nodes of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &SampledField, f: F) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &SampledField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Multilinear interpolation; points outside the node hull are clamped.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let h = g.spacing();
        let n = g.points_per_axis;
        let d = g.dim;
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let s = ((x[a] + g.half_width) / h - 1.0).clamp(0.0, (n - 1) as f64);
            let i = (s.floor() as usize).min(n - 2);
            base[a] = i;
            frac[a] = s - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0;
            for a in 0..d {
                let bit = (corner >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat += (base[a] + bit) * g.stride(a);
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }
}

/// Minimum Euclidean distance between two node sets, by brute force over the
/// boundary nodes of each set. Returns infinity when either set is empty.
pub fn mask_distance(grid: &GridSpec, a: &[bool], b: &[bool]) -> f64 {
    let boundary = |mask: &[bool], inside: bool| -> Vec<Vec<f64>> {
        let mut idx = vec![0usize; grid.dim];
        let mut pts = Vec::new();
        for flat in 0..grid.len() {
            if mask[flat] != inside {
                continue;
            }
            grid.multi_index(flat, &mut idx);
            let on_boundary = (0..grid.dim).any(|ax| {
                let s = grid.stride(ax);
                (idx[ax] > 0 && mask[flat - s] != inside)
                    || (idx[ax] + 1 < grid.points_per_axis && mask[flat + s] != inside)
            });
            if on_boundary || grid.is_edge_node(flat) {
                let mut x = vec![0.0; grid.dim];
                grid.point(flat, &mut x);
                pts.push(x);
            }
        }
        pts
    };
    let pa = boundary(a, true);
    let pb = boundary(b, true);
    let mut best = f64::INFINITY;
    for x in &pa {
        for y in &pb {
            let d2: f64 = x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum();
            best = best.min(d2);
        }
    }
    best.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coords() {
        let g = GridSpec::new(1, 1.0, 9).unwrap();
        assert!((g.spacing() - 0.2).abs() < 1e-15);
        assert!((g.coord(0) + 0.8).abs() < 1e-15);
        assert!((g.coord(8) - 0.8).abs() < 1e-15);
        assert!(GridSpec::new(1, 1.0, 7).is_err());
    }

    #[test]
    fn flat_index_roundtrip() {
        let g = GridSpec::new(3, 1.0, 10).unwrap();
        let mut idx = [0usize; 3];
        g.multi_index(345, &mut idx);
        assert_eq!(idx, [3, 4, 5]);
        assert_eq!(idx[0] * g.stride(0) + idx[1] * g.stride(1) + idx[2], 345);
    }

    #[test]
    fn interpolation_is_exact_for_multilinear() {
        let g = GridSpec::new(2, 1.0, 12).unwrap();
        let f = g.sample(|x| 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1]);
        let v = f.interpolate(&[0.123, -0.456]);
        let exact = 1.0 + 2.0 * 0.123 + 0.456 - 0.5 * 0.123 * 0.456;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn distance_between_intervals() {
        let g = GridSpec::new(1, 2.0, 399).unwrap();
        let xs = g.axis_coords();
        let a: Vec<bool> = xs.iter().map(|&x| x.abs() < 0.5).collect();
        let b: Vec<bool> = xs.iter().map(|&x| x.abs() >= 1.0).collect();
        let d = mask_distance(&g, &a, &b);
        assert!((d - 0.5).abs() <= 2.0 * g.spacing(), "{d}");
    }
}
