// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Riesz means Tr(H)₋^γ from counting-function samples via the layer-cake
//! identity Tr(H)₋^γ = γ∫₀^∞ t^{γ−1} N(−t) dt.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

/// Shift ladder and refinement budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerCakeOptions {
    /// Log-spaced shifts from t_max·1e−4 to t_max.
    pub shifts: usize,
    /// Extra counting evaluations spent bisecting cells where N jumps.
    pub max_refinements: usize,
    /// Stop refining once the bound on the remaining error is below this
    /// fraction of the estimate.
    pub rel_tol: f64,
}

impl Default for LayerCakeOptions {
    fn default() -> Self {
        Self {
            shifts: 64,
            max_refinements: 2048,
            rel_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    n_lo: usize,
    n_hi: usize,
}

impl Cell {
    fn weight(&self, gamma: f64) -> f64 {
        self.hi.powf(gamma) - self.lo.powf(gamma)
    }

    fn value(&self, gamma: f64) -> f64 {
        0.5 * (self.n_lo + self.n_hi) as f64 * self.weight(gamma)
    }

    fn error_bound(&self, gamma: f64) -> f64 {
        0.5 * (self.n_lo - self.n_hi) as f64 * self.weight(gamma)
    }
}

struct Ranked(f64, Cell);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Layer-cake Riesz mean. `count(E)` returns #{λ ≤ E}; `t_max` must bound
/// |min λ| so that N(−t) = 0 beyond it.
///
/// N is non-decreasing, so on a cell whose endpoint counts agree the
/// trapezoid is exact; cells with jumps are bisected, largest error first.
pub fn riesz_mean_layer_cake<F>(mut count: F, t_max: f64, gamma: f64, opts: LayerCakeOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<usize>,
{
    if gamma == 0.0 {
        return Err(Error::Domain("γ = 0: use the counting function directly".into()));
    }
    crate::params::check_gamma(gamma)?;
    if !(t_max > 0.0) {
        return Ok(0.0);
    }
    if opts.shifts < 2 {
        return Err(Error::Domain("layer cake needs at least two shifts".into()));
    }
    let t_min = t_max * 1e-4;
    let ratio = (t_max / t_min).ln();
    let s = opts.shifts;
    let mut ts = vec![0.0];
    ts.extend((0..s).map(|i| t_min * (ratio * i as f64 / (s - 1) as f64).exp()));
    ts[s] = t_max;
    let mut ns = Vec::with_capacity(ts.len());
    for &t in &ts {
        ns.push(count(-t)?);
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut pending = 0.0;
    for i in 0..s {
        let cell = Cell {
            lo: ts[i],
            hi: ts[i + 1],
            n_lo: ns[i],
            n_hi: ns[i + 1],
        };
        if cell.n_hi > cell.n_lo {
            return Err(Error::Numerical("counting function is not monotone".into()));
        }
        total += cell.value(gamma);
        let eb = cell.error_bound(gamma);
        if eb > 0.0 {
            pending += eb;
            heap.push(Ranked(eb, cell));
        }
    }
    let mut spent = 0;
    while spent < opts.max_refinements {
        let Some(Ranked(eb, cell)) = heap.pop() else { break };
        if pending <= opts.rel_tol * total.abs() {
            heap.push(Ranked(eb, cell));
            break;
        }
        let mid = if cell.lo == 0.0 { 0.5 * cell.hi } else { (cell.lo * cell.hi).sqrt() };
        if !(mid > cell.lo && mid < cell.hi) {
            continue;
        }
        let n_mid = count(-mid)?;
        spent += 1;
        if n_mid > cell.n_lo || n_mid < cell.n_hi {
            return Err(Error::Numerical("counting function is not monotone".into()));
        }
        total -= cell.value(gamma);
        pending -= eb;
        for half in [
            Cell {
                lo: cell.lo,
                hi: mid,
                n_lo: cell.n_lo,
                n_hi: n_mid,
            },
            Cell {
                lo: mid,
                hi: cell.hi,
                n_lo: n_mid,
                n_hi: cell.n_hi,
            },
        ] {
            total += half.value(gamma);
            let e = half.error_bound(gamma);
            if e > 0.0 {
                pending += e;
                heap.push(Ranked(e, half));
            }
        }
    }
    Ok(total)
}

/// Layer-cake Riesz mean of an explicit spectrum.
pub fn riesz_mean_of_spectrum(spectrum: &Spectrum, gamma: f64, opts: LayerCakeOptions) -> Result<f64> {
    let t_max = spectrum.values.first().map(|v| (-v).max(0.0)).unwrap_or(0.0);
    riesz_mean_layer_cake(|e| Ok(spectrum.count_le(e)), t_max, gamma, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec(), None, "test")
    }

    #[test]
    fn small_examples() {
        let o = LayerCakeOptions::default();
        assert!((riesz_mean_of_spectrum(&spec(&[-1.0]), 1.0, o).unwrap() - 1.0).abs() < 1e-12);
        assert!((riesz_mean_of_spectrum(&spec(&[-2.0, -1.0]), 1.0, o).unwrap() - 3.0).abs() < 1e-6);
        assert!((riesz_mean_of_spectrum(&spec(&[-4.0]), 0.5, o).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(riesz_mean_of_spectrum(&spec(&[0.5, 2.0]), 0.5, o).unwrap(), 0.0);
    }

    #[test]
    fn matches_power_sum_without_refinement_roughly() {
        let values: Vec<f64> = (0..200).map(|j| -1.0 + 0.01 * j as f64).collect();
        let s = spec(&values);
        for gamma in [0.25, 0.5, 1.0] {
            let direct = s.riesz_sum(gamma);
            let lc = riesz_mean_of_spectrum(&s, gamma, LayerCakeOptions::default()).unwrap();
            assert!((lc - direct).abs() / direct < 1e-3, "γ = {gamma}: {lc} vs {direct}");
        }
    }

    #[test]
    fn gamma_zero_is_rejected() {
        assert!(riesz_mean_of_spectrum(&spec(&[-1.0]), 0.0, LayerCakeOptions::default()).is_err());
    }
}
