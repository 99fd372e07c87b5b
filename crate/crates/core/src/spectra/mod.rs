// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete spectra of −ℏ²Δ + V: assembly, inertia counting, dense and
//! tridiagonal eigensolves, Riesz means, separable composition, the
//! oscillator oracle, the smoothing kernel and the decay checks.

pub mod agmon;
pub mod dense;
pub mod inertia;
pub mod operator;
pub mod oscillator;
pub mod riesz;
pub mod separable;
pub mod smoothing;
pub mod tridiag;

use std::fmt::Write as _;

use crate::params::g_gamma;

pub use operator::SparseSymOperator;

/// Sorted eigenvalues with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub hbar: Option<f64>,
    pub method: String,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, hbar: Option<f64>, method: &str) -> Self {
        values.sort_by(f64::total_cmp);
        Self {
            values,
            hbar,
            method: method.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// #{λ_j ≤ e}.
    pub fn count_le(&self, e: f64) -> usize {
        self.values.partition_point(|&v| v <= e)
    }

    /// Σ_j g_γ(λ_j), the direct trace.
    pub fn riesz_sum(&self, gamma: f64) -> f64 {
        self.values.iter().take_while(|&&v| v <= 0.0).map(|&v| g_gamma(v, gamma)).sum()
    }

    /// CSV rows `method,hbar,E_or_t,value` of the counting function at the
    /// given energies.
    pub fn counting_csv(&self, energies: &[f64]) -> String {
        let mut out = String::from("method,hbar,E_or_t,value\n");
        let hbar = self.hbar.map(|h| h.to_string()).unwrap_or_default();
        for &e in energies {
            let _ = writeln!(out, "{},{hbar},{e},{}", self.method, self.count_le(e));
        }
        out
    }
}
