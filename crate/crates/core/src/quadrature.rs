// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Double-exponential (tanh-sinh) quadrature on finite intervals.
//!
//! Integrands with algebraic endpoint singularities, and compactly supported
//! bumps whose derivatives all vanish at the support boundary, converge
//! exponentially in the number of nodes. Interior kinks must be placed on
//! interval endpoints by the caller.

use std::f64::consts::FRAC_PI_2;

/// Fixed tanh-sinh rule on the reference interval, stored as
/// (distance-to-endpoint, weight) pairs for t ≥ 0.
#[derive(Debug, Clone)]
pub struct TanhSinh {
    step: f64,
    // (1 - x_j, w_j) for t_j = j * step, j = 0..; x_0 = 0.
    nodes: Vec<(f64, f64)>,
}

impl TanhSinh {
    /// A rule with node spacing `2^-level` in the transformed variable.
    pub fn new(level: u32) -> Self {
        let step = 0.5f64.powi(level as i32);
        let mut nodes = Vec::new();
        let mut j = 0usize;
        loop {
            let t = j as f64 * step;
            let u = FRAC_PI_2 * t.sinh();
            let c = u.cosh();
            let complement = 1.0 / (u.exp() * c);
            let w = FRAC_PI_2 * t.cosh() / (c * c);
            if complement < 1e-300 || w < 1e-300 {
                break;
            }
            nodes.push((complement, w));
            j += 1;
        }
        Self { step, nodes }
    }

    /// ∫_a^b f(x) dx.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        if b <= a {
            return 0.0;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (j, &(complement, w)) in self.nodes.iter().enumerate() {
            let offset = half * complement;
            if j == 0 {
                acc += w * f(mid);
            } else {
                // Left and right nodes measured from their nearest endpoint.
                let left = a + offset;
                let right = b - offset;
                if left > a && left < b {
                    acc += w * f(left);
                }
                if right > a && right < b {
                    acc += w * f(right);
                }
            }
        }
        acc * half * self.step
    }
}

/// Integrate over [a, b], splitting at the given interior breakpoints.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    rule: &TanhSinh,
    a: f64,
    b: f64,
    breaks: &[f64],
    mut f: F,
) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lo = a;
    let mut acc = 0.0;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        acc += rule.integrate(lo, hi, &mut f);
        lo = hi;
    }
    acc
}
