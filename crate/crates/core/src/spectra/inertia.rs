// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Exact eigenvalue counting by Sylvester inertia.
//!
//! N(E) = #{λ ≤ E} is the number of negative pivots of a symmetric
//! indefinite factorization of A − E·I (plus zero pivots, which are removed
//! by nudging E upward). Two factorizations are provided: a banded LDLᵀ with
//! 1×1 and 2×2 pivots and no interchanges, used for grid operators, and a
//! dense Bunch–Kaufman factorization with symmetric interchanges, used when
//! the band is wide.

use crate::error::{Error, Result};
use crate::spectra::operator::SparseSymOperator;

/// Bunch's growth-balancing constant (1 + √17)/8.
pub const BUNCH_ALPHA: f64 = 0.640_388_203_202_208_4;

/// Pivots smaller than this multiple of ‖A‖ are treated as breakdown.
const BREAKDOWN: f64 = 1e-13;

/// Which factorization to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InertiaMethod {
    /// Banded unless the band covers more than a quarter of the matrix.
    Auto,
    Banded,
    Dense,
}

/// Outcome of a count, with the shift actually factorized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaCount {
    pub count: usize,
    pub shift_used: f64,
    pub perturbations: u32,
}

/// Number of eigenvalues ≤ E.
pub fn inertia_count(op: &SparseSymOperator, e: f64) -> Result<usize> {
    inertia_count_with(op, e, InertiaMethod::Auto).map(|c| c.count)
}

/// Number of eigenvalues ≤ E with an explicit method choice.
pub fn inertia_count_with(op: &SparseSymOperator, e: f64, method: InertiaMethod) -> Result<InertiaCount> {
    let n = op.order();
    if n == 0 {
        return Ok(InertiaCount {
            count: 0,
            shift_used: e,
            perturbations: 0,
        });
    }
    let band = op.half_bandwidth();
    let dense = match method {
        InertiaMethod::Auto => 4 * band > n,
        InertiaMethod::Banded => false,
        InertiaMethod::Dense => true,
    };
    let scale = op.norm_inf().max(e.abs()).max(f64::MIN_POSITIVE);
    let dense_work = if dense { Some(DenseLower::from_op(op)) } else { None };
    let banded_work = if dense { None } else { Some(Band::from_op(op)) };
    for attempt in 0..=3u32 {
        let shift = e + 1e-10 * (1.0 + e.abs()) * f64::from(attempt);
        let result = match (&dense_work, &banded_work) {
            (Some(d), _) => d.clone().negative_pivots(shift, scale),
            (None, Some(b)) => b.clone().negative_pivots(shift, scale),
            _ => unreachable!(),
        };
        if let Some(count) = result {
            return Ok(InertiaCount {
                count,
                shift_used: shift,
                perturbations: attempt,
            });
        }
    }
    Err(Error::Numerical(format!(
        "symmetric factorization broke down at E = {e} after 3 shift perturbations"
    )))
}

/// Upper band storage: row i holds A[i][i..=i+b].
#[derive(Debug, Clone)]
struct Band {
    n: usize,
    b: usize,
    data: Vec<f64>,
}

impl Band {
    fn from_op(op: &SparseSymOperator) -> Self {
        let n = op.order();
        let b = op.half_bandwidth();
        let w = b + 1;
        let mut data = vec![0.0; n * w];
        for (i, &d) in op.diag().iter().enumerate() {
            data[i * w] = d;
        }
        for &(i, j, v) in op.upper() {
            data[i * w + (j - i)] = v;
        }
        Self { n, b, data }
    }

    /// Negative pivot count of A − shift, or None on breakdown.
    fn negative_pivots(mut self, shift: f64, scale: f64) -> Option<usize> {
        let (n, b) = (self.n, self.b);
        let w = b + 1;
        for i in 0..n {
            self.data[i * w] -= shift;
        }
        let tiny = BREAKDOWN * scale;
        let mut neg = 0usize;
        let mut k = 0usize;
        let mut row = vec![0.0; w];
        let mut uu = vec![0.0; w];
        let mut vv = vec![0.0; w];
        let mut w1 = vec![0.0; w];
        let mut w2 = vec![0.0; w];
        while k < n {
            let a = self.data[k * w];
            let reach = b.min(n - 1 - k);
            let lam = (1..=reach).map(|j| self.data[k * w + j].abs()).fold(0.0, f64::max);
            let one_by_one = k + 1 == n || lam == 0.0 || a.abs() * scale >= BUNCH_ALPHA * lam * lam;
            if one_by_one {
                if !a.is_finite() || a.abs() <= tiny {
                    return None;
                }
                if a < 0.0 {
                    neg += 1;
                }
                row[..=reach].copy_from_slice(&self.data[k * w..k * w + reach + 1]);
                for i in 1..=reach {
                    let li = row[i] / a;
                    if li == 0.0 {
                        continue;
                    }
                    let base = (k + i) * w;
                    for j in i..=reach {
                        self.data[base + (j - i)] -= li * row[j];
                    }
                }
                k += 1;
            } else {
                let c = self.data[k * w + 1];
                let d = self.data[(k + 1) * w];
                let det = a * d - c * c;
                if !det.is_finite() || det.abs() <= tiny * scale {
                    return None;
                }
                if det < 0.0 {
                    neg += 1;
                } else if a + d < 0.0 {
                    neg += 2;
                }
                // Columns k and k+1 of the trailing block, indexed from k+2.
                let span = b.min(n - k - 2);
                for t in 0..span {
                    let col = k + 2 + t;
                    let u = if col - k <= b { self.data[k * w + (col - k)] } else { 0.0 };
                    let v = self.data[(k + 1) * w + (col - k - 1)];
                    uu[t] = u;
                    vv[t] = v;
                    w1[t] = (d * u - c * v) / det;
                    w2[t] = (a * v - c * u) / det;
                }
                for s in 0..span {
                    let (us, vs) = (uu[s], vv[s]);
                    if us == 0.0 && vs == 0.0 {
                        continue;
                    }
                    let base = (k + 2 + s) * w;
                    for t in s..span {
                        self.data[base + (t - s)] -= us * w1[t] + vs * w2[t];
                    }
                }
                k += 2;
            }
        }
        Some(neg)
    }
}

/// Row-major lower triangle of a dense symmetric matrix.
#[derive(Debug, Clone)]
struct DenseLower {
    n: usize,
    a: Vec<f64>,
}

impl DenseLower {
    fn from_op(op: &SparseSymOperator) -> Self {
        let n = op.order();
        let mut a = vec![0.0; n * n];
        for (i, &d) in op.diag().iter().enumerate() {
            a[i * n + i] = d;
        }
        for &(i, j, v) in op.upper() {
            a[j * n + i] = v;
        }
        Self { n, a }
    }

    /// Bunch–Kaufman with symmetric interchanges; negative pivot count of
    /// A − shift, or None on breakdown.
    fn negative_pivots(mut self, shift: f64, scale: f64) -> Option<usize> {
        let n = self.n;
        for i in 0..n {
            self.a[i * n + i] -= shift;
        }
        let tiny = BREAKDOWN * scale;
        let a = &mut self.a;
        let at = |i: usize, j: usize| i * n + j;
        let mut neg = 0usize;
        let mut k = 0usize;
        let mut w1 = vec![0.0; n];
        let mut w2 = vec![0.0; n];
        while k < n {
            let absakk = a[at(k, k)].abs();
            let (mut imax, mut colmax) = (k, 0.0f64);
            for i in k + 1..n {
                let v = a[at(i, k)].abs();
                if v > colmax {
                    colmax = v;
                    imax = i;
                }
            }
            if absakk.max(colmax) <= tiny || !absakk.is_finite() {
                return None;
            }
            let (kp, kstep) = if absakk >= BUNCH_ALPHA * colmax {
                (k, 1)
            } else {
                let mut rowmax = 0.0f64;
                for j in k..imax {
                    rowmax = rowmax.max(a[at(imax, j)].abs());
                }
                for i in imax + 1..n {
                    rowmax = rowmax.max(a[at(i, imax)].abs());
                }
                if absakk * rowmax >= BUNCH_ALPHA * colmax * colmax {
                    (k, 1)
                } else if a[at(imax, imax)].abs() >= BUNCH_ALPHA * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k + kstep - 1;
            if kp != kk {
                for i in kp + 1..n {
                    a.swap(at(i, kk), at(i, kp));
                }
                for j in kk + 1..kp {
                    a.swap(at(j, kk), at(kp, j));
                }
                a.swap(at(kk, kk), at(kp, kp));
                if kstep == 2 {
                    a.swap(at(k + 1, k), at(kp, k));
                }
            }
            if kstep == 1 {
                let d = a[at(k, k)];
                if d.abs() <= tiny {
                    return None;
                }
                if d < 0.0 {
                    neg += 1;
                }
                for j in k + 1..n {
                    w1[j] = a[at(j, k)] / d;
                }
                for i in k + 1..n {
                    let aik = a[at(i, k)];
                    if aik == 0.0 {
                        continue;
                    }
                    let row = &mut a[i * n + k + 1..=i * n + i];
                    for (r, wj) in row.iter_mut().zip(&w1[k + 1..=i]) {
                        *r -= aik * wj;
                    }
                }
                k += 1;
            } else {
                let d11 = a[at(k, k)];
                let d21 = a[at(k + 1, k)];
                let d22 = a[at(k + 1, k + 1)];
                let det = d11 * d22 - d21 * d21;
                if !det.is_finite() || det.abs() <= tiny * scale {
                    return None;
                }
                if det < 0.0 {
                    neg += 1;
                } else if d11 + d22 < 0.0 {
                    neg += 2;
                }
                for j in k + 2..n {
                    let u = a[at(j, k)];
                    let v = a[at(j, k + 1)];
                    w1[j] = (d22 * u - d21 * v) / det;
                    w2[j] = (d11 * v - d21 * u) / det;
                }
                for i in k + 2..n {
                    let ui = a[at(i, k)];
                    let vi = a[at(i, k + 1)];
                    let row = &mut a[i * n + k + 2..=i * n + i];
                    for (t, r) in row.iter_mut().enumerate() {
                        let j = k + 2 + t;
                        *r -= ui * w1[j] + vi * w2[j];
                    }
                }
                k += 2;
            }
        }
        Some(neg)
    }
}
