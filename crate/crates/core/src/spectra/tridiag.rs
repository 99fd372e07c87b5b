// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for
//! eigenvalues and inverse iteration for eigenvectors.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below x.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let scale = diag.iter().chain(off).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tiny = f64::EPSILON * f64::EPSILON * scale;
    let mut count = 0;
    let mut q = diag[0] - x;
    if q == 0.0 {
        q = -tiny;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The j-th smallest eigenvalue (0-based) by bisection.
pub fn eigenvalue(diag: &[f64], off: &[f64], j: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues below the cutoff, ascending, refusing more than `max_count`.
pub fn eigenvalues_below(diag: &[f64], off: &[f64], cutoff: f64, max_count: usize) -> Result<Vec<f64>> {
    check_shape(diag, off)?;
    let count = sturm_count(diag, off, cutoff);
    if count > max_count {
        return Err(Error::Resource(format!(
            "{count} eigenvalues below {cutoff} exceed the budget of {max_count}"
        )));
    }
    Ok((0..count).map(|j| eigenvalue(diag, off, j)).collect())
}

/// The m smallest eigenvalues.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], m: usize) -> Result<Vec<f64>> {
    check_shape(diag, off)?;
    Ok((0..m.min(diag.len())).map(|j| eigenvalue(diag, off, j)).collect())
}

fn check_shape(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() || off.len() + 1 != diag.len() {
        return Err(Error::Domain("tridiagonal shape mismatch".into()));
    }
    Ok(())
}

/// Unit eigenvector for the eigenvalue `lambda`, by inverse iteration with
/// a partially pivoted tridiagonal LU. The sign makes the entry of largest
/// magnitude positive.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_shape(diag, off)?;
    let n = diag.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let scale = diag.iter().chain(off).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tiny = f64::EPSILON * scale;
    let mut dl = off.to_vec();
    let mut d: Vec<f64> = diag.iter().map(|v| v - lambda).collect();
    let mut du = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut piv = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            piv[i] = true;
        }
    }
    for v in d.iter_mut() {
        if v.abs() < tiny {
            *v = if *v < 0.0 { -tiny } else { tiny };
        }
    }
    let solve = |b: &mut [f64]| {
        for i in 0..n - 1 {
            if piv[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    };
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 % 101) as f64 / 101.0)).collect();
    for _ in 0..4 {
        solve(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical(format!("inverse iteration failed at λ = {lambda}")));
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    let imax = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap_or(0);
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn laplacian_eigenvalues() {
        let n = 50;
        let (d, o) = laplacian(n);
        for j in [0, 10, 49] {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((eigenvalue(&d, &o, j) - exact).abs() < 1e-13);
        }
        let below = eigenvalues_below(&d, &o, 0.5, 100).unwrap();
        assert_eq!(below.len(), sturm_count(&d, &o, 0.5));
    }

    #[test]
    fn eigenvector_residual() {
        let n = 200;
        let d: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.05 - 5.0).powi(2)).collect();
        let o = vec![-3.0; n - 1];
        for j in [0, 3, 17] {
            let lam = eigenvalue(&d, &o, j);
            let x = eigenvector(&d, &o, lam).unwrap();
            let mut res = 0.0f64;
            for i in 0..n {
                let mut y = d[i] * x[i] - lam * x[i];
                if i > 0 {
                    y += o[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += o[i] * x[i + 1];
                }
                res = res.max(y.abs());
            }
            assert!(res < 1e-10, "j = {j}: {res}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let (d, o) = laplacian(30);
        assert!(matches!(eigenvalues_below(&d, &o, 10.0, 5), Err(Error::Resource(_))));
    }
}
