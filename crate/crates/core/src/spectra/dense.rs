// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Dense symmetric eigensolves, the reference path for small operators.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::spectra::operator::SparseSymOperator;
use crate::spectra::Spectrum;

/// Largest order accepted by the dense path.
pub const DENSE_MAX_ORDER: usize = 3000;

fn check(op: &SparseSymOperator) -> Result<()> {
    if op.order() > DENSE_MAX_ORDER {
        return Err(Error::Resource(format!(
            "dense eigensolve of order {} exceeds {DENSE_MAX_ORDER}",
            op.order()
        )));
    }
    Ok(())
}

/// All eigenvalues, ascending.
pub fn dense_spectrum(op: &SparseSymOperator) -> Result<Spectrum> {
    check(op)?;
    if let Some((d, o)) = op.as_tridiagonal() {
        if op.order() > 1 {
            let values = super::tridiag::lowest_eigenvalues(&d, &o, op.order())?;
            return Ok(Spectrum::new(values, Some(op.hbar()), "dense-tridiagonal"));
        }
    }
    let values: Vec<f64> = op.to_dense().symmetric_eigenvalues().iter().copied().collect();
    Ok(Spectrum::new(values, Some(op.hbar()), "dense"))
}

/// Eigenvalues ascending with unit eigenvectors.
pub fn dense_eigenpairs(op: &SparseSymOperator) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check(op)?;
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..op.order()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_and_general_paths_agree() {
        let n = 30;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3 - 4.0).powi(2) - 2.0).collect();
        let upper: Vec<_> = (0..n - 1).map(|i| (i, i + 1, -1.0)).collect();
        let op = SparseSymOperator::from_parts(diag, upper, 1.0).unwrap();
        let a = dense_spectrum(&op).unwrap();
        let b: Vec<f64> = {
            let mut v: Vec<f64> = op.to_dense().symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for (x, y) in a.values.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let (vals, vecs) = dense_eigenpairs(&op).unwrap();
        assert!((vals[0] - b[0]).abs() < 1e-12);
        let norm: f64 = vecs[0].iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
