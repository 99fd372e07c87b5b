// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Spectra of separable operators Σ_i H_i as sums of one-dimensional
//! eigenvalues, enumerated by depth-first expansion with a pruning bound so
//! the full tensor product is never formed.

use crate::error::{Error, Result};
use crate::params::g_gamma;
use crate::spectra::Spectrum;

/// Default cap on the number of retained sums.
pub const DEFAULT_BUDGET: usize = 20_000_000;

fn suffix_minima(spectra: &[Spectrum]) -> Result<Vec<f64>> {
    let d = spectra.len();
    if d == 0 {
        return Err(Error::Domain("no factor spectra given".into()));
    }
    let mut rest = vec![0.0; d + 1];
    for i in (0..d).rev() {
        let first = spectra[i]
            .values
            .first()
            .ok_or_else(|| Error::Domain(format!("factor {i} has an empty spectrum")))?;
        rest[i] = rest[i + 1] + first;
    }
    Ok(rest)
}

/// Visit every sum ≤ cutoff; the last factor is handed over as a sorted
/// prefix so callers can aggregate without iterating it.
fn walk<F: FnMut(f64, &[f64])>(spectra: &[Spectrum], rest: &[f64], level: usize, partial: f64, cutoff: f64, f: &mut F) {
    let last = spectra.len() - 1;
    if level == last {
        let vals = &spectra[last].values;
        let k = vals.partition_point(|&v| partial + v <= cutoff);
        if k > 0 {
            f(partial, &vals[..k]);
        }
        return;
    }
    for &v in &spectra[level].values {
        let s = partial + v;
        if s + rest[level + 1] > cutoff {
            break;
        }
        walk(spectra, rest, level + 1, s, cutoff, f);
    }
}

/// #{sums ≤ e}, without materializing them.
pub fn separable_count(spectra: &[Spectrum], e: f64) -> Result<u64> {
    let rest = suffix_minima(spectra)?;
    let mut total = 0u64;
    walk(spectra, &rest, 0, 0.0, e, &mut |_, tail| total += tail.len() as u64);
    Ok(total)
}

/// Σ g_γ(sum) over all sums, i.e. the Riesz mean of the separable operator.
pub fn separable_riesz(spectra: &[Spectrum], gamma: f64) -> Result<f64> {
    crate::params::check_gamma(gamma)?;
    let rest = suffix_minima(spectra)?;
    let mut total = 0.0;
    walk(spectra, &rest, 0, 0.0, 0.0, &mut |p, tail| {
        if gamma == 0.0 {
            total += tail.len() as f64;
        } else {
            total += tail.iter().map(|&v| g_gamma(p + v, gamma)).sum::<f64>();
        }
    });
    Ok(total)
}

/// All sums λ_{j₁} + … + λ_{j_d} ≤ cutoff, ascending.
pub fn compose_separable_spectrum(spectra: &[Spectrum], cutoff: f64) -> Result<Spectrum> {
    compose_with_budget(spectra, cutoff, DEFAULT_BUDGET)
}

pub fn compose_with_budget(spectra: &[Spectrum], cutoff: f64, budget: usize) -> Result<Spectrum> {
    let count = separable_count(spectra, cutoff)?;
    if count > budget as u64 {
        return Err(Error::Resource(format!(
            "{count} composed eigenvalues below {cutoff} exceed the budget of {budget}"
        )));
    }
    let rest = suffix_minima(spectra)?;
    let mut out = Vec::with_capacity(count as usize);
    walk(spectra, &rest, 0, 0.0, cutoff, &mut |p, tail| out.extend(tail.iter().map(|v| p + v)));
    let hbar = spectra[0].hbar;
    Ok(Spectrum::new(out, hbar, "separable"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec(), None, "t")
    }

    #[test]
    fn two_level_example() {
        let c = compose_separable_spectrum(&[s(&[1.0, 3.0]), s(&[1.0, 3.0])], 7.0).unwrap();
        assert_eq!(c.values, vec![2.0, 4.0, 4.0, 6.0]);
        let c = compose_separable_spectrum(&[s(&[1.0, 3.0]), s(&[1.0, 3.0])], 5.0).unwrap();
        assert_eq!(c.values, vec![2.0, 4.0, 4.0]);
    }

    #[test]
    fn budget_is_enforced() {
        let a = s(&(0..100).map(f64::from).collect::<Vec<_>>());
        let err = compose_with_budget(&[a.clone(), a], 1e9, 10).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn riesz_matches_composed() {
        let a = s(&[-1.0, -0.4, 0.2, 0.9]);
        let b = s(&[-0.7, 0.1, 0.3]);
        let c = compose_separable_spectrum(&[a.clone(), b.clone(), a.clone()], 0.0).unwrap();
        for gamma in [0.0, 0.5, 1.0] {
            let direct = c.riesz_sum(gamma);
            let walked = separable_riesz(&[a.clone(), b.clone(), a.clone()], gamma).unwrap();
            assert!((direct - walked).abs() < 1e-12);
        }
    }
}
