// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Exact spectral data of H = −ℏ²Δ + |x|² − λ on ℝ^d. The eigenvalues are
//! ℏ(2n + d) − λ with multiplicity C(n + d − 1, d − 1).

use crate::error::{Error, Result};
use crate::params::check_gamma;
use crate::special::{binomial, gamma as gamma_fn};
use crate::spectra::Spectrum;

/// Largest shell index n with ℏ(2n + d) ≤ λ, or None when no level is ≤ λ.
/// Levels within a relative 1e−12 of λ count as ≤ λ.
pub fn top_shell(d: usize, hbar: f64, lambda: f64) -> Option<u64> {
    let x = 0.5 * (lambda / hbar - d as f64);
    let x = x + 1e-12 * x.abs().max(1.0);
    if x < 0.0 {
        None
    } else {
        Some(x.floor() as u64)
    }
}

/// Tr g_γ(H): #{m ∈ ℕ₀^d : ℏ(2|m|₁ + d) ≤ λ} for γ = 0, and
/// Σ_m (λ − ℏ(2|m|₁ + d))₊^γ for γ > 0.
pub fn oscillator_lattice_count(d: usize, hbar: f64, lambda: f64, gamma: f64) -> Result<f64> {
    check(d, hbar, lambda)?;
    check_gamma(gamma)?;
    let Some(top) = top_shell(d, hbar, lambda) else {
        return Ok(0.0);
    };
    if gamma == 0.0 {
        return Ok(binomial(top + d as u64, d as u64) as f64);
    }
    let mut total = 0.0;
    for n in 0..=top {
        let gap = lambda - hbar * (2.0 * n as f64 + d as f64);
        if gap > 0.0 {
            total += binomial(n + d as u64 - 1, d as u64 - 1) as f64 * gap.powf(gamma);
        }
    }
    Ok(total)
}

/// Weyl term Γ(γ+1)·λ^{γ+d} / (2^d ℏ^d Γ(γ+d+1)).
pub fn oscillator_weyl(d: usize, hbar: f64, lambda: f64, gamma: f64) -> Result<f64> {
    check(d, hbar, lambda)?;
    check_gamma(gamma)?;
    let df = d as f64;
    Ok(gamma_fn(gamma + 1.0) * lambda.powf(gamma + df) / (2f64.powf(df) * hbar.powf(df) * gamma_fn(gamma + df + 1.0)))
}

/// Lowest `count` one-dimensional levels ℏ(2n + 1) − λ.
pub fn oscillator_levels_1d(hbar: f64, lambda: f64, count: usize) -> Spectrum {
    let values = (0..count).map(|n| hbar * (2.0 * n as f64 + 1.0) - lambda).collect();
    Spectrum::new(values, Some(hbar), "oscillator")
}

/// sup |N(ℏ') − W(ℏ')| over `samples` geometric points ℏ' ∈ [hbar_lo, hbar_hi].
///
/// The pointwise residual oscillates with the fractional part of λ/(2ℏ),
/// so rates are fitted to this envelope rather than to single points.
/// Boundary-exact points (zero residual) do not affect the supremum.
pub fn residual_envelope(d: usize, lambda: f64, gamma: f64, hbar_lo: f64, hbar_hi: f64, samples: usize) -> Result<f64> {
    if !(hbar_lo > 0.0 && hbar_hi >= hbar_lo) || samples == 0 {
        return Err(Error::Domain("invalid envelope cell".into()));
    }
    let mut sup = 0.0f64;
    for i in 0..samples {
        let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
        let h = hbar_lo * (hbar_hi / hbar_lo).powf(t);
        let r = (oscillator_lattice_count(d, h, lambda, gamma)? - oscillator_weyl(d, h, lambda, gamma)?).abs();
        sup = sup.max(r);
    }
    Ok(sup)
}

fn check(d: usize, hbar: f64, lambda: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("ℏ = {hbar} must be positive")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ = {lambda} must be positive")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(oscillator_lattice_count(1, 0.12, 1.0, 0.0).unwrap(), 4.0);
        assert_eq!(oscillator_lattice_count(2, 0.1, 1.0, 0.0).unwrap(), 15.0);
        assert!((oscillator_weyl(2, 0.1, 1.0, 0.0).unwrap() - 12.5).abs() < 1e-12);
        assert_eq!(oscillator_lattice_count(1, 0.1, 1.0, 0.0).unwrap(), 5.0);
        assert!((oscillator_weyl(1, 0.1, 1.0, 0.0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_oracle() {
        // Brute force over the lattice in d = 3.
        for &(h, lam, g) in &[(0.07, 1.0, 0.0), (0.05, 1.3, 0.5), (0.11, 2.0, 1.0)] {
            let mut direct = 0.0;
            for a in 0..60u32 {
                for b in 0..60u32 {
                    for c in 0..60u32 {
                        let e = h * (2.0 * f64::from(a + b + c) + 3.0) - lam;
                        if e <= 0.0 {
                            direct += if g == 0.0 { 1.0 } else { (-e).powf(g) };
                        }
                    }
                }
            }
            let got = oscillator_lattice_count(3, h, lam, g).unwrap();
            assert!((got - direct).abs() < 1e-9 * direct.max(1.0), "{got} vs {direct}");
        }
    }

    #[test]
    fn riesz_weyl_one_dimensional() {
        // d = 1, γ = 1: Weyl term λ²/(4ℏ).
        let w = oscillator_weyl(1, 0.1, 1.0, 1.0).unwrap();
        assert!((w - 2.5).abs() < 1e-12);
    }
}
