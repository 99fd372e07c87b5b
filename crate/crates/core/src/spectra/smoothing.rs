// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Non-negative spectral smoothing kernels with compactly supported Fourier
//! transform.
//!
//! With η̂ an even bump on (−T/2, T/2) and χ̂ = η̂∗η̂, the time-domain
//! kernel is χ₁ = 2π·η₁², which is non-negative, and χ̂ is supported in
//! (−T, T). The price is that χ̂ is not identically one near the origin;
//! the deficit is measured and reported.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mollify::bump_profile;
use crate::params::g_gamma;
use crate::spectra::Spectrum;

const FREQ_NODES: usize = 2048;

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingKernel {
    /// χ̂ is supported in (−T, T).
    pub support: f64,
    /// Largest t with χ₁ ≥ χ₁(0)/2 on [−t, t].
    pub plateau: f64,
    /// min χ₁ on [−T₁, T₁].
    pub lower_bound: f64,
    /// sup over |τ| ≤ T/2 of |1 − χ̂(τ)|.
    pub plateau_deficit: f64,
    /// Mass of the trapezoid samples before renormalization, minus one.
    pub raw_mass_defect: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub chi1: Vec<f64>,
}

/// Build the kernel for Fourier support T.
pub fn build_smoothing_kernel(support: f64) -> Result<SmoothingKernel> {
    if !(support > 0.0) {
        return Err(Error::Domain(format!("kernel support T = {support} must be positive")));
    }
    let half = 0.5 * support;
    // η̂(τ) = ρ(τ/(T/2)) on a uniform frequency grid; the trapezoid rule is
    // spectrally accurate because every derivative vanishes at ±T/2.
    let dtau = support / FREQ_NODES as f64;
    let taus: Vec<f64> = (0..=FREQ_NODES).map(|j| -half + j as f64 * dtau).collect();
    let mut eta_hat: Vec<f64> = taus.iter().map(|&t| bump_profile(t / half)).collect();
    let l2 = eta_hat.iter().map(|v| v * v).sum::<f64>() * dtau;
    let s = l2.sqrt();
    eta_hat.iter_mut().for_each(|v| *v /= s);

    let t_max = 400.0 / support;
    let dt = 0.02 / support;
    let m = (t_max / dt).round() as usize;
    let times: Vec<f64> = (0..=2 * m).map(|i| (i as f64 - m as f64) * dt).collect();
    let mut chi1 = vec![0.0; times.len()];
    for i in m..=2 * m {
        let t = times[i];
        let eta1 = taus
            .iter()
            .zip(&eta_hat)
            .map(|(&tau, &e)| e * (t * tau).cos())
            .sum::<f64>()
            * dtau
            / (2.0 * std::f64::consts::PI);
        let v = 2.0 * std::f64::consts::PI * eta1 * eta1;
        chi1[i] = v;
        chi1[2 * m - i] = v;
    }
    let mass = chi1.iter().sum::<f64>() * dt;
    chi1.iter_mut().for_each(|v| *v /= mass);

    let peak = chi1[m];
    let mut k = m;
    while k + 1 <= 2 * m && chi1[k + 1] >= 0.5 * peak {
        k += 1;
    }
    let plateau = times[k];
    let lower_bound = chi1[2 * m - k..=k].iter().copied().fold(f64::INFINITY, f64::min);

    // χ̂(τ) = ∫η̂(σ)η̂(τ − σ)dσ, largest deviation from 1 at the edge τ = T/2.
    let shift = FREQ_NODES / 2;
    let chi_hat_edge: f64 = (shift..=FREQ_NODES).map(|j| eta_hat[j] * eta_hat[j - shift]).sum::<f64>() * dtau;
    Ok(SmoothingKernel {
        support,
        plateau,
        lower_bound,
        plateau_deficit: (1.0 - chi_hat_edge).abs(),
        raw_mass_defect: mass - 1.0,
        dt,
        times,
        chi1,
    })
}

impl SmoothingKernel {
    /// ∫ χ₁ by the trapezoid samples.
    pub fn mass(&self) -> f64 {
        self.chi1.iter().sum::<f64>() * self.dt
    }

    /// (g_γ ∗ χ_ℏ)(λ) = ∫ g_γ(λ − ℏu) χ₁(u) du.
    pub fn smoothed_g(&self, lambda: f64, hbar: f64, gamma: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.chi1)
            .map(|(&u, &c)| g_gamma(lambda - hbar * u, gamma) * c)
            .sum::<f64>()
            * self.dt
    }
}

/// Σ_j (g_γ ∗ χ_ℏ)(λ_j).
pub fn smoothed_trace(spectrum: &Spectrum, kernel: &SmoothingKernel, hbar: f64, gamma: f64) -> Result<f64> {
    crate::params::check_gamma(gamma)?;
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("ℏ = {hbar} must be positive")));
    }
    let reach = hbar * kernel.times.last().copied().unwrap_or(0.0);
    Ok(spectrum
        .values
        .iter()
        .take_while(|&&l| l <= reach)
        .map(|&l| kernel.smoothed_g(l, hbar, gamma))
        .sum())
}
