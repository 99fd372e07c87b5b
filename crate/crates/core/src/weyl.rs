// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Classical phase-space functionals (2πℏ)^{−d} ∬ g_γ(p² + V(x)) φ(x) dx dp.
//!
//! The momentum integral is done in closed form, leaving
//! ℏ^{−d} L^cl_{γ,d} ∫ φ V₋^{γ+d/2} dx, which is integrated by the
//! midpoint rule. A Monte Carlo estimate of the full 2d-dimensional
//! integral serves as an independent check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::grid::SampledField;
use crate::params::{check_gamma, g_gamma, HolderClass};
use crate::potential::{Potential, SeparableSpec};
use crate::special::gamma as gamma_fn;

/// L^cl_{γ,d} = Γ(γ+1) / ((4π)^{d/2} Γ(γ+d/2+1)).
pub fn classical_constant(gamma: f64, d: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if d == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let half_d = d as f64 / 2.0;
    Ok(gamma_fn(gamma + 1.0) / ((4.0 * std::f64::consts::PI).powf(half_d) * gamma_fn(gamma + half_d + 1.0)))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylTermResult {
    pub value: f64,
    pub quadrature_error_estimate: f64,
    pub gamma: f64,
    pub hbar: f64,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn density(v: f64, exponent: f64) -> f64 {
    if v < 0.0 {
        (-v).powf(exponent)
    } else {
        0.0
    }
}

fn midpoint_sum<P: Potential + ?Sized>(
    potential: &P,
    weight: Option<&(dyn Fn(&[f64]) -> f64 + Sync)>,
    half_width: f64,
    cells: usize,
    exponent: f64,
) -> f64 {
    let d = potential.dim();
    let h = 2.0 * half_width / cells as f64;
    let total = cells.pow(d as u32);
    // Fixed blocks summed in order, so the result does not depend on
    // how the pool splits the work.
    const BLOCK: usize = 1 << 14;
    let partial: Vec<f64> = (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut x = vec![0.0; d];
            let mut acc = 0.0;
            for flat in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let mut rest = flat;
                for a in (0..d).rev() {
                    x[a] = -half_width + (rest % cells) as f64 * h + 0.5 * h;
                    rest /= cells;
                }
                let f = density(potential.value_at(&x), exponent);
                if f != 0.0 {
                    acc += f * weight.map_or(1.0, |w| w(&x));
                }
            }
            acc
        })
        .collect();
    partial.iter().sum::<f64>() * h.powi(d as i32)
}

fn check_boundary<P: Potential + ?Sized>(potential: &P, half_width: f64) -> Result<()> {
    let d = potential.dim();
    let n = 64usize;
    let mut x = vec![0.0; d];
    for face in 0..2 * d {
        let axis = face / 2;
        let side = if face % 2 == 0 { -half_width } else { half_width };
        for flat in 0..n.pow((d - 1) as u32) {
            let mut rest = flat;
            for a in 0..d {
                if a == axis {
                    x[a] = side;
                } else {
                    x[a] = -half_width + 2.0 * half_width * ((rest % n) as f64 + 0.5) / n as f64;
                    rest /= n;
                }
            }
            if potential.value_at(&x) < 0.0 {
                return Err(Error::Domain(format!(
                    "V₋ does not vanish on the integration box boundary at {x:?}; enlarge the box"
                )));
            }
        }
    }
    Ok(())
}

/// ℏ^{−d} L^cl_{γ,d} ∫_{[−L,L]^d} φ V₋^{γ+d/2} by the midpoint rule with
/// `cells` cells per axis. The estimate is the fine-level value; the error
/// estimate is its difference from the half-resolution level.
pub fn weyl_term_quadrature<P: Potential + ?Sized>(
    potential: &P,
    weight: Option<&(dyn Fn(&[f64]) -> f64 + Sync)>,
    hbar: f64,
    gamma: f64,
    half_width: f64,
    cells: usize,
) -> Result<WeylTermResult> {
    let d = potential.dim();
    let lcl = classical_constant(gamma, d)?;
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("ℏ = {hbar} must be positive")));
    }
    if half_width > potential.box_half_width() + 1e-12 {
        return Err(Error::Domain("integration box exceeds the evaluation box".into()));
    }
    check_boundary(potential, half_width)?;
    let cells = cells.max(4) & !1;
    let exponent = gamma + d as f64 / 2.0;
    let fine = midpoint_sum(potential, weight, half_width, cells, exponent);
    let coarse = midpoint_sum(potential, weight, half_width, cells / 2, exponent);
    let scale = lcl / hbar.powi(d as i32);
    Ok(WeylTermResult {
        value: scale * fine,
        quadrature_error_estimate: scale * (fine - coarse).abs(),
        gamma,
        hbar,
        dim: d,
        warning: None,
    })
}

/// The same functional for a sampled potential, treating grid nodes as cell
/// midpoints. The coarse level uses every other node.
pub fn weyl_term_from_field(field: &SampledField, phi: Option<&SampledField>, hbar: f64, gamma: f64) -> Result<WeylTermResult> {
    let grid = field.grid;
    let d = grid.dim;
    let lcl = classical_constant(gamma, d)?;
    let exponent = gamma + d as f64 / 2.0;
    let mut idx = vec![0usize; d];
    let (mut fine, mut coarse) = (0.0, 0.0);
    for flat in 0..grid.len() {
        let f = density(field.values[flat], exponent);
        if f == 0.0 {
            continue;
        }
        if grid.is_edge_node(flat) {
            return Err(Error::Domain("V₋ reaches the grid boundary; enlarge the box".into()));
        }
        let w = f * phi.map_or(1.0, |p| p.values[flat]);
        fine += w;
        grid.multi_index(flat, &mut idx);
        if idx.iter().all(|i| i % 2 == 1) {
            coarse += w;
        }
    }
    let h = grid.spacing();
    let fine = fine * h.powi(d as i32);
    let coarse = coarse * (2.0 * h).powi(d as i32);
    let scale = lcl / hbar.powi(d as i32);
    Ok(WeylTermResult {
        value: scale * fine,
        quadrature_error_estimate: scale * (fine - coarse).abs(),
        gamma,
        hbar,
        dim: d,
        warning: None,
    })
}

/// Samples per Monte Carlo shard; shard i uses stream i of the seed.
pub const SHARD_SIZE: usize = 1 << 16;

/// Monte Carlo estimate of (2πℏ)^{−d} ∬ g_γ(p² + V(x)) dx dp over
/// [−L, L]^d × [−P, P]^d with P² bounding max V₋.
pub fn weyl_term_montecarlo<P: Potential + ?Sized>(
    potential: &P,
    hbar: f64,
    gamma: f64,
    half_width: f64,
    samples: usize,
    seed: u64,
) -> Result<WeylTermResult> {
    check_gamma(gamma)?;
    let d = potential.dim();
    // Bound on max V₋ from a coarse scan, with a safety factor.
    let probe = crate::grid::GridSpec::new(d, half_width, if d == 1 { 2000 } else { 60 })?;
    let min_v = probe.sample(|x| potential.value_at(x)).min();
    let mut result = WeylTermResult {
        value: 0.0,
        quadrature_error_estimate: 0.0,
        gamma,
        hbar,
        dim: d,
        warning: None,
    };
    if min_v >= 0.0 {
        return Ok(result);
    }
    let p_max = (-min_v * 1.1).sqrt();
    let shards = samples.div_ceil(SHARD_SIZE);
    let partial: Vec<(f64, f64, usize)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut x = vec![0.0; d];
            let (mut s, mut s2, mut hits) = (0.0, 0.0, 0usize);
            for _ in 0..count {
                let mut p2 = 0.0;
                for xi in x.iter_mut() {
                    *xi = rng.random_range(-half_width..half_width);
                }
                for _ in 0..d {
                    let p: f64 = rng.random_range(-p_max..p_max);
                    p2 += p * p;
                }
                let g = g_gamma(p2 + potential.value_at(&x), gamma);
                if g > 0.0 {
                    hits += 1;
                }
                s += g;
                s2 += g * g;
            }
            (s, s2, hits)
        })
        .collect();
    let (s, s2, hits) = partial
        .into_iter()
        .fold((0.0, 0.0, 0usize), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    let volume = (2.0 * half_width * 2.0 * p_max).powi(d as i32);
    let scale = volume / (2.0 * std::f64::consts::PI * hbar).powi(d as i32);
    result.value = scale * mean;
    result.quadrature_error_estimate = scale * (var / n).sqrt();
    if hits == 0 {
        result.warning = Some("no sample landed in the classically allowed region".into());
    }
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub epsilons: Vec<f64>,
    pub differences: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub required: f64,
    pub pass: bool,
}

/// |Weyl(V_ε) − Weyl(V)| across ε and its fitted log-log slope; passes if
/// the slope is at least (k + μ) − 0.2.
pub fn compare_phase_space<P, Q, F>(
    v: &P,
    mut v_eps: F,
    weight: Option<&(dyn Fn(&[f64]) -> f64 + Sync)>,
    hbar: f64,
    gamma: f64,
    half_width: f64,
    cells: usize,
    hc: HolderClass,
    eps_list: &[f64],
) -> Result<RateReport>
where
    P: Potential + ?Sized,
    Q: Potential,
    F: FnMut(f64) -> Result<Q>,
{
    if eps_list.len() < 3 {
        return Err(Error::Domain("rate fit needs at least three ε values".into()));
    }
    let base = weyl_term_quadrature(v, weight, hbar, gamma, half_width, cells)?.value;
    let mut differences = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let q = v_eps(eps)?;
        let w = weyl_term_quadrature(&q, weight, hbar, gamma, half_width, cells)?.value;
        differences.push((w - base).abs());
    }
    let (slope, se) = log_log_slope(eps_list, &differences);
    let required = hc.order() - 0.2;
    Ok(RateReport {
        epsilons: eps_list.to_vec(),
        differences,
        slope,
        slope_stderr: se,
        required,
        pass: slope >= required,
    })
}

/// ℏ-free Weyl integral L^cl_{γ,d} ∫ (Σ_i v_i(x_i))₋^{γ+d/2} dx for a
/// separable potential, so the Weyl term at ℏ is this value times ℏ^{−d}.
///
/// Each axis is cut down to the interval where v_i can still make the sum
/// negative, sampled at `cells` midpoints, and the tensor sum is pruned on
/// partial sums that can no longer go below zero.
pub fn separable_weyl_integral(spec: &SeparableSpec, gamma: f64, cells: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let d = spec.factors.len();
    let lcl = classical_constant(gamma, d)?;
    let exponent = gamma + d as f64 / 2.0;
    let probe = 4096usize;
    let minima: Vec<f64> = spec
        .factors
        .iter()
        .map(|f| {
            let b = f.box_half_width;
            (0..=probe)
                .map(|i| f.value_at(&[-b + 2.0 * b * i as f64 / probe as f64]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let total_min: f64 = minima.iter().sum();
    if total_min >= 0.0 {
        return Ok(0.0);
    }
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut volume = 1.0;
    for (i, f) in spec.factors.iter().enumerate() {
        let bound = -(total_min - minima[i]);
        let b = f.box_half_width;
        let step = 2.0 * b / probe as f64;
        let inside: Vec<f64> = (0..=probe)
            .map(|j| -b + step * j as f64)
            .filter(|&x| f.value_at(&[x]) < bound)
            .collect();
        let lo = (inside[0] - 2.0 * step).max(-b);
        let hi = (inside[inside.len() - 1] + 2.0 * step).min(b);
        if f.value_at(&[lo]) < bound || f.value_at(&[hi]) < bound {
            return Err(Error::Domain(format!(
                "factor {i} stays below the Weyl threshold at its box edge; enlarge the box"
            )));
        }
        let h = (hi - lo) / cells as f64;
        volume *= h;
        let mut v: Vec<f64> = (0..cells).map(|j| f.value_at(&[lo + (j as f64 + 0.5) * h])).collect();
        v.sort_by(f64::total_cmp);
        samples.push(v);
    }
    let mut rest = vec![0.0; d + 1];
    for i in (0..d).rev() {
        rest[i] = rest[i + 1] + samples[i][0];
    }
    fn walk(samples: &[Vec<f64>], rest: &[f64], level: usize, partial: f64, exponent: f64) -> f64 {
        let mut acc = 0.0;
        if level + 1 == samples.len() {
            for &v in &samples[level] {
                let s = partial + v;
                if s >= 0.0 {
                    break;
                }
                acc += (-s).powf(exponent);
            }
            return acc;
        }
        for &v in &samples[level] {
            let s = partial + v;
            if s + rest[level + 1] >= 0.0 {
                break;
            }
            acc += walk(samples, rest, level + 1, s, exponent);
        }
        acc
    }
    // The first axis is split across the pool; each slice is summed in order.
    let partial: Vec<f64> = samples[0]
        .par_iter()
        .map(|&v| {
            if d == 1 {
                if v < 0.0 {
                    (-v).powf(exponent)
                } else {
                    0.0
                }
            } else if v + rest[1] >= 0.0 {
                0.0
            } else {
                walk(&samples, &rest, 1, v, exponent)
            }
        })
        .collect();
    Ok(lcl * volume * partial.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::catalog;
    use crate::special::unit_ball_volume;

    #[test]
    fn constants() {
        let c = classical_constant(0.0, 1).unwrap();
        assert!((c - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        for d in 1..=4 {
            let c = classical_constant(0.0, d).unwrap();
            let expect = unit_ball_volume(d) / (2.0 * std::f64::consts::PI).powi(d as i32);
            assert!((c - expect).abs() < 1e-14 * expect);
        }
    }

    #[test]
    fn harmonic_examples() {
        let v = catalog::harmonic(1, 1.0, 0.25, 3.0);
        let r = weyl_term_quadrature(&v, None, 0.1, 0.0, 3.0, 4000).unwrap();
        assert!((r.value - 5.0).abs() < 1e-3, "{}", r.value);
        let v2 = catalog::harmonic(2, 1.0, 0.25, 2.0);
        let r2 = weyl_term_quadrature(&v2, None, 0.1, 0.0, 2.0, 800).unwrap();
        assert!((r2.value - 12.5).abs() < 1e-2, "{}", r2.value);
    }

    #[test]
    fn positive_potential_gives_zero() {
        let mut v = catalog::harmonic(1, 1.0, 0.25, 3.0);
        v.smooth[1] = crate::potential::SmoothTerm::Constant { value: 0.5 };
        assert_eq!(weyl_term_quadrature(&v, None, 0.1, 0.5, 3.0, 100).unwrap().value, 0.0);
        assert_eq!(weyl_term_montecarlo(&v, 0.1, 0.5, 3.0, 1000, 1).unwrap().value, 0.0);
    }

    #[test]
    fn box_too_small_is_domain_error() {
        let v = catalog::harmonic(1, 1.0, 0.25, 3.0);
        assert!(matches!(weyl_term_quadrature(&v, None, 0.1, 0.0, 0.8, 100), Err(Error::Domain(_))));
    }

    #[test]
    fn montecarlo_agrees() {
        let v = catalog::harmonic(1, 1.0, 0.25, 3.0);
        let mc = weyl_term_montecarlo(&v, 0.1, 0.0, 1.5, 400_000, 42).unwrap();
        assert!((mc.value - 5.0).abs() < 3.0 * mc.quadrature_error_estimate, "{mc:?}");
        let again = weyl_term_montecarlo(&v, 0.1, 0.0, 1.5, 400_000, 42).unwrap();
        assert_eq!(mc.value, again.value);
        let c = classical_constant(1.0, 1).unwrap();
        let mc1 = weyl_term_montecarlo(&v, 1.0, 1.0, 1.5, 400_000, 3).unwrap();
        // ∫(1 − x²)^{3/2} dx = 3π/8.
        let exact = c * 3.0 * std::f64::consts::PI / 8.0;
        assert!((mc1.value - exact).abs() < 0.005 * exact + 3.0 * mc1.quadrature_error_estimate);
    }

    #[test]
    fn exact_hbar_scaling() {
        let v = catalog::harmonic(1, 1.0, 0.25, 3.0);
        let a = weyl_term_quadrature(&v, None, 0.1, 0.5, 3.0, 200).unwrap().value * 0.1;
        let b = weyl_term_quadrature(&v, None, 0.37, 0.5, 3.0, 200).unwrap().value * 0.37;
        assert!((a - b).abs() <= 1e-13 * a);
    }
    #[test]
    fn separable_integral_matches_oscillator() {
        use crate::potential::{catalog, SeparableSpec};
        // Σ(x_i² − 1) is the oscillator with λ = 2.
        let f = catalog::harmonic(1, 1.0, 0.25, 3.0);
        let sep = SeparableSpec::isotropic(f, 2).unwrap();
        let w = separable_weyl_integral(&sep, 0.0, 800).unwrap();
        let exact = crate::spectra::oscillator::oscillator_weyl(2, 1.0, 2.0, 0.0).unwrap();
        assert!((w - exact).abs() < 1e-4 * exact, "{w} vs {exact}");
        let w1 = separable_weyl_integral(&sep, 1.0, 800).unwrap();
        let exact1 = crate::spectra::oscillator::oscillator_weyl(2, 1.0, 2.0, 1.0).unwrap();
        assert!((w1 - exact1).abs() < 1e-4 * exact1, "{w1} vs {exact1}");
    }
}
