// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Mollification of Hölder functions and certification of the resulting
//! bounds |∂^α f_ε − ∂^α f| ≲ ε^{k+μ−|α|} and |∂^α f_ε| ≲ ε^{k+μ−|α|}.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SampledField;
use crate::params::HolderClass;
use crate::potential::{Potential, PotentialSpec};
use crate::quadrature::{integrate_with_breaks, TanhSinh};
use crate::special::unit_ball_volume;

/// exp(−1/(1 − r²)) for |r| < 1, zero otherwise.
pub fn bump_profile(r: f64) -> f64 {
    let s = 1.0 - r * r;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelProfile {
    /// The normalized bump itself; non-negative.
    Bump,
    /// (a + b|u|²)·bump with vanishing second moment, so that C^{2,μ}
    /// functions are approximated to order ε^{2+μ}. Takes negative values.
    MomentCorrected,
}

/// Radial kernel on the unit ball, scaled by ε at use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifierKernel {
    pub dim: usize,
    pub profile: KernelProfile,
    a: f64,
    b: f64,
}

fn radial_moment(dim: usize, k: i32) -> f64 {
    // |S^{d−1}| ∫₀¹ ρ(r) r^{k+d−1} dr
    let sphere = dim as f64 * unit_ball_volume(dim);
    let rule = TanhSinh::new(7);
    sphere * rule.integrate(0.0, 1.0, |r| bump_profile(r) * r.powi(k + dim as i32 - 1))
}

fn solve_weights(profile: KernelProfile, m0: f64, m2: f64, m4: f64) -> (f64, f64) {
    match profile {
        KernelProfile::Bump => (1.0 / m0, 0.0),
        KernelProfile::MomentCorrected => {
            let det = m0 * m4 - m2 * m2;
            (m4 / det, -m2 / det)
        }
    }
}

impl MollifierKernel {
    pub fn new(dim: usize, profile: KernelProfile) -> Self {
        let (a, b) = solve_weights(profile, radial_moment(dim, 0), radial_moment(dim, 2), radial_moment(dim, 4));
        Self { dim, profile, a, b }
    }

    /// Bump for k ≤ 1, moment-corrected for k ≥ 2.
    pub fn for_class(dim: usize, hc: HolderClass) -> Self {
        Self::new(dim, if hc.k >= 2 { KernelProfile::MomentCorrected } else { KernelProfile::Bump })
    }

    /// Kernel density at radius r (unit support).
    pub fn radial(&self, r: f64) -> f64 {
        (self.a + self.b * r * r) * bump_profile(r)
    }

    /// ∫ |u|^k K(u) du.
    pub fn moment(&self, k: i32) -> f64 {
        self.a * radial_moment(self.dim, k) + self.b * radial_moment(self.dim, k + 2)
    }

    /// Discrete weights on the offsets `r_j` (radii in units of ε), with
    /// the discrete mass (and, when corrected, the second moment) exact.
    fn discrete(&self, radii: &[f64]) -> Vec<f64> {
        let mut s = [0.0f64; 3];
        for &r in radii {
            let p = bump_profile(r);
            s[0] += p;
            s[1] += p * r * r;
            s[2] += p * r.powi(4);
        }
        let (a, b) = solve_weights(self.profile, s[0], s[1], s[2]);
        radii.iter().map(|&r| (a + b * r * r) * bump_profile(r)).collect()
    }
}

/// Discrete convolution of a sampled field with the kernel at scale ε.
/// Values outside the grid are taken as zero, so the result is exact
/// convolution of the zero extension.
pub fn mollify(field: &SampledField, epsilon: f64, kernel: &MollifierKernel) -> Result<SampledField> {
    let grid = field.grid;
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("ε = {epsilon} must be positive")));
    }
    if kernel.dim != grid.dim {
        return Err(Error::Domain("kernel and grid dimensions differ".into()));
    }
    let h = grid.spacing();
    if h > epsilon / 8.0 {
        return Err(Error::Precondition(format!(
            "grid spacing {h:.3e} exceeds ε/8 = {:.3e}",
            epsilon / 8.0
        )));
    }
    let d = grid.dim;
    let m = (epsilon / h).floor() as i64;
    let side = (2 * m + 1) as usize;
    let mut offsets: Vec<(Vec<i64>, f64)> = Vec::new();
    let mut idx = vec![0i64; d];
    for flat in 0..side.pow(d as u32) {
        let mut rest = flat;
        for a in (0..d).rev() {
            idx[a] = (rest % side) as i64 - m;
            rest /= side;
        }
        let r = idx.iter().map(|&i| (i as f64 * h).powi(2)).sum::<f64>().sqrt() / epsilon;
        if r < 1.0 {
            offsets.push((idx.clone(), r));
        }
    }
    let radii: Vec<f64> = offsets.iter().map(|o| o.1).collect();
    let weights = kernel.discrete(&radii);
    let n = grid.points_per_axis as i64;
    let strides: Vec<i64> = (0..d).map(|a| grid.stride(a) as i64).collect();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut base = vec![0usize; d];
            grid.multi_index(flat, &mut base);
            let mut acc = 0.0;
            'outer: for ((off, _), w) in offsets.iter().zip(&weights) {
                let mut target = 0i64;
                for a in 0..d {
                    let j = base[a] as i64 + off[a];
                    if j < 0 || j >= n {
                        continue 'outer;
                    }
                    target += j * strides[a];
                }
                acc += w * field.values[target as usize];
            }
            acc
        })
        .collect();
    Ok(SampledField { grid, values })
}

/// A closed-form one-dimensional function with known kink locations.
pub struct ClosedForm1d<'a> {
    pub f: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub breaks: Vec<f64>,
}

impl<'a> ClosedForm1d<'a> {
    pub fn new<F: Fn(f64) -> f64 + Sync + 'a>(f: F, breaks: Vec<f64>) -> Self {
        Self { f: Box::new(f), breaks }
    }

    /// f_ε(x) = ∫ f(x − εu) K(u) du by tanh-sinh split at the kinks.
    pub fn mollified(&self, x: f64, epsilon: f64, kernel: &MollifierKernel, rule: &TanhSinh) -> f64 {
        let cuts: Vec<f64> = self.breaks.iter().map(|b| (x - b) / epsilon).collect();
        integrate_with_breaks(rule, -1.0, 1.0, &cuts, |u| (self.f)(x - epsilon * u) * kernel.radial(u.abs()))
    }
}

/// A one-dimensional potential mollified in closed form.
pub struct MollifiedPotential1d<'a> {
    pub base: &'a PotentialSpec,
    pub epsilon: f64,
    pub kernel: MollifierKernel,
    rule: TanhSinh,
}

impl<'a> MollifiedPotential1d<'a> {
    pub fn new(base: &'a PotentialSpec, epsilon: f64) -> Result<Self> {
        if base.dim != 1 {
            return Err(Error::Domain("closed-form mollification is one-dimensional".into()));
        }
        Ok(Self {
            base,
            epsilon,
            kernel: MollifierKernel::for_class(1, base.regularity),
            rule: TanhSinh::new(6),
        })
    }
}

impl Potential for MollifiedPotential1d<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn box_half_width(&self) -> f64 {
        self.base.box_half_width - self.epsilon
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        let cuts: Vec<f64> = self.base.breakpoints_1d().iter().map(|b| (x[0] - b) / self.epsilon).collect();
        integrate_with_breaks(&self.rule, -1.0, 1.0, &cuts, |u| {
            self.base.value_at(&[x[0] - self.epsilon * u]) * self.kernel.radial(u.abs())
        })
    }

    fn breakpoints_1d(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// One ratio of the certification table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub alpha: u32,
    pub epsilon: f64,
    /// "difference" for |α| ≤ k, "growth" for |α| ≥ k + 1.
    pub kind: String,
    pub sup: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub regularity: HolderClass,
    pub rows: Vec<BoundRow>,
    /// Per α: max ratio / min ratio across ε (1 when all are numerically zero).
    pub spread: Vec<(u32, f64)>,
    pub pass: bool,
}

/// Ratios below this are treated as numerically zero.
const ZERO_RATIO: f64 = 1e-8;

fn central_difference(g: &dyn Fn(f64) -> f64, x: f64, s: f64, alpha: u32) -> f64 {
    match alpha {
        0 => g(x),
        1 => (g(x + s) - g(x - s)) / (2.0 * s),
        2 => (g(x + s) - 2.0 * g(x) + g(x - s)) / (s * s),
        3 => (g(x + 2.0 * s) - 2.0 * g(x + s) + 2.0 * g(x - s) - g(x - 2.0 * s)) / (2.0 * s * s * s),
        _ => f64::NAN,
    }
}

/// Certify the mollifier bounds for a closed-form function on `window`.
///
/// Suprema are taken over a uniform sample of the window refined to step
/// ε/16 within 8ε of each kink. Derivatives are central differences with
/// step ε/16; `alpha_max` is at most 3.
pub fn certify_mollifier_bounds(
    f: &ClosedForm1d<'_>,
    hc: HolderClass,
    eps_list: &[f64],
    alpha_max: u32,
    window: (f64, f64),
) -> Result<BoundReport> {
    if alpha_max > 3 {
        return Err(Error::Domain("derivatives above third order are not estimated".into()));
    }
    if eps_list.len() < 2 {
        return Err(Error::Domain("need at least two ε values".into()));
    }
    let kernel = MollifierKernel::for_class(1, hc);
    let rule = TanhSinh::new(6);
    let order = hc.order();
    let mut rows = Vec::new();
    for &eps in eps_list {
        let s = eps / 16.0;
        let mut xs: Vec<f64> = (0..=400).map(|i| window.0 + (window.1 - window.0) * f64::from(i) / 400.0).collect();
        for &b in &f.breaks {
            xs.extend((-128..=128).map(|i| b + f64::from(i) * s * 0.5).filter(|x| *x >= window.0 && *x <= window.1));
        }
        let fe = |x: f64| f.mollified(x, eps, &kernel, &rule);
        for alpha in 0..=alpha_max {
            let difference = alpha <= hc.k;
            let sups: Vec<f64> = xs
                .par_iter()
                .map(|&x| {
                    let de = central_difference(&fe, x, s, alpha);
                    if difference {
                        (de - central_difference(&*f.f, x, s, alpha)).abs()
                    } else {
                        de.abs()
                    }
                })
                .collect();
            if let Some(bad) = sups.iter().find(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("non-finite difference {bad} for α = {alpha} at ε = {eps}")));
            }
            let sup = sups.iter().copied().fold(0.0, f64::max);
            rows.push(BoundRow {
                alpha,
                epsilon: eps,
                kind: if difference { "difference" } else { "growth" }.to_string(),
                sup,
                ratio: sup / eps.powf(order - f64::from(alpha)),
            });
        }
    }
    let mut spread = Vec::new();
    let mut pass = true;
    for alpha in 0..=alpha_max {
        let ratios: Vec<f64> = rows.iter().filter(|r| r.alpha == alpha).map(|r| r.ratio).collect();
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let sp = if hi <= ZERO_RATIO { 1.0 } else { hi / lo.max(ZERO_RATIO) };
        pass &= sp < 8.0;
        spread.push((alpha, sp));
    }
    Ok(BoundReport {
        regularity: hc,
        rows,
        spread,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn kernel_moments() {
        let k = MollifierKernel::new(1, KernelProfile::Bump);
        assert!((k.moment(0) - 1.0).abs() < 1e-13);
        let c = MollifierKernel::new(1, KernelProfile::MomentCorrected);
        assert!((c.moment(0) - 1.0).abs() < 1e-12);
        assert!(c.moment(2).abs() < 1e-12);
        let k2 = MollifierKernel::new(2, KernelProfile::Bump);
        assert!((k2.moment(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_vanishes_at_boundary() {
        assert_eq!(bump_profile(1.0), 0.0);
        assert!(bump_profile(0.999) < 1e-200);
    }

    #[test]
    fn constants_and_linear_functions_are_preserved() {
        let g = GridSpec::new(1, 2.0, 399).unwrap();
        let k = MollifierKernel::new(1, KernelProfile::Bump);
        let eps = 0.1;
        let one = mollify(&SampledField::constant(g, 1.0), eps, &k).unwrap();
        let lin = mollify(&g.sample(|x| x[0]), eps, &k).unwrap();
        for i in 0..g.len() {
            let x = g.coord(i);
            if x.abs() < 2.0 - 2.0 * eps {
                assert!((one.values[i] - 1.0).abs() < 1e-14);
                assert!((lin.values[i] - x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn abs_at_origin_is_first_moment() {
        let k = MollifierKernel::new(1, KernelProfile::Bump);
        let rule = TanhSinh::new(6);
        let f = ClosedForm1d::new(f64::abs, vec![0.0]);
        let eps = 0.1;
        let v = f.mollified(0.0, eps, &k, &rule);
        let m1 = 2.0 * TanhSinh::new(8).integrate(0.0, 1.0, |u| u * k.radial(u));
        assert!((v - eps * m1).abs() < 1e-15);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = GridSpec::new(1, 1.0, 20).unwrap();
        let k = MollifierKernel::new(1, KernelProfile::Bump);
        assert!(matches!(mollify(&SampledField::constant(g, 1.0), 0.1, &k), Err(Error::Precondition(_))));
    }

    #[test]
    fn abs_ratio_is_constant() {
        let f = ClosedForm1d::new(f64::abs, vec![0.0]);
        let hc = HolderClass::new(0, 1.0).unwrap();
        let r = certify_mollifier_bounds(&f, hc, &[0.1, 0.05, 0.025], 0, (-0.5, 0.5)).unwrap();
        let ratios: Vec<f64> = r.rows.iter().map(|r| r.ratio).collect();
        for w in ratios.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-10, "{ratios:?}");
        }
        assert!(r.pass);
    }
}
