// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Multiscale covers by balls B(x_k, l(x_k)) of a slowly varying scale
//! l(x) = A^{−1}√((φ₁V_ε)² + ℏ^{4/3}), and the subordinate partition of
//! unity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::build_framing;
use crate::grid::{mask_distance, GridSpec, SampledField};
use crate::mollify::bump_profile;
use crate::params::SemiclassicalParams;
use crate::potential::PotentialSpec;
use crate::spectra::agmon::{distance_field, localisation_cutoff};

#[derive(Debug, Clone)]
pub struct ScaleFunction {
    pub grid: GridSpec,
    pub l: Vec<f64>,
    /// f = √l.
    pub f: Vec<f64>,
    pub a: f64,
    /// Achieved max |∇l| over the target.
    pub rho: f64,
    /// ℏ^{2/3}.
    pub epsilon_floor: f64,
    pub hbar: f64,
}

fn gradient_norm(grid: &GridSpec, values: &[f64], flat: usize, idx: &[usize]) -> f64 {
    let h = grid.spacing();
    let mut g2 = 0.0;
    for a in 0..grid.dim {
        let s = grid.stride(a);
        let n = grid.points_per_axis;
        let (lo, hi, span) = match (idx[a] > 0, idx[a] + 1 < n) {
            (true, true) => (flat - s, flat + s, 2.0 * h),
            (false, true) => (flat, flat + s, h),
            (true, false) => (flat - s, flat, h),
            (false, false) => (flat, flat, 1.0),
        };
        let g = (values[hi] - values[lo]) / span;
        g2 += g * g;
    }
    g2.sqrt()
}

fn max_gradient(grid: &GridSpec, values: &[f64], mask: &[bool]) -> f64 {
    let mut idx = vec![0usize; grid.dim];
    let mut worst = 0.0f64;
    for flat in 0..grid.len() {
        if mask[flat] {
            grid.multi_index(flat, &mut idx);
            worst = worst.max(gradient_norm(grid, values, flat, &idx));
        }
    }
    worst
}

/// Find A by doubling until |∇l| ≤ ρ_target and l ≤ margin/9 on the target.
pub fn build_scale_function(
    v_eps: &SampledField,
    phi1: &SampledField,
    hbar: f64,
    rho_target: f64,
    margin: f64,
    target: &[bool],
) -> Result<ScaleFunction> {
    if !(rho_target > 0.0 && rho_target < 0.125) {
        return Err(Error::Precondition(format!("ρ = {rho_target} must lie in (0, 1/8)")));
    }
    let grid = v_eps.grid;
    let floor = hbar.powf(2.0 / 3.0);
    let base: Vec<f64> = v_eps
        .values
        .iter()
        .zip(&phi1.values)
        .map(|(v, p)| ((p * v).powi(2) + floor * floor).sqrt())
        .collect();
    let mut a = 1.0f64;
    while a <= 2f64.powi(40) {
        let l: Vec<f64> = base.iter().map(|b| b / a).collect();
        let rho = max_gradient(&grid, &l, target);
        let lmax = l.iter().zip(target).filter(|(_, &t)| t).map(|(v, _)| *v).fold(0.0, f64::max);
        if rho <= rho_target && lmax <= margin / 9.0 {
            let f = l.iter().map(|v| v.sqrt()).collect();
            return Ok(ScaleFunction {
                grid,
                l,
                f,
                a,
                rho,
                epsilon_floor: floor,
                hbar,
            });
        }
        a *= 2.0;
    }
    Err(Error::Numerical("no A ≤ 2^40 satisfies the scale constraints".into()))
}

impl ScaleFunction {
    /// A scale function given directly by its values, for synthetic covers.
    pub fn from_values(grid: GridSpec, l: Vec<f64>, hbar: f64) -> Self {
        let f = l.iter().map(|v| v.sqrt()).collect();
        let all = vec![true; grid.len()];
        let rho = max_gradient(&grid, &l, &all);
        Self {
            grid,
            l,
            f,
            a: 1.0,
            rho,
            epsilon_floor: hbar.powf(2.0 / 3.0),
            hbar,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverPatch {
    pub center: Vec<f64>,
    pub node: usize,
    pub radius: f64,
    pub f: f64,
    /// h_k = ℏ/(l_k f_k).
    pub h_local: f64,
}

impl CoverPatch {
    /// ε_k = h_k^{1−δ}.
    pub fn eps_local(&self, delta: f64) -> f64 {
        self.h_local.powf(1.0 - delta)
    }

    fn contains(&self, x: &[f64]) -> bool {
        dist2(&self.center, x) < self.radius * self.radius
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Greedy cover: target nodes in decreasing-l order, rejecting a candidate
/// that lies within half the radius of an accepted centre.
pub fn greedy_cover(scale: &ScaleFunction, target: &[bool]) -> Result<Vec<CoverPatch>> {
    let grid = &scale.grid;
    let mut order: Vec<usize> = (0..grid.len()).filter(|&i| target[i]).collect();
    order.sort_by(|&a, &b| scale.l[b].total_cmp(&scale.l[a]).then(a.cmp(&b)));
    let mut patches: Vec<CoverPatch> = Vec::new();
    let mut x = vec![0.0; grid.dim];
    // Accepted centres bucketed on a coarse lattice for the proximity test.
    let lmax = order.first().map(|&i| scale.l[i]).unwrap_or(1.0);
    let cell = lmax.max(grid.spacing());
    let mut buckets: std::collections::HashMap<Vec<i64>, Vec<usize>> = std::collections::HashMap::new();
    let key = |x: &[f64]| -> Vec<i64> { x.iter().map(|c| (c / cell).floor() as i64).collect() };
    for &node in &order {
        grid.point(node, &mut x);
        let k = key(&x);
        let mut near = false;
        let d = grid.dim;
        'scan: for off in 0..3usize.pow(d as u32) {
            let mut nb = k.clone();
            let mut rest = off;
            for c in nb.iter_mut() {
                *c += (rest % 3) as i64 - 1;
                rest /= 3;
            }
            if let Some(list) = buckets.get(&nb) {
                for &j in list {
                    let p = &patches[j];
                    if dist2(&p.center, &x) < 0.25 * p.radius * p.radius {
                        near = true;
                        break 'scan;
                    }
                }
            }
        }
        if near {
            continue;
        }
        let l = scale.l[node];
        let f = scale.f[node];
        buckets.entry(k).or_default().push(patches.len());
        patches.push(CoverPatch {
            center: x.clone(),
            node,
            radius: l,
            f,
            h_local: scale.hbar / (l * f),
        });
    }
    let mult = multiplicity(grid, &patches, target);
    if let Some(i) = (0..grid.len()).find(|&i| target[i] && mult[i] == 0) {
        return Err(Error::Internal(format!("target node {i} left uncovered")));
    }
    Ok(patches)
}

/// Number of balls containing each node (zero off-target).
pub fn multiplicity(grid: &GridSpec, patches: &[CoverPatch], target: &[bool]) -> Vec<usize> {
    let mut m = vec![0usize; grid.len()];
    let mut x = vec![0.0; grid.dim];
    for p in patches {
        for_each_node_in_ball(grid, &p.center, p.radius, |flat| {
            if target[flat] {
                grid.point(flat, &mut x);
                if p.contains(&x) {
                    m[flat] += 1;
                }
            }
        });
    }
    m
}

fn for_each_node_in_ball<F: FnMut(usize)>(grid: &GridSpec, center: &[f64], radius: f64, mut f: F) {
    let h = grid.spacing();
    let n = grid.points_per_axis as i64;
    let d = grid.dim;
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for a in 0..d {
        lo[a] = (((center[a] - radius + grid.half_width) / h).floor() as i64 - 1).max(0);
        hi[a] = (((center[a] + radius + grid.half_width) / h).ceil() as i64 - 1).min(n - 1);
        if lo[a] > hi[a] {
            return;
        }
    }
    let mut idx = lo.clone();
    loop {
        let flat: i64 = (0..d).map(|a| idx[a] * grid.stride(a) as i64).sum();
        f(flat as usize);
        let mut a = d;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] <= hi[a] {
                break;
            }
            idx[a] = lo[a];
        }
    }
}

/// Packing bound for balls of comparable radii: (1 + 4c)^d with
/// c = (1 + 8ρ)/(1 − 8ρ).
pub fn packing_bound(rho: f64, dim: usize) -> usize {
    let c = (1.0 + 8.0 * rho) / (1.0 - 8.0 * rho);
    (1.0 + 4.0 * c).powi(dim as i32).floor() as usize
}

#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    /// Per patch, (node, φ_k(node)) over the nodes of its ball.
    pub weights: Vec<Vec<(usize, f64)>>,
    /// Measured maximum multiplicity on the target.
    pub overlap: usize,
    /// max |Σφ_k − 1| on the target.
    pub sum_error: f64,
}

/// φ_k = bump_k / Σ_j bump_j with bump_k(x) = ρ(|x − x_k|/l_k).
pub fn build_partition(patches: &[CoverPatch], scale: &ScaleFunction, target: &[bool]) -> Result<PartitionOfUnity> {
    let grid = &scale.grid;
    let mut denom = vec![0.0; grid.len()];
    let mut raw: Vec<Vec<(usize, f64)>> = Vec::with_capacity(patches.len());
    let mut x = vec![0.0; grid.dim];
    for p in patches {
        let mut list = Vec::new();
        for_each_node_in_ball(grid, &p.center, p.radius, |flat| {
            grid.point(flat, &mut x);
            let b = bump_profile(dist2(&p.center, &x).sqrt() / p.radius);
            if b > 0.0 {
                denom[flat] += b;
                list.push((flat, b));
            }
        });
        raw.push(list);
    }
    if let Some(i) = (0..grid.len()).find(|&i| target[i] && denom[i] < 1e-14) {
        return Err(Error::Internal(format!("partition denominator vanishes at target node {i}")));
    }
    let weights: Vec<Vec<(usize, f64)>> = raw
        .into_iter()
        .map(|list| list.into_iter().map(|(i, b)| (i, b / denom[i])).collect())
        .collect();
    let mut sum = vec![0.0; grid.len()];
    for list in &weights {
        for &(i, w) in list {
            sum[i] += w;
        }
    }
    let sum_error = (0..grid.len())
        .filter(|&i| target[i])
        .map(|i| (sum[i] - 1.0).abs())
        .fold(0.0, f64::max);
    let overlap = multiplicity(grid, patches, target).into_iter().max().unwrap_or(0);
    Ok(PartitionOfUnity {
        weights,
        overlap,
        sum_error,
    })
}

/// l_k^{|α|}·‖∂^α φ_k‖_∞ over the target, per |α| ∈ {0, 1, 2}, by finite
/// differences along the axes; entry [α][k].
pub fn scaled_derivatives(partition: &PartitionOfUnity, patches: &[CoverPatch], grid: &GridSpec, target: &[bool]) -> Vec<Vec<f64>> {
    let h = grid.spacing();
    let mut out = vec![Vec::with_capacity(patches.len()); 3];
    let mut idx = vec![0usize; grid.dim];
    for (p, list) in patches.iter().zip(&partition.weights) {
        let map: std::collections::HashMap<usize, f64> = list.iter().copied().collect();
        let at = |i: usize| map.get(&i).copied().unwrap_or(0.0);
        let mut m = [0.0f64; 3];
        for &(i, w) in list {
            if !target[i] {
                continue;
            }
            m[0] = m[0].max(w.abs());
            grid.multi_index(i, &mut idx);
            for a in 0..grid.dim {
                if idx[a] == 0 || idx[a] + 1 == grid.points_per_axis {
                    continue;
                }
                let s = grid.stride(a);
                if !(target[i - s] && target[i + s]) {
                    continue;
                }
                let (l, r) = (at(i - s), at(i + s));
                m[1] = m[1].max(((r - l) / (2.0 * h)).abs());
                m[2] = m[2].max(((r - 2.0 * w + l) / (h * h)).abs());
            }
        }
        for (alpha, v) in m.iter().enumerate() {
            out[alpha].push(p.radius.powi(alpha as i32) * v);
        }
    }
    out
}

/// Patches whose ball meets `support`, plus every patch whose ball meets
/// one of those.
pub fn finite_subcover(patches: &[CoverPatch], grid: &GridSpec, support: &[bool]) -> Vec<usize> {
    let mut x = vec![0.0; grid.dim];
    let core: Vec<usize> = (0..patches.len())
        .filter(|&k| {
            let mut hit = false;
            for_each_node_in_ball(grid, &patches[k].center, patches[k].radius, |flat| {
                if !hit && support[flat] {
                    grid.point(flat, &mut x);
                    hit = patches[k].contains(&x);
                }
            });
            hit
        })
        .collect();
    let mut chosen = vec![false; patches.len()];
    for &k in &core {
        chosen[k] = true;
    }
    for (j, pj) in patches.iter().enumerate() {
        if chosen[j] {
            continue;
        }
        chosen[j] = core.iter().any(|&k| {
            let r = pj.radius + patches[k].radius;
            dist2(&pj.center, &patches[k].center) < r * r
        });
    }
    (0..patches.len()).filter(|&k| chosen[k]).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    pub hbar: f64,
    pub a: f64,
    pub rho: f64,
    pub epsilon_margin: f64,
    pub patches: usize,
    pub coverage: f64,
    pub overlap: usize,
    pub packing_bound: usize,
    pub sum_error: f64,
    /// max/min across k of the scaled derivative sizes, per |α| ≤ 2.
    pub derivative_spread: [f64; 3],
    pub max_radius_ratio_touching: f64,
    pub radius_ratio_bound: f64,
    pub subcover: usize,
    /// Σ_{k∈I} l_k^d / |supp φ|.
    pub subcover_volume_ratio: f64,
    pub max_h_local: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverOptions {
    /// Target bound on |∇l|, below 1/8.
    pub rho: f64,
    /// Half-width of the cover window.
    pub half_width: f64,
    /// Minimum number of grid spacings across the smallest radius.
    pub nodes_per_radius: f64,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self {
            rho: 0.1,
            half_width: 1.5,
            nodes_per_radius: 32.0,
        }
    }
}

struct CoverFields {
    v_eps: SampledField,
    phi1: SampledField,
    support: Vec<bool>,
    margin: f64,
}

// V_ε = V¹_ε + V² and the framing cutoff on `grid`; U = {V_ε < ν̃}, a is a
// quarter of the gap to {V_ε ≥ 2ν̃}, and the target is supp φ.
fn cover_fields(spec: &PotentialSpec, framed: &crate::framing::FramedPotentials, grid: GridSpec) -> Result<CoverFields> {
    let mut x = vec![0.0; grid.dim];
    let mut v_eps = Vec::with_capacity(grid.len());
    let mut phi1 = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        grid.point(i, &mut x);
        v_eps.push(framed.v1_eps.interpolate(&x) + spec_tail(spec, framed, &x));
        phi1.push(framed.phi.interpolate(&x));
    }
    let nu_t = framed.tilde_nu;
    let u: Vec<bool> = v_eps.iter().map(|&v| v < nu_t).collect();
    let outside: Vec<bool> = v_eps.iter().map(|&v| v >= 2.0 * nu_t).collect();
    if !u.iter().any(|&b| b) || !outside.iter().any(|&b| b) {
        return Err(Error::Precondition("cover window must contain {V_ε < ν̃} and meet {V_ε ≥ 2ν̃}".into()));
    }
    let a = mask_distance(&grid, &u, &outside) / 4.0;
    let ua: Vec<bool> = distance_field(&grid, &u).iter().map(|&r| r < a).collect();
    let support: Vec<bool> = localisation_cutoff(&grid, &ua, a).iter().map(|&p| p > 0.0).collect();
    let margin = mask_distance(&grid, &support, &outside);
    Ok(CoverFields {
        v_eps: SampledField { grid, values: v_eps },
        phi1: SampledField { grid, values: phi1 },
        support,
        margin,
    })
}

/// Full cover pipeline for a spec at one ℏ.
///
/// The spec is framed on its own box, V_ε is interpolated onto the cover
/// window, and the cover grid is refined until the smallest radius spans
/// `nodes_per_radius` spacings.
pub fn cover_experiment(spec: &PotentialSpec, params: &SemiclassicalParams, opts: &CoverOptions) -> Result<(CoverReport, Vec<CoverPatch>)> {
    let d = spec.dim;
    let box_hw = spec.box_half_width;
    // Refine the framing grid until the cutoff and the mollifier are resolved.
    let mut spacing = params.epsilon / 16.0;
    let framed = loop {
        let frame_grid = GridSpec::with_max_spacing(d, box_hw, spacing)?;
        match build_framing(spec, params, crate::framing::DEFAULT_MARGIN, &frame_grid) {
            Err(Error::Precondition(_)) if spacing > box_hw / 4096.0 => spacing *= 0.5,
            other => break other?,
        }
    };
    let mut grid = GridSpec::new(d, opts.half_width, 64)?;
    let (fields, scale) = loop {
        let fields = cover_fields(spec, &framed, grid)?;
        let scale = build_scale_function(&fields.v_eps, &fields.phi1, params.hbar, opts.rho, fields.margin, &fields.support)?;
        let l_min = (0..grid.len())
            .filter(|&i| fields.support[i])
            .map(|i| scale.l[i])
            .fold(f64::INFINITY, f64::min);
        if grid.spacing() * opts.nodes_per_radius <= l_min {
            break (fields, scale);
        }
        let next = GridSpec::with_max_spacing(d, opts.half_width, l_min / opts.nodes_per_radius)?;
        if next.len() > 50_000_000 {
            return Err(Error::Resource(format!("cover grid of {} nodes", next.len())));
        }
        grid = next;
    };
    let CoverFields { support, margin, .. } = fields;
    let grid = scale.grid;
    let patches = greedy_cover(&scale, &support)?;
    let partition = build_partition(&patches, &scale, &support)?;
    let derivs = scaled_derivatives(&partition, &patches, &scale.grid, &support);
    let spread = |v: &[f64]| {
        let hi = v.iter().copied().fold(0.0, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    };
    let mult = multiplicity(&grid, &patches, &support);
    let covered = (0..grid.len()).filter(|&i| support[i] && mult[i] > 0).count();
    let total = support.iter().filter(|&&b| b).count();
    let mut ratio = 1.0f64;
    for (i, p) in patches.iter().enumerate() {
        for q in &patches[i + 1..] {
            let r = p.radius + q.radius;
            if dist2(&p.center, &q.center) < r * r {
                ratio = ratio.max(p.radius / q.radius).max(q.radius / p.radius);
            }
        }
    }
    let sub = finite_subcover(&patches, &grid, &support);
    let support_volume = total as f64 * grid.spacing().powi(d as i32);
    let patch_volume: f64 = sub.iter().map(|&k| patches[k].radius.powi(d as i32)).sum();
    let report = CoverReport {
        hbar: params.hbar,
        a: scale.a,
        rho: scale.rho,
        epsilon_margin: margin,
        patches: patches.len(),
        coverage: covered as f64 / total.max(1) as f64,
        overlap: partition.overlap,
        packing_bound: packing_bound(scale.rho, d),
        sum_error: partition.sum_error,
        derivative_spread: [spread(&derivs[0]), spread(&derivs[1]), spread(&derivs[2])],
        max_radius_ratio_touching: ratio,
        radius_ratio_bound: (1.0 + 8.0 * scale.rho) / (1.0 - 8.0 * scale.rho),
        subcover: sub.len(),
        subcover_volume_ratio: patch_volume / support_volume,
        max_h_local: patches.iter().map(|p| p.h_local).fold(0.0, f64::max),
    };
    Ok((report, patches))
}

// V² = V(1 − φ), the part of V left unsmoothed by the framing.
fn spec_tail(spec: &PotentialSpec, framed: &crate::framing::FramedPotentials, x: &[f64]) -> f64 {
    use crate::potential::Potential;
    spec.value_at(x) * (1.0 - framed.phi.interpolate(x))
}

/// CSV dump: centre components, l_k, h_k.
pub fn patches_csv(patches: &[CoverPatch]) -> String {
    let d = patches.first().map_or(0, |p| p.center.len());
    let mut out: Vec<String> = (0..d).map(|a| format!("x{a}")).collect();
    out.push("l".into());
    out.push("h".into());
    let mut s = out.join(",") + "\n";
    for p in patches {
        let mut row: Vec<String> = p.center.iter().map(|c| c.to_string()).collect();
        row.push(p.radius.to_string());
        row.push(p.h_local.to_string());
        s += &(row.join(",") + "\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_scale_cover_2d() {
        let grid = GridSpec::new(2, 1.0, 80).unwrap();
        let scale = ScaleFunction::from_values(grid, vec![0.1; grid.len()], 0.1);
        let target = vec![true; grid.len()];
        let patches = greedy_cover(&scale, &target).unwrap();
        let m = multiplicity(&grid, &patches, &target);
        assert!(m.iter().all(|&c| c >= 1));
        let worst = *m.iter().max().unwrap();
        assert!(worst <= packing_bound(0.0, 2), "{worst}");
        let pou = build_partition(&patches, &scale, &target).unwrap();
        assert!(pou.sum_error < 1e-12);
        for list in &pou.weights {
            assert!(list.iter().all(|&(_, w)| (0.0..=1.0).contains(&w)));
        }
    }

    #[test]
    fn single_patch_is_identity() {
        let grid = GridSpec::new(1, 1.0, 50).unwrap();
        let scale = ScaleFunction::from_values(grid, vec![5.0; grid.len()], 0.1);
        let target = vec![true; grid.len()];
        let patches = greedy_cover(&scale, &target).unwrap();
        assert_eq!(patches.len(), 1);
        let pou = build_partition(&patches, &scale, &target).unwrap();
        assert!(pou.weights[0].iter().all(|&(_, w)| (w - 1.0).abs() < 1e-15));
    }

    #[test]
    fn zero_potential_scale() {
        let grid = GridSpec::new(1, 1.0, 200).unwrap();
        let zero = SampledField::constant(grid, 0.0);
        let one = SampledField::constant(grid, 1.0);
        let target = vec![true; grid.len()];
        let s = build_scale_function(&zero, &one, 0.001, 0.1, 1.0, &target).unwrap();
        assert!(s.rho < 1e-12);
        let expect = 0.001f64.powf(2.0 / 3.0) / s.a;
        assert!(s.l.iter().all(|&l| (l - expect).abs() < 1e-15));
        assert!(s.l[0] <= 1.0 / 9.0);
    }
}
