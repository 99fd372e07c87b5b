// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Exit criteria. Each one prints a single PASS/FAIL line with its measured
//! numbers and wall time; the process fails if any criterion fails or runs
//! past its time budget.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::{erf, erfc};

use roughweyl::experiments::{
    phase_space_rate, run_bracketing, run_cover, run_mollify_check, BracketingConfig, CoverConfig, MollifyCheckConfig,
};
use roughweyl::potential::catalog;
use roughweyl::spectra::agmon::{agmon_delta, agmon_weighted_norm, lowest_eigenpairs, outer_log_slope};
use roughweyl::spectra::dense::dense_spectrum;
use roughweyl::spectra::inertia::inertia_count;
use roughweyl::spectra::operator::{assemble_operator, assemble_unchecked, required_spacing};
use roughweyl::spectra::riesz::{riesz_mean_layer_cake, riesz_mean_of_spectrum, LayerCakeOptions};
use roughweyl::sweep::{emit_report, fit_exponent, run_sweep, sweep_expectation, ExponentReport, SweepConfig};
use roughweyl::{g_gamma, GridSpec, SparseSymOperator};

type Outcome = Result<(bool, String), String>;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn sweep_config(name: &str, out: &Path) -> Result<SweepConfig, String> {
    let mut cfg = SweepConfig::load(&configs().join(name)).map_err(|e| e.to_string())?;
    cfg.base_dir = Some(out.to_path_buf());
    Ok(cfg)
}

fn run_fit(cfg: &SweepConfig) -> Result<ExponentReport, String> {
    let (pred, tol) = sweep_expectation(cfg);
    let outcome = run_sweep(cfg).map_err(|e| e.to_string())?;
    let report = fit_exponent(&outcome.records, pred.exponent, tol);
    emit_report(cfg, &outcome, &pred, &report).map_err(|e| e.to_string())?;
    Ok(report)
}

fn tempdir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(|e| e.to_string())
}

/// Oscillator residual exponents within 0.15 of 1 − d, d = 1..4.
fn oscillator_rate() -> Outcome {
    let dir = tempdir()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 1..=4 {
        let cfg = sweep_config(&format!("oscillator-{d}d.toml"), dir.path())?;
        let r = run_fit(&cfg)?;
        let target = 1.0 - d as f64;
        match r.slope {
            Some(s) => {
                ok &= (s - target).abs() <= 0.15;
                parts.push(format!("d={d} slope {s:.3} (target {target})"));
            }
            None => {
                ok = false;
                parts.push(format!("d={d} no fit: {}", r.notes.join("; ")));
            }
        }
    }
    Ok((ok, parts.join(", ")))
}

/// |x|^{3/2} mollifier ratios vary by less than a factor 8.
fn mollifier_certification() -> Outcome {
    let cfg = MollifyCheckConfig::load(&configs().join("mollify-abs15.toml")).map_err(|e| e.to_string())?;
    let r = run_mollify_check(&cfg).map_err(|e| e.to_string())?;
    let spreads: Vec<String> = r.bounds.spread.iter().map(|(a, s)| format!("α={a}: {s:.2}")).collect();
    let ok = r.bounds.spread.len() == 3 && r.bounds.spread.iter().all(|&(_, s)| s < 8.0);
    Ok((ok, format!("spreads {}", spreads.join(", "))))
}

/// Pointwise framing and eigenvalue bracketing on 1D and 2D instances.
fn framing_and_bracketing() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["bracketing-1d.toml", "bracketing-2d.toml"] {
        let cfg = BracketingConfig::load(&configs().join(name)).map_err(|e| e.to_string())?;
        let r = run_bracketing(&cfg).map_err(|e| e.to_string())?;
        ok &= r.order <= 3000 && r.framing_violations == 0 && r.eigenvalue_violations == 0;
        ok &= r.count_plus <= r.count && r.count <= r.count_minus;
        parts.push(format!(
            "{}: order {}, {} framing / {} eigenvalue violations, N = ({}, {}, {})",
            cfg.name, r.order, r.framing_violations, r.eigenvalue_violations, r.count_plus, r.count, r.count_minus
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// |Weyl(V_ε) − Weyl(V)| decays at least like ε^{(k+μ) − 0.2}.
fn phase_space_comparison() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["rough-well-k1.toml", "rough-well-k2.toml"] {
        let cfg = MollifyCheckConfig::load(&configs().join(name)).map_err(|e| e.to_string())?;
        let p = cfg.phase_space.as_ref().ok_or_else(|| format!("{name} has no phase-space table"))?;
        let r = phase_space_rate(p).map_err(|e| e.to_string())?;
        let required = p.potential.regularity.order() - 0.2;
        ok &= r.slope >= required;
        parts.push(format!("{}: slope {:.3} (≥ {required:.1})", cfg.name, r.slope));
    }
    Ok((ok, parts.join(", ")))
}

/// Inertia counts equal dense eigensolve counts on random symmetric matrices.
fn inertia_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = 0;
    let mut checks = 0;
    for m in 0..200 {
        let n = rng.random_range(1..=400);
        // Alternate dense, narrow-band and clustered-diagonal matrices.
        let band = match m % 3 {
            0 => n,
            1 => rng.random_range(1..=8),
            _ => 1,
        };
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n.min(i + band + 1) {
                let v = if i == j {
                    if m % 3 == 2 {
                        (rng.random_range(0..5) as f64) * 0.5
                    } else {
                        rng.random_range(-2.0..2.0)
                    }
                } else {
                    rng.random_range(-1.0..1.0)
                };
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let op = SparseSymOperator::from_dense(&a).map_err(|e| e.to_string())?;
        let eig = a.clone().symmetric_eigen().eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        for _ in 0..20 {
            let e = rng.random_range(lo - 1.0..hi + 1.0);
            let want = eig.iter().filter(|&&l| l <= e).count();
            let got = inertia_count(&op, e).map_err(|e| e.to_string())?;
            checks += 1;
            if got != want {
                mismatches += 1;
            }
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in {checks} counts")))
}

/// Multiscale cover invariants on the harmonic spec.
fn cover_invariants() -> Outcome {
    let mut cfg = CoverConfig::load(&configs().join("cover-harmonic.toml")).map_err(|e| e.to_string())?;
    cfg.output_dir = None;
    let s = run_cover(&cfg).map_err(|e| e.to_string())?;
    let parts: Vec<String> = s
        .reports
        .iter()
        .map(|r| {
            let spread = r.derivative_spread.iter().cloned().fold(0.0, f64::max);
            format!(
                "ℏ={}: coverage {}, overlap {} ≤ {}, Σφ err {:.1e}, spread {:.2}",
                r.hbar, r.coverage, r.overlap, r.packing_bound, r.sum_error, spread
            )
        })
        .collect();
    let hbars: Vec<f64> = s.reports.iter().map(|r| r.hbar).collect();
    Ok((s.pass && hbars == [0.1, 0.05, 0.025], parts.join("; ")))
}

/// Normalized Hermite functions h_0..h_n at t.
fn hermite_functions(n: usize, t: f64) -> Vec<f64> {
    let mut h = vec![std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp()];
    if n >= 1 {
        h.push(std::f64::consts::SQRT_2 * t * h[0]);
    }
    for k in 1..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * t * h[k] - (k as f64 / (k + 1) as f64).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// ‖e^{δ(|x|−r)₊/ℏ} ψ_n‖² for the exact oscillator eigenfunction of −ℏ²∂² + x².
fn agmon_oracle(n: usize, r: f64, delta: f64, hbar: f64) -> f64 {
    let s = hbar.sqrt();
    if n == 0 {
        // Completing the square in the Gaussian tail.
        return erf(r / s) + ((delta * delta - 2.0 * delta * r) / hbar).exp() * erfc((r - delta) / s);
    }
    let (lo, hi, cells) = (-12.0, 12.0, 400_000);
    let dt = (hi - lo) / cells as f64;
    (0..cells)
        .map(|i| {
            let t = lo + (i as f64 + 0.5) * dt;
            let psi = hermite_functions(n, t)[n];
            let dist = (t.abs() * s - r).max(0.0);
            psi * psi * (2.0 * delta * dist / hbar).exp() * dt
        })
        .sum()
}

/// Agmon weighted norms within 2× of the Gaussian oracle and outer decay
/// steeper than −0.8·δ/ℏ.
fn agmon_decay() -> Outcome {
    let (lambda, nu, a) = (1.0, 0.5, 0.25);
    let spec = catalog::harmonic(1, lambda, nu, 4.0);
    let delta = agmon_delta(nu);
    let r = (lambda + nu).sqrt() + a;
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    let mut worst_slope = f64::NEG_INFINITY;
    let mut pairs_checked = 0;
    for hbar in [0.2, 0.1, 0.05] {
        let grid = GridSpec::with_max_spacing(1, 4.0, required_spacing(hbar, lambda)).map_err(|e| e.to_string())?;
        let op = assemble_operator(&spec, &grid, hbar).map_err(|e| e.to_string())?;
        let count = inertia_count(&op, nu / 4.0).map_err(|e| e.to_string())?;
        let pairs = lowest_eigenpairs(&op, count).map_err(|e| e.to_string())?;
        for (n, (e, psi)) in pairs.iter().enumerate() {
            if *e >= nu / 4.0 {
                continue;
            }
            let got = agmon_weighted_norm(psi, *e, &spec, nu, a, hbar, &grid).map_err(|e| e.to_string())?;
            let oracle = agmon_oracle(n, r, delta, hbar).sqrt();
            worst_ratio = worst_ratio.max(got / oracle);
            ok &= got <= 2.0 * oracle;
            let slope = outer_log_slope(psi, &grid, r, 1e-250).map_err(|e| e.to_string())?;
            let bound = -delta * (1.0 - 0.2) / hbar;
            worst_slope = worst_slope.max(slope * hbar / delta);
            ok &= slope < bound;
            pairs_checked += 1;
        }
    }
    Ok((
        ok && pairs_checked > 0,
        format!(
            "{pairs_checked} eigenpairs, max norm/oracle {worst_ratio:.3}, shallowest slope {worst_slope:.1}·(δ/ℏ)"
        ),
    ))
}

/// The μ = 1 separable residual exponent exceeds the μ = 0 one by ≥ 0.15.
fn rough_exponent_trend() -> Outcome {
    let dir = tempdir()?;
    let r0 = run_fit(&sweep_config("rough-separable-mu0.toml", dir.path())?)?;
    let r1 = run_fit(&sweep_config("rough-separable-mu1.toml", dir.path())?)?;
    let (Some(s0), Some(s1)) = (r0.slope, r1.slope) else {
        return Ok((false, "a sweep produced no fit".into()));
    };
    let gap = s1 - s0;
    Ok((
        gap >= 0.15,
        format!(
            "μ=0 slope {s0:.3} ± {:.3}, μ=1 slope {s1:.3} ± {:.3}, difference {gap:.3} (need ≥ 0.15)",
            r0.half_width.unwrap_or(f64::NAN),
            r1.half_width.unwrap_or(f64::NAN)
        ),
    ))
}

/// Layer-cake Riesz means against direct power sums on dense spectra.
fn layer_cake() -> Outcome {
    let well = catalog::rough_well_1d(1, 0.5, 0.5, 0.1, 1.5);
    let g1 = GridSpec::new(1, 4.0, 2000).map_err(|e| e.to_string())?;
    let h1 = assemble_operator(&well, &g1, 0.05).map_err(|e| e.to_string())?;
    let bowl = catalog::harmonic(2, 1.0, 0.5, 2.5);
    let g2 = GridSpec::new(2, 2.5, 40).map_err(|e| e.to_string())?;
    let h2 = assemble_unchecked(&g2.sample(|x| bowl.smooth_value(x)), 0.1).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for op in [&h1, &h2] {
        let spectrum = dense_spectrum(op).map_err(|e| e.to_string())?;
        let t_max = (-spectrum.values[0]).max(0.0);
        for gamma in [0.25, 0.5, 1.0] {
            let direct: f64 = spectrum.values.iter().map(|&v| g_gamma(v, gamma)).sum();
            let from_spectrum = riesz_mean_of_spectrum(&spectrum, gamma, LayerCakeOptions::default()).map_err(|e| e.to_string())?;
            let from_counts = riesz_mean_layer_cake(|e| inertia_count(op, e), t_max, gamma, LayerCakeOptions::default())
                .map_err(|e| e.to_string())?;
            for v in [from_spectrum, from_counts] {
                worst = worst.max((v - direct).abs() / direct);
            }
        }
    }
    Ok((worst <= 0.01, format!("orders {} and {}, max relative error {worst:.2e}", h1.order(), h2.order())))
}

/// Repeated oscillator sweeps write byte-identical CSV and JSON, across
/// worker counts.
fn determinism() -> Outcome {
    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        std::env::set_var("ROUGHWEYL_THREADS", threads);
        let dir = tempdir()?;
        let cfg = sweep_config("oscillator-2d.toml", dir.path())?;
        run_fit(&cfg)?;
        let (csv, json) = cfg.output_paths();
        let read = |p: Option<PathBuf>| -> Result<Vec<u8>, String> {
            let p = p.ok_or("config writes no output")?;
            std::fs::read(&p).map_err(|e| format!("{}: {e}", p.display()))
        };
        outputs.push((read(csv)?, read(json)?));
    }
    std::env::remove_var("ROUGHWEYL_THREADS");
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok((same, format!("{} runs, {} CSV bytes, {} JSON bytes", outputs.len(), outputs[0].0.len(), outputs[0].1.len())))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "oscillator Weyl rate", budget: Duration::from_secs(10), run: oscillator_rate },
        Criterion { id: 2, name: "mollifier certification", budget: Duration::from_secs(5), run: mollifier_certification },
        Criterion { id: 3, name: "framing and bracketing", budget: Duration::from_secs(60), run: framing_and_bracketing },
        Criterion { id: 4, name: "phase-space comparison", budget: Duration::from_secs(30), run: phase_space_comparison },
        Criterion { id: 5, name: "inertia-count oracle", budget: Duration::from_secs(60), run: inertia_oracle },
        Criterion { id: 6, name: "covering invariants", budget: Duration::from_secs(120), run: cover_invariants },
        Criterion { id: 7, name: "Agmon decay", budget: Duration::from_secs(10), run: agmon_decay },
        Criterion { id: 8, name: "rough exponent trend", budget: Duration::from_secs(600), run: rough_exponent_trend },
        Criterion { id: 9, name: "Riesz layer-cake", budget: Duration::from_secs(10), run: layer_cake },
        Criterion { id: 10, name: "determinism", budget: Duration::from_secs(10), run: determinism },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok((pass, detail)) => (pass, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= c.budget;
        let verdict = if pass && in_time { "PASS" } else { "FAIL" };
        let timing = if in_time {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s, over the {}s budget", elapsed.as_secs_f64(), c.budget.as_secs())
        };
        println!("criterion {:>2} {verdict} {}: {detail} [{timing}]", c.id, c.name);
        if verdict == "FAIL" {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
