// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use roughweyl::experiments::{
    run_bracketing, run_cover, run_mollify_check, BracketingConfig, CoverConfig, MollifyCheckConfig,
};
use roughweyl::sweep::config::{FitOptions, HbarList, OscillatorCase, Output};
use roughweyl::sweep::{emit_report, fit_exponent, records_csv, run_sweep, sweep_expectation, Strategy, SweepConfig, Theorem};
use roughweyl::{Error, ScalingMode};

/// Weyl-law experiments for Schrödinger operators with rough potentials.
///
/// Exit status: 0 when every verdict passes, 2 when any fails, 3 on a
/// configuration error, 1 on any other failure. The worker count comes from
/// ROUGHWEYL_THREADS.
#[derive(Parser)]
#[command(name = "roughweyl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ℏ-sweep and write its CSV and JSON reports.
    Sweep { config: PathBuf },
    /// Certify mollifier bounds (and optionally the Weyl-term rate).
    MollifyCheck { config: PathBuf },
    /// Build multiscale covers and check their invariants.
    Cover { config: PathBuf },
    /// Lattice-oracle sweep for the harmonic oscillator; CSV on stdout.
    Oscillator {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        hbar_min: f64,
        #[arg(long)]
        hbar_max: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        /// Sub-samples per ℏ cell for the residual envelope (0 = pointwise).
        #[arg(long, default_value_t = 9)]
        envelope: usize,
    },
    /// Framing and dense eigenvalue bracketing check.
    Bracketing { config: PathBuf },
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Error> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn verdict(pass: bool) -> ExitCode {
    eprintln!("{}", if pass { "PASS" } else { "FAIL" });
    ExitCode::from(if pass { 0 } else { 2 })
}

fn sweep(cfg: &SweepConfig, to_stdout: bool) -> Result<ExitCode, Error> {
    let (pred, tol) = sweep_expectation(cfg);
    for w in &pred.warnings {
        eprintln!("warning: {w}; run is exploratory");
    }
    let outcome = run_sweep(cfg)?;
    for s in &outcome.skipped {
        eprintln!("skipped ℏ = {}: {}", s.hbar, s.reason);
    }
    let report = fit_exponent(&outcome.records, pred.exponent, tol);
    emit_report(cfg, &outcome, &pred, &report)?;
    if to_stdout {
        print!("{}", records_csv(&outcome.records));
    }
    match report.slope {
        Some(s) => eprintln!(
            "{}: slope {s:.4} ± {:.4}, predicted {:.4} (tolerance {tol})",
            cfg.name,
            report.half_width.unwrap_or(f64::NAN),
            pred.exponent
        ),
        None => eprintln!("{}: {}", cfg.name, report.notes.join("; ")),
    }
    Ok(verdict(report.verdict.is_pass()))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Sweep { config } => sweep(&SweepConfig::load(&config)?, false),
        Command::Oscillator {
            d,
            hbar_min,
            hbar_max,
            gamma,
            points,
            lambda,
            envelope,
        } => {
            let cfg = SweepConfig {
                name: format!("oscillator-{d}d"),
                gamma,
                mode: ScalingMode::Capped,
                hbar: HbarList::Geometric {
                    start: hbar_max,
                    stop: hbar_min,
                    points,
                },
                strategy: Strategy::Oscillator,
                theorem: Theorem::Main,
                seed: 0,
                weyl_cells: 2000,
                framed: false,
                record_timing: false,
                budget: Default::default(),
                fit: FitOptions {
                    envelope_samples: envelope,
                    tolerance: None,
                },
                output: Output::default(),
                oscillator: Some(OscillatorCase { dim: d, lambda }),
                potential: None,
                separable: None,
                base_dir: None,
            };
            cfg.validate()?;
            sweep(&cfg, true)
        }
        Command::MollifyCheck { config } => {
            let r = run_mollify_check(&MollifyCheckConfig::load(&config)?)?;
            print_json(&r)?;
            Ok(verdict(r.pass))
        }
        Command::Cover { config } => {
            let r = run_cover(&CoverConfig::load(&config)?)?;
            print_json(&r)?;
            Ok(verdict(r.pass))
        }
        Command::Bracketing { config } => {
            let r = run_bracketing(&BracketingConfig::load(&config)?)?;
            print_json(&r)?;
            Ok(verdict(r.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Io { .. } | Error::Domain(_) | Error::Precondition(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
