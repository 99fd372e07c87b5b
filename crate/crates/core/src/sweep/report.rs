// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON sweep reports. Both are pure functions of the config and the
//! records, so reruns are byte-identical.

use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};

use super::config::SweepConfig;
use super::harness::{ExponentReport, PredictedExponent, SweepOutcome, SweepRecord, SweepStatus};

pub const CSV_HEADER: &str = "hbar,epsilon,delta,trace,weyl,residual,method,seconds";

pub fn records_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s += &format!(
            "{},{},{},{},{},{},{},{}\n",
            r.hbar, r.epsilon, r.delta, r.trace, r.weyl, r.residual, r.method, r.seconds
        );
    }
    s
}

/// Build identity that does not vary between runs on one machine.
#[derive(Debug, Clone, Serialize)]
pub struct EnvironmentStamp {
    pub package: &'static str,
    pub version: &'static str,
    pub arch: &'static str,
    pub os: &'static str,
}

pub fn environment_stamp() -> EnvironmentStamp {
    EnvironmentStamp {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        arch: std::env::consts::ARCH,
        os: std::env::consts::OS,
    }
}

pub fn summary_json(cfg: &SweepConfig, outcome: &SweepOutcome, predicted: &PredictedExponent, report: &ExponentReport) -> Result<String> {
    let v = json!({
        "status": outcome.status,
        "config": cfg,
        "predicted": predicted,
        "exponent": report,
        "records": outcome.records,
        "skipped": outcome.skipped,
        "environment": environment_stamp(),
    });
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write the CSV and JSON files named in the config, if any.
pub fn emit_report(cfg: &SweepConfig, outcome: &SweepOutcome, predicted: &PredictedExponent, report: &ExponentReport) -> Result<()> {
    let (csv, js) = cfg.output_paths();
    if let Some(p) = csv {
        write(&p, &records_csv(&outcome.records))?;
    }
    if let Some(p) = js {
        write(&p, &summary_json(cfg, outcome, predicted, report)?)?;
    }
    Ok(())
}

/// Status string used in the JSON summary.
pub fn status_name(status: SweepStatus) -> &'static str {
    match status {
        SweepStatus::Complete => "complete",
        SweepStatus::Partial => "partial",
        SweepStatus::Empty => "empty",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::harness::{fit_exponent, predicted_exponent};

    #[test]
    fn empty_report() {
        let cfg = SweepConfig::from_toml(
            "name = \"e\"\nstrategy = \"oscillator\"\nhbar = [0.6, 0.5, 0.4, 0.3, 0.2, 0.1]\n[oscillator]\ndim = 1\n",
        )
        .unwrap();
        let out = SweepOutcome {
            records: Vec::new(),
            skipped: Vec::new(),
            status: SweepStatus::Empty,
        };
        assert_eq!(records_csv(&out.records), format!("{CSV_HEADER}\n"));
        let pred = predicted_exponent(0.0, cfg.regularity(), 1, cfg.theorem);
        let rep = fit_exponent(&out.records, pred.exponent, 0.15);
        let js = summary_json(&cfg, &out, &pred, &rep).unwrap();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["status"], "empty");
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = write(&blocker.join("sub/out.csv"), "a").unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
