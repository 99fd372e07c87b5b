// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven ℏ-sweeps with rate fits and reports.

pub mod config;
pub mod harness;
pub mod report;

pub use config::{Strategy, SweepConfig, Theorem};
pub use harness::{
    fit_exponent, predicted_exponent, run_sweep, sweep_expectation, ExponentReport, PredictedExponent, SweepOutcome, SweepRecord,
    SweepStatus, Verdict,
};
pub use report::{emit_report, records_csv, summary_json};
