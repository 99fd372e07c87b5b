// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for roughweyl.
//!
//! Objects cross the boundary as opaque handles created by `rw_*_new` or
//! `rw_*_from_*` and released by the matching `rw_*_free`. Every fallible
//! call returns an [`RwStatus`]; on failure the message is kept per thread
//! and can be copied out with [`rw_last_error_message`]. Panics never unwind
//! into C: they are caught and reported as `RW_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use roughweyl::potential::catalog;
use roughweyl::spectra::inertia::inertia_count;
use roughweyl::spectra::operator::assemble_operator;
use roughweyl::spectra::oscillator::{oscillator_lattice_count, oscillator_weyl};
use roughweyl::spectra::riesz::{riesz_mean_layer_cake, LayerCakeOptions};
use roughweyl::sweep::{emit_report, fit_exponent, predicted_exponent, run_sweep, sweep_expectation, SweepConfig, Theorem};
use roughweyl::weyl::weyl_term_quadrature;
use roughweyl::{Error, GridSpec, HolderClass, Potential, PotentialSpec, SparseSymOperator};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwStatus {
    Ok = 0,
    NullArgument = 1,
    Domain = 2,
    Precondition = 3,
    Numerical = 4,
    Resource = 5,
    Config = 6,
    Io = 7,
    Internal = 8,
    InvalidUtf8 = 9,
    Panic = 10,
}

/// Which remainder rate to predict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwTheorem {
    Main = 0,
    Main2 = 1,
    Main3 = 2,
}

/// Opaque potential.
pub struct RwPotential {
    spec: PotentialSpec,
}

/// Opaque discretized operator −ℏ²Δ + V.
pub struct RwOperator {
    op: SparseSymOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> RwStatus {
    match e {
        Error::Domain(_) => RwStatus::Domain,
        Error::Precondition(_) => RwStatus::Precondition,
        Error::Numerical(_) => RwStatus::Numerical,
        Error::Resource(_) => RwStatus::Resource,
        Error::Config(_) => RwStatus::Config,
        Error::Io { .. } => RwStatus::Io,
        Error::Internal(_) => RwStatus::Internal,
    }
}

// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), RwStatus>>(f: F) -> RwStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RwStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RwStatus::Panic
        }
    }
}

fn fail(e: Error) -> RwStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> RwStatus {
    set_error(format!("{what} is null"));
    RwStatus::NullArgument
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RwStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        RwStatus::InvalidUtf8
    })
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, RwStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Length in bytes of the last error message of this thread, excluding the
/// terminating NUL.
#[no_mangle]
pub extern "C" fn rw_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to
/// `len − 1` bytes). Returns the number of bytes written excluding the NUL.
#[no_mangle]
pub unsafe extern "C" fn rw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let mut n = msg.len().min(len - 1);
        while !msg.is_char_boundary(n) {
            n -= 1;
        }
        std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
        *buf.add(n) = 0;
        n
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a potential spec from a TOML table.
#[no_mangle]
pub unsafe extern "C" fn rw_potential_from_toml(text: *const c_char, out: *mut *mut RwPotential) -> RwStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let spec = PotentialSpec::from_toml(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(RwPotential { spec }));
        Ok(())
    })
}

/// Σ x_i² − λ on [−B, B]^d with sublevel margin ν.
#[no_mangle]
pub unsafe extern "C" fn rw_potential_harmonic(
    dim: usize,
    lambda: f64,
    nu: f64,
    box_half_width: f64,
    out: *mut *mut RwPotential,
) -> RwStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = catalog::harmonic(dim, lambda, nu, box_half_width);
        spec.validate().map_err(fail)?;
        *out = Box::into_raw(Box::new(RwPotential { spec }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rw_potential_free(p: *mut RwPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rw_potential_dim(p: *const RwPotential) -> usize {
    p.as_ref().map_or(0, |p| p.spec.dim)
}

/// V(x) for a point of `dim` coordinates inside the evaluation box.
#[no_mangle]
pub unsafe extern "C" fn rw_potential_value(p: *const RwPotential, x: *const f64, dim: usize, out: *mut f64) -> RwStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("potential"))?;
        let out = out_arg(out, "out")?;
        if x.is_null() {
            return Err(null("x"));
        }
        if dim != p.spec.dim {
            return Err(fail(Error::Domain(format!("point has {dim} coordinates, potential has {}", p.spec.dim))));
        }
        let x = std::slice::from_raw_parts(x, dim);
        *out = p.spec.value(x).map_err(fail)?;
        Ok(())
    })
}

/// Weyl term ℏ^{−d} L^cl_{γ,d} ∫ V₋^{γ+d/2} over the evaluation box.
#[no_mangle]
pub unsafe extern "C" fn rw_weyl_term(p: *const RwPotential, hbar: f64, gamma: f64, cells: usize, out: *mut f64) -> RwStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("potential"))?;
        let out = out_arg(out, "out")?;
        let b = p.spec.box_half_width();
        *out = weyl_term_quadrature(&p.spec, None, hbar, gamma, b, cells).map_err(fail)?.value;
        Ok(())
    })
}

/// Discretize −ℏ²Δ + V on `points_per_axis`^d interior nodes of the box.
#[no_mangle]
pub unsafe extern "C" fn rw_operator_assemble(
    p: *const RwPotential,
    points_per_axis: usize,
    hbar: f64,
    out: *mut *mut RwOperator,
) -> RwStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("potential"))?;
        let out = out_arg(out, "out")?;
        let grid = GridSpec::new(p.spec.dim, p.spec.box_half_width, points_per_axis).map_err(fail)?;
        let op = assemble_operator(&p.spec, &grid, hbar).map_err(fail)?;
        *out = Box::into_raw(Box::new(RwOperator { op }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rw_operator_free(op: *mut RwOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rw_operator_order(op: *const RwOperator) -> usize {
    op.as_ref().map_or(0, |o| o.op.order())
}

/// Number of eigenvalues ≤ e, from the inertia of H − e.
#[no_mangle]
pub unsafe extern "C" fn rw_operator_count(op: *const RwOperator, e: f64, out: *mut usize) -> RwStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("operator"))?;
        let out = out_arg(out, "out")?;
        *out = inertia_count(&op.op, e).map_err(fail)?;
        Ok(())
    })
}

/// Σ (λ_j)₋^γ for γ ∈ (0, 1], by the layer-cake formula.
#[no_mangle]
pub unsafe extern "C" fn rw_operator_riesz(op: *const RwOperator, gamma: f64, out: *mut f64) -> RwStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("operator"))?;
        let out = out_arg(out, "out")?;
        let t_max = (-op.op.gershgorin().0).max(0.0);
        *out = riesz_mean_layer_cake(|e| inertia_count(&op.op, e), t_max, gamma, LayerCakeOptions::default()).map_err(fail)?;
        Ok(())
    })
}

/// Exact Tr g_γ(−ℏ²Δ + |x|² − λ) on ℝ^d.
#[no_mangle]
pub unsafe extern "C" fn rw_oscillator_trace(d: usize, hbar: f64, lambda: f64, gamma: f64, out: *mut f64) -> RwStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = oscillator_lattice_count(d, hbar, lambda, gamma).map_err(fail)?;
        Ok(())
    })
}

/// Weyl term of the same oscillator.
#[no_mangle]
pub unsafe extern "C" fn rw_oscillator_weyl(d: usize, hbar: f64, lambda: f64, gamma: f64, out: *mut f64) -> RwStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = oscillator_weyl(d, hbar, lambda, gamma).map_err(fail)?;
        Ok(())
    })
}

/// Predicted slope κ − d of log R against log ℏ. `exploratory` (optional)
/// is set to 1 when a precondition of the rate fails.
#[no_mangle]
pub unsafe extern "C" fn rw_predicted_exponent(
    gamma: f64,
    k: u32,
    mu: f64,
    d: usize,
    theorem: RwTheorem,
    out: *mut f64,
    exploratory: *mut i32,
) -> RwStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let hc = HolderClass::new(k, mu).map_err(fail)?;
        let t = match theorem {
            RwTheorem::Main => Theorem::Main,
            RwTheorem::Main2 => Theorem::Main2,
            RwTheorem::Main3 => Theorem::Main3,
        };
        let p = predicted_exponent(gamma, hc, d, t);
        *out = p.exponent;
        if let Some(x) = exploratory.as_mut() {
            *x = i32::from(p.exploratory);
        }
        Ok(())
    })
}

/// Run the sweep described by the TOML file at `path` and write its
/// reports. `passed` (optional) receives 1 when the rate verdict passes.
#[no_mangle]
pub unsafe extern "C" fn rw_sweep_run_file(path: *const c_char, passed: *mut i32) -> RwStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let cfg = SweepConfig::load(Path::new(path)).map_err(fail)?;
        let (pred, tol) = sweep_expectation(&cfg);
        let outcome = run_sweep(&cfg).map_err(fail)?;
        let report = fit_exponent(&outcome.records, pred.exponent, tol);
        emit_report(&cfg, &outcome, &pred, &report).map_err(fail)?;
        if let Some(x) = passed.as_mut() {
            *x = i32::from(report.verdict.is_pass());
        }
        Ok(())
    })
}
