// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use roughweyl_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        rw_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn harmonic_count_matches_lattice() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(rw_potential_harmonic(1, 1.0, 0.25, 3.0, &mut v), RwStatus::Ok);
        assert_eq!(rw_potential_dim(v), 1);
        let mut h = ptr::null_mut();
        assert_eq!(rw_operator_assemble(v, 1199, 0.1, &mut h), RwStatus::Ok);
        assert_eq!(rw_operator_order(h), 1199);
        let mut n = 0usize;
        // Levels 0.1(2j + 1) − 1 with j = 0..4 lie below −0.05.
        assert_eq!(rw_operator_count(h, -0.05, &mut n), RwStatus::Ok);
        assert_eq!(n, 5);
        let mut exact = 0.0;
        assert_eq!(rw_oscillator_trace(1, 0.1, 1.0, 0.0, &mut exact), RwStatus::Ok);
        assert_eq!(exact, 5.0);
        let mut r = 0.0;
        assert_eq!(rw_operator_riesz(h, 1.0, &mut r), RwStatus::Ok);
        // Σ (1 − 0.1(2j+1)) over j = 0..4 = 2.5, up to the stencil error.
        assert!((r - 2.5).abs() < 5e-3, "{r}");
        rw_operator_free(h);
        rw_potential_free(v);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(rw_potential_harmonic(1, 1.0, 0.25, 3.0, &mut v), RwStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(rw_operator_assemble(v, 20, 0.01, &mut h), RwStatus::Precondition);
        assert!(h.is_null());
        assert!(last_error().contains("points per axis"), "{}", last_error());
        assert_eq!(rw_last_error_length(), last_error().len());

        let mut x = 0.0;
        assert_eq!(rw_potential_value(v, [5.0].as_ptr(), 1, &mut x), RwStatus::Domain);
        assert_eq!(rw_potential_value(v, [0.5].as_ptr(), 1, &mut x), RwStatus::Ok);
        assert_eq!(x, -0.75);
        assert_eq!(rw_potential_value(v, ptr::null(), 1, &mut x), RwStatus::NullArgument);
        assert_eq!(rw_operator_count(ptr::null(), 0.0, &mut 0), RwStatus::NullArgument);
        rw_potential_free(v);
        rw_potential_free(ptr::null_mut());
        rw_operator_free(ptr::null_mut());
    }
}

#[test]
fn toml_potential_and_weyl() {
    let text = CString::new(
        r#"
dim = 1
nu = 0.5
box_half_width = 3.0
regularity = { k = 1, mu = 0.5 }
smooth = [{ kind = "quadratic", weights = [1.0] }, { kind = "constant", value = -1.0 }]
bump = [{ center = [0.0], coeff = 1.0, exponent = 1.5, cutoff_radius = 1.0 }]
"#,
    )
    .unwrap();
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(rw_potential_from_toml(text.as_ptr(), &mut v), RwStatus::Ok);
        let mut w = 0.0;
        assert_eq!(rw_weyl_term(v, 0.1, 0.0, 4000, &mut w), RwStatus::Ok);
        assert!(w > 0.0 && w < 5.0, "{w}");
        rw_potential_free(v);
        let bad = CString::new("dim = 0").unwrap();
        let mut v = ptr::null_mut();
        assert_eq!(rw_potential_from_toml(bad.as_ptr(), &mut v), RwStatus::Config);
        assert!(v.is_null());
    }
}

#[test]
fn predicted_exponent_flags_exploratory() {
    unsafe {
        let (mut e, mut x) = (0.0, -1);
        assert_eq!(rw_predicted_exponent(0.0, 1, 0.0, 3, RwTheorem::Main2, &mut e, &mut x), RwStatus::Ok);
        assert!((e - (2.0 / 3.0 - 3.0)).abs() < 1e-15);
        assert_eq!(x, 0);
        assert_eq!(rw_predicted_exponent(0.5, 2, 1.0, 2, RwTheorem::Main, &mut e, &mut x), RwStatus::Ok);
        assert_eq!(x, 1);
        assert_eq!(rw_predicted_exponent(0.0, 1, 2.0, 3, RwTheorem::Main, &mut e, ptr::null_mut()), RwStatus::Domain);
    }
}

#[test]
fn sweep_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("osc.toml");
    std::fs::write(
        &cfg,
        "name = \"osc\"\nstrategy = \"oscillator\"\nhbar = { start = 0.2, stop = 0.02, points = 8 }\n\
         [oscillator]\ndim = 2\nlambda = 2.0\n[fit]\nenvelope_samples = 9\n[output]\ncsv = \"o.csv\"\n",
    )
    .unwrap();
    let path = CString::new(cfg.to_str().unwrap()).unwrap();
    let mut passed = 0;
    unsafe {
        assert_eq!(rw_sweep_run_file(path.as_ptr(), &mut passed), RwStatus::Ok);
    }
    assert_eq!(passed, 1);
    let csv = std::fs::read_to_string(dir.path().join("o.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    let missing = CString::new("/no/such/config.toml").unwrap();
    unsafe {
        assert_eq!(rw_sweep_run_file(missing.as_ptr(), ptr::null_mut()), RwStatus::Io);
    }
    assert!(last_error().contains("/no/such/config.toml"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(rw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

// The static library sits next to the test binary's deps directory.
fn staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libroughweyl_ffi.a");
    lib.exists().then_some(lib)
}

fn cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler on PATH; header check not run");
        return;
    };
    let include = crate_dir().join("include");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(crate_dir().join("tests/smoke.c"))
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let (Some(cc), Some(lib)) = (cc(), staticlib()) else {
        eprintln!("C compiler or static library unavailable; link check not run");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .args(["-std=c99", "-O1", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(Path::new(&exe)).output().unwrap();
    assert!(out.status.success(), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("5 5.000000 "), "{text}");
}
