use geoflow_ffi::*;
use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;

fn last_error() -> String {
    unsafe { CStr::from_ptr(geoflow_last_error()) }.to_string_lossy().into_owned()
}

fn chart(spec: &str) -> *mut GeoflowChart {
    let s = CString::new(spec).unwrap();
    let mut out = std::ptr::null_mut();
    assert_eq!(unsafe { geoflow_chart_new(s.as_ptr(), &mut out) }, GeoflowStatus::Ok, "{}", last_error());
    out
}

#[test]
fn sphere_chart_curvature_and_integral() {
    let c = chart(r#"{"id": "revolution", "params": {"f": "sin", "coords": "cartesian"}}"#);
    let mut k = 0.0;
    assert_eq!(unsafe { geoflow_chart_curvature(c, 0.3, -0.2, &mut k) }, GeoflowStatus::Ok);
    assert!((k - 1.0).abs() < 1e-9);
    let mut m = [0.0; 3];
    assert_eq!(unsafe { geoflow_chart_metric(c, 0.0, 0.0, m.as_mut_ptr()) }, GeoflowStatus::Ok);
    assert!((m[0] - 1.0).abs() < 1e-12 && m[1].abs() < 1e-12 && (m[2] - 1.0).abs() < 1e-12);
    let mut q = 0.0;
    assert_eq!(unsafe { geoflow_curvature_integral_disk(c, 0.0, 0.0, 1.0, 1e-10, &mut q) }, GeoflowStatus::Ok);
    // ∫K over a geodesic disk of radius ρ on the unit sphere is 2π(1 − cos ρ)
    assert!((q - 2.0 * std::f64::consts::PI * (1.0 - 1f64.cos())).abs() < 1e-8, "{q}");
    unsafe { geoflow_chart_free(c) };
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new(r#"{"id": "nope"}"#).unwrap();
    let mut out = std::ptr::null_mut();
    assert_eq!(unsafe { geoflow_chart_new(bad.as_ptr(), &mut out) }, GeoflowStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("nope"));
    assert_eq!(unsafe { geoflow_chart_new(std::ptr::null(), &mut out) }, GeoflowStatus::NullPointer);
    let mut k = 0.0;
    assert_eq!(unsafe { geoflow_chart_curvature(std::ptr::null(), 0.0, 0.0, &mut k) }, GeoflowStatus::NullPointer);
    let expr = CString::new("r*").unwrap();
    assert_eq!(unsafe { geoflow_period(expr.as_ptr(), 1.0, 0.2, 1e-10, &mut k) }, GeoflowStatus::InvalidArgument);
    assert!(last_error().contains("column 3"));
    let c = chart(r#"{"id": "model", "params": {"coords": "polar"}}"#);
    assert_eq!(unsafe { geoflow_curvature_integral_disk(c, 0.5, 0.0, 0.5, 1e-8, &mut k) }, GeoflowStatus::Unbounded);
    unsafe { geoflow_chart_free(c) };
    unsafe { geoflow_chart_free(std::ptr::null_mut()) };
}

#[test]
fn period_polygon_and_flow() {
    let f = CString::new("r*sqrt(1-r^2)").unwrap();
    let mut omega = 0.0;
    assert_eq!(unsafe { geoflow_period(f.as_ptr(), 1.0, 0.3, 1e-10, &mut omega) }, GeoflowStatus::Ok, "{}", last_error());
    assert!(omega > std::f64::consts::PI && omega < std::f64::consts::PI * 2f64.sqrt());
    let sq = CString::new("square").unwrap();
    let mut g = GeoflowPolygonResult::default();
    assert_eq!(unsafe { geoflow_polygon_geodesic(sq.as_ptr(), &mut g) }, GeoflowStatus::Ok);
    assert!(g.embedded && (g.angle - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    let c = chart(r#"{"id": "revolution", "params": {"f": "clifford", "coords": "cartesian"}}"#);
    let mut r = std::mem::MaybeUninit::<GeoflowFlowResult>::uninit();
    assert_eq!(unsafe { geoflow_flow_disk(c, 0.0, 0.0, 128, 3.0, r.as_mut_ptr()) }, GeoflowStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert_eq!(r.outcome, GeoflowOutcome::ClosedGeodesic);
    assert!((r.final_length - std::f64::consts::PI).abs() < 1e-3);
    unsafe { geoflow_chart_free(c) };
    let mut passed = false;
    assert_eq!(unsafe { geoflow_acceptance(1, 1, &mut passed) }, GeoflowStatus::Ok);
    assert!(passed);
    assert_eq!(unsafe { geoflow_acceptance(12, 1, &mut passed) }, GeoflowStatus::InvalidArgument);
}

fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_builds_against_header_and_links() {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    let include = here.join("include");
    let src = here.join("tests/c/smoke.c");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let syntax = Command::new(&cc).arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(&include).arg(&src).status();
    let Ok(syntax) = syntax else {
        eprintln!("no C compiler available; header not compiled");
        return;
    };
    assert!(syntax.success());
    let lib = profile_dir().join("libgeoflow_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("geoflow_smoke");
    let st = Command::new(&cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{:?}", out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("square loop length"));
}
