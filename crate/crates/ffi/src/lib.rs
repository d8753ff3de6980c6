//! C ABI for `geoflow`.
//!
//! Every function returns a [`GeoflowStatus`]; on failure the message is
//! available from [`geoflow_last_error`] on the same thread. Charts are opaque
//! handles released with [`geoflow_chart_free`].

use geoflow::error::GeoError;
use geoflow::flow::{disk_with_2pi_n, evolve, FlowControls, OutcomeKind};
use geoflow::metric::{build_metric, ChartSpec, MetricChart, Profile, RegionSpec};
use geoflow::period::PeriodProblem;
use geoflow::polygon::{polygon_geodesic, PolygonKind};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeoflowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutsideDomain = 3,
    Unbounded = 4,
    NotFound = 5,
    ComputationFailed = 6,
    Panic = 7,
}

/// Opaque chart handle.
pub struct GeoflowChart {
    chart: MetricChart,
}

/// Polygon closed geodesic summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GeoflowPolygonResult {
    pub y0: f64,
    pub angle: f64,
    pub length: f64,
    pub reintegration_defect: f64,
    pub embedded: bool,
}

/// Limit reached by a flowing loop.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeoflowOutcome {
    ClosedGeodesic = 0,
    IncompletePointDirection = 1,
    DoubledArc = 2,
    ShrunkToPoint = 3,
    Inconclusive = 4,
}

/// Flow run summary; `theta1`/`theta2` are NaN when not applicable.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GeoflowFlowResult {
    pub outcome: GeoflowOutcome,
    pub theta1: f64,
    pub theta2: f64,
    pub final_length: f64,
    pub enclosed_drift: f64,
    pub time: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &GeoError) -> GeoflowStatus {
    match e {
        GeoError::UnknownChart(_) | GeoError::InvalidParams(_) | GeoError::Parse { .. } => {
            GeoflowStatus::InvalidArgument
        }
        GeoError::OutsideDomain(_) | GeoError::Domain(_) => GeoflowStatus::OutsideDomain,
        GeoError::Unbounded(_) => GeoflowStatus::Unbounded,
        GeoError::NotFound(_) | GeoError::NoBracket(_) => GeoflowStatus::NotFound,
        _ => GeoflowStatus::ComputationFailed,
    }
}

struct Fail(GeoflowStatus, String);

impl From<GeoError> for Fail {
    fn from(e: GeoError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GeoflowStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GeoflowStatus::Ok
        }
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            GeoflowStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(GeoflowStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GeoflowStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

unsafe fn chart_arg<'a>(p: *const GeoflowChart) -> Result<&'a MetricChart, Fail> {
    p.as_ref().map(|c| &c.chart).ok_or_else(|| null("chart"))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn geoflow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn geoflow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a chart from `{"id": ..., "params": {...}}`.
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_chart_new(spec_json: *const c_char, out: *mut *mut GeoflowChart) -> GeoflowStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = std::ptr::null_mut();
        let text = str_arg(spec_json, "spec_json")?;
        let spec: ChartSpec = serde_json::from_str(text)
            .map_err(|e| Fail(GeoflowStatus::InvalidArgument, format!("chart spec: {e}")))?;
        let chart = build_metric(&spec)?;
        *out = Box::into_raw(Box::new(GeoflowChart { chart }));
        Ok(())
    })
}

/// Release a chart; null is ignored.
///
/// # Safety
/// `chart` must come from [`geoflow_chart_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn geoflow_chart_free(chart: *mut GeoflowChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Metric coefficients `(E, F, G)` at `(u, v)`.
///
/// # Safety
/// `chart` must be a live handle and `out` point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn geoflow_chart_metric(chart: *const GeoflowChart, u: f64, v: f64, out: *mut f64) -> GeoflowStatus {
    guard(|| {
        let chart = chart_arg(chart)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = chart.coeffs_f64([u, v])?;
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&c);
        Ok(())
    })
}

/// Gaussian curvature at `(u, v)`.
///
/// # Safety
/// `chart` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_chart_curvature(chart: *const GeoflowChart, u: f64, v: f64, out: *mut f64) -> GeoflowStatus {
    guard(|| {
        let chart = chart_arg(chart)?;
        let out = out_arg(out, "out")?;
        *out = chart.gaussian_curvature([u, v])?;
        Ok(())
    })
}

/// `∫K dA` over the chart disk of `radius` about `(u, v)`.
/// Returns [`GeoflowStatus::Unbounded`] when the integral diverges.
///
/// # Safety
/// `chart` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_curvature_integral_disk(
    chart: *const GeoflowChart,
    u: f64,
    v: f64,
    radius: f64,
    tol: f64,
    out: *mut f64,
) -> GeoflowStatus {
    guard(|| {
        let chart = chart_arg(chart)?;
        let out = out_arg(out, "out")?;
        let region = RegionSpec::ChartDisk { center: [u, v], radius };
        match chart.curvature_integral(&region, tol)?.value() {
            Some(x) => {
                *out = x;
                Ok(())
            }
            None => Err(Fail(GeoflowStatus::Unbounded, "curvature integral is unbounded".into())),
        }
    })
}

/// Period `Ω_c` of the profile named or written in `profile` (an expression in `r`).
/// `r_max <= 0` lets the profile choose its own range.
///
/// # Safety
/// `profile` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_period(profile: *const c_char, r_max: f64, c: f64, tol: f64, out: *mut f64) -> GeoflowStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(profile, "profile")?;
        let p = Profile::from_name_or_expr(text, (r_max > 0.0).then_some(r_max))?;
        *out = PeriodProblem::new(p)?.period_tol(c, tol)?.omega;
        Ok(())
    })
}

/// Embedded closed geodesic on the product polygon `"square"`, `"triangle"` or `"hexagon"`.
///
/// # Safety
/// `polygon` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_polygon_geodesic(polygon: *const c_char, out: *mut GeoflowPolygonResult) -> GeoflowStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let kind = PolygonKind::parse(str_arg(polygon, "polygon")?)?;
        let g = polygon_geodesic(kind)?;
        *out = GeoflowPolygonResult {
            y0: g.y0,
            angle: g.angle,
            length: g.length,
            reintegration_defect: g.reintegration_defect,
            embedded: g.embedded,
        };
        Ok(())
    })
}

/// Flow the loop about `(u, v)` enclosing total curvature 2π for at most `max_time`.
///
/// # Safety
/// `chart` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_flow_disk(
    chart: *const GeoflowChart,
    u: f64,
    v: f64,
    vertices: usize,
    max_time: f64,
    out: *mut GeoflowFlowResult,
) -> GeoflowStatus {
    guard(|| {
        let chart = chart_arg(chart)?;
        let out = out_arg(out, "out")?;
        if !(max_time > 0.0) || vertices < 8 {
            return Err(Fail(GeoflowStatus::InvalidArgument, "need max_time > 0 and at least 8 vertices".into()));
        }
        let c = disk_with_2pi_n(chart, [u, v], vertices)?;
        let o = evolve(chart, &c, &FlowControls { max_time, ..Default::default() })?;
        let (outcome, theta1, theta2) = match o.kind {
            OutcomeKind::ClosedGeodesic => (GeoflowOutcome::ClosedGeodesic, f64::NAN, f64::NAN),
            OutcomeKind::IncompletePointDirection { theta } => (GeoflowOutcome::IncompletePointDirection, theta, f64::NAN),
            OutcomeKind::DoubledArc { theta1, theta2 } => (GeoflowOutcome::DoubledArc, theta1, theta2),
            OutcomeKind::ShrunkToPoint { .. } => (GeoflowOutcome::ShrunkToPoint, f64::NAN, f64::NAN),
            OutcomeKind::Inconclusive => (GeoflowOutcome::Inconclusive, f64::NAN, f64::NAN),
        };
        *out = GeoflowFlowResult {
            outcome,
            theta1,
            theta2,
            final_length: o.final_length,
            enclosed_drift: o.enclosed_drift,
            time: o.time,
        };
        Ok(())
    })
}

/// Run acceptance criterion `id` (1 to 11); `passed` receives the verdict.
///
/// # Safety
/// `passed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geoflow_acceptance(id: u8, seed: u64, passed: *mut bool) -> GeoflowStatus {
    guard(|| {
        let passed = out_arg(passed, "passed")?;
        let r = geoflow::acceptance::run(id, seed)?;
        *passed = r.passed();
        Ok(())
    })
}
