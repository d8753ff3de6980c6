//! Acceptance checks 1 to 11, shared by the test harness and the CLI.

use crate::counterexample::{
    cap_escape_check, choose_r, demonstrate_no_closed_geodesic, neck_period, neck_period_bound, pairwise_intersections,
};
use crate::curve::DiscreteCurve;
use crate::error::{GeoError, Result};
use crate::flow::{
    disk_with_2pi, enclosed_curvature, evolve, flow_for, long_arc_test, shortest_boundary_arc,
    static_profile, total_geodesic_curvature, disk_with_enclosed, FlowControls, OutcomeKind,
};
use crate::flow::family::similar_polygon_loop;
use crate::geodesic::{clairaut_constant, integrate, Controls, GeodesicState};
use crate::metric::{Coords, MetricChart, Profile, RegionSpec};
use crate::period::{critical_circles, index_bound, IndexClass, PeriodProblem};
use crate::polygon::{polygon_geodesic, shoot, Mirrors, PolygonKind};
use crate::sweepout::{
    corner_chart, corner_half_argmax, corner_loop_length, disk_minimax_sequence, halving_sequence, hypotenuse_length,
    limit_leaf, measured_corner_loop_length, strictly_decreasing, triangle_leaf, triangle_minimax_sequence,
};
use crate::toric::{cp2_chart, cp2_reference_numbers, DelzantPolygon};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::time::Instant;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// One measured quantity against its target.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: String,
    pub pass: bool,
}

impl Check {
    /// `|value − target| ≤ tol`.
    pub fn close(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: format!("{target:.10} ± {tol:e}"),
            pass: (value - target).abs() <= tol,
        }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, target: format!("≤ {bound:e}"), pass: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, target: format!("≥ {bound}"), pass: value >= bound }
    }

    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, target: format!("< {bound}"), pass: value < bound }
    }

    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, target: format!("> {bound}"), pass: value > bound }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, target: "true".into(), pass: ok }
    }

    pub fn count(name: &str, got: usize, want: usize) -> Self {
        Check { name: name.into(), value: got as f64, target: format!("= {want}"), pass: got == want }
    }
}

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.seconds <= self.budget_seconds && self.checks.iter().all(|c| c.pass)
    }

    /// Single summary line.
    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let mut s = format!(
            "criterion {:>2}: {} {} ({}/{} checks, {:.1} s of {:.0} s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len(),
            self.seconds,
            self.budget_seconds
        );
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        if !failed.is_empty() {
            s.push_str(&format!(" failed: {}", failed.join(", ")));
        }
        if self.seconds > self.budget_seconds {
            s.push_str(" over time budget");
        }
        s
    }
}

const TITLES: [(&str, f64); 11] = [
    ("round-sphere sanity", 1.0),
    ("Clifford quotient", 30.0),
    ("period limits", 5.0),
    ("polygon geodesics", 180.0),
    ("flow exact solutions", 60.0),
    ("static profiles", 30.0),
    ("2π preservation", 300.0),
    ("sweepout formulas", 120.0),
    ("toric CP²", 120.0),
    ("counterexample", 300.0),
    ("property suites", 120.0),
];

/// Run criterion `id` (1 to 11).
pub fn run(id: u8, seed: u64) -> Result<CriterionResult> {
    if !(1..=11).contains(&id) {
        return Err(GeoError::InvalidParams(format!("criterion must be in 1..=11, got {id}")));
    }
    let (title, budget_seconds) = TITLES[id as usize - 1];
    let start = Instant::now();
    let out = match id {
        1 => round_sphere(),
        2 => clifford(),
        3 => period_limits(),
        4 => polygons(),
        5 => flow_exact(),
        6 => static_profiles(seed),
        7 => preservation(),
        8 => sweepouts(),
        9 => toric_cp2(),
        10 => counterexample(seed),
        _ => property_suites(seed),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (checks, error) = match out {
        Ok(c) => (c, None),
        Err(e) => (vec![], Some(e.to_string())),
    };
    Ok(CriterionResult { id, title, checks, error, seconds, budget_seconds })
}

/// Run every criterion in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=11).map(|i| run(i, seed).expect("id in range")).collect()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn circle(c: [f64; 2], r: f64, n: usize) -> DiscreteCurve {
    DiscreteCurve::from_fn(n, |s| [c[0] + r * (2.0 * PI * s).cos(), c[1] + r * (2.0 * PI * s).sin()])
}

fn round_sphere() -> Result<Vec<Check>> {
    let chart = MetricChart::revolution(Profile::Sine, Coords::Polar);
    let total = chart.curvature_integral(&RegionSpec::SublevelDisk { radius: PI }, 1e-10)?;
    let total = total.value().ok_or_else(|| GeoError::Degenerate("sphere integral unbounded".into()))?;
    let pb = PeriodProblem::new(Profile::Sine)?;
    let mut worst = 0.0f64;
    for i in 0..10 {
        let c = pb.c_crit * (0.05 + 0.1 * i as f64);
        worst = worst.max((pb.period(c)?.omega - 2.0 * PI).abs());
    }
    Ok(vec![
        Check::close("∫K over the round sphere", total, 4.0 * PI, 1e-6),
        Check::at_most("max |Ω_c − 2π| over 10 values of c", worst, 1e-6),
    ])
}

fn clifford() -> Result<Vec<Check>> {
    let circles = critical_circles(&Profile::Clifford)?;
    let crit = circles
        .iter()
        .find(|c| c.maximum)
        .ok_or_else(|| GeoError::NotFound("critical circle".into()))?;
    let chart = MetricChart::revolution(Profile::Clifford, Coords::Cartesian);
    let arc = shortest_boundary_arc(&chart)?;
    let rep = long_arc_test(&chart)?;
    Ok(vec![
        Check::close("critical radius", crit.r, FRAC_1_SQRT_2, 1e-10),
        Check::close("critical circle length", crit.length, PI, 1e-8),
        Check::close("shortest boundary arc", arc.length, 2.0, 1e-3),
        Check::flag("long-arc condition", rep.long),
    ])
}

fn period_limits() -> Result<Vec<Check>> {
    let pb = PeriodProblem::new(Profile::Clifford)?;
    let (a, b) = pb.extrapolated_limits()?;
    let idx = index_bound(&Profile::Clifford)?;
    Ok(vec![
        Check::close("extrapolated Ω at c → 0", a, PI, 1e-3),
        Check::close("extrapolated Ω at the maximum", b, PI * SQRT_2, 1e-3),
        Check::close("L√K", idx.l_sqrt_k, 2.0 * PI * SQRT_2, 1e-8),
        Check::flag("index > 1", idx.class == IndexClass::GreaterThanOne),
    ])
}

fn polygons() -> Result<Vec<Check>> {
    let sq = polygon_geodesic(PolygonKind::Square)?;
    let chart = PolygonKind::Square.chart();
    let m = Mirrors::of(PolygonKind::Square);
    let near = shoot(&chart, &m, 1e-3)?.angle;
    let far = shoot(&chart, &m, 0.98)?.angle;
    let tri = polygon_geodesic(PolygonKind::Triangle)?;
    let hex = polygon_geodesic(PolygonKind::Hexagon)?;
    Ok(vec![
        Check::close("square hit angle", sq.angle, FRAC_PI_2, 1e-8),
        Check::at_most("square re-integration defect", sq.reintegration_defect, 1e-5),
        Check::flag("square loop embedded", sq.embedded),
        Check::close("square shoot angle near the corner", near, FRAC_PI_4, 1e-3),
        Check::above("square shoot angle near the boundary", far, FRAC_PI_2),
        Check::flag("triangle loop embedded", tri.embedded),
        Check::at_most("triangle re-integration defect", tri.reintegration_defect, 1e-5),
        Check::flag("hexagon loop embedded", hex.embedded),
        Check::at_most("hexagon re-integration defect", hex.reintegration_defect, 1e-5),
    ])
}

fn flow_exact() -> Result<Vec<Check>> {
    let model = MetricChart::model(1.0, Coords::Cartesian);
    let mut rel = 0.0f64;
    flow_for(&model, &circle([0.0, 0.0], 1.0, 64), 2.0, 0.2, |t, c| {
        let exact = (-2.0 * t).exp();
        for p in &c.vertices {
            rel = rel.max((p[0].hypot(p[1]) - exact).abs() / exact);
        }
    })?;

    let corner = MetricChart::corner();
    let eps = 0.01f64;
    let n = 81;
    let (u0, u1) = (1e-3f64.ln(), 10f64.ln());
    let v = (0..n)
        .map(|i| {
            let x = (u0 + (u1 - u0) * i as f64 / (n - 1) as f64).exp();
            [x, eps / x]
        })
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    flow_for(&corner, &DiscreteCurve::new(v, false), 1.0, 0.2, |t, c| {
        for p in c.vertices.iter().filter(|p| p[0] > 0.03 && p[0] < 0.3) {
            let xy = p[0] * p[1];
            lo = lo.min(xy / (eps * (-2.0 * t).exp()));
            hi = hi.max(xy / (eps * (-t).exp()));
        }
    })?;

    let clif = MetricChart::revolution(Profile::Clifford, Coords::Cartesian);
    let c = disk_with_enclosed(&clif, [0.0, 0.0], 2.0 * PI - 0.05, 128)?;
    let mut series = vec![(0.0, total_geodesic_curvature(&clif, &c)?)];
    let mut err = None;
    flow_for(&clif, &c, 1.0, 0.2, |t, c| match total_geodesic_curvature(&clif, c) {
        Ok(k) => series.push((t, k)),
        Err(e) => {
            err.get_or_insert(e);
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let slope = log_slope(&series);
    Ok(vec![
        Check::at_most("model circle relative error", rel, 1e-3),
        Check::at_least("corner xy / (ε₀e^{−2t})", lo, 1.0 - 1e-9),
        Check::at_most("corner xy / (ε₀e^{−t})", hi, 1.0 + 1e-9),
        Check::close("growth exponent of ∫k", slope, 1.0, 0.05),
    ])
}

/// Least-squares slope of `ln y` against `t`.
fn log_slope(series: &[(f64, f64)]) -> f64 {
    let n = series.len() as f64;
    let (mx, my) = series.iter().fold((0.0, 0.0), |a, s| (a.0 + s.0 / n, a.1 + s.1.ln() / n));
    let (num, den) =
        series.iter().fold((0.0, 0.0), |a, s| (a.0 + (s.0 - mx) * (s.1.ln() - my), a.1 + (s.0 - mx).powi(2)));
    num / den
}

fn static_profiles(seed: u64) -> Result<Vec<Check>> {
    let mut r = rng(seed, 6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = r.gen_range(0.2..3.0);
        let b = r.gen_range(0.2..5.0);
        let p = static_profile(a, b)?;
        worst = worst.max((p.enclosed - p.alpha - p.beta).abs());
    }
    let big = static_profile(1.0, 50.0)?;
    Ok(vec![
        Check::at_most("max |∫K − (α + β)| over 20 random (a, b)", worst, 1e-3),
        Check::close("∫K at b = 50", big.enclosed, PI, 0.05),
    ])
}

fn preservation() -> Result<Vec<Check>> {
    let clif = MetricChart::revolution(Profile::Clifford, Coords::Cartesian);
    let square = MetricChart::product_square();
    let runs: Vec<(&str, &MetricChart, [f64; 2], f64)> = vec![
        ("Clifford (0, 0)", &clif, [0.0, 0.0], 3.0),
        ("Clifford (0.2, 0)", &clif, [0.2, 0.0], 20.0),
        ("Clifford (0.3, 0.1)", &clif, [0.3, 0.1], 20.0),
        ("Clifford (0, 0.5)", &clif, [0.0, 0.5], 20.0),
        ("square (0, 0)", &square, [0.0, 0.0], 20.0),
    ];
    let outcomes = parallel(&runs, |(_, chart, center, t)| {
        let c = disk_with_2pi(chart, *center)?;
        evolve(chart, &c, &FlowControls { max_time: *t, ..Default::default() })
    });
    let mut checks = Vec::new();
    for ((name, ..), o) in runs.iter().zip(outcomes) {
        let o = o?;
        checks.push(Check::at_most(&format!("{name}: max |∫K − 2π|"), o.enclosed_drift, 1e-3));
        if name.starts_with("Clifford (0, 0)") {
            checks.push(Check::flag("critical-circle run is a closed geodesic", o.kind == OutcomeKind::ClosedGeodesic));
            checks.push(Check::close("critical-circle run length", o.final_length, PI, 1e-3));
        }
    }
    let tri = MetricChart::product_triangle();
    let (_, loop0) = similar_polygon_loop(&tri, [0.0, 0.0], 1e-10)?;
    let start = enclosed_curvature(&tri, &loop0)?.value().unwrap_or(f64::NAN);
    let o = evolve(&tri, &loop0, &FlowControls { max_time: 20.0, ..Default::default() })?;
    let bad = matches!(o.kind, OutcomeKind::DoubledArc { .. } | OutcomeKind::IncompletePointDirection { .. });
    checks.push(Check::close("ℤ₃ triangle loop: initial ∫K", start, 2.0 * PI, 1e-6));
    checks.push(Check::at_most("ℤ₃ triangle loop: max |∫K − 2π|", o.enclosed_drift, 1e-3));
    checks.push(Check::flag("ℤ₃ triangle loop avoids arc and point limits", !bad));
    Ok(checks)
}

fn parallel<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| f(it))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Limit of `m_k` when `m_k − m_∞` shrinks by `ratio` per step.
fn extrapolate(prev: f64, last: f64, ratio: f64) -> f64 {
    (ratio * last - prev) / (ratio - 1.0)
}

fn sweepouts() -> Result<Vec<Check>> {
    let chart = corner_chart();
    let mut worst = 0.0f64;
    for r in [0.2, 0.5, 0.83, 0.95] {
        let m = measured_corner_loop_length(&chart, r, FRAC_PI_2, 4096);
        worst = worst.max((m - corner_loop_length(r, FRAC_PI_2)).abs());
    }
    let (golden, stationary) = corner_half_argmax()?;

    let cs = [0.85, 0.9, 0.95, 0.99, 0.999, 0.9999, 0.99999];
    let disks = disk_minimax_sequence(&cs)?;
    let dmax: Vec<f64> = disks.iter().map(|d| d.max_length).collect();
    let n = dmax.len();
    // gap to the limit scales like √(1 − c)
    let dlim = extrapolate(dmax[n - 2], dmax[n - 1], 10f64.sqrt());

    let tris = triangle_minimax_sequence(&halving_sequence(0.05, 12))?;
    let tmax: Vec<f64> = tris.iter().map(|t| t.max_length).collect();
    let m = tmax.len();
    // gap to the limit scales like √a
    let tlim = extrapolate(tmax[m - 2], tmax[m - 1], SQRT_2);
    let l34 = 0.75 * (3.0f64 / 8.0).sqrt();
    let last = tris.last().expect("nonempty");
    let leaf_gap = (last.argmax[0]).hypot(last.argmax[1] - 0.75);
    let limit_ok = limit_leaf()
        .iter()
        .zip(triangle_leaf(0.0, 0.75, 1))
        .all(|(a, b)| (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15)
        && limit_leaf().iter().all(|p| p[0].abs() < 1e-15 || p[1].abs() < 1e-15 || (p[0] + p[1] - 0.75).abs() < 1e-15);
    Ok(vec![
        Check::at_most("|measured − 2r − πr√(1−r²)| at θ = π/2", worst, 1e-5),
        Check::close("argmax r*", golden, 0.83, 1e-2),
        Check::close("argmax r* from the stationarity equation", stationary, golden, 1e-8),
        Check::flag("disk sweepouts disjoint", disks.iter().all(|d| d.disjoint)),
        Check::flag("disk maxima strictly decrease", strictly_decreasing(&dmax)),
        Check::close("disk maxima limit", dlim, 2.0, 1e-3),
        Check::flag("triangle sweepouts disjoint and nested", tris.iter().all(|t| t.disjoint && t.nested)),
        Check::flag("triangle maxima strictly decrease", strictly_decreasing(&tmax)),
        Check::close("l(3/4)", hypotenuse_length(0.75), l34, 1e-15),
        Check::close("triangle maxima limit", tlim, l34, 1e-3),
        Check::at_most("longest leaf distance to the limit leaf", leaf_gap, 1e-4),
        Check::flag("limit leaf is x = 0, y = 0, x + y = 3/4", limit_ok),
    ])
}

fn toric_cp2() -> Result<Vec<Check>> {
    let poly = DelzantPolygon::preset("cp2")?;
    let problems = poly.validate();
    let mut samples = Vec::new();
    for d in [1e-2, 1e-4, 1e-6, 1e-8] {
        for i in 0..=20 {
            let t = d + (1.0 - 3.0 * d) * i as f64 / 20.0;
            samples.push([d, t]);
            samples.push([t, d]);
            samples.push([t, 1.0 - t - d]);
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for p in &samples {
        let v = poly.det_times_prod(*p)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let nums = cp2_reference_numbers(1e-8)?;
    let rep = long_arc_test(&cp2_chart()?)?;
    Ok(vec![
        Check::count("Delzant violations", problems.len(), 0),
        Check::above("min det(G)·∏l on the collar", lo, 0.0),
        Check::below("max/min det(G)·∏l on the collar", hi / lo, 10.0),
        Check::close("x = 1/4 arc length", nums.shortest_arc, 3.0 * 3f64.sqrt() / (8.0 * SQRT_2), 1e-4),
        Check::below("2π triangle family maximum", nums.family_max, 0.9),
        Check::flag("long-arc condition", rep.long),
    ])
}

fn counterexample(seed: u64) -> Result<Vec<Check>> {
    let mut worst = f64::INFINITY;
    for i in 1..100 {
        let c = i as f64 / 100.0;
        worst = worst.min(neck_period_bound(c) - neck_period(c)?);
    }
    let r = choose_r(1.0)?;
    let caps = cap_escape_check(r, false, 1000, seed)?;
    let smooth = cap_escape_check(r, true, 1000, seed)?;
    let pairs = pairwise_intersections(r, 200, seed)?;
    let demo = demonstrate_no_closed_geodesic(r, [24, 24])?;
    Ok(vec![
        Check::above("min (bound − Ω_c) over c = 0.01 … 0.99", worst, 0.0),
        Check::count("explicit cap: samples turning inward", caps.turning_inward, 1000),
        Check::count("explicit cap: samples trapped", caps.trapped, 0),
        Check::count("smooth cap: samples turning inward", smooth.turning_inward, 1000),
        Check::count("smooth cap: samples trapped", smooth.trapped, 0),
        Check::count("geodesic pairs meeting in |x| ≤ R", pairs.intersecting, 200),
        Check::flag(
            "symmetric 2π loop becomes a doubled arc",
            matches!(demo.flow.outcome.kind, OutcomeKind::DoubledArc { .. }),
        ),
        Check::flag("classification stable under refinement", demo.classification_stable),
        Check::at_most("neck flow max |∫K − 2π|", demo.flow.outcome.enclosed_drift, 1e-3),
        Check::above("shooting scan minimum return distance", demo.shooting.min_return_distance, 1e-3),
    ])
}

/// Charts exercised by the property suites with a bounding box for sampling.
fn suite_charts() -> Result<Vec<(MetricChart, [f64; 4])>> {
    Ok(vec![
        (MetricChart::revolution(Profile::Sine, Coords::Cartesian), [-3.0, 3.0, -3.0, 3.0]),
        (MetricChart::revolution(Profile::Clifford, Coords::Cartesian), [-1.0, 1.0, -1.0, 1.0]),
        (MetricChart::model(1.0, Coords::Cartesian), [-2.0, 2.0, -2.0, 2.0]),
        (MetricChart::product_square(), [-1.0, 1.0, -1.0, 1.0]),
        (MetricChart::product_triangle(), [-1.0, 2.0, -1.0, 2.0]),
        (MetricChart::product_hexagon(), [-1.0, 1.0, -1.0, 1.0]),
        (MetricChart::neck(PI, true), [-PI - FRAC_PI_2, PI + FRAC_PI_2, 0.0, PI]),
        (cp2_chart()?, [0.0, 1.0, 0.0, 1.0]),
    ])
}

/// Uniform point at least `gap` from the locus and the chart boundary.
fn sample_point(chart: &MetricChart, bbox: [f64; 4], gap: f64, r: &mut ChaCha8Rng) -> [f64; 2] {
    loop {
        let p = [r.gen_range(bbox[0]..bbox[1]), r.gen_range(bbox[2]..bbox[3])];
        if chart.in_domain(p) && chart.locus_distance(p) > gap && chart.boundary_distance(p) > gap {
            return p;
        }
    }
}

fn property_suites(seed: u64) -> Result<Vec<Check>> {
    let charts = suite_charts()?;
    let results = parallel(&charts.iter().enumerate().collect::<Vec<_>>(), |(i, (chart, bbox))| {
        chart_suite(chart, *bbox, seed, *i as u64)
    });
    let mut gb = 0.0f64;
    let mut speed = 0.0f64;
    let mut fd = 0.0f64;
    let mut disks = 0;
    for res in results {
        let s = res?;
        gb = gb.max(s.gb);
        speed = speed.max(s.speed);
        fd = fd.max(s.fd);
        disks += s.disks;
    }
    let clairaut = clairaut_suite(seed)?;
    Ok(vec![
        Check::count("random disks", disks, 100 * charts.len()),
        Check::at_most("Gauss-Bonnet residual", gb, 1e-5),
        Check::at_most("Clairaut drift", clairaut, 1e-8),
        Check::at_most("unit-speed defect", speed, 1e-8),
        Check::at_most("relative finite-difference curvature gap", fd, 1e-4),
    ])
}

struct ChartSuite {
    gb: f64,
    speed: f64,
    fd: f64,
    disks: usize,
}

fn chart_suite(chart: &MetricChart, bbox: [f64; 4], seed: u64, stream: u64) -> Result<ChartSuite> {
    let mut r = rng(seed, 100 + stream);
    let mut out = ChartSuite { gb: 0.0, speed: 0.0, fd: 0.0, disks: 0 };
    for _ in 0..100 {
        let c = sample_point(chart, bbox, 0.05, &mut r);
        let room = chart.locus_distance(c).min(chart.boundary_distance(c));
        let radius = room * r.gen_range(0.1..0.9);
        let res = chart.gauss_bonnet_residual(&RegionSpec::ChartDisk { center: c, radius }, 1e-10)?;
        out.gb = out.gb.max(res.abs());
        out.disks += 1;
    }
    for _ in 0..100 {
        let p = sample_point(chart, bbox, 0.05, &mut r);
        let k = chart.gaussian_curvature(p)?;
        let kf = chart.curvature_fd(p, 1e-4)?;
        out.fd = out.fd.max((k - kf).abs() / k.abs().max(1.0));
    }
    for _ in 0..20 {
        let p = sample_point(chart, bbox, 0.05, &mut r);
        let a = r.gen_range(0.0..2.0 * PI);
        let st = GeodesicState::unit(chart, p, [a.cos(), a.sin()])?;
        let tr = integrate(chart, st, &Controls::length(2.0));
        if tr.speed_defect.is_finite() {
            out.speed = out.speed.max(tr.speed_defect);
        }
    }
    Ok(out)
}

fn clairaut_suite(seed: u64) -> Result<f64> {
    let mut r = rng(seed, 11);
    let mut drift = 0.0f64;
    let charts = [
        (MetricChart::revolution(Profile::Sine, Coords::Cartesian), 3.0),
        (MetricChart::revolution(Profile::Clifford, Coords::Cartesian), 1.0),
        (MetricChart::model(1.0, Coords::Cartesian), 2.0),
    ];
    for (chart, half) in &charts {
        for _ in 0..20 {
            let p = sample_point(chart, [-half, *half, -half, *half], 0.05, &mut r);
            let a = r.gen_range(0.0..2.0 * PI);
            let st = GeodesicState::unit(chart, p, [a.cos(), a.sin()])?;
            let c0 = clairaut_constant(chart, &st)?;
            let tr = integrate(chart, st, &Controls::length(2.0));
            for s in &tr.samples {
                drift = drift.max((clairaut_constant(chart, s)? - c0).abs());
            }
        }
    }
    Ok(drift)
}
