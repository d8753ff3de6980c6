//! The capped neck `sin²y (dx² + dy²)`: bounded oscillation periods, caps
//! that expel geodesics, and loops that flow to a doubled vertical arc
//! instead of a closed geodesic.

use crate::curve::segments_cross;
use crate::error::{GeoError, Result};
use crate::flow::{disk_with_2pi_n, evolve, FlowControls, FlowOutcome, OutcomeKind};
use crate::geodesic::{geodesic_rhs, integrate, Controls, Event, GeodesicState, Status};
use crate::metric::MetricChart;
use crate::quad::integrate as quad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Period `Ω_c` of the oscillation about `y = π/2` with Clairaut constant `c`,
/// measured as the `x`-advance over one full oscillation.
pub fn neck_period(c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(GeoError::InvalidParams(format!("period needs 0 < c < 1, got {c}")));
    }
    // u = c + (1 − c) sin²φ removes both endpoint singularities.
    let f = |phi: f64| {
        let u = c + (1.0 - c) * phi.sin().powi(2);
        1.0 / ((u + c) * (1.0 + u)).sqrt()
    };
    Ok(8.0 * c * quad(f, 0.0, FRAC_PI_2, 1e-14, 1e-13)?)
}

/// Upper bound `4π √(c / (2(1 + c)))` on [`neck_period`].
pub fn neck_period_bound(c: f64) -> f64 {
    4.0 * PI * (c / (2.0 * (1.0 + c))).sqrt()
}

/// `Ω_c` from a geodesic launched at `(0, π/2)`, as an integration oracle.
pub fn neck_period_shooting(c: f64) -> Result<f64> {
    let chart = MetricChart::neck(10.0, false);
    let start = GeodesicState { p: [0.0, FRAC_PI_2], v: [c, (1.0 - c * c).sqrt()], s: 0.0 };
    let mut controls = Controls::length(50.0).with_event(Event::coordinate("mid", 1, FRAC_PI_2).rising()).sparse();
    controls.h_max = 0.02;
    let tr = integrate(&chart, start, &controls);
    tr.event("mid")
        .map(|e| e.state.p[0])
        .ok_or_else(|| GeoError::Integration(format!("no full oscillation for c = {c}: {:?}", tr.status)))
}

/// Neck half-length `margin · π`, i.e. `margin` times half the supremum `2π`
/// of the period bound.
pub fn choose_r(margin: f64) -> Result<f64> {
    if !(margin >= 1.0) {
        return Err(GeoError::InvalidParams(format!("margin must be at least 1, got {margin}")));
    }
    Ok(margin * PI)
}

/// A non-vertical neck geodesic sampled as a graph `y(x)` over `[−R, R]`.
#[derive(Clone, Debug, Serialize)]
pub struct NeckGraph {
    pub c: f64,
    /// `x` where the geodesic crosses `y = π/2` upward.
    pub phase: f64,
    pub points: Vec<[f64; 2]>,
}

fn neck_graph(chart: &MetricChart, r: f64, c: f64, phase: f64) -> Result<NeckGraph> {
    let s = (1.0 - c * c).sqrt();
    let mut halves = Vec::new();
    for dir in [1.0, -1.0] {
        let start = GeodesicState { p: [phase, FRAC_PI_2], v: [dir * c, dir * s], s: 0.0 };
        let mut controls = Controls::length(1e3)
            .with_event(Event::coordinate("right", 0, r).rising())
            .with_event(Event::coordinate("left", 0, -r).falling());
        controls.h_max = 0.02;
        let tr = integrate(chart, start, &controls);
        if !matches!(tr.status, Status::Event(_)) {
            return Err(GeoError::Integration(format!("neck geodesic c = {c} did not cross the neck: {:?}", tr.status)));
        }
        let mut pts = tr.points();
        if let Some(e) = tr.events.last() {
            pts.push(e.state.p);
        }
        halves.push(pts);
    }
    let mut points: Vec<[f64; 2]> = halves[1].iter().rev().copied().collect();
    points.extend(halves[0].iter().skip(1));
    points.retain(|p| p[0].abs() <= r);
    Ok(NeckGraph { c, phase, points })
}

/// First crossing of two polylines.
fn first_intersection(a: &[[f64; 2]], b: &[[f64; 2]]) -> Option<[f64; 2]> {
    for i in 0..a.len().saturating_sub(1) {
        for j in 0..b.len().saturating_sub(1) {
            if let Some(p) = crate::curve::segment_intersection(a[i], a[i + 1], b[j], b[j + 1]) {
                return Some(p);
            }
        }
    }
    None
}

/// Outcome of the pairwise intersection experiment.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    pub r: f64,
    pub pairs: usize,
    pub intersecting: usize,
    /// Pairs `(c₁, phase₁, c₂, phase₂)` that did not meet.
    pub misses: Vec<[f64; 4]>,
}

/// Draws `pairs` random pairs of non-vertical geodesics and checks that each
/// pair meets inside `|x| ≤ R`.
pub fn pairwise_intersections(r: f64, pairs: usize, seed: u64) -> Result<IntersectionReport> {
    let chart = MetricChart::neck(r, false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<[f64; 4]> = (0..pairs)
        .map(|_| [rng.gen_range(0.01..0.99), rng.gen_range(-r..r), rng.gen_range(0.01..0.99), rng.gen_range(-r..r)])
        .collect();
    let results = parallel_map(&draws, |d| -> Result<bool> {
        let g1 = neck_graph(&chart, r, d[0], d[1])?;
        let g2 = neck_graph(&chart, r, d[2], d[3])?;
        Ok(first_intersection(&g1.points, &g2.points).is_some())
    });
    let mut misses = Vec::new();
    for (d, hit) in draws.iter().zip(results) {
        if !hit? {
            misses.push(*d);
        }
    }
    Ok(IntersectionReport { r, pairs, intersecting: pairs - misses.len(), misses })
}

fn parallel_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).max(1);
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker thread panicked")).collect()
    })
}

/// Result of the cap checks.
#[derive(Clone, Debug, Serialize)]
pub struct CapReport {
    pub samples: usize,
    /// Samples with `ẋ = 0` where `ẍ` points back toward the neck.
    pub turning_inward: usize,
    /// Largest `ẍ` (signed toward the cap end) seen at `ẋ = 0`.
    pub worst_accel: f64,
    /// Random cap geodesics that re-entered the neck.
    pub exited: usize,
    /// Random cap geodesics that ran into the incomplete boundary.
    pub hit_boundary: usize,
    /// Random cap geodesics still in the cap after length 10.
    pub trapped: usize,
    /// Drift of `x` along the vertical geodesic `x = R`.
    pub meridian_drift: f64,
}

/// Checks that `ẋ = 0` forces `ẍ` toward the neck in both caps and that
/// random cap geodesics leave the cap.
pub fn cap_escape_check(r: f64, smooth: bool, n: usize, seed: u64) -> Result<CapReport> {
    let chart = MetricChart::neck(r, smooth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut turning_inward = 0;
    let mut worst_accel = f64::NEG_INFINITY;
    let mut starts = Vec::with_capacity(n);
    for _ in 0..n {
        let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x = side * (r + rng.gen_range(1e-3..FRAC_PI_2 - 0.05));
        let y = rng.gen_range(0.05..PI - 0.05);
        let up = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let st = GeodesicState::unit(&chart, [x, y], [0.0, up])?;
        let acc = geodesic_rhs(&chart, &st)?;
        let outward = side * acc[0];
        worst_accel = worst_accel.max(outward);
        if outward < 0.0 {
            turning_inward += 1;
        }
        let ang: f64 = rng.gen_range(0.0..2.0 * PI);
        starts.push(GeodesicState::unit(&chart, [x, y], [ang.cos(), ang.sin()])?);
    }
    let outcomes = parallel_map(&starts, |st| {
        let side = st.p[0].signum();
        let controls = Controls::length(10.0)
            .with_event(Event::new("neck", move |s| side * s.p[0] - r).falling())
            .sparse();
        integrate(&chart, *st, &controls).status
    });
    let (mut exited, mut hit_boundary, mut trapped) = (0, 0, 0);
    for s in outcomes {
        match s {
            Status::Event(_) => exited += 1,
            Status::Halted(_) => hit_boundary += 1,
            Status::Completed => trapped += 1,
        }
    }
    let vertical = GeodesicState::unit(&chart, [r, 0.3], [0.0, 1.0])?;
    let tr = integrate(&chart, vertical, &Controls::length(2.0).with_event(Event::coordinate("top", 1, PI - 0.3)));
    let meridian_drift = tr.samples.iter().map(|s| (s.p[0] - r).abs()).fold(0.0, f64::max);
    Ok(CapReport { samples: n, turning_inward, worst_accel, exited, hit_boundary, trapped, meridian_drift })
}

/// Bounded search for an embedded closed geodesic through `y = π/2`.
#[derive(Clone, Debug, Serialize)]
pub struct ShootingCertificate {
    /// Launch grid: `x` positions times launch angles.
    pub grid: [usize; 2],
    pub max_length: f64,
    /// Smallest phase-space distance back to the launch state before the
    /// trajectory first crosses itself.
    pub min_return_distance: f64,
    /// Launches whose trajectory crossed itself.
    pub self_crossing: usize,
    /// Launches that ran into the incomplete boundary first.
    pub hit_boundary: usize,
    /// Vertical tangencies found inside `|x| ≤ R`.
    pub vertical_tangencies: usize,
    pub exhaustive: bool,
}

fn shoot_one(chart: &MetricChart, r: f64, x0: f64, psi: f64, max_length: f64) -> Result<(f64, bool, bool, usize)> {
    let start = GeodesicState::unit(chart, [x0, FRAC_PI_2], [psi.cos(), psi.sin()])?;
    let mut controls = Controls::length(max_length).with_event(Event::velocity("vertical", 0).non_terminal());
    controls.h_max = 0.05;
    let tr = integrate(chart, start, &controls);
    let vertical = tr.events.iter().filter(|e| e.id == "vertical" && e.state.p[0].abs() < r - 1e-9).count();
    let pts = tr.points();
    let mut crossing = None;
    'outer: for j in 2..pts.len().saturating_sub(1) {
        for i in 0..j - 1 {
            if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                crossing = Some(j);
                break 'outer;
            }
        }
    }
    let v0 = [psi.cos(), psi.sin()];
    let end = crossing.unwrap_or(tr.samples.len());
    let mut min_d = f64::INFINITY;
    for s in &tr.samples[..end] {
        if s.s < 1.0 {
            continue;
        }
        let n = s.v[0].hypot(s.v[1]);
        let d = (s.p[0] - x0).hypot(s.p[1] - FRAC_PI_2) + (s.v[0] / n - v0[0]).hypot(s.v[1] / n - v0[1]);
        min_d = min_d.min(d);
    }
    let halted = matches!(tr.status, Status::Halted(_));
    Ok((min_d, crossing.is_some(), halted && crossing.is_none(), vertical))
}

/// Launches geodesics from `y = π/2` over an `nx × npsi` grid and records how
/// close each returns to its launch state before first crossing itself.
pub fn shooting_certificate(r: f64, nx: usize, npsi: usize, max_length: f64) -> Result<ShootingCertificate> {
    let chart = MetricChart::neck(r, false);
    let mut launches = Vec::with_capacity(nx * npsi);
    for i in 0..nx {
        let x0 = -r + 2.0 * r * (i as f64 + 0.5) / nx as f64;
        for j in 0..npsi {
            let psi = PI * (j as f64 + 0.5) / npsi as f64 - FRAC_PI_2;
            if (psi.abs() - FRAC_PI_2).abs() > 1e-9 {
                launches.push((x0, psi));
            }
        }
    }
    let res = parallel_map(&launches, |&(x0, psi)| shoot_one(&chart, r, x0, psi, max_length));
    let mut cert = ShootingCertificate {
        grid: [nx, npsi],
        max_length,
        min_return_distance: f64::INFINITY,
        self_crossing: 0,
        hit_boundary: 0,
        vertical_tangencies: 0,
        exhaustive: false,
    };
    for r in res {
        let (d, crossed, halted, vertical) = r?;
        cert.min_return_distance = cert.min_return_distance.min(d);
        cert.self_crossing += crossed as usize;
        cert.hit_boundary += halted as usize;
        cert.vertical_tangencies += vertical;
    }
    Ok(cert)
}

/// Flow of the symmetric `∫K = 2π` loop centred in the neck.
#[derive(Clone, Debug, Serialize)]
pub struct NeckFlowReport {
    pub vertices: usize,
    pub cfl: f64,
    pub outcome: FlowOutcome,
    /// Largest `|x|` of the initial loop.
    pub initial_extent: f64,
    /// Largest `|x|` seen over the stored frames.
    pub max_extent: f64,
}

pub fn neck_flow(r: f64, vertices: usize, cfl: f64, max_time: f64) -> Result<NeckFlowReport> {
    let chart = MetricChart::neck(r, false);
    let loop0 = disk_with_2pi_n(&chart, [0.0, FRAC_PI_2], vertices)?;
    let initial_extent = loop0.vertices.iter().map(|p| p[0].abs()).fold(0.0, f64::max);
    if initial_extent >= r {
        return Err(GeoError::InvalidParams(format!("initial loop reaches |x| = {initial_extent} beyond R = {r}")));
    }
    let controls = FlowControls { max_time, cfl, frame_dt: Some(0.1), ..Default::default() };
    let outcome = evolve(&chart, &loop0, &controls)?;
    let max_extent = outcome
        .frames
        .iter()
        .flat_map(|(_, c)| c.vertices.iter().map(|p| p[0].abs()))
        .chain(outcome.curve.vertices.iter().map(|p| p[0].abs()))
        .fold(0.0, f64::max);
    Ok(NeckFlowReport { vertices, cfl, outcome, initial_extent, max_extent })
}

/// JSON certificate for the capped neck.
#[derive(Clone, Debug, Serialize)]
pub struct NoClosedGeodesicReport {
    pub r: f64,
    pub flow: NeckFlowReport,
    /// The same flow at half the vertices and half the time step.
    pub coarse: NeckFlowReport,
    pub fine_dt: NeckFlowReport,
    pub classification_stable: bool,
    pub shooting: ShootingCertificate,
}

fn same_kind(a: &OutcomeKind, b: &OutcomeKind) -> bool {
    match (a, b) {
        (OutcomeKind::DoubledArc { theta1: a1, theta2: a2 }, OutcomeKind::DoubledArc { theta1: b1, theta2: b2 }) => {
            let mut x = [*a1, *a2];
            let mut y = [*b1, *b2];
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            (x[0] - y[0]).abs() < 0.1 && (x[1] - y[1]).abs() < 0.1
        }
        _ => std::mem::discriminant(a) == std::mem::discriminant(b),
    }
}

/// Flow plus shooting evidence that the capped neck has no embedded closed
/// geodesic.
pub fn demonstrate_no_closed_geodesic(r: f64, grid: [usize; 2]) -> Result<NoClosedGeodesicReport> {
    let (flow, coarse, fine_dt) = std::thread::scope(|scope| {
        let a = scope.spawn(|| neck_flow(r, 128, 0.1, 40.0));
        let b = scope.spawn(|| neck_flow(r, 64, 0.1, 40.0));
        let c = scope.spawn(|| neck_flow(r, 128, 0.05, 40.0));
        (a.join().expect("flow thread"), b.join().expect("flow thread"), c.join().expect("flow thread"))
    });
    let (flow, coarse, fine_dt) = (flow?, coarse?, fine_dt?);
    let classification_stable =
        same_kind(&flow.outcome.kind, &coarse.outcome.kind) && same_kind(&flow.outcome.kind, &fine_dt.outcome.kind);
    let shooting = shooting_certificate(r, grid[0], grid[1], 4.0 * (r + PI))?;
    Ok(NoClosedGeodesicReport { r, flow, coarse, fine_dt, classification_stable, shooting })
}

#[cfg(test)]
mod tests;
