//! The flow `∂γ/∂t = (k/K) ν` of loops on a chart.
//!
//! Vertex curvature is the discrete Gauss–Bonnet turning (vertex angle plus
//! the geodesic curvature of the adjacent straight chords), and vertex
//! velocities are weighted by the exact first variation of `∫K dA` over the
//! polygon, so the semi-discrete system satisfies `d∫K/dt = -∮k ds`.

pub mod family;
pub mod profile;

pub use family::{
    disk_family_max, disk_with_2pi, disk_with_2pi_n, disk_with_enclosed, long_arc_test, shortest_boundary_arc, similar_polygon_family_max, BoundaryArc,
    DiskFamily, LongArcReport,
};
pub use profile::{static_profile, StaticProfile};

use crate::curve::DiscreteCurve;
use crate::error::{GeoError, Result};
use crate::metric::{Integral, LocusPiece, MetricChart, LOCUS_GUARD};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const GL4_X: [f64; 4] = [0.0694318442029737124, 0.330009478207571868, 0.669990521792428132, 0.930568155797026288];
const GL4_W: [f64; 4] = [0.173927422568726929, 0.326072577431273071, 0.326072577431273071, 0.173927422568726929];

/// Parametrisation used when resampling a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Metric arclength weighted by `√K`, which equalises `h²K`.
    Scaled,
    Metric,
    Chart,
}

/// Stopping and accuracy controls for [`evolve`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowControls {
    pub max_time: f64,
    pub cfl: f64,
    /// `max|k|` threshold for a closed geodesic.
    pub tol_k: f64,
    /// Relative length change per step threshold for a closed geodesic.
    pub tol_len: f64,
    /// Metric distance to the incomplete locus counted as "arrived".
    pub delta_b: f64,
    /// Angular gap merging direction clusters.
    pub cluster_gap: f64,
    /// Flow time a cluster pattern must persist before classification.
    pub persist: f64,
    /// Spacing ratio that triggers resampling.
    pub remesh_ratio: f64,
    pub spacing: Spacing,
    /// Length fraction below which the loop counts as shrunk.
    pub shrink_ratio: f64,
    /// Steps between recorded diagnostic samples.
    pub sample_every: usize,
    /// Flow time between stored frames.
    pub frame_dt: Option<f64>,
    pub max_steps: usize,
}

impl Default for FlowControls {
    fn default() -> Self {
        FlowControls {
            max_time: 20.0,
            cfl: 0.2,
            tol_k: 1e-4,
            tol_len: 1e-8,
            delta_b: 1e-3,
            cluster_gap: 0.1,
            persist: 1.0,
            remesh_ratio: 3.0,
            spacing: Spacing::Scaled,
            shrink_ratio: 1e-3,
            sample_every: 50,
            frame_dt: None,
            max_steps: 20_000_000,
        }
    }
}

/// Limit reached by a flowing loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeKind {
    ClosedGeodesic,
    IncompletePointDirection { theta: f64 },
    DoubledArc { theta1: f64, theta2: f64 },
    ShrunkToPoint { point: [f64; 2] },
    Inconclusive,
}

/// One diagnostic sample along a run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub length: f64,
    pub total_k: f64,
    /// `∫K dA` over the enclosed region when it is finite.
    pub enclosed: Option<f64>,
    pub max_k: f64,
    /// Smallest metric distance of a vertex to the incomplete locus.
    pub locus_gap: f64,
}

/// Result of [`evolve`].
#[derive(Clone, Debug, Serialize)]
pub struct FlowOutcome {
    pub kind: OutcomeKind,
    pub final_enclosed: Option<f64>,
    pub final_total_k: f64,
    pub final_length: f64,
    pub time: f64,
    pub steps: usize,
    pub remeshes: usize,
    /// Largest `|∫K - ∫K(0)|` seen at the samples.
    pub enclosed_drift: f64,
    /// Accepted steps on which the length grew.
    pub length_increases: usize,
    /// Steps rejected because the polygon would self-intersect.
    pub rejected_crossings: usize,
    pub history: Vec<FlowSample>,
    #[serde(skip)]
    pub frames: Vec<(f64, DiscreteCurve)>,
    #[serde(skip)]
    pub curve: DiscreteCurve,
}

struct EdgeData {
    h: f64,
    /// `∫k ds` along the straight chord.
    c: f64,
    /// First variation weights of `∫K dA` for the start and end vertex.
    wa: [f64; 2],
    wb: [f64; 2],
}

fn edge_data(chart: &MetricChart, a: [f64; 2], b: [f64; 2]) -> Result<EdgeData> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let dperp = [d[1], -d[0]];
    let mut out = EdgeData { h: 0.0, c: 0.0, wa: [0.0; 2], wb: [0.0; 2] };
    for k in 0..4 {
        let t = GL4_X[k];
        let p = [a[0] + t * d[0], a[1] + t * d[1]];
        let loc = chart.local(p)?;
        let sp2 = loc.inner(d, d);
        let acc = loc.gamma_ab(d, d);
        let sd = loc.det.sqrt();
        out.h += GL4_W[k] * sp2.sqrt();
        out.c += GL4_W[k] * sd * (d[0] * acc[1] - d[1] * acc[0]) / sp2;
        let rho = loc.curvature() * sd;
        for m in 0..2 {
            out.wa[m] += GL4_W[k] * (1.0 - t) * rho * dperp[m];
            out.wb[m] += GL4_W[k] * t * rho * dperp[m];
        }
    }
    Ok(out)
}

/// Per-vertex discrete geometry of a curve.
#[derive(Clone, Debug)]
pub struct Discretization {
    /// Metric length of edge `i` (from vertex `i` to `i+1`).
    pub h: Vec<f64>,
    /// Vertex curvature `k_i`; zero at the ends of an open curve.
    pub k: Vec<f64>,
    /// Dual length `(h_{i-1}+h_i)/2`.
    pub w: Vec<f64>,
    /// Gaussian curvature at the vertices.
    pub gauss: Vec<f64>,
    /// Chart velocity `(k/K) ν` at the vertices.
    pub velocity: Vec<[f64; 2]>,
    /// `Σ k_i w_i`.
    pub total_k: f64,
}

impl Discretization {
    pub fn length(&self) -> f64 {
        self.h.iter().sum()
    }

    pub fn max_abs_k(&self) -> f64 {
        self.k.iter().fold(0.0, |m, k| m.max(k.abs()))
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Discrete curvature and flow velocity of every vertex.
pub fn discretize(chart: &MetricChart, curve: &DiscreteCurve) -> Result<Discretization> {
    let n = curve.len();
    if n < 3 {
        return Err(GeoError::Flow("curve needs at least three vertices".into()));
    }
    let ne = curve.segments();
    let mut edges = Vec::with_capacity(ne);
    for i in 0..ne {
        edges.push(edge_data(chart, curve.vertices[i], curve.vertices[(i + 1) % n])?);
    }
    let h: Vec<f64> = edges.iter().map(|e| e.h).collect();
    let mut k = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut gauss = vec![0.0; n];
    let mut velocity = vec![[0.0; 2]; n];
    let mut total_k = 0.0;
    for i in 0..n {
        let p = curve.vertices[i];
        let loc = chart.local(p)?;
        gauss[i] = loc.curvature();
        let interior = curve.closed || (i > 0 && i + 1 < n);
        if !interior {
            continue;
        }
        let ip = if i == 0 { ne - 1 } else { i - 1 };
        let din = [p[0] - curve.vertex(i as isize - 1)[0], p[1] - curve.vertex(i as isize - 1)[1]];
        let dout = [curve.vertex(i as isize + 1)[0] - p[0], curve.vertex(i as isize + 1)[1] - p[1]];
        let turn = (loc.det.sqrt() * cross(din, dout)).atan2(loc.inner(din, dout));
        let kw = turn + 0.5 * (edges[ip].c + edges[i].c);
        w[i] = 0.5 * (edges[ip].h + edges[i].h);
        k[i] = kw / w[i];
        total_k += kw;
        let wv = [edges[i].wa[0] + edges[ip].wb[0], edges[i].wa[1] + edges[ip].wb[1]];
        let up = loc.raise(wv);
        let q = wv[0] * up[0] + wv[1] * up[1];
        if q > 0.0 {
            velocity[i] = [-kw * up[0] / q, -kw * up[1] / q];
        }
    }
    if !curve.closed {
        // chord curvature of the end edges belongs to the open ends
        total_k += 0.5 * (edges[0].c + edges[ne - 1].c);
    }
    Ok(Discretization { h, k, w, gauss, velocity, total_k })
}

fn require_positive(curve: &DiscreteCurve, d: &Discretization) -> Result<()> {
    match d.gauss.iter().position(|k| !(*k > 0.0)) {
        Some(i) => Err(GeoError::Flow(format!("K = {} is not positive at vertex {:?}", d.gauss[i], curve.vertices[i]))),
        None => Ok(()),
    }
}

/// Move every vertex by `(k/K) ν dt` (one explicit Euler step).
pub fn flow_step(chart: &MetricChart, curve: &DiscreteCurve, dt: f64) -> Result<DiscreteCurve> {
    let d = discretize(chart, curve)?;
    require_positive(curve, &d)?;
    let mut out = curve.clone();
    for (p, v) in out.vertices.iter_mut().zip(&d.velocity) {
        p[0] += dt * v[0];
        p[1] += dt * v[1];
    }
    Ok(out)
}

/// Largest step allowed by the parabolic stability bound.
pub fn stable_dt(d: &Discretization, cfl: f64) -> f64 {
    let n = d.gauss.len();
    let ne = d.h.len();
    let mut m = f64::INFINITY;
    for i in 0..n {
        let hl = if i < ne { d.h[i] } else { f64::INFINITY };
        let hr = if i > 0 { d.h[i - 1] } else if ne == n { d.h[ne - 1] } else { f64::INFINITY };
        let hmin = hl.min(hr);
        if hmin.is_finite() {
            m = m.min(hmin * hmin * d.gauss[i]);
        }
    }
    cfl * m
}

fn point_locus_inside(chart: &MetricChart, c: &DiscreteCurve) -> bool {
    chart.locus.iter().any(|l| match l {
        LocusPiece::Circle(p, r) if *r == 0.0 => winding(c, *p) != 0,
        _ => false,
    })
}

/// Winding number of a closed polygon around `p`.
pub fn winding(c: &DiscreteCurve, p: [f64; 2]) -> i32 {
    let n = c.len();
    let mut w = 0;
    for i in 0..n {
        let a = c.vertices[i];
        let b = c.vertices[(i + 1) % n];
        if a[1] <= p[1] {
            if b[1] > p[1] && cross([b[0] - a[0], b[1] - a[1]], [p[0] - a[0], p[1] - a[1]]) > 0.0 {
                w += 1;
            }
        } else if b[1] <= p[1] && cross([b[0] - a[0], b[1] - a[1]], [p[0] - a[0], p[1] - a[1]]) < 0.0 {
            w -= 1;
        }
    }
    w
}

/// `∫K dA` over the polygon bounded by a closed curve, by Stokes' theorem
/// applied to the connection form of the frame `∂_u/√E`.
pub fn enclosed_curvature(chart: &MetricChart, c: &DiscreteCurve) -> Result<Integral> {
    if !c.closed {
        return Err(GeoError::InvalidParams("enclosed curvature needs a closed curve".into()));
    }
    if let Some((i, j)) = c.first_crossing() {
        return Err(GeoError::InvalidParams(format!("curve is not simple: segments {i} and {j} cross")));
    }
    if c.vertices.iter().any(|p| chart.locus_distance(*p) < LOCUS_GUARD) || point_locus_inside(chart, c) {
        return Ok(Integral::Unbounded { partial: f64::INFINITY, layers: 0 });
    }
    let n = c.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = c.vertices[i];
        let b = c.vertices[(i + 1) % n];
        let d = [b[0] - a[0], b[1] - a[1]];
        for k in 0..4 {
            let t = GL4_X[k];
            s += GL4_W[k] * chart.connection_form([a[0] + t * d[0], a[1] + t * d[1]], d)?;
        }
    }
    let sign = if c.chart_area() >= 0.0 { -1.0 } else { 1.0 };
    Ok(Integral::Finite(sign * s))
}

/// `∫k ds` of the curve (for a closed counterclockwise curve, the left
/// normal points inside).
pub fn total_geodesic_curvature(chart: &MetricChart, c: &DiscreteCurve) -> Result<f64> {
    Ok(discretize(chart, c)?.total_k)
}

/// Periodic (closed) or natural (open) cubic spline through `pts` at knots
/// `s`, evaluated at `targets`.
fn spline_resample(pts: &[[f64; 2]], closed: bool, s: &[f64], targets: &[f64]) -> Vec<[f64; 2]> {
    let n = pts.len();
    let m = if closed { n } else { n - 1 };
    let hs: Vec<f64> = (0..m).map(|i| s[i + 1] - s[i]).collect();
    let y = |i: usize, c: usize| pts[i % n][c];
    let mut out = vec![[0.0; 2]; targets.len()];
    for c in 0..2 {
        let mm = if closed { second_derivs_periodic(&hs, |i| y(i, c)) } else { second_derivs_natural(&hs, |i| y(i, c)) };
        let mut seg = 0;
        for (j, &t) in targets.iter().enumerate() {
            while seg + 1 < m && t > s[seg + 1] {
                seg += 1;
            }
            let h = hs[seg];
            let a = (s[seg + 1] - t) / h;
            let b = (t - s[seg]) / h;
            let m0 = mm[seg];
            let m1 = mm[(seg + 1) % mm.len()];
            out[j][c] = a * y(seg, c) + b * y(seg + 1, c) + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        }
    }
    out
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / den;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn second_derivs_natural<Y: Fn(usize) -> f64>(h: &[f64], y: Y) -> Vec<f64> {
    let m = h.len();
    let mut out = vec![0.0; m + 1];
    if m < 2 {
        return out;
    }
    let k = m - 1;
    let mut sub = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut sup = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        sub[j] = h[i - 1];
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        sup[j] = h[i];
        rhs[j] = 6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(i - 1)) / h[i - 1]);
    }
    let x = thomas(&sub, &diag, &sup, &rhs);
    out[1..=k].copy_from_slice(&x);
    out
}

fn second_derivs_periodic<Y: Fn(usize) -> f64>(h: &[f64], y: Y) -> Vec<f64> {
    // cyclic tridiagonal system solved with the Sherman-Morrison correction
    let n = h.len();
    let hp = |i: usize| h[(i + n - 1) % n];
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        sub[i] = hp(i);
        diag[i] = 2.0 * (hp(i) + h[i]);
        sup[i] = h[i];
        let yp = y((i + n - 1) % n);
        rhs[i] = 6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - yp) / hp(i));
    }
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d2 = diag.clone();
    d2[0] -= gamma;
    d2[n - 1] -= alpha * beta / gamma;
    let x = thomas(&sub, &d2, &sup, &rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(&sub, &d2, &sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    (0..n).map(|i| x[i] - fact * z[i]).collect()
}

fn gauss_at(chart: &MetricChart, p: [f64; 2]) -> f64 {
    chart.local(p).map(|l| l.curvature().max(0.0)).unwrap_or(0.0)
}

/// Resample to `n_out` vertices equally spaced in the chosen arclength.
pub fn remesh(chart: &MetricChart, curve: &DiscreteCurve, spacing: Spacing, n_out: usize) -> DiscreteCurve {
    let n = curve.len();
    let ne = curve.segments();
    let mut s = vec![0.0; ne + 1];
    for i in 0..ne {
        let a = curve.vertices[i];
        let b = curve.vertices[(i + 1) % n];
        let l = match spacing {
            Spacing::Metric => chart.chord_length(a, b),
            Spacing::Scaled => chart.chord_length(a, b) * (0.5 * (gauss_at(chart, a) + gauss_at(chart, b))).sqrt(),
            Spacing::Chart => ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt(),
        };
        s[i + 1] = s[i] + if l.is_finite() && l > 0.0 { l } else { 1e-300 };
    }
    let total = s[ne];
    let targets: Vec<f64> = if curve.closed {
        (0..n_out).map(|j| total * j as f64 / n_out as f64).collect()
    } else {
        (0..n_out).map(|j| total * j as f64 / (n_out - 1) as f64).collect()
    };
    let mut v = spline_resample(&curve.vertices, curve.closed, &s, &targets);
    if !curve.closed {
        v[0] = curve.vertices[0];
        v[n_out - 1] = curve.vertices[n - 1];
    }
    DiscreteCurve::new(v, curve.closed)
}

/// Offset a resampled closed curve uniformly along the discrete normals so
/// that its enclosed `∫K` equals `target` (Newton on the first variation).
fn restore_enclosed(chart: &MetricChart, mut c: DiscreteCurve, target: f64) -> DiscreteCurve {
    for _ in 0..3 {
        let Ok(Integral::Finite(q)) = enclosed_curvature(chart, &c) else { return c };
        let err = q - target;
        if err.abs() < 1e-14 * target.abs().max(1.0) {
            break;
        }
        let n = c.len();
        let mut dirs = vec![[0.0; 2]; n];
        let mut rate = 0.0;
        for i in 0..n {
            let a = c.vertex(i as isize - 1);
            let p = c.vertices[i];
            let b = c.vertex(i as isize + 1);
            let (Ok(e0), Ok(e1), Ok(loc)) = (edge_data(chart, a, p), edge_data(chart, p, b), chart.local(p)) else { return c };
            let wv = [e0.wb[0] + e1.wa[0], e0.wb[1] + e1.wa[1]];
            let up = loc.raise(wv);
            let nrm = loc.norm(up);
            if nrm > 0.0 {
                dirs[i] = [up[0] / nrm, up[1] / nrm];
                rate += wv[0] * dirs[i][0] + wv[1] * dirs[i][1];
            }
        }
        if !(rate.abs() > 0.0) {
            break;
        }
        let step = -err / rate;
        let moved = DiscreteCurve::new(
            c.vertices.iter().zip(&dirs).map(|(p, d)| [p[0] + step * d[0], p[1] + step * d[1]]).collect(),
            true,
        );
        if moved.vertices.iter().any(|p| !chart.in_domain(*p)) || moved.first_crossing().is_some() {
            break;
        }
        c = moved;
    }
    c
}

fn spacing_ratio(d: &Discretization, c: &DiscreteCurve, spacing: Spacing) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let n = c.len();
    for i in 0..c.segments() {
        let l = match spacing {
            Spacing::Metric => d.h[i],
            Spacing::Scaled => d.h[i] * (0.5 * (d.gauss[i] + d.gauss[(i + 1) % n]).max(0.0)).sqrt(),
            Spacing::Chart => {
                let a = c.vertices[i];
                let b = c.vertices[(i + 1) % n];
                ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
            }
        };
        lo = lo.min(l);
        hi = hi.max(l);
    }
    hi / lo
}

/// Direction clusters of vertices within metric distance `delta` of the
/// incomplete locus: `(cluster mean directions, smallest metric gap)`.
pub fn locus_clusters(chart: &MetricChart, c: &DiscreteCurve, delta: f64, gap: f64) -> (Vec<f64>, f64) {
    let mut dirs = Vec::new();
    let mut min_gap = f64::INFINITY;
    for p in &c.vertices {
        let Some(q) = chart.locus_nearest(*p) else { continue };
        let dist = chart.chord_length(q, *p);
        let dist = if dist.is_finite() { dist } else { chart.locus_distance(*p) };
        min_gap = min_gap.min(dist);
        if dist < delta {
            dirs.push(chart.locus_direction(*p).rem_euclid(2.0 * PI));
        }
    }
    (cluster_angles(&mut dirs, gap), min_gap)
}

/// Group angles on the circle, splitting at gaps larger than `gap`.
pub fn cluster_angles(a: &mut [f64], gap: f64) -> Vec<f64> {
    if a.is_empty() {
        return vec![];
    }
    a.sort_by(|x, y| x.total_cmp(y));
    let n = a.len();
    let splits: Vec<usize> = (0..n)
        .filter(|&i| {
            let next = if i + 1 < n { a[i + 1] } else { a[0] + 2.0 * PI };
            next - a[i] > gap
        })
        .collect();
    if splits.is_empty() {
        return vec![circular_mean(a)];
    }
    let mut out = Vec::new();
    for (j, &s) in splits.iter().enumerate() {
        let start = (splits[(j + splits.len() - 1) % splits.len()] + 1) % n;
        let mut members = Vec::new();
        let mut i = start;
        loop {
            members.push(a[i]);
            if i == s {
                break;
            }
            i = (i + 1) % n;
        }
        out.push(circular_mean(&members));
    }
    out
}

fn circular_mean(a: &[f64]) -> f64 {
    let (s, c) = a.iter().fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
    s.atan2(c)
}

fn heun(chart: &MetricChart, c: &DiscreteCurve, d0: &Discretization, dt: f64) -> Result<DiscreteCurve> {
    let mut mid = c.clone();
    for (p, v) in mid.vertices.iter_mut().zip(&d0.velocity) {
        p[0] += dt * v[0];
        p[1] += dt * v[1];
    }
    if mid.vertices.iter().any(|p| !chart.in_domain(*p)) {
        return Err(GeoError::Flow("predictor left the domain".into()));
    }
    let d1 = discretize(chart, &mid)?;
    let mut out = c.clone();
    for i in 0..c.len() {
        for m in 0..2 {
            out.vertices[i][m] += 0.5 * dt * (d0.velocity[i][m] + d1.velocity[i][m]);
        }
    }
    if out.vertices.iter().any(|p| !chart.in_domain(*p)) {
        return Err(GeoError::Flow("step left the domain".into()));
    }
    Ok(out)
}

fn min_chart_spacing(c: &DiscreteCurve) -> f64 {
    let n = c.len();
    (0..c.segments())
        .map(|i| {
            let a = c.vertices[i];
            let b = c.vertices[(i + 1) % n];
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Flow for a fixed time (open curves keep their end points), calling
/// `observe` after every accepted step.
pub fn flow_for<F: FnMut(f64, &DiscreteCurve)>(
    chart: &MetricChart,
    curve: &DiscreteCurve,
    t_end: f64,
    cfl: f64,
    mut observe: F,
) -> Result<DiscreteCurve> {
    let mut c = if curve.closed { curve.clone().ccw() } else { curve.clone() };
    let mut d = discretize(chart, &c)?;
    require_positive(&c, &d)?;
    let l0 = d.length();
    let mut t = 0.0;
    while t < t_end {
        if c.closed && d.length() < 1e-6 * l0 {
            return Err(GeoError::Flow(format!("loop collapsed at t = {t}")));
        }
        let mut dt = stable_dt(&d, cfl).min(t_end - t);
        let hmin = min_chart_spacing(&c);
        let vmax = d.velocity.iter().fold(0.0f64, |m, v| m.max(v[0].hypot(v[1])));
        if vmax * dt > 0.5 * hmin {
            dt = 0.5 * hmin / vmax;
        }
        loop {
            if dt < 1e-18 {
                return Err(GeoError::Flow(format!("time step underflow at t = {t}")));
            }
            if let Ok(nc) = heun(chart, &c, &d, dt) {
                if nc.first_crossing().is_none() {
                    if let Ok(nd) = discretize(chart, &nc) {
                        require_positive(&nc, &nd)?;
                        c = nc;
                        d = nd;
                        break;
                    }
                }
            }
            dt *= 0.5;
        }
        t += dt;
        observe(t, &c);
    }
    Ok(c)
}

/// Run the flow until the loop is classified or the time budget runs out.
pub fn evolve(chart: &MetricChart, curve: &DiscreteCurve, controls: &FlowControls) -> Result<FlowOutcome> {
    if !curve.closed {
        return Err(GeoError::InvalidParams("evolve needs a closed curve".into()));
    }
    if let Some((i, j)) = curve.first_crossing() {
        return Err(GeoError::Flow(format!("initial curve is not simple: segments {i} and {j} cross")));
    }
    let mut c = curve.clone().ccw();
    let n = c.len();
    let mut d = discretize(chart, &c)?;
    require_positive(&c, &d)?;
    let l0 = d.length();
    let q0 = enclosed_curvature(chart, &c)?.value();
    let mut out = FlowOutcome {
        kind: OutcomeKind::Inconclusive,
        final_enclosed: q0,
        final_total_k: d.total_k,
        final_length: l0,
        time: 0.0,
        steps: 0,
        remeshes: 0,
        enclosed_drift: 0.0,
        length_increases: 0,
        rejected_crossings: 0,
        history: Vec::new(),
        frames: Vec::new(),
        curve: c.clone(),
    };
    let mut t = 0.0;
    let mut next_frame = 0.0;
    let mut pattern: (usize, f64) = (0, 0.0);
    loop {
        let max_k = d.max_abs_k();
        let sample_now = out.steps % controls.sample_every == 0;
        if let Some(fdt) = controls.frame_dt {
            if t >= next_frame {
                out.frames.push((t, c.clone()));
                next_frame += fdt;
            }
        }
        if sample_now {
            let q = if q0.is_some() { enclosed_curvature(chart, &c)?.value() } else { None };
            if let (Some(q), Some(q0)) = (q, q0) {
                out.enclosed_drift = out.enclosed_drift.max((q - q0).abs());
            }
            let (clusters, gap) = locus_clusters(chart, &c, controls.delta_b, controls.cluster_gap);
            out.history.push(FlowSample { t, length: d.length(), total_k: d.total_k, enclosed: q, max_k, locus_gap: gap });
            let count = clusters.len();
            if count != pattern.0 {
                pattern = (count, t);
            }
            if count == 1 && t - pattern.1 >= controls.persist {
                out.kind = OutcomeKind::IncompletePointDirection { theta: clusters[0] };
                break;
            }
            if count == 2 && t - pattern.1 >= controls.persist {
                out.kind = OutcomeKind::DoubledArc { theta1: clusters[0], theta2: clusters[1] };
                break;
            }
        }
        if d.length() < controls.shrink_ratio * l0 {
            let m = c.vertices.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0] / n as f64, a[1] + p[1] / n as f64]);
            if chart.locus_distance(m) > controls.delta_b {
                out.kind = OutcomeKind::ShrunkToPoint { point: m };
            }
            break;
        }
        if t >= controls.max_time || out.steps >= controls.max_steps {
            break;
        }
        let mut dt = stable_dt(&d, controls.cfl).min(controls.max_time - t).min(0.05);
        let hmin = min_chart_spacing(&c);
        let vmax = d.velocity.iter().fold(0.0f64, |m, v| m.max(v[0].hypot(v[1])));
        if vmax * dt > 0.5 * hmin {
            dt = 0.5 * hmin / vmax;
        }
        let next = loop {
            if dt < 1e-18 {
                return Err(GeoError::Flow(format!("time step underflow at t = {t}")));
            }
            match heun(chart, &c, &d, dt) {
                Ok(nc) => {
                    if nc.first_crossing().is_some() {
                        out.rejected_crossings += 1;
                        dt *= 0.5;
                        continue;
                    }
                    match discretize(chart, &nc) {
                        Ok(nd) if require_positive(&nc, &nd).is_ok() => break (nc, nd),
                        Ok(_) => return Err(GeoError::Flow(format!("loop reached a region with K <= 0 at t = {t}"))),
                        Err(_) => dt *= 0.5,
                    }
                }
                Err(_) => dt *= 0.5,
            }
        };
        let old_len = d.length();
        (c, d) = next;
        t += dt;
        out.steps += 1;
        let new_len = d.length();
        if new_len > old_len * (1.0 + 1e-12) {
            out.length_increases += 1;
        }
        if max_k <= controls.tol_k && d.max_abs_k() <= controls.tol_k && ((old_len - new_len) / old_len).abs() <= controls.tol_len {
            out.kind = OutcomeKind::ClosedGeodesic;
            break;
        }
        if spacing_ratio(&d, &c, controls.spacing) > controls.remesh_ratio {
            let mut r = remesh(chart, &c, controls.spacing, n);
            if let Some(target) = enclosed_curvature(chart, &c)?.value() {
                r = restore_enclosed(chart, r, target);
            }
            if r.first_crossing().is_none() {
                if let Ok(rd) = discretize(chart, &r) {
                    c = r;
                    d = rd;
                    out.remeshes += 1;
                }
            }
        }
    }
    out.final_enclosed = if q0.is_some() { enclosed_curvature(chart, &c)?.value() } else { None };
    if let (Some(q), Some(q0)) = (out.final_enclosed, q0) {
        out.enclosed_drift = out.enclosed_drift.max((q - q0).abs());
    }
    out.final_total_k = d.total_k;
    out.final_length = d.length();
    out.time = t;
    out.curve = c;
    Ok(out)
}

#[cfg(test)]
mod tests;
