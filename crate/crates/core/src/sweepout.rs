//! Explicit sweepouts and minimax sequences: the round-cap disk family on
//! `dr² + r²(1−r²)dθ²`, the similar-triangle family on the projective-plane
//! quotient, and equal-length shortest paths around the model point.

use crate::curve::segments_cross;
use crate::error::{GeoError, Result};
use crate::geodesic::{integrate, Controls, Event, GeodesicState};
use crate::metric::{Coords, MetricChart};
use crate::quad::{brent, golden_max};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Spacing of the certification grid along sweepout paths.
pub const GRID: f64 = 1e-3;

/// Length of the loop made of the chord `x = r cos θ` and the arc of radius
/// `r` subtending `2θ`, on `dr² + r²(1−r²)dθ²`.
pub fn corner_loop_length(r: f64, theta: f64) -> f64 {
    let s = theta.sin();
    let c = theta.cos();
    2.0 * r * s * (1.0 - r * r * c * c).max(0.0).sqrt() + 2.0 * r * theta * (1.0 - r * r).max(0.0).sqrt()
}

/// Cartesian polyline of the loop `(r, θ)`: the chord from `(r, −θ)` to
/// `(r, θ)` followed by the arc back through angle 0.
pub fn corner_loop(r: f64, theta: f64, n_arc: usize) -> Vec<[f64; 2]> {
    let n = n_arc.max(2);
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let a = theta - 2.0 * theta * i as f64 / n as f64;
        pts.push([r * a.cos(), r * a.sin()]);
    }
    pts
}

/// Length of the loop `(r, θ)` measured on the Cartesian chart from its
/// polyline with `n_arc` arc chords.
pub fn measured_corner_loop_length(chart: &MetricChart, r: f64, theta: f64, n_arc: usize) -> f64 {
    let pts = corner_loop(r, theta, n_arc);
    let n = pts.len();
    (0..n).map(|i| chart.chord_length(pts[i], pts[(i + 1) % n])).sum()
}

/// The Cartesian chart of `dr² + r²(1−r²)dθ²`.
pub fn corner_chart() -> MetricChart {
    MetricChart::revolution(crate::metric::Profile::Clifford, Coords::Cartesian)
}

/// Maximiser of `r ↦ L(r, π/2)` by golden section and from the stationarity
/// condition `π(2r² − 1) = 2√(1 − r²)`.
pub fn corner_half_argmax() -> Result<(f64, f64)> {
    let (golden, _) = golden_max(|r| corner_loop_length(r, FRAC_PI_2), 0.5, 1.0, 1e-12);
    let stationary = brent(|r| 2.0 + PI * (1.0 - 2.0 * r * r) / (1.0 - r * r).sqrt(), 0.5, 0.99, 1e-15)?;
    Ok((golden, stationary))
}

/// A certified disk sweepout through `(c, π/2)`.
#[derive(Clone, Debug, Serialize)]
pub struct DiskSweepout {
    pub c: f64,
    /// Interior endpoint `(r₀, 0)`.
    pub r0: f64,
    /// Exponent of the inner segment `r = c − (c − r₀) cos^k θ`.
    pub k_inner: f64,
    /// Exponent of the outer segment `r = c + (1 − c) s^p`, `s = (θ − π/2)/(π/2)`.
    pub p_outer: f64,
    pub max_length: f64,
    /// `(r, θ)` of the longest leaf.
    pub argmax: [f64; 2],
    /// Grid points at which monotonicity was certified.
    pub grid_points: usize,
    /// Sampled leaves checked pairwise for intersections.
    pub leaves_checked: usize,
    pub disjoint: bool,
}

impl DiskSweepout {
    /// `r(θ)` along the path.
    pub fn radius(&self, theta: f64) -> f64 {
        path_radius(self.c, self.r0, self.k_inner, self.p_outer, theta)
    }

    /// Leaf parameters `(r, θ)` at `n − 1` evenly spaced interior angles.
    pub fn leaf_params(&self, n: usize) -> Vec<[f64; 2]> {
        (1..n).map(|i| PI * i as f64 / n as f64).map(|t| [self.radius(t), t]).collect()
    }

    /// Leaf polylines at `n − 1` evenly spaced interior angles.
    pub fn leaves(&self, n: usize, n_arc: usize) -> Vec<Vec<[f64; 2]>> {
        self.leaf_params(n).into_iter().map(|[r, t]| corner_loop(r, t, n_arc)).collect()
    }
}

fn path_radius(c: f64, r0: f64, k: f64, p: f64, theta: f64) -> f64 {
    if theta <= FRAC_PI_2 {
        c - (c - r0) * theta.cos().max(0.0).powf(k)
    } else {
        c + (1.0 - c) * ((theta - FRAC_PI_2) / FRAC_PI_2).clamp(0.0, 1.0).powf(p)
    }
}

fn grid(a: f64, b: f64) -> Vec<f64> {
    let n = ((b - a) / GRID).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Checks the inner segment: `L` strictly increasing, `r` nondecreasing and
/// the chord abscissa `r cos θ` nonincreasing.
fn inner_certified(c: f64, r0: f64, k: f64, thetas: &[f64]) -> bool {
    let mut prev: Option<(f64, f64, f64)> = None;
    for &t in thetas {
        let r = path_radius(c, r0, k, 1.0, t);
        let l = corner_loop_length(r, t);
        let x = r * t.cos();
        if let Some((lp, rp, xp)) = prev {
            if !(l > lp) || r < rp || x > xp {
                return false;
            }
        }
        prev = Some((l, r, x));
    }
    true
}

fn outer_certified(c: f64, p: f64, thetas: &[f64]) -> bool {
    thetas.windows(2).all(|w| {
        let l0 = corner_loop_length(path_radius(c, 0.0, 1.0, p, w[0]), w[0]);
        let l1 = corner_loop_length(path_radius(c, 0.0, 1.0, p, w[1]), w[1]);
        l1 < l0
    })
}

/// Whether the loops `(r, θ)` of two leaves meet, computed from the exact
/// chord and arc.
pub fn corner_loops_meet(a: [f64; 2], b: [f64; 2]) -> bool {
    let chord_meets_arc = |a: [f64; 2], b: [f64; 2]| {
        let x = a[0] * a[1].cos();
        let h = a[0] * a[1].sin();
        let y2 = b[0] * b[0] - x * x;
        if y2 < 0.0 {
            return false;
        }
        let y = y2.sqrt();
        y <= h && y.atan2(x) <= b[1]
    };
    if a[0] == b[0] {
        return true;
    }
    let chords_meet = a[0] * a[1].cos() == b[0] * b[1].cos();
    chords_meet || chord_meets_arc(a, b) || chord_meets_arc(b, a)
}

fn loops_cross(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    let (na, nb) = (a.len(), b.len());
    (0..na).any(|i| (0..nb).any(|j| segments_cross(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])))
}

fn pairwise_disjoint(leaves: &[Vec<[f64; 2]>]) -> bool {
    (0..leaves.len()).all(|i| (i + 1..leaves.len()).all(|j| !loops_cross(&leaves[i], &leaves[j])))
}

/// Builds a sweepout whose longest leaf is `(c, π/2)`, certified on the grid.
pub fn disk_sweepout(c: f64) -> Result<DiskSweepout> {
    let (r_star, _) = corner_half_argmax()?;
    if !(c > r_star && c < 1.0) {
        return Err(GeoError::InvalidParams(format!("disk sweepout needs {r_star:.4} < c < 1, got {c}")));
    }
    let inner = grid(0.0, FRAC_PI_2);
    let outer = grid(FRAC_PI_2, PI);
    let p_outer = [1.0, 0.5, 1.0 / 3.0, 0.25, 1.0 / 6.0, 0.125, 1.0 / 16.0]
        .into_iter()
        .find(|&p| outer_certified(c, p, &outer))
        .ok_or_else(|| GeoError::NotFound(format!("no certified outer path through ({c}, π/2)")))?;
    let mut found = None;
    'search: for j in 1..100 {
        let r0 = c * j as f64 / 100.0;
        for k in [1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0] {
            if inner_certified(c, r0, k, &inner) {
                found = Some((r0, k));
                break 'search;
            }
        }
    }
    let (r0, k_inner) =
        found.ok_or_else(|| GeoError::NotFound(format!("no certified inner path through ({c}, π/2)")))?;
    let mut s = DiskSweepout {
        c,
        r0,
        k_inner,
        p_outer,
        max_length: corner_loop_length(c, FRAC_PI_2),
        argmax: [c, FRAC_PI_2],
        grid_points: inner.len() + outer.len() - 1,
        leaves_checked: 0,
        disjoint: false,
    };
    let leaves = s.leaf_params(400);
    s.leaves_checked = leaves.len();
    s.disjoint = (0..leaves.len()).all(|i| (i + 1..leaves.len()).all(|j| !corner_loops_meet(leaves[i], leaves[j])));
    Ok(s)
}

/// Disk sweepouts for each `c`, computed concurrently.
pub fn disk_minimax_sequence(cs: &[f64]) -> Result<Vec<DiskSweepout>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = cs.iter().map(|&c| scope.spawn(move || disk_sweepout(c))).collect();
        handles.into_iter().map(|h| h.join().expect("sweepout thread panicked")).collect()
    })
}

/// Length of the segment `x + y = c` inside the triangle.
pub fn hypotenuse_length(c: f64) -> f64 {
    c * (2.0 * c * (1.0 - c)).max(0.0).sqrt()
}

/// Length of the triangle bounded by `x = p`, `y = p` and `x + y = q`.
pub fn triangle_leaf_length(p: f64, q: f64) -> f64 {
    (q - 2.0 * p) * (2.0 * (2.0 * p * (1.0 - p)).max(0.0).sqrt() + (2.0 * q * (1.0 - q)).max(0.0).sqrt())
}

/// Length of the leaf `T_a` bounded by `x = a`, `y = a` and `x + y = 3/4`.
pub fn big_l(a: f64) -> f64 {
    triangle_leaf_length(a, 0.75)
}

/// Derivative of [`big_l`].
pub fn big_l_prime(a: f64) -> f64 {
    let s = (2.0 * a * (1.0 - a)).sqrt();
    -2.0 * (2.0 * s + (0.375f64).sqrt()) + (0.75 - 2.0 * a) * 2.0 * (1.0 - 2.0 * a) / s
}

/// Polyline of the triangle leaf `(p, q)` with `n` points per edge.
pub fn triangle_leaf(p: f64, q: f64, n: usize) -> Vec<[f64; 2]> {
    let v = [[p, p], [q - p, p], [p, q - p]];
    let mut pts = Vec::with_capacity(3 * n);
    for e in 0..3 {
        let (a, b) = (v[e], v[(e + 1) % 3]);
        for i in 0..n {
            let t = i as f64 / n as f64;
            pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    pts
}

/// The limiting leaf: the triangle with edges `x = 0`, `y = 0`, `x + y = 3/4`.
pub fn limit_leaf() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [0.75, 0.0], [0.0, 0.75]]
}

/// Golden-section maximisers of `l` and `L` with their stationary points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FormulaMaxima {
    pub l_golden: f64,
    pub l_stationary: f64,
    pub big_l_golden: f64,
    pub big_l_stationary: f64,
}

pub fn formula_maxima() -> Result<FormulaMaxima> {
    let (l_golden, _) = golden_max(|c| hypotenuse_length(c).powi(2), 0.5, 0.95, 1e-12);
    let (big_l_golden, _) = golden_max(big_l, 1e-3, 0.3, 1e-12);
    let big_l_stationary = brent(big_l_prime, 1e-3, 0.3, 1e-15)?;
    Ok(FormulaMaxima { l_golden, l_stationary: 0.75, big_l_golden, big_l_stationary })
}

/// A certified similar-triangle sweepout for one `a`.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleSweepout {
    pub a: f64,
    /// Exponent of the outer leaves `p = a (4(1 − q))^k`.
    pub k_outer: f64,
    /// `L(a)`.
    pub big_l: f64,
    pub max_length: f64,
    /// `(p, q)` of the longest leaf.
    pub argmax: [f64; 2],
    /// Path `(p, q)` sampled on the grid from the boundary to a point.
    pub path: Vec<[f64; 2]>,
    /// Hypotenuse parameter below which the inner leaves shrink linearly.
    pub balance_end: f64,
    /// Largest residual of the length-balance equation.
    pub balance_residual: f64,
    pub leaves_checked: usize,
    pub disjoint: bool,
    /// Leaf parameters are monotone: `p` nondecreasing, `q` and `q − 2p` decreasing.
    pub nested: bool,
}

/// Length of the vertical `x = x` from `y = a` to `y = 3/4 − x`.
fn vertical(a: f64, x: f64) -> f64 {
    (0.75 - x - a) * (2.0 * x * (1.0 - x)).max(0.0).sqrt()
}

/// Length of the hypotenuse `x + y = c` between `x = a` and `y = a`.
fn hyp(a: f64, c: f64) -> f64 {
    (c - 2.0 * a) * (2.0 * c * (1.0 - c)).max(0.0).sqrt()
}

/// Similar-triangle sweepout: outer leaves `(a (4(1 − q))^k, q)` for
/// `q ∈ [3/4, 1]`, then inner leaves `(x(c), c)` whose two legs grow by
/// exactly the amount the hypotenuse shrinks, then a linear collapse.
pub fn triangle_sweepout(a: f64) -> Result<TriangleSweepout> {
    if !(a > 0.0 && a < 0.125) {
        return Err(GeoError::InvalidParams(format!("triangle sweepout needs 0 < a < 1/8, got {a}")));
    }
    if big_l(a) <= hypotenuse_length(0.75) {
        return Err(GeoError::InvalidParams(format!("L({a}) does not exceed l(3/4)")));
    }
    let outer_q: Vec<f64> = grid(0.75, 1.0).into_iter().rev().collect();
    let outer = |k: f64| -> Vec<[f64; 2]> { outer_q.iter().map(|&q| [a * (4.0 * (1.0 - q)).powf(k), q]).collect() };
    let outer_max = |k: f64| outer(k).iter().map(|pq| triangle_leaf_length(pq[0], pq[1])).fold(0.0, f64::max);
    let ks = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0];
    let k_outer = ks
        .iter()
        .copied()
        .find(|&k| outer_max(k) <= big_l(a))
        .unwrap_or_else(|| ks.iter().copied().min_by(|x, y| outer_max(*x).total_cmp(&outer_max(*y))).unwrap_or(1.0));
    let mut path = outer(k_outer);
    let (x_peak, v_peak) = golden_max(|x| vertical(a, x), a, 0.375, 1e-12);
    let v0 = vertical(a, a);
    let h0 = hyp(a, 0.75);
    let mut residual: f64 = 0.0;
    let (mut c_last, mut x_last) = (0.75, a);
    let mut c = 0.75;
    loop {
        c -= GRID;
        let need = h0 - hyp(a, c);
        if need > 2.0 * (v_peak - v0) || c <= 2.0 * a {
            break;
        }
        let x = brent(|x| 2.0 * (vertical(a, x) - v0) - need, a, x_peak, 1e-15)?;
        if c - 2.0 * x <= GRID {
            break;
        }
        residual = residual.max((2.0 * (vertical(a, x) - v0) - need).abs());
        path.push([x, c]);
        c_last = c;
        x_last = x;
    }
    let c_end = (6.0 * x_last + 2.0 * c_last) / 5.0;
    for c in grid(c_end, c_last).into_iter().rev().skip(1) {
        path.push([x_last + (c_last - c) / 3.0, c]);
    }
    let (imax, max_length) = path
        .iter()
        .map(|pq| triangle_leaf_length(pq[0], pq[1]))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, l)| if l > acc.1 { (i, l) } else { acc });
    let nested = path.windows(2).all(|w| {
        w[1][0] >= w[0][0] && w[1][1] < w[0][1] && w[1][1] - 2.0 * w[1][0] < w[0][1] - 2.0 * w[0][0]
    });
    let step = (path.len() / 40).max(1);
    let leaves: Vec<_> = path
        .iter()
        .step_by(step)
        .filter(|pq| pq[1] < 1.0 && pq[1] - 2.0 * pq[0] > 0.0)
        .map(|pq| triangle_leaf(pq[0], pq[1], 8))
        .collect();
    Ok(TriangleSweepout {
        a,
        k_outer,
        big_l: big_l(a),
        max_length,
        argmax: path[imax],
        balance_end: c_last,
        balance_residual: residual,
        leaves_checked: leaves.len(),
        disjoint: pairwise_disjoint(&leaves),
        nested,
        path,
    })
}

/// Triangle sweepouts for each `a`, computed concurrently.
pub fn triangle_minimax_sequence(a_values: &[f64]) -> Result<Vec<TriangleSweepout>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = a_values.iter().map(|&a| scope.spawn(move || triangle_sweepout(a))).collect();
        handles.into_iter().map(|h| h.join().expect("sweepout thread panicked")).collect()
    })
}

/// `a_i = a₀ 2^{−i}` for `i < n`.
pub fn halving_sequence(a0: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a0 * 0.5f64.powi(i as i32)).collect()
}

/// True when every term is strictly below its predecessor.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// One geodesic chord of the model disk, launched from `(ε, 0)`.
#[derive(Clone, Debug, Serialize)]
pub struct ModelChord {
    /// Angle between the launch direction and the inward radius.
    pub psi: f64,
    pub length: f64,
    /// Exit angle `θ` on the boundary circle.
    pub exit_theta: f64,
    /// Closest approach to the incomplete point.
    pub r_min: f64,
    /// Polar samples `(r, θ)`.
    pub points: Vec<[f64; 2]>,
}

/// Two shortest paths of equal length between a boundary pair.
#[derive(Clone, Debug, Serialize)]
pub struct EqualPaths {
    pub eps: f64,
    /// Polar endpoints.
    pub endpoints: [[f64; 2]; 2],
    pub geodesic: ModelChord,
    /// Radial path through the incomplete point, polar.
    pub radial: Vec<[f64; 2]>,
    pub radial_length: f64,
    /// Closed-form length of the geodesic.
    pub geodesic_exact: f64,
    /// Largest distance between the geodesic and its reflection in the
    /// bisecting diameter.
    pub mirror_defect: f64,
    /// Chords launched closer to the incomplete point, all longer than `2ε`.
    pub near: Vec<ModelChord>,
}

/// Shoots the model-disk geodesic from `(ε, 0)` at angle `ψ`.
pub fn model_chord(chart: &MetricChart, eps: f64, psi: f64) -> Result<ModelChord> {
    let dir = [-psi.cos(), psi.sin() / eps.sqrt()];
    let start = GeodesicState::unit(chart, [eps, 0.0], dir)?;
    let mut controls = Controls::length(10.0 * eps).with_event(Event::coordinate("exit", 0, eps).rising());
    controls.h_max = 0.01 * eps;
    let tr = integrate(chart, start, &controls);
    let hit = tr
        .event("exit")
        .ok_or_else(|| GeoError::Integration(format!("chord at ψ = {psi} did not leave the disk: {:?}", tr.status)))?;
    let r_min = tr.samples.iter().map(|s| s.p[0]).fold(f64::INFINITY, f64::min);
    Ok(ModelChord { psi, length: hit.state.s, exit_theta: hit.state.p[1], r_min, points: tr.points() })
}

/// Closed-form length and exit angle of the model chord with Clairaut
/// constant `c = √ε sin ψ`.
pub fn model_chord_exact(eps: f64, psi: f64) -> (f64, f64) {
    let c = eps.sqrt() * psi.sin();
    let u = (eps.sqrt() / c).acosh();
    (2.0 * ((eps * (eps - c * c)).max(0.0).sqrt() + c * c * u), 4.0 * c * u)
}

fn polyline_distance(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    poly.windows(2)
        .map(|w| {
            let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
            let l2 = d[0] * d[0] + d[1] * d[1];
            let t = if l2 > 0.0 { (((p[0] - w[0][0]) * d[0] + (p[1] - w[0][1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
            let q = [w[0][0] + t * d[0], w[0][1] + t * d[1]];
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Finds the boundary pair joined both by a geodesic of length exactly `2ε`
/// and by the radial path through the incomplete point.
pub fn equal_shortest_paths(eps: f64) -> Result<EqualPaths> {
    if !(eps > 0.0) {
        return Err(GeoError::InvalidParams(format!("disk radius must be positive, got {eps}")));
    }
    let chart = MetricChart::model(1.0, Coords::Polar);
    let target = 2.0 * eps;
    let f = |psi: f64| model_chord(&chart, eps, psi).map(|c| c.length - target);
    let n = 64;
    let mut lo = None;
    let mut prev = (1e-4, f(1e-4)?);
    for i in 1..n {
        let psi = FRAC_PI_2 * i as f64 / n as f64;
        let v = f(psi)?;
        if prev.1 > 0.0 && v <= 0.0 {
            lo = Some((prev.0, psi));
            break;
        }
        prev = (psi, v);
    }
    let (a, b) = lo.ok_or_else(|| GeoError::NotFound(format!("no chord of length 2ε for ε = {eps}")))?;
    let psi = brent(|p| f(p).unwrap_or(f64::NAN), a, b, 1e-14)?;
    let geodesic = model_chord(&chart, eps, psi)?;
    let th = geodesic.exit_theta;
    let radial = vec![[eps, 0.0], [0.0, 0.0], [0.0, th], [eps, th]];
    let radial_length = radial.windows(2).map(|w| chart.chord_length(w[0], w[1])).sum();
    let mirror_defect = geodesic
        .points
        .iter()
        .map(|p| polyline_distance([p[0], th - p[1]], &geodesic.points))
        .fold(0.0, f64::max);
    let near = (1..=8)
        .map(|k| model_chord(&chart, eps, psi * k as f64 / 9.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(EqualPaths {
        eps,
        endpoints: [[eps, 0.0], [eps, th]],
        geodesic_exact: model_chord_exact(eps, psi).0,
        geodesic,
        radial,
        radial_length,
        mirror_defect,
        near,
    })
}

#[cfg(test)]
mod tests;
