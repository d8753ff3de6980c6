//! The ∫K=2π disk family, the shortest arc from the incomplete locus back
//! to itself, and the long-arc comparison between them.

use super::enclosed_curvature;
use crate::curve::DiscreteCurve;
use crate::error::{GeoError, Result};
use crate::geodesic::{integrate, Controls, Event, GeodesicState, Status};
use crate::metric::{Affine, ChartKind, Domain, LocusPiece, MetricChart};
use crate::polygon::symmetry_group;
use crate::quad;
use serde::Serialize;
use std::f64::consts::PI;

/// Vertices used for a disk loop.
pub const DISK_VERTICES: usize = 256;
const TWO_PI: f64 = 2.0 * PI;

fn circle(center: [f64; 2], radius: f64, n: usize) -> DiscreteCurve {
    DiscreteCurve::from_fn(n, |s| {
        let a = TWO_PI * s;
        [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
    })
}

fn enclosed(chart: &MetricChart, c: &DiscreteCurve) -> f64 {
    match enclosed_curvature(chart, c) {
        Ok(i) => i.value().unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Chart disk around `center` (as an `n`-gon) whose enclosed curvature is
/// `2π`.
pub fn disk_with_2pi_n(chart: &MetricChart, center: [f64; 2], n: usize) -> Result<DiscreteCurve> {
    disk_with_enclosed(chart, center, TWO_PI, n)
}

/// Chart disk around `center` (as an `n`-gon) enclosing `∫K = target`.
pub fn disk_with_enclosed(chart: &MetricChart, center: [f64; 2], target: f64, n: usize) -> Result<DiscreteCurve> {
    if !chart.in_domain(center) {
        return Err(GeoError::OutsideDomain(center));
    }
    let rho_max = chart.locus_distance(center).min(chart.boundary_distance(center));
    if !(rho_max > 0.0) {
        return Err(GeoError::OutsideDomain(center));
    }
    let hi_cap = if rho_max.is_finite() { rho_max } else { 1e3 };
    let f = |rho: f64| enclosed(chart, &circle(center, rho, n)) - target;
    let lo = 1e-6 * hi_cap;
    if f(lo) >= 0.0 {
        return Err(GeoError::NoBracket(format!("the smallest disk around {center:?} already encloses {target}")));
    }
    // approach the boundary geometrically until the enclosed curvature passes 2π
    let mut hi = 0.5 * hi_cap;
    let mut prev = lo;
    let mut k = 0;
    while f(hi) < 0.0 {
        prev = hi;
        hi = hi_cap - 0.5 * (hi_cap - hi);
        k += 1;
        if k > 60 {
            return Err(GeoError::NoBracket(format!("no disk around {center:?} reaches ∫K = {target} inside the domain")));
        }
    }
    let rho = quad::brent(f, prev, hi, 1e-14 * hi_cap)?;
    Ok(circle(center, rho, n))
}

/// Chart disk around `center` whose enclosed curvature is `2π`.
pub fn disk_with_2pi(chart: &MetricChart, center: [f64; 2]) -> Result<DiscreteCurve> {
    disk_with_2pi_n(chart, center, DISK_VERTICES)
}

/// Lengths of the ∫K=2π loops over a set of centers.
#[derive(Clone, Debug, Serialize)]
pub struct DiskFamily {
    pub centers: Vec<[f64; 2]>,
    pub lengths: Vec<f64>,
    pub max_length: f64,
    pub argmax: [f64; 2],
}

fn parallel_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    let chunk = items.len().div_ceil(threads.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn collect_family(centers: Vec<[f64; 2]>, lengths: Vec<Result<f64>>) -> Result<DiskFamily> {
    let mut cs = Vec::new();
    let mut ls = Vec::new();
    for (c, l) in centers.into_iter().zip(lengths) {
        if let Ok(l) = l {
            cs.push(c);
            ls.push(l);
        }
    }
    if ls.is_empty() {
        return Err(GeoError::NotFound("no center admits a ∫K = 2π loop".into()));
    }
    let (i, m) = ls.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &l)| if l > a.1 { (i, l) } else { a });
    Ok(DiskFamily { argmax: cs[i], centers: cs, lengths: ls, max_length: m })
}

/// Sample centers covering the chart up to its symmetries.
pub fn family_centers(chart: &MetricChart, n: usize) -> Vec<[f64; 2]> {
    match (&chart.kind, &chart.domain) {
        (_, Domain::Disk { radius }) => {
            let r = if radius.is_finite() { *radius } else { 2.0 };
            (0..n).map(|i| [r * 0.97 * i as f64 / (n - 1).max(1) as f64, 0.0]).collect()
        }
        (ChartKind::Neck { r, .. }, _) => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in 1..=n {
                    out.push([r * i as f64 / (n - 1).max(1) as f64, 0.5 * PI * j as f64 / n as f64]);
                }
            }
            out
        }
        (_, Domain::Rect { u, v }) => {
            let span = |a: f64, b: f64| (if a.is_finite() { a } else { b - 4.0 }, if b.is_finite() { b } else { a + 4.0 });
            let (u0, u1) = span(u.0, u.1);
            let (v0, v1) = span(v.0, v.1);
            let mut out = Vec::new();
            for i in 1..n {
                for j in 1..n {
                    out.push([u0 + (u1 - u0) * i as f64 / n as f64, v0 + (v1 - v0) * j as f64 / n as f64]);
                }
            }
            out
        }
        (_, Domain::Polygon(vs)) => polygon_grid(vs, chart.center(), n),
    }
}

fn polygon_grid(vs: &[[f64; 2]], c0: [f64; 2], n: usize) -> Vec<[f64; 2]> {
    let mut out = vec![c0];
    for e in 0..vs.len() {
        let a = vs[e];
        let b = vs[(e + 1) % vs.len()];
        for i in 0..n {
            for j in 0..(n - i) {
                if i == 0 && j == 0 {
                    continue;
                }
                let (la, lb) = (i as f64 / n as f64, j as f64 / n as f64);
                if la + lb >= 1.0 - 1e-12 || j == 0 {
                    continue;
                }
                let l0 = 1.0 - la - lb;
                out.push([l0 * c0[0] + la * a[0] + lb * b[0], l0 * c0[1] + la * a[1] + lb * b[1]]);
            }
        }
    }
    out
}

/// Maximum length of the chart-disk ∫K=2π loops over [`family_centers`].
pub fn disk_family_max(chart: &MetricChart, n: usize) -> Result<DiskFamily> {
    let centers = family_centers(chart, n);
    let lengths = parallel_map(&centers, |c| disk_with_2pi(chart, *c).map(|l| l.length(chart)));
    collect_family(centers, lengths)
}

fn similar_polygon(vs: &[[f64; 2]], c0: [f64; 2], center: [f64; 2], s: f64, per_edge: usize) -> DiscreteCurve {
    let m = vs.len();
    let mut out = Vec::with_capacity(m * per_edge);
    for e in 0..m {
        let a = vs[e];
        let b = vs[(e + 1) % m];
        for j in 0..per_edge {
            let t = j as f64 / per_edge as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            out.push([center[0] + s * (p[0] - c0[0]), center[1] + s * (p[1] - c0[1])]);
        }
    }
    DiscreteCurve::new(out, true)
}

/// Largest scale of the similar copy around `center` that fits the domain.
fn max_scale(vs: &[[f64; 2]], c0: [f64; 2], center: [f64; 2]) -> f64 {
    let m = vs.len();
    let mut s = f64::INFINITY;
    for e in 0..m {
        let a = vs[e];
        let b = vs[(e + 1) % m];
        let d = [b[0] - a[0], b[1] - a[1]];
        let l = d[0].hypot(d[1]);
        let dist = |p: [f64; 2]| (d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])) / l;
        // the copy's vertex farthest toward this edge is the scaled image of a vertex
        let reach = vs.iter().map(|v| dist(c0) - dist(*v)).fold(0.0f64, f64::max);
        if reach > 0.0 {
            s = s.min(dist(center) / reach);
        }
    }
    s
}

/// Length of the similar copy of the domain polygon around `center`
/// scaled so that it encloses `∫K = 2π`.
pub fn similar_polygon_loop(chart: &MetricChart, center: [f64; 2], tol: f64) -> Result<(f64, DiscreteCurve)> {
    let Domain::Polygon(vs) = &chart.domain else {
        return Err(GeoError::InvalidParams("similar polygons need a polygonal chart".into()));
    };
    let c0 = chart.center();
    let per_edge = 48;
    let smax = max_scale(vs, c0, center);
    if !(smax > 0.0) {
        return Err(GeoError::OutsideDomain(center));
    }
    let f = |s: f64| enclosed(chart, &similar_polygon(vs, c0, center, s, per_edge)) - TWO_PI;
    let mut hi = 0.5 * smax;
    let mut lo = 1e-6 * smax;
    let mut k = 0;
    while f(hi) < 0.0 {
        lo = hi;
        hi = smax - 0.5 * (smax - hi);
        k += 1;
        if k > 60 {
            return Err(GeoError::NoBracket(format!("no similar copy around {center:?} reaches ∫K = 2π")));
        }
    }
    let s = quad::brent(f, lo, hi, tol.min(1e-10) * smax)?;
    let c = similar_polygon(vs, c0, center, s, per_edge);
    Ok((c.length(chart), c))
}

/// Maximum length over the ∫K=2π family of similar copies of the domain
/// polygon, sampled on a grid of `n` steps and refined by pattern search.
pub fn similar_polygon_family_max(chart: &MetricChart, n: usize, tol: f64) -> Result<f64> {
    let Domain::Polygon(vs) = &chart.domain else {
        return Err(GeoError::InvalidParams("similar polygons need a polygonal chart".into()));
    };
    let centers = polygon_grid(vs, chart.center(), n.max(2));
    let lengths = parallel_map(&centers, |c| similar_polygon_loop(chart, *c, tol).map(|x| x.0));
    let fam = collect_family(centers, lengths)?;
    let mut best = (fam.argmax, fam.max_length);
    let mut step = 0.5 / n as f64 * (vs[0][0] - chart.center()[0]).hypot(vs[0][1] - chart.center()[1]);
    while step > 1e-4 {
        let mut improved = false;
        for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.7, 0.7], [-0.7, -0.7], [0.7, -0.7], [-0.7, 0.7]] {
            let c = [best.0[0] + step * d[0], best.0[1] + step * d[1]];
            if chart.boundary_distance(c) <= 0.0 {
                continue;
            }
            if let Ok((l, _)) = similar_polygon_loop(chart, c, tol) {
                if l > best.1 {
                    best = (c, l);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best.1)
}

/// A geodesic arc leaving the incomplete locus and returning to it.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryArc {
    pub length: f64,
    /// Locus points at the two ends.
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Chart points along the arc.
    pub points: Vec<[f64; 2]>,
}

struct Mirror {
    point: [f64; 2],
    dir: [f64; 2],
}

fn mirror_of(g: &Affine, reference: [f64; 2]) -> Option<Mirror> {
    if g.det() > 0.0 {
        return None;
    }
    let q = g.apply(reference);
    let point = [0.5 * (reference[0] + q[0]), 0.5 * (reference[1] + q[1])];
    let c0 = [g.a[0][0] + 1.0, g.a[1][0]];
    let c1 = [g.a[0][1], g.a[1][1] + 1.0];
    let dir = if c0[0].hypot(c0[1]) >= c1[0].hypot(c1[1]) { c0 } else { c1 };
    let l = dir[0].hypot(dir[1]);
    (l > 1e-9).then(|| Mirror { point, dir: [dir[0] / l, dir[1] / l] })
}

fn mirrors(chart: &MetricChart) -> Vec<Mirror> {
    let mut out: Vec<Mirror> = Vec::new();
    for g in symmetry_group(chart) {
        if let Some(m) = mirror_of(&g, chart.center()) {
            let dup = out.iter().any(|o| {
                let par = (o.dir[0] * m.dir[1] - o.dir[1] * m.dir[0]).abs() < 1e-9;
                let on = ((m.point[0] - o.point[0]) * o.dir[1] - (m.point[1] - o.point[1]) * o.dir[0]).abs() < 1e-9;
                par && on
            });
            if !dup {
                out.push(m);
            }
        }
        if out.len() >= 4 {
            break;
        }
    }
    out
}

/// Launch points on the locus with their inward chart normals.
fn locus_launch(chart: &MetricChart, piece: &LocusPiece, u: f64, delta: f64) -> Option<([f64; 2], [f64; 2])> {
    let (q, n) = match piece {
        LocusPiece::Segment(a, b) => {
            let q = [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])];
            let d = [b[0] - a[0], b[1] - a[1]];
            let l = d[0].hypot(d[1]);
            let mut n = [-d[1] / l, d[0] / l];
            let probe = [q[0] + 1e-6 * n[0], q[1] + 1e-6 * n[1]];
            if !chart.in_domain(probe) {
                n = [-n[0], -n[1]];
            }
            (q, n)
        }
        LocusPiece::Circle(c, r) => {
            if *r == 0.0 {
                return None;
            }
            let a = TWO_PI * u;
            let q = [c[0] + r * a.cos(), c[1] + r * a.sin()];
            (q, [-a.cos(), -a.sin()])
        }
    };
    // widen the band where the metric degenerates faster than linearly
    let mut delta = delta;
    loop {
        let p = [q[0] + delta * n[0], q[1] + delta * n[1]];
        let ok = chart.in_domain(p) && chart.locus_distance(p) > 0.5 * delta;
        if !ok {
            return None;
        }
        match chart.local(p) {
            Ok(l) if l.det >= 1e-12 => return Some((p, n)),
            _ if delta < 1e-2 => delta *= 10.0,
            _ => return None,
        }
    }
}

/// Parameter range of a locus piece that lies on the domain.
fn piece_range(chart: &MetricChart, piece: &LocusPiece) -> (f64, f64) {
    match piece {
        LocusPiece::Circle(..) => (0.0, 1.0),
        LocusPiece::Segment(a, b) => {
            let inside = |u: f64| {
                let q = [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])];
                q[0].abs() <= 50.0 && q[1].abs() <= 50.0 && chart.boundary_distance(q) > -1e-12
            };
            let grid: Vec<f64> = (0..=4000).map(|i| i as f64 / 4000.0).filter(|u| inside(*u)).collect();
            match (grid.first(), grid.last()) {
                (Some(lo), Some(hi)) => (*lo, *hi),
                _ => (0.0, 0.0),
            }
        }
    }
}

struct Shot {
    /// Cosine of the metric angle with the mirror at the first crossing.
    cos: f64,
    half: f64,
    state: GeodesicState,
    launch: [f64; 2],
}

fn shoot_to_mirror(chart: &MetricChart, p: [f64; 2], n: [f64; 2], m: &Mirror, delta: f64, budget: f64) -> Option<Shot> {
    let loc = chart.local(p).ok()?;
    let st = GeodesicState::unit(chart, p, loc.raise(n)).ok()?;
    let normal = [-m.dir[1], m.dir[0]];
    let g0 = (p[0] - m.point[0]) * normal[0] + (p[1] - m.point[1]) * normal[1];
    if g0.abs() < 1e-9 {
        return None;
    }
    let controls = Controls {
        events: vec![Event::line("mirror", m.point, normal), Event::locus_band(chart, 0.5 * chart.locus_distance(p).min(delta))],
        record: false,
        ..Controls::length(budget)
    };
    let tr = integrate(chart, st, &controls);
    let hit = match &tr.status {
        Status::Event(id) if id == "mirror" => tr.event("mirror")?.state.clone(),
        _ => return None,
    };
    let l = chart.local(hit.p).ok()?;
    let cos = l.inner(hit.v, m.dir) / (l.norm(hit.v) * l.norm(m.dir));
    let q = chart.locus_nearest(p)?;
    Some(Shot { cos, half: hit.s + chart.chord_length(q, p), state: hit, launch: q })
}

/// Shortest geodesic arc from the incomplete locus back to itself among
/// arcs symmetric under a reflection of the chart.
pub fn shortest_boundary_arc(chart: &MetricChart) -> Result<BoundaryArc> {
    let delta = 1e-7;
    let budget = 20.0;
    let ms = mirrors(chart);
    if ms.is_empty() || chart.locus.is_empty() {
        return Err(GeoError::NotFound("shortest boundary arc needs a reflection symmetry and an incomplete locus".into()));
    }
    let mut best: Option<(f64, Shot, usize)> = None;
    for (mi, m) in ms.iter().enumerate() {
        for piece in &chart.locus {
            let (u0, u1) = piece_range(chart, piece);
            if u1 <= u0 {
                continue;
            }
            let grid = 96;
            let us: Vec<f64> = (0..=grid).map(|i| u0 + (u1 - u0) * (i as f64 + 0.5) / (grid as f64 + 1.0)).collect();
            let vals = parallel_map(&us, |u| {
                locus_launch(chart, piece, *u, delta).and_then(|(p, n)| shoot_to_mirror(chart, p, n, m, delta, budget))
            });
            let mut consider = |u: f64| {
                if let Some((p, n)) = locus_launch(chart, piece, u, delta) {
                    if let Some(s) = shoot_to_mirror(chart, p, n, m, delta, budget) {
                        if s.cos.abs() < 1e-7 && best.as_ref().map_or(true, |b| 2.0 * s.half < b.0) {
                            best = Some((2.0 * s.half, s, mi));
                        }
                    }
                }
            };
            for i in 0..us.len() {
                if let Some(s) = &vals[i] {
                    if s.cos.abs() < 1e-10 {
                        consider(us[i]);
                        continue;
                    }
                }
                if i + 1 < us.len() {
                    if let (Some(a), Some(b)) = (&vals[i], &vals[i + 1]) {
                        if a.cos * b.cos < 0.0 && (a.half - b.half).abs() < 0.5 {
                            let f = |u: f64| {
                                locus_launch(chart, piece, u, delta)
                                    .and_then(|(p, n)| shoot_to_mirror(chart, p, n, m, delta, budget))
                                    .map_or(f64::NAN, |s| s.cos)
                            };
                            if let Ok(u) = quad::brent(f, us[i], us[i + 1], 1e-13) {
                                consider(u);
                            }
                        }
                    }
                }
            }
        }
    }
    let (length, shot, mi) = best.ok_or_else(|| GeoError::NotFound("no symmetric returning arc found".into()))?;
    let refl = symmetry_group(chart)
        .into_iter()
        .find(|g| mirror_of(g, chart.center()).is_some_and(|m| (m.point[0] - ms[mi].point[0]).abs() + (m.point[1] - ms[mi].point[1]).abs() < 1e-12 && (m.dir[0] - ms[mi].dir[0]).abs() + (m.dir[1] - ms[mi].dir[1]).abs() < 1e-12))
        .expect("mirror comes from the group");
    let back = integrate(chart, shot.state.reversed(), &Controls { record: true, ..Controls::length(shot.state.s) });
    let mut points: Vec<[f64; 2]> = back.points();
    points.reverse();
    let mirrored: Vec<[f64; 2]> = points.iter().rev().map(|p| refl.apply(*p)).collect();
    points.extend(mirrored);
    Ok(BoundaryArc { length, start: shot.launch, end: refl.apply(shot.launch), points })
}

/// Twice the shortest boundary arc against the ∫K=2π family maximum.
#[derive(Clone, Debug, Serialize)]
pub struct LongArcReport {
    pub shortest_arc: f64,
    pub family_max: f64,
    pub long: bool,
}

/// Whether twice the shortest boundary arc exceeds every loop of the
/// ∫K=2π family (similar copies on polygonal charts, chart disks otherwise).
pub fn long_arc_test(chart: &MetricChart) -> Result<LongArcReport> {
    let arc = shortest_boundary_arc(chart)?;
    let family_max = match chart.domain {
        Domain::Polygon(_) => similar_polygon_family_max(chart, 9, 1e-8)?,
        _ => disk_family_max(chart, 12)?.max_length,
    };
    Ok(LongArcReport { shortest_arc: arc.length, family_max, long: 2.0 * arc.length > family_max })
}
