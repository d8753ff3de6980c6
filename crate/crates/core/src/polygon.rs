//! Shooting for symmetric closed geodesics on the square, triangle and
//! hexagon metrics: launch orthogonally from one mirror, bisect on the angle
//! at the next, and close up by reflection.

use crate::curve::DiscreteCurve;
use crate::error::{GeoError, Result};
use crate::geodesic::{geodesic_rhs, integrate, Controls, Event, GeodesicState, Trajectory};
use crate::metric::{Affine, MetricChart};
use crate::quad;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolygonKind {
    Square,
    Triangle,
    Hexagon,
}

impl PolygonKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(PolygonKind::Square),
            "triangle" => Ok(PolygonKind::Triangle),
            "hexagon" => Ok(PolygonKind::Hexagon),
            other => Err(GeoError::UnknownChart(format!("polygon `{other}`"))),
        }
    }

    pub fn chart(self) -> MetricChart {
        match self {
            PolygonKind::Square => MetricChart::product_square(),
            PolygonKind::Triangle => MetricChart::product_triangle(),
            PolygonKind::Hexagon => MetricChart::product_hexagon(),
        }
    }

    /// Number of sides of the symmetric loop's fundamental sector count.
    pub fn order(self) -> usize {
        match self {
            PolygonKind::Square => 4,
            PolygonKind::Triangle => 3,
            PolygonKind::Hexagon => 6,
        }
    }
}

/// Two adjacent mirror rays from the centre: `d1` towards an edge midpoint
/// (launch mirror) and `d2` towards a vertex (target mirror).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Mirrors {
    pub center: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

impl Mirrors {
    pub fn of(kind: PolygonKind) -> Self {
        match kind {
            PolygonKind::Square => Mirrors { center: [0.0, 0.0], d1: [0.0, 1.0], d2: [1.0, 1.0] },
            PolygonKind::Triangle => Mirrors { center: [0.0, 0.0], d1: [0.5, 0.5], d2: [-1.0, 2.0] },
            PolygonKind::Hexagon => Mirrors { center: [0.0, 0.0], d1: [0.5, 0.5], d2: [0.0, 1.0] },
        }
    }

    pub fn launch_point(&self, t: f64) -> [f64; 2] {
        [self.center[0] + t * self.d1[0], self.center[1] + t * self.d1[1]]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShootResult {
    /// Launch parameter along the first mirror (the ordinate for the square).
    pub y0: f64,
    pub hit_point: [f64; 2],
    pub angle: f64,
    pub arc: Trajectory,
}

/// Orthogonal launch state from the first mirror at parameter `t ∈ (0, 1)`.
pub fn launch_state(chart: &MetricChart, m: &Mirrors, t: f64) -> Result<GeodesicState> {
    let p = m.launch_point(t);
    let ell = [-m.d1[1], m.d1[0]];
    let loc = chart.local(p)?;
    let mut n = loc.raise(ell);
    if ell[0] * m.d2[0] + ell[1] * m.d2[1] < 0.0 {
        n = [-n[0], -n[1]];
    }
    GeodesicState::unit(chart, p, n)
}

pub fn shoot(chart: &MetricChart, m: &Mirrors, t: f64) -> Result<ShootResult> {
    let st = launch_state(chart, m, t)?;
    let normal = [-m.d2[1], m.d2[0]];
    let controls = Controls { h_max: 0.01, ..Controls::length(20.0) }
        .with_event(Event::line("mirror", m.center, normal))
        .with_event(Event::locus_band(chart, 1e-9));
    let arc = integrate(chart, st, &controls);
    let hit = arc
        .event("mirror")
        .ok_or_else(|| GeoError::Integration(format!("launch {t}: no mirror crossing ({:?})", arc.status)))?;
    let p = hit.state.p;
    let v = hit.state.v;
    let along = (p[0] - m.center[0]) * m.d2[0] + (p[1] - m.center[1]) * m.d2[1];
    if along <= 0.0 {
        return Err(GeoError::Integration(format!("launch {t}: crossed the opposite mirror ray")));
    }
    let loc = chart.local(p)?;
    let cosang = loc.inner(v, m.d2) / (loc.norm(v) * loc.norm(m.d2));
    Ok(ShootResult { y0: t, hit_point: p, angle: cosang.clamp(-1.0, 1.0).acos(), arc })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalArc {
    pub y0: f64,
    pub angle: f64,
    pub arc: Trajectory,
    /// Scanned `(t, angle)` profile used to bracket.
    pub scan: Vec<(f64, f64)>,
}

/// Scan 64 launch points and bisect the angle to `π/2`.
pub fn find_orthogonal(chart: &MetricChart, m: &Mirrors) -> Result<OrthogonalArc> {
    let n = 64;
    let mut scan = Vec::new();
    for k in 1..=n {
        let t = k as f64 / (n + 1) as f64;
        if let Ok(r) = shoot(chart, m, t) {
            scan.push((t, r.angle));
        }
    }
    let bracket = scan.windows(2).find(|w| (w[0].1 - FRAC_PI_2) * (w[1].1 - FRAC_PI_2) <= 0.0);
    let Some(w) = bracket else {
        return Err(GeoError::NoBracket(format!("angle never crosses π/2: {scan:?}")));
    };
    let f = |t: f64| shoot(chart, m, t).map(|r| r.angle - FRAC_PI_2).unwrap_or(f64::NAN);
    let t = quad::brent(f, w[0].0, w[1].0, 1e-15)?;
    let r = shoot(chart, m, t)?;
    if (r.angle - FRAC_PI_2).abs() > 1e-8 {
        return Err(GeoError::Integration(format!("angle defect {:e} after bisection", r.angle - FRAC_PI_2)));
    }
    Ok(OrthogonalArc { y0: t, angle: r.angle, arc: r.arc, scan })
}

/// Finite group generated by the chart's declared symmetries.
pub fn symmetry_group(chart: &MetricChart) -> Vec<Affine> {
    let id = Affine::linear([[1.0, 0.0], [0.0, 1.0]]);
    let same = |a: &Affine, b: &Affine| {
        (0..2).all(|i| (0..2).all(|j| (a.a[i][j] - b.a[i][j]).abs() < 1e-9)) && (0..2).all(|i| (a.b[i] - b.b[i]).abs() < 1e-9)
    };
    let mut group = vec![id];
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for s in &chart.symmetry {
            let h = s.compose(&g);
            if !group.iter().any(|x| same(x, &h)) {
                if group.len() > 96 {
                    return group;
                }
                group.push(h);
                frontier.push(h);
            }
        }
    }
    group
}

/// The isometric reflection fixing the line through `c` with direction `d`.
pub fn mirror_map(chart: &MetricChart, c: [f64; 2], d: [f64; 2]) -> Result<Affine> {
    symmetry_group(chart)
        .into_iter()
        .find(|g| {
            let fc = g.apply(c);
            let fd = g.apply_vec(d);
            g.det() < 0.0 && (fc[0] - c[0]).abs() < 1e-9 && (fc[1] - c[1]).abs() < 1e-9 && (fd[0] - d[0]).abs() < 1e-9 && (fd[1] - d[1]).abs() < 1e-9
        })
        .ok_or_else(|| GeoError::NotFound(format!("no reflection fixes the line through {c:?} along {d:?}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedLoop {
    pub curve: DiscreteCurve,
    pub length: f64,
    pub embedded: bool,
    pub pieces: usize,
    pub max_join_gap: f64,
}

/// Assemble the closed loop from reflected copies of an arc running from the
/// first mirror to the second.
pub fn close_by_reflection(chart: &MetricChart, m: &Mirrors, arc: &Trajectory) -> Result<ClosedLoop> {
    let pts = arc.points();
    if pts.len() < 2 {
        return Err(GeoError::Degenerate("arc has fewer than two points".into()));
    }
    let start = pts[0];
    let end = *pts.last().expect("non-empty");
    let on_line = |p: [f64; 2], d: [f64; 2]| {
        let q = [p[0] - m.center[0], p[1] - m.center[1]];
        (q[0] * d[1] - q[1] * d[0]).abs() / (d[0].hypot(d[1]))
    };
    if pts.iter().all(|p| on_line(*p, m.d1) < 1e-9) || pts.iter().all(|p| on_line(*p, m.d2) < 1e-9) {
        return Err(GeoError::Degenerate("arc lies on a mirror; the loop would be a doubled segment".into()));
    }
    let ra = mirror_map(chart, m.center, m.d1)?;
    let rb = mirror_map(chart, m.center, m.d2)?;
    let sector = {
        let loc = chart.local(m.center)?;
        (loc.inner(m.d1, m.d2) / (loc.norm(m.d1) * loc.norm(m.d2))).acos()
    };
    let pieces = (std::f64::consts::PI / sector).round() as usize * 2;
    let mut t = Affine::linear([[1.0, 0.0], [0.0, 1.0]]);
    let mut forward = true;
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut gap: f64 = 0.0;
    for k in 0..pieces {
        let mut piece: Vec<[f64; 2]> = pts.iter().map(|p| t.apply(*p)).collect();
        if !forward {
            piece.reverse();
        }
        if let Some(last) = vertices.last() {
            gap = gap.max((last[0] - piece[0][0]).hypot(last[1] - piece[0][1]));
            vertices.extend_from_slice(&piece[1..]);
        } else {
            vertices.extend_from_slice(&piece);
        }
        let _ = k;
        t = if forward { t.compose(&rb) } else { t.compose(&ra) };
        forward = !forward;
    }
    let last = vertices.pop().expect("non-empty");
    gap = gap.max((last[0] - start[0]).hypot(last[1] - start[1]));
    if gap > 1e-6 {
        return Err(GeoError::Degenerate(format!("reflected copies fail to join: gap {gap:e}")));
    }
    let _ = end;
    let curve = DiscreteCurve::new(vertices, true);
    let embedded = curve.is_simple();
    Ok(ClosedLoop { length: arc.length() * pieces as f64, embedded, pieces, curve, max_join_gap: gap })
}

/// Phase-space distance after re-integrating the loop for one full period.
pub fn reintegration_defect(chart: &MetricChart, m: &Mirrors, y0: f64, length: f64) -> Result<f64> {
    let st = launch_state(chart, m, y0)?;
    let tr = integrate(chart, st, &Controls { h_max: 0.01, ..Controls::length(length) }.sparse());
    let e = tr.last();
    Ok((e.p[0] - st.p[0]).hypot(e.p[1] - st.p[1]) + (e.v[0] - st.v[0]).hypot(e.v[1] - st.v[1]))
}

/// Largest distance from a vertex of `g(loop)` to the loop polyline over the
/// symmetry group.
pub fn symmetry_defect(chart: &MetricChart, curve: &DiscreteCurve) -> f64 {
    let n = curve.len();
    let dist = |p: [f64; 2]| -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = curve.vertices[i];
            let b = curve.vertices[(i + 1) % n];
            let d = [b[0] - a[0], b[1] - a[1]];
            let l2 = d[0] * d[0] + d[1] * d[1];
            let t = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
            best = best.min((p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1]));
        }
        best
    };
    symmetry_group(chart)
        .iter()
        .flat_map(|g| curve.vertices.iter().step_by(7).map(move |p| g.apply(*p)))
        .map(dist)
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    /// `(x, y, dy/dx, d²y/dx²)` along the arc.
    pub samples: Vec<[f64; 4]>,
    /// `d²y/dx² < 0` wherever `x, y > 0` and `dy/dx ≤ 0`.
    pub concave_while_descending: bool,
    /// Slope starts at zero and decreases.
    pub initial_slope_decreasing: bool,
}

fn second_derivative(chart: &MetricChart, st: &GeodesicState) -> Result<(f64, f64)> {
    let a = geodesic_rhs(chart, st)?;
    let (xd, yd) = (st.v[0], st.v[1]);
    Ok((yd / xd, (xd * a[1] - yd * a[0]) / (xd * xd * xd)))
}

pub fn convexity_probe(chart: &MetricChart, arc: &Trajectory) -> Result<ConvexityReport> {
    let mut samples = Vec::new();
    for st in &arc.samples {
        if st.v[0].abs() < 1e-12 {
            continue;
        }
        let (dy, d2y) = second_derivative(chart, st)?;
        samples.push([st.p[0], st.p[1], dy, d2y]);
    }
    let concave = samples.iter().filter(|s| s[0] > 0.0 && s[1] > 0.0 && s[2] <= 0.0).all(|s| s[3] < 0.0);
    let initial = samples.len() > 2 && samples[0][2].abs() < 1e-12 && samples[1][2] < 0.0 && samples[2][2] < samples[1][2];
    Ok(ConvexityReport { samples, concave_while_descending: concave, initial_slope_decreasing: initial })
}

/// `d²y/dx²` of the geodesic through `p` with slope `c`.
pub fn tangent_second_derivative(chart: &MetricChart, p: [f64; 2], c: f64) -> Result<f64> {
    let st = GeodesicState::unit(chart, p, [1.0, c])?;
    Ok(second_derivative(chart, &st)?.1)
}

#[derive(Clone, Debug, Serialize)]
pub struct PolygonGeodesic {
    pub polygon: PolygonKind,
    pub y0: f64,
    pub angle: f64,
    pub length: f64,
    pub symmetry_order: usize,
    pub embedded: bool,
    pub reintegration_defect: f64,
    pub symmetry_defect: f64,
    #[serde(skip)]
    pub curve: DiscreteCurve,
}

/// Full pipeline: bracket, bisect, reflect and verify.
pub fn polygon_geodesic(kind: PolygonKind) -> Result<PolygonGeodesic> {
    let chart = kind.chart();
    let m = Mirrors::of(kind);
    let arc = find_orthogonal(&chart, &m)?;
    let lp = close_by_reflection(&chart, &m, &arc.arc)?;
    let re = reintegration_defect(&chart, &m, arc.y0, lp.length)?;
    let sym = symmetry_defect(&chart, &lp.curve);
    Ok(PolygonGeodesic {
        polygon: kind,
        y0: arc.y0,
        angle: arc.angle,
        length: lp.length,
        symmetry_order: lp.pieces,
        embedded: lp.embedded,
        reintegration_defect: re,
        symmetry_defect: sym,
        curve: lp.curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn small_loops_meet_mirror_at_sector_complement() {
        for (kind, expect) in [
            (PolygonKind::Square, FRAC_PI_4),
            (PolygonKind::Triangle, FRAC_PI_6),
            (PolygonKind::Hexagon, FRAC_PI_3),
        ] {
            let c = kind.chart();
            let r = shoot(&c, &Mirrors::of(kind), 1e-3).unwrap();
            assert!((r.angle - expect).abs() < 1e-3, "{kind:?} {}", r.angle);
        }
    }

    #[test]
    fn square_near_boundary_is_obtuse() {
        let c = MetricChart::product_square();
        let r = shoot(&c, &Mirrors::of(PolygonKind::Square), 0.98).unwrap();
        assert!(r.angle > FRAC_PI_2, "{}", r.angle);
    }

    #[test]
    fn mirror_maps_exist() {
        for kind in [PolygonKind::Square, PolygonKind::Triangle, PolygonKind::Hexagon] {
            let c = kind.chart();
            let m = Mirrors::of(kind);
            mirror_map(&c, m.center, m.d1).unwrap();
            mirror_map(&c, m.center, m.d2).unwrap();
            assert_eq!(symmetry_group(&c).len(), 2 * kind.order());
        }
    }

    #[test]
    fn square_convexity_pattern() {
        let c = MetricChart::product_square();
        let r = shoot(&c, &Mirrors::of(PolygonKind::Square), 0.1).unwrap();
        let rep = convexity_probe(&c, &r.arc).unwrap();
        assert!(rep.concave_while_descending);
        assert!(rep.initial_slope_decreasing);
        for (x, cc) in [(0.3, 1.5), (0.2, -2.0), (-0.25, 3.0)] {
            let y = cc * x;
            let d2 = tangent_second_derivative(&c, [x, y], cc).unwrap();
            assert!(d2 * y < 0.0, "{x} {cc} {d2}");
        }
    }
}
