//! Delzant polygons, the canonical potential, and the adjusted quotient
//! metric of a toric surface.

use crate::error::{GeoError, Result};
use crate::expr::{Bindings, Expr, Var};
use crate::metric::{Affine, ChartKind, Domain, LocusPiece, MetricChart};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Half-plane `⟨x, μ⟩ − λ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub mu: [i64; 2],
    pub lambda: f64,
}

impl Edge {
    pub fn new(mu: [i64; 2], lambda: f64) -> Self {
        Edge { mu, lambda }
    }

    pub fn eval<S: Scalar>(&self, x: S, y: S) -> S {
        x.scale(self.mu[0] as f64) + y.scale(self.mu[1] as f64) - S::cst(self.lambda)
    }

    fn muf(&self) -> [f64; 2] {
        [self.mu[0] as f64, self.mu[1] as f64]
    }
}

/// Weighted half-plane lying strictly outside the polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtraEdge {
    pub mu: [i64; 2],
    pub lambda: f64,
    pub eps: f64,
}

/// JSON form: `{"edges": [{"mu": [a, b], "lambda": c}], "extra_edges": [...], "h": "..."}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ToricSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub extra_edges: Vec<ExtraEdge>,
    #[serde(default)]
    pub h: Option<String>,
}

impl ToricSpec {
    /// Accepts a preset name string or a full object.
    pub fn from_json(v: &serde_json::Value) -> Result<ToricSpec> {
        if let Some(name) = v.as_str() {
            return Ok(ToricSpec { name: Some(name.to_string()), ..Default::default() });
        }
        serde_json::from_value(v.clone()).map_err(|e| GeoError::InvalidParams(format!("polygon: {e}")))
    }

    pub fn build(&self) -> Result<DelzantPolygon> {
        let mut poly = match (&self.name, self.edges.is_empty()) {
            (Some(n), true) => DelzantPolygon::preset(n)?,
            _ => DelzantPolygon::new(self.edges.clone())?,
        };
        poly.extra_edges = self.extra_edges.clone();
        if let Some(h) = &self.h {
            poly = poly.with_h(h)?;
        }
        Ok(poly)
    }
}

/// Smooth correction potential with its symbolic Hessian.
#[derive(Clone, Debug)]
pub struct Correction {
    pub text: String,
    pub h: Expr,
    pub hxx: Expr,
    pub hxy: Expr,
    pub hyy: Expr,
}

#[derive(Clone, Debug)]
pub struct DelzantPolygon {
    /// Edges sorted counterclockwise by normal angle.
    pub edges: Vec<Edge>,
    pub extra_edges: Vec<ExtraEdge>,
    pub h: Option<Correction>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl DelzantPolygon {
    pub fn new(mut edges: Vec<Edge>) -> Result<Self> {
        if edges.len() < 3 {
            return Err(GeoError::InvalidParams("a polygon needs at least three edges".into()));
        }
        edges.sort_by(|a, b| {
            let ta = (a.mu[1] as f64).atan2(a.mu[0] as f64);
            let tb = (b.mu[1] as f64).atan2(b.mu[0] as f64);
            ta.total_cmp(&tb)
        });
        Ok(DelzantPolygon { edges, extra_edges: vec![], h: None })
    }

    /// `cp2` (unit simplex), `square` ([−1,1]²), `triangle` (1+x, 1+y,
    /// 1−x−y) and `hexagon`.
    pub fn preset(name: &str) -> Result<Self> {
        let e = Edge::new;
        match name {
            "cp2" => DelzantPolygon::new(vec![e([1, 0], 0.0), e([0, 1], 0.0), e([-1, -1], -1.0)]),
            "square" => DelzantPolygon::new(vec![e([1, 0], -1.0), e([-1, 0], -1.0), e([0, 1], -1.0), e([0, -1], -1.0)]),
            "triangle" => DelzantPolygon::new(vec![e([1, 0], -1.0), e([0, 1], -1.0), e([-1, -1], -1.0)]),
            "hexagon" => DelzantPolygon::new(vec![
                e([1, 0], -1.0),
                e([-1, 0], -1.0),
                e([0, 1], -1.0),
                e([0, -1], -1.0),
                e([1, 1], -1.0),
                e([-1, -1], -1.0),
            ]),
            other => Err(GeoError::UnknownChart(format!("polygon `{other}`"))),
        }
    }

    pub fn with_h(mut self, text: &str) -> Result<Self> {
        let h = Expr::parse(text)?;
        if h.uses(Var::R) {
            return Err(GeoError::InvalidParams("h may only use x and y".into()));
        }
        let hx = h.derivative(Var::X);
        let hy = h.derivative(Var::Y);
        self.h = Some(Correction {
            text: text.to_string(),
            hxx: hx.derivative(Var::X),
            hxy: hx.derivative(Var::Y),
            hyy: hy.derivative(Var::Y),
            h,
        });
        Ok(self)
    }

    pub fn with_extra_edge(mut self, mu: [i64; 2], lambda: f64, eps: f64) -> Self {
        self.extra_edges.push(ExtraEdge { mu, lambda, eps });
        self
    }

    /// Vertices, counterclockwise, from consecutive edge intersections.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        let n = self.edges.len();
        (0..n)
            .map(|i| {
                let a = self.edges[i];
                let b = self.edges[(i + 1) % n];
                let det = (a.mu[0] * b.mu[1] - a.mu[1] * b.mu[0]) as f64;
                [
                    (a.lambda * b.mu[1] as f64 - b.lambda * a.mu[1] as f64) / det,
                    (a.mu[0] as f64 * b.lambda - b.mu[0] as f64 * a.lambda) / det,
                ]
            })
            .collect()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let v = self.vertices();
        let n = v.len() as f64;
        let s = v.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        [s[0] / n, s[1] / n]
    }

    /// Delzant conditions; returns the list of violations (empty when valid).
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.edges.len();
        for (i, e) in self.edges.iter().enumerate() {
            if gcd(e.mu[0], e.mu[1]) != 1 {
                out.push(format!("edge {i}: normal {:?} is not primitive", e.mu));
            }
        }
        for i in 0..n {
            let a = self.edges[i];
            let b = self.edges[(i + 1) % n];
            let det = a.mu[0] * b.mu[1] - a.mu[1] * b.mu[0];
            if det <= 0 {
                out.push(format!("edges {i} and {} do not meet at a convex vertex", (i + 1) % n));
                continue;
            }
            if det != 1 {
                out.push(format!("vertex {i}: normals {:?}, {:?} have determinant {det}, not unimodular", a.mu, b.mu));
            }
        }
        if out.is_empty() {
            let verts = self.vertices();
            for (i, v) in verts.iter().enumerate() {
                let mut through = 0;
                for (j, e) in self.edges.iter().enumerate() {
                    let l = e.eval(v[0], v[1]);
                    if l < -1e-12 {
                        out.push(format!("vertex {i} violates edge {j}"));
                    } else if l.abs() <= 1e-12 {
                        through += 1;
                    }
                }
                if through != 2 {
                    out.push(format!("vertex {i}: {through} edges meet, expected 2"));
                }
            }
            for (j, x) in self.extra_edges.iter().enumerate() {
                if verts.iter().any(|v| (x.mu[0] as f64 * v[0] + x.mu[1] as f64 * v[1] - x.lambda) <= 0.0) {
                    out.push(format!("extra edge {j} is not positive on the closed polygon"));
                }
                if !(x.eps > 0.0) {
                    out.push(format!("extra edge {j} needs a positive weight"));
                }
            }
        }
        out
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.edges.iter().all(|e| e.eval(p[0], p[1]) > 0.0)
    }

    fn check_interior(&self, p: [f64; 2]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeoError::OutsideDomain(p))
        }
    }

    pub fn product_l(&self, p: [f64; 2]) -> f64 {
        self.edges.iter().map(|e| e.eval(p[0], p[1])).product()
    }

    /// `½ Σ l log l` plus extra-edge terms and `h`.
    pub fn potential(&self, p: [f64; 2]) -> Result<f64> {
        self.check_interior(p)?;
        let mut g = 0.0;
        for e in &self.edges {
            let l = e.eval(p[0], p[1]);
            g += 0.5 * l * l.ln();
        }
        for x in &self.extra_edges {
            let l = x.eps * (x.mu[0] as f64 * p[0] + x.mu[1] as f64 * p[1] - x.lambda);
            g += 0.5 * l * l.ln();
        }
        if let Some(h) = &self.h {
            g += h.h.eval_f64(&Bindings::xy(p[0], p[1]))?;
        }
        Ok(g)
    }

    /// Hessian `(G_xx, G_xy, G_yy)` of the potential, generic over scalars.
    pub fn hessian<S: Scalar>(&self, x: S, y: S) -> Result<[S; 3]> {
        let zero = S::cst(0.0);
        let mut h = [zero, zero, zero];
        let mut add = |mu: [f64; 2], w: S| {
            h[0] = h[0] + w.scale(mu[0] * mu[0]);
            h[1] = h[1] + w.scale(mu[0] * mu[1]);
            h[2] = h[2] + w.scale(mu[1] * mu[1]);
        };
        for e in &self.edges {
            let l = e.eval(x, y);
            if !(l.val() > 0.0) {
                return Err(GeoError::OutsideDomain([x.val(), y.val()]));
            }
            add(e.muf(), S::cst(0.5) / l);
        }
        for e in &self.extra_edges {
            let l = x.scale(e.mu[0] as f64) + y.scale(e.mu[1] as f64) - S::cst(e.lambda);
            add([e.mu[0] as f64, e.mu[1] as f64], S::cst(0.5 * e.eps) / l);
        }
        if let Some(c) = &self.h {
            let b = Bindings::xy(x, y);
            h[0] = h[0] + c.hxx.eval(&b)?;
            h[1] = h[1] + c.hxy.eval(&b)?;
            h[2] = h[2] + c.hyy.eval(&b)?;
        }
        Ok(h)
    }

    pub fn hessian_matrix(&self, p: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        let [a, b, c] = self.hessian(p[0], p[1])?;
        if !(a > 0.0 && a * c - b * b > 0.0) {
            return Err(GeoError::Domain(format!("Hessian not positive definite at {p:?}")));
        }
        Ok([[a, b], [b, c]])
    }

    /// `det G · ∏ l_r`, which extends smoothly and positively to the boundary.
    pub fn det_times_prod(&self, p: [f64; 2]) -> Result<f64> {
        let [a, b, c] = self.hessian(p[0], p[1])?;
        Ok((a * c - b * b) * self.product_l(p))
    }

    /// `δ = (det G ∏ l_r)^{-1}`.
    pub fn delta(&self, p: [f64; 2]) -> Result<f64> {
        Ok(1.0 / self.det_times_prod(p)?)
    }
}

/// Adjusted metric `G / det G` of a two-dimensional toric quotient.
#[derive(Clone, Debug)]
pub struct ToricMetric {
    pub polygon: DelzantPolygon,
}

impl ToricMetric {
    pub fn adjusted<S: Scalar>(&self, x: S, y: S) -> Result<[S; 3]> {
        let [a, b, c] = self.polygon.hessian(x, y)?;
        let det = a * c - b * b;
        Ok([a / det, b / det, c / det])
    }
}

/// Expose the adjusted metric of a valid polygon as a chart.
pub fn adjusted_metric(poly: &DelzantPolygon) -> Result<MetricChart> {
    let issues = poly.validate();
    if !issues.is_empty() {
        return Err(GeoError::InvalidParams(issues.join("; ")));
    }
    let verts = poly.vertices();
    let n = verts.len();
    let locus = (0..n).map(|i| LocusPiece::Segment(verts[i], verts[(i + 1) % n])).collect();
    let mut chart = MetricChart {
        id: match &poly.h {
            Some(h) => format!("toric(h={})", h.text),
            None => "toric".into(),
        },
        kind: ChartKind::Toric(Arc::new(ToricMetric { polygon: poly.clone() })),
        domain: Domain::Polygon(verts.clone()),
        locus,
        symmetry: vec![],
    };
    chart.symmetry = lattice_symmetries(&chart, &verts);
    Ok(chart)
}

/// Integral affine maps preserving the vertex set that are also isometries.
fn lattice_symmetries(chart: &MetricChart, verts: &[[f64; 2]]) -> Vec<Affine> {
    let same = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9;
    let c = chart.center();
    let probes = [[c[0] + 0.013, c[1] + 0.029], [c[0] - 0.021, c[1] + 0.007]];
    let mut out = Vec::new();
    let vals = [-1.0, 0.0, 1.0];
    for &a00 in &vals {
        for &a01 in &vals {
            for &a10 in &vals {
                for &a11 in &vals {
                    let det = a00 * a11 - a01 * a10;
                    if det.abs() != 1.0 || (a00 == 1.0 && a11 == 1.0 && a01 == 0.0 && a10 == 0.0) {
                        continue;
                    }
                    let lin = Affine::linear([[a00, a01], [a10, a11]]);
                    let w = lin.apply(c);
                    let map = Affine { a: lin.a, b: [c[0] - w[0], c[1] - w[1]] };
                    let permutes = verts.iter().all(|v| {
                        let m = map.apply(*v);
                        verts.iter().any(|u| same(*u, m))
                    });
                    if !permutes {
                        continue;
                    }
                    let iso = probes
                        .iter()
                        .all(|p| chart.isometry_defect(&map, *p).map(|d| d < 1e-10).unwrap_or(false));
                    if iso {
                        out.push(map);
                    }
                }
            }
        }
    }
    out
}

/// Constant ratio `toric / reference` of metric coefficients sampled over the
/// interior, or `None` when the two metrics are not proportional.
pub fn normalization_factor(toric: &MetricChart, reference: &MetricChart, samples: &[[f64; 2]]) -> Option<f64> {
    let mut ratio: Option<f64> = None;
    for p in samples {
        let a = toric.coeffs_f64(*p).ok()?;
        let b = reference.coeffs_f64(*p).ok()?;
        for k in [0, 2] {
            let r = a[k] / b[k];
            match ratio {
                None => ratio = Some(r),
                Some(r0) if (r - r0).abs() > 1e-9 * r0.abs() => return None,
                _ => {}
            }
        }
        if let Some(r0) = ratio {
            if (a[1] - r0 * b[1]).abs() > 1e-9 * (a[0].abs() + a[2].abs()) {
                return None;
            }
        }
    }
    ratio
}

/// Reference numbers for the projective plane.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cp2Numbers {
    pub shortest_arc: f64,
    pub shortest_arc_exact: f64,
    pub family_max: f64,
}

pub fn cp2_chart() -> Result<MetricChart> {
    adjusted_metric(&DelzantPolygon::preset("cp2")?)
}

/// Length of the chart segment `x = 1/4` and the largest loop of the
/// similar-triangle family enclosing total curvature 2π.
pub fn cp2_reference_numbers(tol: f64) -> Result<Cp2Numbers> {
    let chart = cp2_chart()?;
    let x = 0.25;
    let shortest_arc = crate::quad::integrate(
        |y| chart.norm([x, y], [0.0, 1.0]).unwrap_or(f64::NAN),
        0.0,
        1.0 - x,
        1e-13,
        1e-13,
    )?;
    let family_max = crate::flow::similar_polygon_family_max(&chart, 9, tol)?;
    Ok(Cp2Numbers { shortest_arc, shortest_arc_exact: 3.0 * 3f64.sqrt() / (8.0 * 2f64.sqrt()), family_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delzant_validation() {
        assert!(DelzantPolygon::preset("cp2").unwrap().validate().is_empty());
        assert!(DelzantPolygon::preset("square").unwrap().validate().is_empty());
        assert!(DelzantPolygon::preset("hexagon").unwrap().validate().is_empty());
        let bad = DelzantPolygon::new(vec![Edge::new([2, 0], 0.0), Edge::new([0, 1], 0.0), Edge::new([-1, -1], -1.0)])
            .unwrap();
        let v = bad.validate();
        assert!(v.iter().any(|s| s.contains("primitive")), "{v:?}");
    }

    #[test]
    fn potential_at_barycenter() {
        let p = DelzantPolygon::preset("cp2").unwrap();
        let g = p.potential([1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((g + 0.5 * 3f64.ln()).abs() < 1e-14);
        let q = p.clone().with_h("7").unwrap();
        assert_eq!(p.hessian_matrix([0.2, 0.3]).unwrap(), q.hessian_matrix([0.2, 0.3]).unwrap());
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let p = DelzantPolygon::preset("cp2").unwrap().with_h("0.1*x^2*y + 0.05*sin(x)").unwrap();
        let x = [0.21, 0.37];
        let h = 1e-4;
        let f = |a: f64, b: f64| p.potential([a, b]).unwrap();
        let fxx = (f(x[0] + h, x[1]) - 2.0 * f(x[0], x[1]) + f(x[0] - h, x[1])) / (h * h);
        let fxy = (f(x[0] + h, x[1] + h) - f(x[0] + h, x[1] - h) - f(x[0] - h, x[1] + h) + f(x[0] - h, x[1] - h))
            / (4.0 * h * h);
        let g = p.hessian_matrix(x).unwrap();
        assert!((g[0][0] - fxx).abs() < 1e-5);
        assert!((g[0][1] - fxy).abs() < 1e-5);
    }

    #[test]
    fn normalization_against_product_charts() {
        let pts = [[0.1, 0.2], [-0.3, 0.15], [0.4, -0.35]];
        let sq = adjusted_metric(&DelzantPolygon::preset("square").unwrap()).unwrap();
        assert!((normalization_factor(&sq, &MetricChart::product_square(), &pts).unwrap() - 1.0).abs() < 1e-12);
        let hx = adjusted_metric(&DelzantPolygon::preset("hexagon").unwrap()).unwrap();
        assert!((normalization_factor(&hx, &MetricChart::product_hexagon(), &pts).unwrap() - 1.0).abs() < 1e-12);
        let tr = adjusted_metric(&DelzantPolygon::preset("triangle").unwrap()).unwrap();
        assert!((normalization_factor(&tr, &MetricChart::product_triangle(), &pts).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cp2_has_cyclic_symmetry() {
        let c = cp2_chart().unwrap();
        assert_eq!(c.symmetry.len(), 5, "{:?}", c.symmetry);
        assert!(c.symmetry.iter().any(|m| m.det() == 1.0));
    }

    #[test]
    fn vertical_line_length() {
        let c = cp2_chart().unwrap();
        let s = crate::quad::integrate(|y| c.norm([0.25, y], [0.0, 1.0]).unwrap(), 0.0, 0.75, 1e-13, 1e-13).unwrap();
        assert!((s - 3.0 * 6f64.sqrt() / 16.0).abs() < 1e-12);
    }
}
