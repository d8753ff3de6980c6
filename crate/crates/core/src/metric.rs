//! Metric charts: the catalog of surfaces, pointwise geometry, and
//! curvature integrals.

use crate::error::{GeoError, Result};
use crate::expr::{Bindings, Expr};
use crate::quad;
use crate::scalar::{Jet2, Scalar};
use crate::toric::ToricMetric;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Curvature within this chart distance of the incomplete locus is reported
/// as unbounded.
pub const LOCUS_GUARD: f64 = 1e-8;

/// Threshold on inner-annulus partial sums used to declare divergence.
pub const UNBOUNDED_THRESHOLD: f64 = 20.0 * PI;

/// Profile `f` of a surface of revolution `dr² + f(r)² dθ²`.
#[derive(Clone, Debug)]
pub enum Profile {
    /// Round sphere, `f = sin r`.
    Sine,
    /// `f = r sqrt(1 - r²)`.
    Clifford,
    /// Flat cone, `f = r`.
    Linear,
    /// Flat cylinder, `f = c`.
    Constant(f64),
    /// User expression in `r` on `(0, r_max)`.
    Custom { expr: Arc<Expr>, text: String, r_max: f64 },
}

impl Profile {
    pub fn from_name_or_expr(s: &str, r_max: Option<f64>) -> Result<Profile> {
        match s.trim() {
            "sin" | "sin(r)" | "sphere" => Ok(Profile::Sine),
            "clifford" | "r*sqrt(1-r^2)" => Ok(Profile::Clifford),
            "linear" | "r" => Ok(Profile::Linear),
            "constant" | "1" => Ok(Profile::Constant(1.0)),
            text => {
                let expr = Expr::parse(text)?;
                let r_max = match r_max {
                    Some(r) => r,
                    None => find_first_zero(&expr)?,
                };
                Ok(Profile::Custom { expr: Arc::new(expr), text: text.to_string(), r_max })
            }
        }
    }

    pub fn custom(text: &str, r_max: f64) -> Result<Profile> {
        Profile::from_name_or_expr(text, Some(r_max))
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Sine => "sin(r)".into(),
            Profile::Clifford => "r*sqrt(1-r^2)".into(),
            Profile::Linear => "r".into(),
            Profile::Constant(c) => format!("{c:?}"),
            Profile::Custom { text, .. } => text.clone(),
        }
    }

    pub fn r_max(&self) -> f64 {
        match self {
            Profile::Sine => PI,
            Profile::Clifford => 1.0,
            Profile::Linear | Profile::Constant(_) => f64::INFINITY,
            Profile::Custom { r_max, .. } => *r_max,
        }
    }

    pub fn eval<S: Scalar>(&self, r: S) -> Result<S> {
        Ok(match self {
            Profile::Sine => r.sin(),
            Profile::Clifford => r * (S::cst(1.0) - r * r).sqrt(),
            Profile::Linear => r,
            Profile::Constant(c) => S::cst(*c),
            Profile::Custom { expr, .. } => expr.eval(&Bindings::r(r))?,
        })
    }

    /// `(f, f', f'')` at `r`.
    pub fn derivs(&self, r: f64) -> Result<(f64, f64, f64)> {
        let j = self.eval(Jet2::var_u(r))?;
        Ok((j.v, j.du, j.duu))
    }

    /// `f(r)² / r²` as a function of `s = r²`, smooth through `s = 0` for the
    /// closed-form profiles.
    fn ratio_sq<S: Scalar>(&self, s: S) -> Result<S> {
        Ok(match self {
            Profile::Clifford => S::cst(1.0) - s,
            Profile::Linear => S::cst(1.0),
            Profile::Sine => {
                if s.val() < 1e-6 {
                    S::cst(1.0) - s / S::cst(3.0) + s * s * S::cst(2.0 / 45.0)
                } else {
                    let r = s.sqrt();
                    let q = r.sin() / r;
                    q * q
                }
            }
            _ => {
                let r = s.sqrt();
                let q = self.eval(r)? / r;
                q * q
            }
        })
    }

    /// True when the metric closes up smoothly at `r_max` (`f'(r_max) = -1`).
    pub fn complete_at_max(&self) -> bool {
        match self {
            Profile::Sine => true,
            Profile::Clifford => false,
            Profile::Linear | Profile::Constant(_) => true,
            Profile::Custom { r_max, .. } => {
                let r = r_max * (1.0 - 1e-7);
                match self.derivs(r) {
                    Ok((_, d1, _)) => (d1 + 1.0).abs() < 1e-4,
                    Err(_) => false,
                }
            }
        }
    }
}

fn find_first_zero(e: &Expr) -> Result<f64> {
    let f = |r: f64| e.eval_f64(&Bindings::r(r));
    let mut a = 1e-6;
    let fa = f(a)?;
    if fa <= 0.0 {
        return Err(GeoError::InvalidParams("profile must be positive just after r = 0".into()));
    }
    let step = 1e-3;
    while a < 100.0 {
        let b = a + step;
        match f(b) {
            Ok(v) if v > 0.0 => a = b,
            Ok(_) => return quad::brent(|r| f(r).unwrap_or(-1.0), a, b, 1e-15),
            Err(_) => {
                return quad::bisect(|r| if f(r).map(|v| v > 0.0).unwrap_or(false) { 1.0 } else { -1.0 }, a, b, 1e-15)
            }
        }
    }
    Err(GeoError::InvalidParams("profile has no zero below r = 100; pass r_max".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    /// `(r, θ)`.
    Polar,
    /// `(r cos θ, r sin θ)`.
    Cartesian,
}

#[derive(Clone, Debug)]
pub enum ChartKind {
    Revolution { profile: Profile, coords: Coords },
    Model { p: f64, coords: Coords },
    Corner,
    ProductSquare,
    ProductTriangle,
    ProductHexagon,
    Neck { r: f64, smooth: bool },
    Toric(Arc<ToricMetric>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Rect { u: (f64, f64), v: (f64, f64) },
    /// Counterclockwise convex polygon.
    Polygon(Vec<[f64; 2]>),
    Disk { radius: f64 },
}

/// A connected piece of the incomplete locus in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocusPiece {
    Segment([f64; 2], [f64; 2]),
    Circle([f64; 2], f64),
}

impl LocusPiece {
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let q = self.nearest(p);
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    }

    pub fn nearest(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            LocusPiece::Segment(a, b) => {
                let d = [b[0] - a[0], b[1] - a[1]];
                let l2 = d[0] * d[0] + d[1] * d[1];
                let t = if l2 == 0.0 {
                    0.0
                } else {
                    (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
                };
                [a[0] + t * d[0], a[1] + t * d[1]]
            }
            LocusPiece::Circle(c, r) => {
                let d = [p[0] - c[0], p[1] - c[1]];
                let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if n == 0.0 {
                    [c[0] + r, c[1]]
                } else {
                    [c[0] + r * d[0] / n, c[1] + r * d[1] / n]
                }
            }
        }
    }
}

/// Affine map `p ↦ A p + b` acting on chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

impl Affine {
    pub fn linear(a: [[f64; 2]; 2]) -> Self {
        Affine { a, b: [0.0, 0.0] }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.a[0][0] * p[0] + self.a[0][1] * p[1] + self.b[0],
            self.a[1][0] * p[0] + self.a[1][1] * p[1] + self.b[1],
        ]
    }

    pub fn apply_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a[0][0] * v[0] + self.a[0][1] * v[1], self.a[1][0] * v[0] + self.a[1][1] * v[1]]
    }

    pub fn compose(&self, o: &Affine) -> Affine {
        let mut a = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] = self.a[i][0] * o.a[0][j] + self.a[i][1] * o.a[1][j];
            }
        }
        let b = self.apply(o.b);
        Affine { a, b }
    }

    pub fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }
}

/// Metric data and derivatives at a point.
#[derive(Clone, Copy, Debug)]
pub struct Local {
    /// `(E, F, G)`.
    pub g: [f64; 3],
    /// `dg[i][m]`: derivative of component `m` along coordinate `i`.
    pub dg: [[f64; 3]; 2],
    /// Second derivatives `(uu, uv, vv)` of each component.
    pub ddg: [[f64; 3]; 3],
    pub det: f64,
    /// `(g^{uu}, g^{uv}, g^{vv})`.
    pub inv: [f64; 3],
    /// `gamma[k][i][j] = Γ^k_{ij}`.
    pub gamma: [[[f64; 2]; 2]; 2],
}

fn gi(i: usize, j: usize) -> usize {
    i + j
}

impl Local {
    pub fn from_jets(e: Jet2, f: Jet2, g: Jet2) -> Local {
        let c = [e, f, g];
        let gv = [e.v, f.v, g.v];
        let dg = [[e.du, f.du, g.du], [e.dv, f.dv, g.dv]];
        let ddg = [
            [c[0].duu, c[1].duu, c[2].duu],
            [c[0].duv, c[1].duv, c[2].duv],
            [c[0].dvv, c[1].dvv, c[2].dvv],
        ];
        let det = e.v * g.v - f.v * f.v;
        let inv = [g.v / det, -f.v / det, e.v / det];
        let ginv = |k: usize, l: usize| inv[gi(k, l)];
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += ginv(k, l) * (dg[i][gi(j, l)] + dg[j][gi(i, l)] - dg[l][gi(i, j)]);
                    }
                    gamma[k][i][j] = 0.5 * s;
                }
            }
        }
        Local { g: gv, dg, ddg, det, inv, gamma }
    }

    pub fn inner(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        self.g[0] * a[0] * b[0] + self.g[1] * (a[0] * b[1] + a[1] * b[0]) + self.g[2] * a[1] * b[1]
    }

    pub fn norm(&self, a: [f64; 2]) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    /// Rotation by +π/2 in the metric (orientation of the chart).
    pub fn left_normal(&self, v: [f64; 2]) -> [f64; 2] {
        let s = self.det.sqrt();
        // lower index of J v is sqrt(det) (-v², v¹); raise with the inverse
        let w = [-s * v[1], s * v[0]];
        let n = [self.inv[0] * w[0] + self.inv[1] * w[1], self.inv[1] * w[0] + self.inv[2] * w[1]];
        let len = self.norm(n);
        let vl = self.norm(v);
        if len == 0.0 {
            return n;
        }
        [n[0] * vl / len, n[1] * vl / len]
    }

    /// Raise an index: `g^{-1} w`.
    pub fn raise(&self, w: [f64; 2]) -> [f64; 2] {
        [self.inv[0] * w[0] + self.inv[1] * w[1], self.inv[1] * w[0] + self.inv[2] * w[1]]
    }

    /// `Γ^k_{ij} a^i b^j`.
    pub fn gamma_ab(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out[k] += self.gamma[k][i][j] * a[i] * b[j];
                }
            }
        }
        out
    }

    /// Gaussian curvature by the Brioschi formula.
    pub fn curvature(&self) -> f64 {
        let [e, f, g] = self.g;
        let (eu, fu, gu) = (self.dg[0][0], self.dg[0][1], self.dg[0][2]);
        let (ev, fv, gv) = (self.dg[1][0], self.dg[1][1], self.dg[1][2]);
        let evv = self.ddg[2][0];
        let fuv = self.ddg[1][1];
        let guu = self.ddg[0][2];
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let m1 = [
            [-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev],
            [fv - 0.5 * gu, e, f],
            [0.5 * gv, f, g],
        ];
        let m2 = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, g]];
        (det3(m1) - det3(m2)) / (self.det * self.det)
    }
}

/// A two-dimensional coordinate chart with its metric.
#[derive(Clone, Debug)]
pub struct MetricChart {
    pub id: String,
    pub kind: ChartKind,
    pub domain: Domain,
    pub locus: Vec<LocusPiece>,
    pub symmetry: Vec<Affine>,
}

/// Catalog request: `{"id": ..., "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChartSpec {
    pub id: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl ChartSpec {
    pub fn new(id: &str) -> Self {
        ChartSpec { id: id.to_string(), params: Default::default() }
    }

    pub fn with(mut self, key: &str, v: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    fn num(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| GeoError::InvalidParams(format!("parameter `{key}` must be a number"))),
        }
    }

    fn boolean(&self, key: &str, default: bool) -> Result<bool> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_bool()
                .ok_or_else(|| GeoError::InvalidParams(format!("parameter `{key}` must be a boolean"))),
        }
    }

    fn coords(&self) -> Result<Coords> {
        match self.params.get("coords").and_then(|v| v.as_str()) {
            None | Some("polar") => Ok(Coords::Polar),
            Some("cartesian") => Ok(Coords::Cartesian),
            Some(other) => Err(GeoError::InvalidParams(format!("unknown coordinates `{other}`"))),
        }
    }
}

/// Construct a catalog chart.
pub fn build_metric(spec: &ChartSpec) -> Result<MetricChart> {
    let chart = match spec.id.as_str() {
        "revolution" => {
            let f = spec
                .params
                .get("f")
                .and_then(|v| v.as_str())
                .ok_or_else(|| GeoError::InvalidParams("revolution needs a profile `f`".into()))?;
            let r_max = spec.params.get("r_max").and_then(|v| v.as_f64());
            let profile = Profile::from_name_or_expr(f, r_max)?;
            MetricChart::revolution(profile, spec.coords()?)
        }
        "sweepout_disk" => MetricChart::revolution(Profile::Clifford, spec.coords()?),
        "model" => MetricChart::model(spec.num("p", 1.0)?, spec.coords()?),
        "corner" => MetricChart::corner(),
        "product_square" => MetricChart::product_square(),
        "product_triangle" => MetricChart::product_triangle(),
        "product_hexagon" => MetricChart::product_hexagon(),
        "neck" => MetricChart::neck(spec.num("R", PI)?, spec.boolean("smooth", false)?),
        "toric" => {
            let poly = spec
                .params
                .get("polygon")
                .ok_or_else(|| GeoError::InvalidParams("toric needs a `polygon`".into()))?;
            let data = crate::toric::ToricSpec::from_json(poly)?;
            crate::toric::adjusted_metric(&data.build()?)?
        }
        other => return Err(GeoError::UnknownChart(other.to_string())),
    };
    chart.validate()?;
    Ok(chart)
}

fn rot(t: f64) -> Affine {
    let (s, c) = t.sin_cos();
    Affine::linear([[c, -s], [s, c]])
}

fn refl_y() -> Affine {
    Affine::linear([[1.0, 0.0], [0.0, -1.0]])
}

impl MetricChart {
    pub fn revolution(profile: Profile, coords: Coords) -> MetricChart {
        let r_max = profile.r_max();
        let complete = profile.complete_at_max();
        let id = format!("revolution({})", profile.name());
        let (domain, locus, symmetry) = match coords {
            Coords::Polar => {
                let lo = if matches!(profile, Profile::Constant(_)) { f64::NEG_INFINITY } else { 0.0 };
                let locus = if complete || !r_max.is_finite() {
                    vec![]
                } else {
                    vec![LocusPiece::Segment([r_max, -1e6], [r_max, 1e6])]
                };
                (
                    Domain::Rect { u: (lo, r_max), v: (f64::NEG_INFINITY, f64::INFINITY) },
                    locus,
                    vec![refl_y(), Affine { a: [[1.0, 0.0], [0.0, 1.0]], b: [0.0, 1.3] }],
                )
            }
            Coords::Cartesian => {
                let locus = if complete || !r_max.is_finite() { vec![] } else { vec![LocusPiece::Circle([0.0, 0.0], r_max)] };
                (Domain::Disk { radius: r_max }, locus, vec![refl_y(), rot(PI / 2.0), rot(1.0)])
            }
        };
        MetricChart { id, kind: ChartKind::Revolution { profile, coords }, domain, locus, symmetry }
    }

    pub fn model(p: f64, coords: Coords) -> MetricChart {
        let id = format!("model(p={p})");
        match coords {
            Coords::Polar => MetricChart {
                id,
                kind: ChartKind::Model { p, coords },
                domain: Domain::Rect { u: (0.0, f64::INFINITY), v: (f64::NEG_INFINITY, f64::INFINITY) },
                locus: vec![LocusPiece::Segment([0.0, -1e6], [0.0, 1e6])],
                symmetry: vec![refl_y(), Affine { a: [[1.0, 0.0], [0.0, 1.0]], b: [0.0, 0.7] }],
            },
            Coords::Cartesian => MetricChart {
                id,
                kind: ChartKind::Model { p, coords },
                domain: Domain::Disk { radius: f64::INFINITY },
                locus: vec![LocusPiece::Circle([0.0, 0.0], 0.0)],
                symmetry: vec![refl_y(), rot(PI / 3.0)],
            },
        }
    }

    pub fn corner() -> MetricChart {
        MetricChart {
            id: "corner".into(),
            kind: ChartKind::Corner,
            domain: Domain::Rect { u: (0.0, f64::INFINITY), v: (0.0, f64::INFINITY) },
            locus: vec![LocusPiece::Segment([0.0, 0.0], [1e6, 0.0]), LocusPiece::Segment([0.0, 0.0], [0.0, 1e6])],
            symmetry: vec![Affine::linear([[0.0, 1.0], [1.0, 0.0]])],
        }
    }

    pub fn product_square() -> MetricChart {
        let v = vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        MetricChart {
            id: "product_square".into(),
            kind: ChartKind::ProductSquare,
            locus: polygon_locus(&v),
            domain: Domain::Polygon(v),
            symmetry: vec![
                Affine::linear([[-1.0, 0.0], [0.0, 1.0]]),
                refl_y(),
                Affine::linear([[0.0, 1.0], [1.0, 0.0]]),
            ],
        }
    }

    pub fn product_triangle() -> MetricChart {
        let v = vec![[-1.0, -1.0], [2.0, -1.0], [-1.0, 2.0]];
        MetricChart {
            id: "product_triangle".into(),
            kind: ChartKind::ProductTriangle,
            locus: polygon_locus(&v),
            domain: Domain::Polygon(v),
            symmetry: vec![
                Affine::linear([[0.0, 1.0], [1.0, 0.0]]),
                Affine::linear([[0.0, 1.0], [-1.0, -1.0]]),
                Affine::linear([[-1.0, -1.0], [0.0, 1.0]]),
            ],
        }
    }

    pub fn product_hexagon() -> MetricChart {
        let v = vec![[1.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        MetricChart {
            id: "product_hexagon".into(),
            kind: ChartKind::ProductHexagon,
            locus: polygon_locus(&v),
            domain: Domain::Polygon(v),
            symmetry: vec![
                Affine::linear([[0.0, 1.0], [1.0, 0.0]]),
                Affine::linear([[-1.0, -1.0], [0.0, 1.0]]),
                Affine::linear([[-1.0, 0.0], [0.0, -1.0]]),
                Affine::linear([[0.0, -1.0], [1.0, 1.0]]),
            ],
        }
    }

    pub fn neck(r: f64, smooth: bool) -> MetricChart {
        let xe = r + PI / 2.0;
        MetricChart {
            id: format!("neck(R={r}{})", if smooth { ", smooth" } else { "" }),
            kind: ChartKind::Neck { r, smooth },
            domain: Domain::Rect { u: (-xe, xe), v: (0.0, PI) },
            locus: vec![
                LocusPiece::Segment([-xe, 0.0], [xe, 0.0]),
                LocusPiece::Segment([-xe, PI], [xe, PI]),
                LocusPiece::Segment([-xe, 0.0], [-xe, PI]),
                LocusPiece::Segment([xe, 0.0], [xe, PI]),
            ],
            symmetry: vec![
                Affine::linear([[-1.0, 0.0], [0.0, 1.0]]),
                Affine { a: [[1.0, 0.0], [0.0, -1.0]], b: [0.0, PI] },
            ],
        }
    }

    pub fn profile(&self) -> Option<&Profile> {
        match &self.kind {
            ChartKind::Revolution { profile, .. } => Some(profile),
            _ => None,
        }
    }

    pub fn is_polar(&self) -> bool {
        matches!(
            self.kind,
            ChartKind::Revolution { coords: Coords::Polar, .. } | ChartKind::Model { coords: Coords::Polar, .. }
        )
    }

    /// Metric coefficients `(E, F, G)` over any scalar type.
    pub fn coeffs<S: Scalar>(&self, u: S, v: S) -> Result<[S; 3]> {
        let zero = S::cst(0.0);
        let one = S::cst(1.0);
        Ok(match &self.kind {
            ChartKind::Revolution { profile, coords: Coords::Polar } => {
                let f = profile.eval(u)?;
                [one, zero, f * f]
            }
            ChartKind::Revolution { profile, coords: Coords::Cartesian } => {
                let s = u * u + v * v;
                let q = profile.ratio_sq(s)?;
                cartesian_from_ratio(u, v, s, q)
            }
            ChartKind::Model { p, coords: Coords::Polar } => [one, zero, u.powf(*p)],
            ChartKind::Model { p, coords: Coords::Cartesian } => {
                let s = u * u + v * v;
                let q = s.powf(0.5 * (p - 2.0));
                cartesian_from_ratio(u, v, s, q)
            }
            ChartKind::Corner => [v, zero, u],
            ChartKind::ProductSquare => [one - v * v, zero, one - u * u],
            ChartKind::ProductTriangle => {
                let a = one + u;
                let b = one + v;
                let c = one - u - v;
                tri_form(a, b, c)
            }
            ChartKind::ProductHexagon => {
                let a = one - u * u;
                let b = one - v * v;
                let w = u + v;
                let c = one - w * w;
                tri_form(a, b, c)
            }
            ChartKind::Neck { r, smooth } => {
                let s = v.sin();
                let s2 = s * s;
                let ax = u.val().abs();
                if ax <= *r {
                    [s2, zero, s2]
                } else {
                    let x = if u.val() < 0.0 { -u - S::cst(*r) } else { u - S::cst(*r) };
                    let phi = if *smooth { (x * x).scale(2.0 / PI).cos() } else { x.cos() };
                    let p2 = phi * phi;
                    [p2 * s2, zero, p2 * p2 * s2]
                }
            }
            ChartKind::Toric(t) => t.adjusted(u, v)?,
        })
    }

    pub fn coeffs_f64(&self, p: [f64; 2]) -> Result<[f64; 3]> {
        self.coeffs(p[0], p[1])
    }

    /// Metric, derivatives and Christoffel symbols at `p`.
    pub fn local(&self, p: [f64; 2]) -> Result<Local> {
        let [e, f, g] = self.coeffs(Jet2::var_u(p[0]), Jet2::var_v(p[1]))?;
        let loc = Local::from_jets(e, f, g);
        if !(loc.det > 0.0) || !loc.det.is_finite() {
            return Err(GeoError::OutsideDomain(p));
        }
        Ok(loc)
    }

    /// Unchecked pointwise curvature (used where a finite value is needed
    /// close to the locus, e.g. by quadrature nodes).
    pub fn curvature_raw(&self, p: [f64; 2]) -> Result<f64> {
        if let ChartKind::Revolution { profile, coords } = &self.kind {
            let r = match coords {
                Coords::Polar => p[0],
                Coords::Cartesian => (p[0] * p[0] + p[1] * p[1]).sqrt(),
            };
            return revolution_curvature(profile, r);
        }
        if let ChartKind::Model { p: pw, coords: Coords::Cartesian } = &self.kind {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            return Ok(pw * (2.0 - pw) / (4.0 * r * r));
        }
        Ok(self.local(p)?.curvature())
    }

    /// Gaussian curvature at an interior point.
    pub fn gaussian_curvature(&self, p: [f64; 2]) -> Result<f64> {
        if !self.in_domain(p) {
            return Err(GeoError::OutsideDomain(p));
        }
        if self.locus_distance(p) < LOCUS_GUARD {
            return Err(GeoError::Unbounded(p));
        }
        self.curvature_raw(p)
    }

    /// Central finite-difference curvature, independent of the jet evaluator.
    pub fn curvature_fd(&self, p: [f64; 2], h: f64) -> Result<f64> {
        let c = |du: f64, dv: f64| self.coeffs_f64([p[0] + du, p[1] + dv]);
        let c0 = c(0.0, 0.0)?;
        let (cup, cum, cvp, cvm) = (c(h, 0.0)?, c(-h, 0.0)?, c(0.0, h)?, c(0.0, -h)?);
        let (cpp, cpm, cmp, cmm) = (c(h, h)?, c(h, -h)?, c(-h, h)?, c(-h, -h)?);
        let mut dg = [[0.0; 3]; 2];
        let mut ddg = [[0.0; 3]; 3];
        for m in 0..3 {
            dg[0][m] = (cup[m] - cum[m]) / (2.0 * h);
            dg[1][m] = (cvp[m] - cvm[m]) / (2.0 * h);
            ddg[0][m] = (cup[m] - 2.0 * c0[m] + cum[m]) / (h * h);
            ddg[2][m] = (cvp[m] - 2.0 * c0[m] + cvm[m]) / (h * h);
            ddg[1][m] = (cpp[m] - cpm[m] - cmp[m] + cmm[m]) / (4.0 * h * h);
        }
        let det = c0[0] * c0[2] - c0[1] * c0[1];
        let loc = Local {
            g: c0,
            dg,
            ddg,
            det,
            inv: [c0[2] / det, -c0[1] / det, c0[0] / det],
            gamma: [[[0.0; 2]; 2]; 2],
        };
        Ok(loc.curvature())
    }

    pub fn inner(&self, p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> Result<f64> {
        let [e, f, g] = self.coeffs_f64(p)?;
        Ok(e * a[0] * b[0] + f * (a[0] * b[1] + a[1] * b[0]) + g * a[1] * b[1])
    }

    pub fn norm(&self, p: [f64; 2], a: [f64; 2]) -> Result<f64> {
        Ok(self.inner(p, a, a)?.max(0.0).sqrt())
    }

    /// Metric length of the straight chart chord from `p` to `q`.
    pub fn chord_length(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        const X: [f64; 3] = [-0.774596669241483377, 0.0, 0.774596669241483377];
        const W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let d = [q[0] - p[0], q[1] - p[1]];
        let mut s = 0.0;
        for k in 0..3 {
            let t = 0.5 * (1.0 + X[k]);
            let m = [p[0] + t * d[0], p[1] + t * d[1]];
            s += 0.5 * W[k] * self.norm(m, d).unwrap_or(f64::NAN);
        }
        s
    }

    /// Distance in chart coordinates to the incomplete locus.
    pub fn locus_distance(&self, p: [f64; 2]) -> f64 {
        self.locus.iter().map(|l| l.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Nearest point of the incomplete locus.
    pub fn locus_nearest(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        self.locus
            .iter()
            .map(|l| (l.distance(p), l.nearest(p)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|x| x.1)
    }

    /// Chart-space distance to the boundary of the coordinate domain.
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        match &self.domain {
            Domain::Rect { u, v } => (p[0] - u.0).min(u.1 - p[0]).min(p[1] - v.0).min(v.1 - p[1]),
            Domain::Disk { radius } => radius - (p[0] * p[0] + p[1] * p[1]).sqrt(),
            Domain::Polygon(vs) => {
                let n = vs.len();
                let mut d = f64::INFINITY;
                for i in 0..n {
                    let a = vs[i];
                    let b = vs[(i + 1) % n];
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let l = (e[0] * e[0] + e[1] * e[1]).sqrt();
                    let s = (e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0])) / l;
                    d = d.min(s);
                }
                d
            }
        }
    }

    /// Open interior of the coordinate domain, minus the incomplete locus.
    pub fn in_domain(&self, p: [f64; 2]) -> bool {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return false;
        }
        let inside = self.boundary_distance(p) > 0.0;
        inside && self.locus_distance(p) > 0.0
    }

    /// Direction label of a point near the incomplete locus, used to
    /// cluster where a flowing loop reaches it.
    pub fn locus_direction(&self, p: [f64; 2]) -> f64 {
        match &self.kind {
            ChartKind::Revolution { coords: Coords::Polar, .. } | ChartKind::Model { coords: Coords::Polar, .. } => p[1],
            ChartKind::Neck { .. } => (p[1] - PI / 2.0).atan2(p[0]),
            ChartKind::Corner => p[1].atan2(p[0]),
            _ => {
                let c = self.center();
                (p[1] - c[1]).atan2(p[0] - c[0])
            }
        }
    }

    /// A natural interior reference point.
    pub fn center(&self) -> [f64; 2] {
        match &self.domain {
            Domain::Polygon(vs) => {
                let n = vs.len() as f64;
                let s = vs.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
                [s[0] / n, s[1] / n]
            }
            Domain::Disk { .. } => [0.0, 0.0],
            Domain::Rect { u, v } => {
                let m = |a: f64, b: f64| {
                    if a.is_finite() && b.is_finite() {
                        0.5 * (a + b)
                    } else if a.is_finite() {
                        a + 1.0
                    } else if b.is_finite() {
                        b - 1.0
                    } else {
                        0.0
                    }
                };
                [m(u.0, u.1), m(v.0, v.1)]
            }
        }
    }

    /// Check positivity at sample points and symmetry isometries.
    pub fn validate(&self) -> Result<()> {
        let c = self.center();
        let probe = [c, [c[0] + 1e-3, c[1] + 2e-3]];
        for p in probe {
            if !self.in_domain(p) {
                continue;
            }
            let [e, f, g] = self.coeffs_f64(p)?;
            if !(e > 0.0 && g > 0.0 && e * g - f * f > 0.0) {
                return Err(GeoError::InvalidParams(format!("non-positive metric at {p:?}")));
            }
        }
        Ok(())
    }

    /// Largest coefficient mismatch of the pulled-back metric `Aᵀ g(Ap+b) A`
    /// against `g(p)` for a symmetry map.
    pub fn isometry_defect(&self, map: &Affine, p: [f64; 2]) -> Result<f64> {
        let q = map.apply(p);
        let g0 = self.coeffs_f64(p)?;
        let g1 = self.coeffs_f64(q)?;
        let m1 = [[g1[0], g1[1]], [g1[1], g1[2]]];
        let a = map.a;
        let mut pb = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        pb[i][j] += a[k][i] * m1[k][l] * a[l][j];
                    }
                }
            }
        }
        Ok((pb[0][0] - g0[0]).abs().max((pb[0][1] - g0[1]).abs()).max((pb[1][1] - g0[2]).abs()))
    }

    /// Connection one-form of the frame `e₁ = ∂_u/√E` evaluated on `v`;
    /// counterclockwise boundary integrals of its negative give `∫K dA`.
    pub fn connection_form(&self, p: [f64; 2], v: [f64; 2]) -> Result<f64> {
        let loc = self.local(p)?;
        let s = loc.det.sqrt() / loc.g[0];
        Ok(s * (loc.gamma[1][0][0] * v[0] + loc.gamma[1][1][0] * v[1]))
    }
}

fn cartesian_from_ratio<S: Scalar>(u: S, v: S, s: S, q: S) -> [S; 3] {
    // g = n nᵀ + q (I - n nᵀ) written without dividing by r at the origin
    let one = S::cst(1.0);
    let w = (q - one) / s;
    let s_tiny = s.val() < 1e-300;
    if s_tiny {
        return [one, S::cst(0.0), one];
    }
    [one + w * v * v, -(w * u * v), one + w * u * u]
}

fn tri_form<S: Scalar>(a: S, b: S, c: S) -> [S; 3] {
    let sum = a + b + c;
    let e = (b * c + a * b) / sum;
    let f = a * b / sum;
    let g = (a * c + a * b) / sum;
    [e, f, g]
}

fn revolution_curvature(profile: &Profile, r: f64) -> Result<f64> {
    let r = if r.abs() < 1e-7 { 1e-7 } else { r };
    let (f, _, f2) = profile.derivs(r)?;
    Ok(-f2 / f)
}

fn polygon_locus(v: &[[f64; 2]]) -> Vec<LocusPiece> {
    (0..v.len()).map(|i| LocusPiece::Segment(v[i], v[(i + 1) % v.len()])).collect()
}

/// Result of an integral that may diverge near the incomplete locus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Integral {
    Finite(f64),
    Unbounded { partial: f64, layers: usize },
}

impl Integral {
    pub fn value(&self) -> Option<f64> {
        match self {
            Integral::Finite(v) => Some(*v),
            Integral::Unbounded { .. } => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Integral::Unbounded { .. })
    }
}

/// Integration region for curvature integrals.
#[derive(Clone, Debug)]
pub enum RegionSpec {
    /// `r ≤ radius` on a polar revolution chart.
    SublevelDisk { radius: f64 },
    /// Euclidean disk in chart coordinates.
    ChartDisk { center: [f64; 2], radius: f64 },
    /// Homothetic copy of the chart polygon about `center` with ratio `scale`.
    SimilarPolygon { center: [f64; 2], scale: f64 },
    /// Interior of a closed discrete curve.
    Curve(crate::curve::DiscreteCurve),
}

fn integrate_2d<F: Fn(f64, f64) -> f64>(f: F, s: (f64, f64), t: (f64, f64), tol: f64) -> Result<f64> {
    let inner_tol = tol * 0.1;
    let mut err: Option<GeoError> = None;
    let v = quad::integrate(
        |x| match quad::integrate(|y| f(x, y), t.0, t.1, inner_tol, 1e-12) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        s.0,
        s.1,
        tol,
        1e-12,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

impl MetricChart {
    /// `K √det` at `p`, finite on the open domain.
    fn density(&self, p: [f64; 2]) -> f64 {
        let det = match self.coeffs_f64(p) {
            Ok([e, f, g]) => e * g - f * f,
            Err(_) => return f64::NAN,
        };
        match self.curvature_raw(p) {
            Ok(k) => k * det.max(0.0).sqrt(),
            Err(_) => f64::NAN,
        }
    }

    /// Star-shaped patches covering a region: `(center, boundary(t))`.
    fn star(&self, region: &RegionSpec) -> Result<(Vec<[f64; 2]>, [f64; 2], f64)> {
        match region {
            RegionSpec::ChartDisk { center, radius } => Ok((vec![], *center, *radius)),
            RegionSpec::SimilarPolygon { center, scale } => {
                let Domain::Polygon(vs) = &self.domain else {
                    return Err(GeoError::InvalidParams("similar polygons need a polygonal chart".into()));
                };
                let c0 = self.center();
                let verts = vs
                    .iter()
                    .map(|v| [center[0] + scale * (v[0] - c0[0]), center[1] + scale * (v[1] - c0[1])])
                    .collect();
                Ok((verts, *center, *scale))
            }
            _ => Err(GeoError::InvalidParams("not a star region".into())),
        }
    }

    /// `∫K dA` over a region, detecting divergence at the incomplete locus.
    pub fn curvature_integral(&self, region: &RegionSpec, tol: f64) -> Result<Integral> {
        match region {
            RegionSpec::Curve(c) => crate::flow::enclosed_curvature(self, c),
            RegionSpec::SublevelDisk { radius } => self.sublevel_integral(*radius, tol),
            RegionSpec::ChartDisk { center, radius } => {
                let gap = self.locus.iter().map(|l| l.distance(*center)).fold(f64::INFINITY, f64::min) - radius;
                if gap <= 1e-12 * radius.max(1.0) {
                    return self.touching_disk_integral(*center, *radius, tol);
                }
                if self.boundary_distance(*center) < *radius {
                    return Err(GeoError::InvalidParams("disk leaves the chart domain".into()));
                }
                let (c, r) = (*center, *radius);
                let v = integrate_2d(
                    |w, t| {
                        let (s, co) = (2.0 * PI * t).sin_cos();
                        let p = [c[0] + r * w * co, c[1] + r * w * s];
                        self.density(p) * r * r * w * 2.0 * PI
                    },
                    (0.0, 1.0),
                    (0.0, 1.0),
                    tol,
                )?;
                Ok(Integral::Finite(v))
            }
            RegionSpec::SimilarPolygon { scale, .. } => {
                let (verts, c, _) = self.star(region)?;
                let edges: Vec<([f64; 2], [f64; 2])> =
                    (0..verts.len()).map(|i| (verts[i], verts[(i + 1) % verts.len()])).collect();
                let fan = |w0: f64, w1: f64| -> Result<f64> {
                    let mut total = 0.0;
                    for (a, b) in &edges {
                        let da = [a[0] - c[0], a[1] - c[1]];
                        let db = [b[0] - c[0], b[1] - c[1]];
                        let jac = (da[0] * db[1] - da[1] * db[0]).abs();
                        total += integrate_2d(
                            |w, t| {
                                let p = [
                                    c[0] + w * ((1.0 - t) * da[0] + t * db[0]),
                                    c[1] + w * ((1.0 - t) * da[1] + t * db[1]),
                                ];
                                self.density(p) * w * jac
                            },
                            (w0, w1),
                            (0.0, 1.0),
                            tol / edges.len() as f64,
                        )?;
                    }
                    Ok(total)
                };
                let touches = verts.iter().any(|v| self.boundary_distance(*v) <= 1e-12) || *scale >= 1.0;
                if !touches {
                    return Ok(Integral::Finite(fan(0.0, 1.0)?));
                }
                layered(|k| {
                    let (w0, w1) = if k == 0 { (0.0, 0.5) } else { (1.0 - 0.5f64.powi(k as i32), 1.0 - 0.5f64.powi(k as i32 + 1)) };
                    if w1 <= w0 {
                        return Ok(None);
                    }
                    fan(w0, w1).map(Some)
                })
            }
        }
    }

    fn sublevel_integral(&self, radius: f64, tol: f64) -> Result<Integral> {
        let Some(profile) = self.profile().filter(|_| self.is_polar()) else {
            return Err(GeoError::NotRevolution);
        };
        let rm = profile.r_max();
        let slice = |a: f64, b: f64| -> Result<f64> {
            integrate_2d(
                |r, t| {
                    let p = [r, 2.0 * PI * t];
                    self.density(p) * 2.0 * PI
                },
                (a, b),
                (0.0, 1.0),
                tol,
            )
        };
        if radius < rm || profile.complete_at_max() {
            return Ok(Integral::Finite(slice(0.0, radius.min(rm))?));
        }
        layered(|k| {
            let (a, b) = if k == 0 { (0.0, 0.5 * rm) } else { (rm * (1.0 - 0.5f64.powi(k as i32)), rm * (1.0 - 0.5f64.powi(k as i32 + 1))) };
            if b <= a {
                return Ok(None);
            }
            slice(a, b).map(Some)
        })
    }

    /// Disk tangent to a straight piece of the locus: integrate in polar
    /// coordinates about the contact point, on dyadic shells.
    fn touching_disk_integral(&self, center: [f64; 2], radius: f64, tol: f64) -> Result<Integral> {
        let piece = self
            .locus
            .iter()
            .min_by(|a, b| a.distance(center).total_cmp(&b.distance(center)))
            .copied()
            .ok_or_else(|| GeoError::InvalidParams("chart has no incomplete locus".into()))?;
        let LocusPiece::Segment(a, b) = piece else {
            return Err(GeoError::InvalidParams("tangency supported for straight locus pieces only".into()));
        };
        let q = piece.nearest(center);
        let n = [(center[0] - q[0]) / radius, (center[1] - q[1]) / radius];
        let tl = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let tau = [(b[0] - a[0]) / tl, (b[1] - a[1]) / tl];
        let shell = |rho0: f64, rho1: f64| -> Result<f64> {
            let mut total = 0.0;
            for side in [-1.0, 1.0] {
                // φ is the angle from the locus line; ρ ≤ 2R sin φ inside the disk
                let phi_min = (rho0 / (2.0 * radius)).min(1.0).asin();
                let lo = phi_min.max(1e-300).ln();
                let hi = (PI / 2.0f64).ln();
                let v = integrate_2d(
                    |lphi, t| {
                        let phi = lphi.exp();
                        let top = rho1.min(2.0 * radius * phi.sin());
                        if top <= rho0 {
                            return 0.0;
                        }
                        let rho = rho0 + t * (top - rho0);
                        let (sp, cp) = phi.sin_cos();
                        let p = [
                            q[0] + rho * (sp * n[0] + side * cp * tau[0]),
                            q[1] + rho * (sp * n[1] + side * cp * tau[1]),
                        ];
                        self.density(p) * rho * (top - rho0) * phi
                    },
                    (lo, hi),
                    (0.0, 1.0),
                    tol,
                )?;
                total += v;
            }
            Ok(total)
        };
        let d = 2.0 * radius;
        layered(|k| {
            let rho1 = d * 0.5f64.powi(k as i32);
            let rho0 = 0.5 * rho1;
            if rho0 < 1e-290 {
                return Ok(None);
            }
            shell(rho0, rho1).map(Some)
        })
    }

    /// `∫K dA + ∮k ds − 2π` for a smooth region bounded away from the locus.
    pub fn gauss_bonnet_residual(&self, region: &RegionSpec, tol: f64) -> Result<f64> {
        let area = match self.curvature_integral(region, tol)? {
            Integral::Finite(v) => v,
            Integral::Unbounded { .. } => {
                return Err(GeoError::InvalidParams("region touches the incomplete locus".into()))
            }
        };
        let boundary: Box<dyn Fn(f64) -> ([f64; 2], [f64; 2], [f64; 2])> = match region {
            RegionSpec::ChartDisk { center, radius } => {
                if self.locus_distance(*center) <= *radius * (1.0 + 1e-9) {
                    return Err(GeoError::InvalidParams("region touches the incomplete locus".into()));
                }
                let (c, r) = (*center, *radius);
                Box::new(move |t: f64| {
                    let (s, co) = t.sin_cos();
                    ([c[0] + r * co, c[1] + r * s], [-r * s, r * co], [-r * co, -r * s])
                })
            }
            RegionSpec::SublevelDisk { radius } => {
                let r = *radius;
                Box::new(move |t: f64| ([r, t], [0.0, 1.0], [0.0, 0.0]))
            }
            _ => return Err(GeoError::InvalidParams("boundary must be a smooth parametrised curve".into())),
        };
        let kds = |t: f64| -> f64 {
            let (p, v, a0) = boundary(t);
            let loc = match self.local(p) {
                Ok(l) => l,
                Err(_) => return f64::NAN,
            };
            let g = loc.gamma_ab(v, v);
            let a = [a0[0] + g[0], a0[1] + g[1]];
            loc.det.sqrt() * (v[0] * a[1] - v[1] * a[0]) / loc.inner(v, v)
        };
        let line = quad::integrate(kds, 0.0, 2.0 * PI, tol, 1e-13)?;
        Ok(area + line - 2.0 * PI)
    }
}

/// Sum layer contributions until they decay (finite) or the partial sum
/// exceeds the divergence threshold while still growing.
fn layered<F: FnMut(usize) -> Result<Option<f64>>>(mut layer: F) -> Result<Integral> {
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    let mut decaying = 0;
    for k in 0..1100 {
        let Some(v) = layer(k)? else {
            break;
        };
        sum += v;
        if sum > UNBOUNDED_THRESHOLD && v > 0.0 {
            if let Some(p) = prev {
                if v >= 0.5 * p {
                    return Ok(Integral::Unbounded { partial: sum, layers: k + 1 });
                }
            }
        }
        if let Some(p) = prev {
            if v.abs() <= 0.6 * p.abs() || v.abs() < 1e-15 * sum.abs().max(1.0) {
                decaying += 1;
            } else {
                decaying = 0;
            }
            if decaying >= 4 && v.abs() < 1e-13 * sum.abs().max(1.0) {
                return Ok(Integral::Finite(sum));
            }
        }
        prev = Some(v);
    }
    if sum > UNBOUNDED_THRESHOLD {
        Ok(Integral::Unbounded { partial: sum, layers: 1100 })
    } else {
        Ok(Integral::Finite(sum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn catalog_examples() {
        let m = build_metric(&ChartSpec::new("model").with("p", 1.0)).unwrap();
        assert_eq!(m.coeffs_f64([0.25, 0.0]).unwrap(), [1.0, 0.0, 0.25]);
        let m = build_metric(&ChartSpec::new("revolution").with("f", "r")).unwrap();
        assert_eq!(m.coeffs_f64([0.5, 0.0]).unwrap(), [1.0, 0.0, 0.25]);
        let m = build_metric(&ChartSpec::new("product_square")).unwrap();
        assert_eq!(m.coeffs_f64([0.0, 0.0]).unwrap(), [1.0, 0.0, 1.0]);
        assert!(matches!(build_metric(&ChartSpec::new("torus")), Err(GeoError::UnknownChart(_))));
    }

    #[test]
    fn curvature_examples() {
        let m = MetricChart::model(1.0, Coords::Polar);
        // K = 1/(4 r²) for dr² + r dθ²
        assert!(close(m.gaussian_curvature([0.5, 0.0]).unwrap(), 1.0, 1e-12));
        let c = MetricChart::corner();
        assert!(close(c.gaussian_curvature([1.0, 1.0]).unwrap(), 0.5, 1e-12));
        assert!(close(c.gaussian_curvature([2.0, 0.5]).unwrap(), 2.5 / (4.0 * 4.0 * 0.25), 1e-12));
        let s = MetricChart::revolution(Profile::Sine, Coords::Polar);
        assert!(close(s.gaussian_curvature([PI / 4.0, 0.3]).unwrap(), 1.0, 1e-12));
        assert!(matches!(m.gaussian_curvature([1e-9, 0.0]), Err(GeoError::Unbounded(_))));
    }

    #[test]
    fn cartesian_round_sphere_is_constant_curvature() {
        let s = MetricChart::revolution(Profile::Sine, Coords::Cartesian);
        for p in [[0.3, 0.4], [1.0, -2.0], [1e-4, 2e-4]] {
            let k = s.local(p).unwrap().curvature();
            assert!(close(k, 1.0, 1e-8), "{p:?} {k}");
        }
        let c = MetricChart::revolution(Profile::Clifford, Coords::Cartesian);
        let r: f64 = 0.6;
        let expected = (3.0 - 2.0 * r * r) / (1.0 - r * r).powi(2);
        assert!(close(c.local([0.0, r]).unwrap().curvature(), expected, 1e-10));
    }

    #[test]
    fn whole_round_sphere() {
        let s = MetricChart::revolution(Profile::Sine, Coords::Polar);
        let v = s.curvature_integral(&RegionSpec::SublevelDisk { radius: PI }, 1e-10).unwrap();
        assert!(close(v.value().unwrap(), 4.0 * PI, 1e-8));
    }

    #[test]
    fn clifford_sublevel_closed_form() {
        let s = MetricChart::revolution(Profile::Clifford, Coords::Polar);
        let mut last = 0.0;
        for r0 in [0.05, 0.1, 0.3, 0.6, 0.9] {
            let v = s.curvature_integral(&RegionSpec::SublevelDisk { radius: r0 }, 1e-11).unwrap().value().unwrap();
            let (_, d1, _) = Profile::Clifford.derivs(r0).unwrap();
            assert!(close(v, 2.0 * PI * (1.0 - d1), 1e-8), "{r0}");
            assert!(v > last);
            last = v;
        }
        assert!(s.curvature_integral(&RegionSpec::SublevelDisk { radius: 1.0 }, 1e-9).unwrap().is_unbounded());
    }

    #[test]
    fn lemma_disk_diverges() {
        let m = MetricChart::model(1.0, Coords::Polar);
        let a = 0.5;
        let v = m.curvature_integral(&RegionSpec::ChartDisk { center: [a, 0.0], radius: a }, 1e-9).unwrap();
        assert!(v.is_unbounded(), "{v:?}");
        let inside = m.curvature_integral(&RegionSpec::ChartDisk { center: [a, 0.0], radius: 0.9 * a }, 1e-9).unwrap();
        assert!(inside.value().unwrap() > 0.0);
    }

    #[test]
    fn gauss_bonnet_examples() {
        let s = MetricChart::revolution(Profile::Sine, Coords::Polar);
        let r = s.gauss_bonnet_residual(&RegionSpec::SublevelDisk { radius: PI / 3.0 }, 1e-11).unwrap();
        assert!(r.abs() < 1e-8, "{r}");
        let c = MetricChart::revolution(Profile::Clifford, Coords::Polar);
        let r = c.gauss_bonnet_residual(&RegionSpec::SublevelDisk { radius: 0.01 }, 1e-11).unwrap();
        assert!(r.abs() < 1e-8, "{r}");
        let q = MetricChart::product_square();
        let r = q.gauss_bonnet_residual(&RegionSpec::ChartDisk { center: [0.0, 0.0], radius: 0.3 }, 1e-11).unwrap();
        assert!(r.abs() < 1e-8, "{r}");
    }

    #[test]
    fn declared_symmetries_are_isometries() {
        let charts = [
            MetricChart::product_square(),
            MetricChart::product_triangle(),
            MetricChart::product_hexagon(),
            MetricChart::revolution(Profile::Clifford, Coords::Cartesian),
            MetricChart::revolution(Profile::Clifford, Coords::Polar),
            MetricChart::corner(),
            MetricChart::neck(PI, false),
        ];
        for ch in &charts {
            let c = ch.center();
            let p = [c[0] + 0.11, c[1] + 0.07];
            for g in &ch.symmetry {
                assert!(ch.isometry_defect(g, p).unwrap() < 1e-12, "{} {g:?}", ch.id);
            }
        }
    }
}
