//! Oriented polylines on a chart and their discrete geodesic curvature.

use crate::error::{GeoError, Result};
use crate::metric::MetricChart;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCurve {
    pub vertices: Vec<[f64; 2]>,
    pub closed: bool,
}

impl DiscreteCurve {
    pub fn new(vertices: Vec<[f64; 2]>, closed: bool) -> Self {
        DiscreteCurve { vertices, closed }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Closed curve sampled from a parametrisation on [0, 1).
    pub fn from_fn<F: Fn(f64) -> [f64; 2]>(n: usize, f: F) -> Self {
        let vertices = (0..n).map(|i| f(i as f64 / n as f64)).collect();
        DiscreteCurve { vertices, closed: true }
    }

    fn idx(&self, i: isize) -> usize {
        let n = self.vertices.len() as isize;
        (((i % n) + n) % n) as usize
    }

    pub fn vertex(&self, i: isize) -> [f64; 2] {
        self.vertices[self.idx(i)]
    }

    /// Signed area in chart coordinates (positive for counterclockwise).
    pub fn chart_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        DiscreteCurve { vertices: v, closed: self.closed }
    }

    /// Orient a closed curve counterclockwise in the chart.
    pub fn ccw(mut self) -> Self {
        if self.chart_area() < 0.0 {
            self.vertices.reverse();
        }
        self
    }

    pub fn segments(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }

    /// Metric length of the segment from vertex `i` to `i + 1`, measured
    /// with Gauss–Legendre along the chart chord.
    pub fn segment_length(&self, chart: &MetricChart, i: usize) -> f64 {
        let p = self.vertices[i];
        let q = self.vertices[(i + 1) % self.vertices.len()];
        chart.chord_length(p, q)
    }

    pub fn length(&self, chart: &MetricChart) -> f64 {
        (0..self.segments()).map(|i| self.segment_length(chart, i)).sum()
    }

    /// Curvature vector (chart components) at vertex `i` from a quadratic
    /// fit through the neighbours, parametrised by metric chord length.
    pub fn curvature_vector(&self, chart: &MetricChart, i: usize) -> Result<[f64; 2]> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(GeoError::Degenerate("curve needs at least three vertices".into()));
        }
        if !self.closed && (i == 0 || i + 1 >= n) {
            return Err(GeoError::Degenerate("curvature undefined at an open end".into()));
        }
        let pm = self.vertex(i as isize - 1);
        let p0 = self.vertices[i];
        let pp = self.vertex(i as isize + 1);
        let h1 = chart.chord_length(pm, p0);
        let h2 = chart.chord_length(p0, pp);
        if !(h1 > 0.0 && h2 > 0.0) {
            return Err(GeoError::Degenerate(format!("zero-length segment at vertex {i}")));
        }
        let loc = chart.local(p0)?;
        let s = h1 + h2;
        let mut x1 = [0.0; 2];
        let mut x2 = [0.0; 2];
        for k in 0..2 {
            x1[k] = -h2 / (h1 * s) * pm[k] + (h2 - h1) / (h1 * h2) * p0[k] + h1 / (h2 * s) * pp[k];
            x2[k] = 2.0 * (pm[k] / (h1 * s) - p0[k] / (h1 * h2) + pp[k] / (h2 * s));
        }
        let gam = loc.gamma;
        let mut a = x2;
        for k in 0..2 {
            for a_ in 0..2 {
                for b in 0..2 {
                    a[k] += gam[k][a_][b] * x1[a_] * x1[b];
                }
            }
        }
        let vv = loc.inner(x1, x1);
        let av = loc.inner(a, x1);
        Ok([(a[0] - av / vv * x1[0]) / vv, (a[1] - av / vv * x1[1]) / vv])
    }

    /// Signed geodesic curvature at vertex `i` (positive when the curve
    /// turns left, so a convex counterclockwise loop has k > 0).
    pub fn geodesic_curvature(&self, chart: &MetricChart, i: usize) -> Result<f64> {
        let kv = self.curvature_vector(chart, i)?;
        let t = self.tangent(i);
        let loc = chart.local(self.vertices[i])?;
        let nrm = loc.left_normal(t);
        Ok(loc.inner(kv, nrm))
    }

    /// Chart-space central difference tangent at vertex `i`.
    pub fn tangent(&self, i: usize) -> [f64; 2] {
        let n = self.vertices.len();
        let (a, b) = if self.closed {
            (self.vertex(i as isize - 1), self.vertex(i as isize + 1))
        } else if i == 0 {
            (self.vertices[0], self.vertices[1])
        } else if i + 1 >= n {
            (self.vertices[n - 2], self.vertices[n - 1])
        } else {
            (self.vertices[i - 1], self.vertices[i + 1])
        };
        [b[0] - a[0], b[1] - a[1]]
    }

    /// True when no two non-adjacent segments cross.
    pub fn is_simple(&self) -> bool {
        self.first_crossing().is_none()
    }

    pub fn first_crossing(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let m = self.segments();
        if m < 3 {
            return None;
        }
        // bucket segments on a uniform grid to avoid the quadratic scan
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let cells = ((m as f64).sqrt().ceil() as usize).max(1);
        let w = [(hi[0] - lo[0]).max(1e-300) / cells as f64, (hi[1] - lo[1]).max(1e-300) / cells as f64];
        let cell = |x: f64, k: usize| (((x - lo[k]) / w[k]).floor().max(0.0) as usize).min(cells - 1);
        let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
        for s in 0..m {
            let a = self.vertices[s];
            let b = self.vertices[(s + 1) % n];
            let (i0, i1) = (cell(a[0].min(b[0]), 0), cell(a[0].max(b[0]), 0));
            let (j0, j1) = (cell(a[1].min(b[1]), 1), cell(a[1].max(b[1]), 1));
            for i in i0..=i1 {
                for j in j0..=j1 {
                    grid[i * cells + j].push(s);
                }
            }
        }
        for bucket in &grid {
            for (ii, &s) in bucket.iter().enumerate() {
                for &t in &bucket[ii + 1..] {
                    let (s, t) = (s.min(t), s.max(t));
                    if t == s + 1 || (self.closed && s == 0 && t == m - 1) {
                        continue;
                    }
                    let a = self.vertices[s];
                    let b = self.vertices[(s + 1) % n];
                    let c = self.vertices[t];
                    let d = self.vertices[(t + 1) % n];
                    if segments_cross(a, b, c, d) {
                        return Some((s, t));
                    }
                }
            }
        }
        None
    }
}

pub fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

/// Intersection parameter of two segments, if they cross.
pub fn segment_intersection(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> Option<[f64; 2]> {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [d[0] - c[0], d[1] - c[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den == 0.0 {
        return None;
    }
    let qp = [c[0] - a[0], c[1] - a[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / den;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some([a[0] + t * r[0], a[1] + t * r[1]])
    } else {
        None
    }
}
