//! Scale-invariant static profiles on the model chart `dr² + r dθ²`.

use crate::error::{GeoError, Result};
use crate::geodesic::solve;
use serde::Serialize;

/// Solution of the static ODE launched at `r = a, θ = b, ṙ = 1, θ̇ = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct StaticProfile {
    pub a: f64,
    pub b: f64,
    /// Sampled `(r, θ)` from the `s < 0` end to the `s > 0` end.
    pub curve: Vec<[f64; 2]>,
    /// Angle with the ray `θ = 0` at the `s > 0` end.
    pub alpha: f64,
    /// Angle with the ray `θ = 0` at the `s < 0` end.
    pub beta: f64,
    /// `∫K dA` over the region between the profile and `θ = 0`.
    pub enclosed: f64,
    /// `∫k ds` along the profile.
    pub total_k: f64,
    /// Smallest `ṙ` (normalised by the speed) along the profile.
    pub min_rdot: f64,
}

/// State `(r, θ, ṙ, θ̇, ∫K, ∫k)`.
fn rhs(y: &[f64; 6]) -> Option<[f64; 6]> {
    let [r, th, rd, thd, _, _] = *y;
    if !(r > 0.0) {
        return None;
    }
    let rdd = th * rd * thd / (4.0 * r);
    let thdd = -(2.0 * r * rd * thd + th * rd * rd) / (4.0 * r * r);
    // geodesic curvature in the model metric: √det (ẋ × (ẍ + Γ(ẋ,ẋ))) / |ẋ|³
    let (g_rr, g_tt) = (1.0, r);
    let speed2 = g_rr * rd * rd + g_tt * thd * thd;
    let ar = rdd - 0.5 * thd * thd;
    let at = thdd + rd * thd / r;
    let k = r.sqrt() * (rd * at - thd * ar) / speed2.powf(1.5);
    Some([rd, thd, rdd, thdd, th * rd * r.powf(-1.5) / 4.0, k * speed2.sqrt()])
}

fn run(a: f64, b: f64, dir: f64, samples: &mut Vec<[f64; 2]>) -> Result<([f64; 6], f64)> {
    let mut y = [a, b, dir, 0.0, 0.0, 0.0];
    let mut min_rdot = f64::INFINITY;
    let chunk = 0.05 * (1.0 + a);
    let mut total = 0.0;
    samples.push([a, b]);
    loop {
        let res = solve(rhs, y, chunk, chunk, 1e-12, |z: &[f64; 6]| z[1])?;
        y = res.y;
        total += res.t;
        let speed = (y[2] * y[2] + y[0] * y[3] * y[3]).sqrt();
        min_rdot = min_rdot.min(dir * y[2] / speed);
        samples.push([y[0], y[1]]);
        if res.hit {
            return Ok((y, min_rdot));
        }
        if total > 1e4 * (1.0 + a + b.abs()) {
            return Err(GeoError::Integration(format!("static profile ({a}, {b}) did not reach θ = 0")));
        }
    }
}

/// Integrate the static profile `ξ_{a,b}` in both directions to `θ = 0`.
pub fn static_profile(a: f64, b: f64) -> Result<StaticProfile> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(GeoError::InvalidParams(format!("static profile needs a > 0 and b > 0, got ({a}, {b})")));
    }
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    let (yf, mf) = run(a, b, 1.0, &mut fwd)?;
    let (yb, mb) = run(a, b, -1.0, &mut bwd)?;
    let angle = |y: &[f64; 6], dir: f64| {
        let speed = (y[2] * y[2] + y[0] * y[3] * y[3]).sqrt();
        (dir * y[2] / speed).clamp(-1.0, 1.0).acos()
    };
    bwd.reverse();
    bwd.pop();
    bwd.extend(fwd);
    Ok(StaticProfile {
        a,
        b,
        curve: bwd,
        alpha: angle(&yf, 1.0),
        beta: angle(&yb, -1.0),
        enclosed: yf[4] - yb[4],
        total_k: yf[5] - yb[5],
        min_rdot: mf.min(mb),
    })
}
