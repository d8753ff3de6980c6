//! Period function of geodesics on surfaces of revolution, its endpoint
//! limits, critical circles and closed geodesics.

use crate::error::{GeoError, Result};
use crate::geodesic::{integrate, Controls, Event, GeodesicState};
use crate::metric::{Coords, MetricChart, Profile};
use crate::quad;
use serde::Serialize;
use std::f64::consts::PI;

const GRID: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodSample {
    pub c: f64,
    pub omega: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalCircle {
    pub r: f64,
    pub length: f64,
    pub maximum: bool,
}

/// Profile with cached extremum data.
#[derive(Clone, Debug)]
pub struct PeriodProblem {
    pub profile: Profile,
    pub r_max: f64,
    pub r_crit: f64,
    pub c_crit: f64,
    grid: Vec<(f64, f64)>,
}

fn f_of(p: &Profile, r: f64) -> f64 {
    p.eval(r).unwrap_or(f64::NAN)
}

fn df_of(p: &Profile, r: f64) -> f64 {
    p.derivs(r).map(|d| d.1).unwrap_or(f64::NAN)
}

/// All interior zeros of `f'` by sign scan and root refinement.
pub fn critical_circles(profile: &Profile) -> Result<Vec<CriticalCircle>> {
    let rm = profile.r_max();
    if !rm.is_finite() {
        return Ok(vec![]);
    }
    let n = GRID;
    let mut out = Vec::new();
    let mut prev = (rm * 1e-9, df_of(profile, rm * 1e-9));
    for i in 1..n {
        let r = rm * i as f64 / n as f64;
        let d = df_of(profile, r);
        if prev.1.is_finite() && d.is_finite() && (prev.1 > 0.0) != (d > 0.0) {
            let root = quad::brent(|x| df_of(profile, x), prev.0, r, 1e-15)?;
            let (f, _, f2) = profile.derivs(root)?;
            out.push(CriticalCircle { r: root, length: 2.0 * PI * f, maximum: f2 < 0.0 });
        }
        prev = (r, d);
    }
    Ok(out)
}

impl PeriodProblem {
    pub fn new(profile: Profile) -> Result<Self> {
        let r_max = profile.r_max();
        if !r_max.is_finite() {
            return Err(GeoError::InvalidParams("profile must close up at a finite r".into()));
        }
        let crit = critical_circles(&profile)?;
        let best = crit
            .iter()
            .filter(|c| c.maximum)
            .max_by(|a, b| a.length.total_cmp(&b.length))
            .ok_or_else(|| GeoError::InvalidParams("profile has no interior maximum".into()))?;
        let r_crit = best.r;
        let c_crit = f_of(&profile, r_crit);
        let grid = (1..GRID).map(|i| {
            let r = r_max * i as f64 / GRID as f64;
            (r, f_of(&profile, r))
        });
        let grid = std::iter::once((0.0, 0.0)).chain(grid).chain(std::iter::once((r_max, 0.0))).collect();
        Ok(PeriodProblem { profile, r_max, r_crit, c_crit, grid })
    }

    fn turning_point(&self, c: f64, left: bool) -> Result<f64> {
        let f = |r: f64| f_of(&self.profile, r) - c;
        let (a, b) = if left {
            let lo = self
                .grid
                .iter()
                .rev()
                .filter(|(r, _)| *r < self.r_crit)
                .find(|(_, v)| *v < c)
                .map(|p| p.0)
                .unwrap_or(0.0);
            (lo, self.r_crit)
        } else {
            let hi = self
                .grid
                .iter()
                .filter(|(r, _)| *r > self.r_crit)
                .find(|(_, v)| *v < c)
                .map(|p| p.0)
                .unwrap_or(self.r_max);
            (self.r_crit, hi)
        };
        let fa = if a == 0.0 { -c } else { f(a) };
        let fb = if b == self.r_max { -c } else { f(b) };
        let g = |r: f64| {
            if r <= 0.0 {
                -c
            } else if r >= self.r_max {
                fb.min(-c)
            } else {
                f(r)
            }
        };
        if (fa > 0.0) == (fb > 0.0) {
            return Err(GeoError::NoBracket(format!("turning point for c = {c}")));
        }
        let mut r = quad::brent(g, a, b, 1e-16)?;
        for _ in 0..3 {
            let Ok((fv, d1, _)) = self.profile.derivs(r) else { break };
            if !(d1.is_finite() && d1 != 0.0) {
                break;
            }
            let step = (fv - c) / d1;
            let rn = r - step;
            if !(rn > a.min(b) && rn < a.max(b)) || (f(rn)).abs() > (fv - c).abs() {
                break;
            }
            r = rn;
        }
        Ok(r)
    }

    /// `(f(r) − f(r_e)) / (r − r_e)` without cancellation near `r_e`.
    fn divided(&self, re: f64, fre: f64, d1: f64, d2: f64, dr: f64, scale: f64) -> f64 {
        if dr.abs() <= 1e-5 * scale {
            d1 + 0.5 * d2 * dr
        } else {
            (f_of(&self.profile, re + dr) - fre) / dr
        }
    }

    /// `∫ c / (f √(f² − c²)) dr` from `r_crit` to the turning point `re`.
    fn half(&self, c: f64, re: f64, tol: f64) -> Result<f64> {
        let rc = self.r_crit;
        let delta = re - rc;
        let (fre, d1, d2) = self.profile.derivs(re)?;
        let scale = delta.abs().min(re).min(self.r_max - re).max(1e-300);
        let integrand = |psi: f64| -> f64 {
            // r = rc + delta sin φ with ψ = π/2 − φ
            let s = (0.5 * psi).sin();
            let co = (0.5 * psi).cos();
            let dr = -delta * 2.0 * s * s;
            let r = re + dr;
            let f = f_of(&self.profile, r);
            let dd = self.divided(re, fre, d1, d2, dr, scale);
            // f(re) = c up to rounding; treating it as exact only perturbs c
            let fmc = dd * dr;
            if !(fmc > 0.0) {
                return 0.0;
            }
            let cosphi = 2.0 * s * co;
            c * delta.abs() * cosphi / (f * (fmc * (f + c)).sqrt())
        };
        quad::integrate(integrand, 0.0, PI / 2.0, tol * 0.1, tol)
    }

    pub fn period(&self, c: f64) -> Result<PeriodSample> {
        self.period_tol(c, 1e-11)
    }

    pub fn period_tol(&self, c: f64, tol: f64) -> Result<PeriodSample> {
        if !(c > 0.0 && c < self.c_crit) {
            return Err(GeoError::InvalidParams(format!("c = {c} outside (0, {})", self.c_crit)));
        }
        let r1 = self.turning_point(c, true)?;
        let r2 = self.turning_point(c, false)?;
        let omega = 2.0 * (self.half(c, r1, tol)? + self.half(c, r2, tol)?);
        Ok(PeriodSample { c, omega, r1, r2 })
    }

    /// Closed-form limits `(c → 0, c → c_crit)`.
    pub fn limits(&self) -> Result<(f64, f64)> {
        let d0 = df_of(&self.profile, 0.0);
        if (d0 - 1.0).abs() > 1e-6 {
            return Err(GeoError::InvalidParams(format!("f'(0) = {d0}, expected 1")));
        }
        let d_end = self.profile.derivs(self.r_max).map(|d| d.1).unwrap_or(f64::NEG_INFINITY);
        let d_end = if d_end.is_nan() { f64::NEG_INFINITY } else { d_end };
        let low = PI - PI / d_end;
        let (_, _, f2) = self.profile.derivs(self.r_crit)?;
        if f2.abs() < 1e-12 {
            return Err(GeoError::Degenerate("f''(r_crit) = 0".into()));
        }
        let high = 2.0 * PI / (-f2 * self.c_crit).sqrt();
        Ok((low, high))
    }

    /// Aitken-extrapolated period limits from geometric sequences of `c`.
    pub fn extrapolated_limits(&self) -> Result<(f64, f64)> {
        let low: Vec<f64> =
            (0..3).map(|k| self.period(self.c_crit * 1e-4 * 0.25f64.powi(k)).map(|s| s.omega)).collect::<Result<_>>()?;
        let high: Vec<f64> = (0..3)
            .map(|k| self.period(self.c_crit * (1.0 - 1e-3 * 0.5f64.powi(k))).map(|s| s.omega))
            .collect::<Result<_>>()?;
        Ok((quad::aitken(low[0], low[1], low[2]), quad::aitken(high[0], high[1], high[2])))
    }

    /// θ-advance between successive turning points from the geodesic ODE.
    pub fn ode_period(&self, c: f64) -> Result<f64> {
        let s = self.period(c)?;
        let chart = MetricChart::revolution(self.profile.clone(), Coords::Polar);
        let st = GeodesicState::unit(&chart, [s.r1, 0.0], [0.0, 1.0])?;
        let tr = integrate(&chart, st, &Controls::length(200.0).sparse().with_event(Event::velocity("turn", 0).falling()));
        let hit = tr.event("turn").ok_or_else(|| GeoError::Integration("no turning point reached".into()))?;
        Ok(2.0 * hit.state.p[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedRoot {
    pub c: f64,
    pub omega: f64,
    pub r1: f64,
    pub r2: f64,
    /// Phase-space distance after the θ-advance 2π.
    pub closure: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedSearch {
    pub limits: (f64, f64),
    pub roots: Vec<ClosedRoot>,
    /// Every sampled period equals 2π.
    pub degenerate: bool,
    pub report: String,
}

/// Roots of `Ω_c = 2π` bracketed on a grid of `c`.
pub fn find_closed_geodesic(profile: &Profile) -> Result<ClosedSearch> {
    let pb = PeriodProblem::new(profile.clone())?;
    let limits = pb.limits()?;
    let n = 64;
    let cs: Vec<f64> = (1..n).map(|i| pb.c_crit * i as f64 / n as f64).collect();
    let om: Vec<f64> = cs.iter().map(|&c| pb.period(c).map(|s| s.omega - 2.0 * PI)).collect::<Result<_>>()?;
    if om.iter().all(|v| v.abs() < 1e-8) {
        return Ok(ClosedSearch {
            limits,
            roots: vec![],
            degenerate: true,
            report: "degenerate family: every geodesic closes".into(),
        });
    }
    let mut roots = Vec::new();
    for i in 0..cs.len() - 1 {
        if (om[i] > 0.0) != (om[i + 1] > 0.0) {
            let c = quad::brent(|c| pb.period(c).map(|s| s.omega - 2.0 * PI).unwrap_or(f64::NAN), cs[i], cs[i + 1], 1e-14)?;
            let s = pb.period(c)?;
            let closure = closure_defect(&pb, &s)?;
            roots.push(ClosedRoot { c, omega: s.omega, r1: s.r1, r2: s.r2, closure });
        }
    }
    let report = if roots.is_empty() {
        let (lo, hi) = om.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(*v), a.1.max(*v)));
        format!("Ω − 2π stays in [{:.6}, {:.6}] on the grid; no sign change", lo, hi)
    } else {
        format!("{} root(s) bracketed", roots.len())
    };
    Ok(ClosedSearch { limits, roots, degenerate: false, report })
}

fn closure_defect(pb: &PeriodProblem, s: &PeriodSample) -> Result<f64> {
    let chart = MetricChart::revolution(pb.profile.clone(), Coords::Polar);
    let st = GeodesicState::unit(&chart, [s.r1, 0.0], [0.0, 1.0])?;
    let tr = integrate(
        &chart,
        st,
        &Controls::length(1000.0).sparse().with_event(Event::coordinate("theta", 1, 2.0 * PI)),
    );
    let hit = tr.event("theta").ok_or_else(|| GeoError::Integration("θ did not advance by 2π".into()))?;
    Ok((hit.state.p[0] - s.r1).abs() + (hit.state.v[0] - st.v[0]).abs() + (hit.state.v[1] - st.v[1]).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexClass {
    GreaterThanOne,
    One,
    Undetermined,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndexReport {
    pub length: f64,
    pub curvature: f64,
    pub l_sqrt_k: f64,
    pub class: IndexClass,
}

/// Classify the critical circle by `L √K` against 2π.
pub fn index_bound(profile: &Profile) -> Result<IndexReport> {
    let pb = PeriodProblem::new(profile.clone())?;
    let (_, _, f2) = profile.derivs(pb.r_crit)?;
    if f2.abs() < 1e-12 {
        return Err(GeoError::Degenerate("f''(r_crit) = 0".into()));
    }
    let length = 2.0 * PI * pb.c_crit;
    let curvature = -f2 / pb.c_crit;
    let l_sqrt_k = length * curvature.max(0.0).sqrt();
    let class = if (l_sqrt_k - 2.0 * PI).abs() < 1e-6 {
        IndexClass::Undetermined
    } else if l_sqrt_k > 2.0 * PI {
        IndexClass::GreaterThanOne
    } else {
        IndexClass::One
    };
    Ok(IndexReport { length, curvature, l_sqrt_k, class })
}

/// `r(1−r)(1+αr+βr²)` with period limits 5π/2 at `c → 0` and 3π/2 at the
/// maximum.
pub fn straddling_profile() -> Result<Profile> {
    let make = |beta: f64| {
        let alpha = -1.0 / 3.0 - beta;
        Profile::custom(&format!("r*(1-r)*(1+({alpha:?})*r+({beta:?})*r^2)"), 1.0)
    };
    let target = |beta: f64| -> f64 {
        let Ok(p) = make(beta) else { return f64::NAN };
        let Ok(pb) = PeriodProblem::new(p.clone()) else { return f64::NAN };
        let f2 = p.derivs(pb.r_crit).map(|d| d.2).unwrap_or(f64::NAN);
        -f2 * pb.c_crit - 16.0 / 9.0
    };
    let beta = quad::brent(target, -3.0, -2.5, 1e-14)?;
    make(beta)
}

/// Two maxima separated by a minimum.
pub fn three_critical_profile() -> Profile {
    Profile::custom("sin(r)+0.2*sin(3*r)", PI).expect("valid expression")
}

/// Flat maximum with `L √K < 2π`.
pub fn flat_profile() -> Profile {
    Profile::custom("sin(r)+0.1*sin(3*r)", PI).expect("valid expression")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn round_sphere_periods() {
        let pb = PeriodProblem::new(Profile::Sine).unwrap();
        for c in [0.01, 0.3, 0.77, 0.999] {
            let s = pb.period(c).unwrap();
            assert!((s.omega - 2.0 * PI).abs() < 1e-9, "{c} {}", s.omega);
        }
        let (a, b) = pb.limits().unwrap();
        assert!((a - 2.0 * PI).abs() < 1e-9 && (b - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn clifford_limits() {
        let pb = PeriodProblem::new(Profile::Clifford).unwrap();
        assert!((pb.r_crit - FRAC_1_SQRT_2).abs() < 1e-12);
        let (a, b) = pb.limits().unwrap();
        assert!((a - PI).abs() < 1e-12 && (b - PI * SQRT_2).abs() < 1e-9);
        let (ea, eb) = pb.extrapolated_limits().unwrap();
        assert!((ea - PI).abs() < 1e-3, "{ea}");
        assert!((eb - PI * SQRT_2).abs() < 1e-3, "{eb}");
    }

    #[test]
    fn quadrature_matches_ode() {
        let pb = PeriodProblem::new(Profile::Clifford).unwrap();
        for c in [0.1, 0.3, 0.45] {
            let q = pb.period(c).unwrap().omega;
            let o = pb.ode_period(c).unwrap();
            assert!((q - o).abs() < 1e-5, "{c}: {q} vs {o}");
        }
    }

    #[test]
    fn index_examples() {
        let r = index_bound(&Profile::Clifford).unwrap();
        assert_eq!(r.class, IndexClass::GreaterThanOne);
        assert!((r.l_sqrt_k - 2.0 * PI * SQRT_2).abs() < 1e-9);
        assert_eq!(index_bound(&Profile::Sine).unwrap().class, IndexClass::Undetermined);
        let flat = index_bound(&flat_profile()).unwrap();
        assert_eq!(flat.class, IndexClass::One);
        assert!((flat.l_sqrt_k - 0.6 * PI).abs() < 1e-9);
    }

    #[test]
    fn critical_circle_counts() {
        let c = critical_circles(&Profile::Clifford).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].length - PI).abs() < 1e-12);
        assert_eq!(critical_circles(&three_critical_profile()).unwrap().len(), 3);
    }

    #[test]
    fn straddling_profile_has_closed_geodesic() {
        let p = straddling_profile().unwrap();
        let res = find_closed_geodesic(&p).unwrap();
        assert!((res.limits.0 - 2.5 * PI).abs() < 1e-6, "{:?}", res.limits);
        assert!((res.limits.1 - 1.5 * PI).abs() < 1e-6, "{:?}", res.limits);
        assert!(!res.roots.is_empty(), "{}", res.report);
        for r in &res.roots {
            assert!((r.omega - 2.0 * PI).abs() < 1e-6);
            assert!(r.closure < 1e-5, "{}", r.closure);
        }
        let none = find_closed_geodesic(&Profile::Clifford).unwrap();
        assert!(none.roots.is_empty());
        assert!(find_closed_geodesic(&Profile::Sine).unwrap().degenerate);
    }
}
