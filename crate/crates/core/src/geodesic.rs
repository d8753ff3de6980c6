//! Unit-speed geodesics on a chart: an 8(5,3) Dormand–Prince integrator with
//! event location and conserved-quantity monitoring.

use crate::error::{GeoError, Result};
use crate::metric::{ChartKind, Coords, MetricChart};
use serde::Serialize;
use std::sync::Arc;

/// Integration halts when the metric determinant drops below this value.
pub const DET_GUARD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub p: [f64; 2],
    pub v: [f64; 2],
    pub s: f64,
}

impl GeodesicState {
    /// State at `p` moving along chart direction `dir`, scaled to unit speed.
    pub fn unit(chart: &MetricChart, p: [f64; 2], dir: [f64; 2]) -> Result<Self> {
        let n = chart.norm(p, dir)?;
        if !(n > 0.0) {
            return Err(GeoError::Degenerate("zero initial velocity".into()));
        }
        Ok(GeodesicState { p, v: [dir[0] / n, dir[1] / n], s: 0.0 })
    }

    pub fn reversed(&self) -> Self {
        GeodesicState { p: self.p, v: [-self.v[0], -self.v[1]], s: 0.0 }
    }

    fn to_vec(self) -> [f64; 4] {
        [self.p[0], self.p[1], self.v[0], self.v[1]]
    }

    fn from_vec(y: [f64; 4], s: f64) -> Self {
        GeodesicState { p: [y[0], y[1]], v: [y[2], y[3]], s }
    }
}

/// Sign-change trigger on a scalar function of the state.
#[derive(Clone)]
pub struct Event {
    pub id: String,
    pub g: Arc<dyn Fn(&GeodesicState) -> f64 + Send + Sync>,
    /// `+1` rising only, `-1` falling only, `0` both.
    pub direction: i8,
    pub terminal: bool,
}

impl std::fmt::Debug for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Event").field("id", &self.id).field("terminal", &self.terminal).finish()
    }
}

impl Event {
    pub fn new<F: Fn(&GeodesicState) -> f64 + Send + Sync + 'static>(id: &str, g: F) -> Self {
        Event { id: id.to_string(), g: Arc::new(g), direction: 0, terminal: true }
    }

    /// Crossing of the coordinate line `p[axis] = value`.
    pub fn coordinate(id: &str, axis: usize, value: f64) -> Self {
        Event::new(id, move |s| s.p[axis] - value)
    }

    /// Crossing of the chart line through `a` with normal `n`.
    pub fn line(id: &str, a: [f64; 2], n: [f64; 2]) -> Self {
        Event::new(id, move |s| (s.p[0] - a[0]) * n[0] + (s.p[1] - a[1]) * n[1])
    }

    /// Entry into the chart-distance band `delta` of the incomplete locus.
    pub fn locus_band(chart: &MetricChart, delta: f64) -> Self {
        let c = chart.clone();
        Event::new("locus", move |s| c.locus_distance(s.p) - delta).falling()
    }

    /// Zero of a velocity component.
    pub fn velocity(id: &str, axis: usize) -> Self {
        Event::new(id, move |s| s.v[axis])
    }

    pub fn rising(mut self) -> Self {
        self.direction = 1;
        self
    }

    pub fn falling(mut self) -> Self {
        self.direction = -1;
        self
    }

    pub fn non_terminal(mut self) -> Self {
        self.terminal = false;
        self
    }

    fn triggered(&self, g0: f64, g1: f64) -> bool {
        let up = g0 < 0.0 && g1 >= 0.0;
        let down = g0 > 0.0 && g1 <= 0.0;
        match self.direction {
            1 => up,
            -1 => down,
            _ => up || down,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Controls {
    pub max_length: f64,
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub events: Vec<Event>,
    /// Keep every accepted step (otherwise only the endpoints).
    pub record: bool,
}

impl Default for Controls {
    fn default() -> Self {
        Controls { max_length: 10.0, rtol: 1e-12, atol: 1e-13, h_max: 0.05, events: vec![], record: true }
    }
}

impl Controls {
    pub fn length(max_length: f64) -> Self {
        Controls { max_length, ..Default::default() }
    }

    pub fn with_event(mut self, e: Event) -> Self {
        self.events.push(e);
        self
    }

    pub fn sparse(mut self) -> Self {
        self.record = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Status {
    /// Reached `max_length`.
    Completed,
    /// Stopped at a terminal event.
    Event(String),
    /// Determinant guard or step underflow near the incomplete locus.
    Halted(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct EventHit {
    pub id: String,
    pub state: GeodesicState,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub samples: Vec<GeodesicState>,
    pub events: Vec<EventHit>,
    pub status: Status,
    /// Largest unit-speed defect seen before renormalisation.
    pub speed_defect: f64,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.samples.last().expect("trajectory has at least the start state")
    }

    pub fn length(&self) -> f64 {
        self.last().s - self.samples[0].s
    }

    pub fn event(&self, id: &str) -> Option<&EventHit> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| s.p).collect()
    }
}

/// Acceleration `-Γ(v, v)` at a state.
pub fn geodesic_rhs(chart: &MetricChart, state: &GeodesicState) -> Result<[f64; 2]> {
    let loc = chart.local(state.p)?;
    if loc.det < DET_GUARD {
        return Err(GeoError::OutsideDomain(state.p));
    }
    let g = loc.gamma_ab(state.v, state.v);
    Ok([-g[0], -g[1]])
}

fn rhs(chart: &MetricChart, y: &[f64; 4]) -> Option<[f64; 4]> {
    let st = GeodesicState::from_vec(*y, 0.0);
    geodesic_rhs(chart, &st).ok().map(|a| [y[2], y[3], a[0], a[1]])
}

mod tableau {
    pub const A: [&[f64]; 12] = [
        &[],
        &[5.26001519587677318785587544488E-2],
        &[1.97250569845378994544595329183E-2, 5.91751709536136983633785987549E-2],
        &[2.95875854768068491816892993775E-2, 0.0, 8.87627564304205475450678981324E-2],
        &[2.41365134159266685502369798665E-1, 0.0, -8.84549479328286085344864962717E-1, 9.24834003261792003115737966543E-1],
        &[3.7037037037037037037037037037E-2, 0.0, 0.0, 1.70828608729473871279604482173E-1, 1.25467687566822425016691814123E-1],
        &[3.7109375E-2, 0.0, 0.0, 1.70252211019544039314978060272E-1, 6.02165389804559606850219397283E-2, -1.7578125E-2],
        &[
            3.70920001185047927108779319836E-2,
            0.0,
            0.0,
            1.70383925712239993810214054705E-1,
            1.07262030446373284651809199168E-1,
            -1.53194377486244017527936158236E-2,
            8.27378916381402288758473766002E-3,
        ],
        &[
            6.24110958716075717114429577812E-1,
            0.0,
            0.0,
            -3.36089262944694129406857109825E0,
            -8.68219346841726006818189891453E-1,
            2.75920996994467083049415600797E1,
            2.01540675504778934086186788979E1,
            -4.34898841810699588477366255144E1,
        ],
        &[
            4.77662536438264365890433908527E-1,
            0.0,
            0.0,
            -2.48811461997166764192642586468E0,
            -5.90290826836842996371446475743E-1,
            2.12300514481811942347288949897E1,
            1.52792336328824235832596922938E1,
            -3.32882109689848629194453265587E1,
            -2.03312017085086261358222928593E-2,
        ],
        &[
            -9.3714243008598732571704021658E-1,
            0.0,
            0.0,
            5.18637242884406370830023853209E0,
            1.09143734899672957818500254654E0,
            -8.14978701074692612513997267357E0,
            -1.85200656599969598641566180701E1,
            2.27394870993505042818970056734E1,
            2.49360555267965238987089396762E0,
            -3.0467644718982195003823669022E0,
        ],
        &[
            2.27331014751653820792359768449E0,
            0.0,
            0.0,
            -1.05344954667372501984066689879E1,
            -2.00087205822486249909675718444E0,
            -1.79589318631187989172765950534E1,
            2.79488845294199600508499808837E1,
            -2.85899827713502369474065508674E0,
            -8.87285693353062954433549289258E0,
            1.23605671757943030647266201528E1,
            6.43392746015763530355970484046E-1,
        ],
    ];
    pub const B: [f64; 12] = [
        5.42937341165687622380535766363E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        4.45031289275240888144113950566E0,
        1.89151789931450038304281599044E0,
        -5.8012039600105847814672114227E0,
        3.1116436695781989440891606237E-1,
        -1.52160949662516078556178806805E-1,
        2.01365400804030348374776537501E-1,
        4.47106157277725905176885569043E-2,
    ];
    pub const BHH: [f64; 3] = [
        0.244094488188976377952755905512E+00,
        0.733846688281611857341361741547E+00,
        0.220588235294117647058823529412E-01,
    ];
    pub const ER: [f64; 12] = [
        0.1312004499419488073250102996E-01,
        0.0,
        0.0,
        0.0,
        0.0,
        -0.1225156446376204440720569753E+01,
        -0.4957589496572501915214079952E+00,
        0.1664377182454986536961530415E+01,
        -0.3503288487499736816886487290E+00,
        0.3341791187130174790297318841E+00,
        0.8192320648511571246570742613E-01,
        -0.2235530786388629525884427845E-01,
    ];
}

/// One DOP853 step of `y' = f(y)`; returns the new state and the scaled
/// error norm.
pub fn dop853_step<const N: usize, F: FnMut(&[f64; N]) -> Option<[f64; N]>>(
    f: &mut F,
    y: &[f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
) -> Option<([f64; N], f64)> {
    use tableau::*;
    let mut k = [[0.0; N]; 12];
    k[0] = f(y)?;
    for i in 1..12 {
        let mut yi = *y;
        for (j, a) in A[i].iter().enumerate() {
            if *a != 0.0 {
                for m in 0..N {
                    yi[m] += h * a * k[j][m];
                }
            }
        }
        k[i] = f(&yi)?;
    }
    let mut yn = *y;
    let mut err = 0.0;
    let mut err2 = 0.0;
    for m in 0..N {
        let mut inc = 0.0;
        let mut e = 0.0;
        for i in 0..12 {
            inc += B[i] * k[i][m];
            e += ER[i] * k[i][m];
        }
        yn[m] = y[m] + h * inc;
        let e2 = inc - BHH[0] * k[0][m] - BHH[1] * k[8][m] - BHH[2] * k[11][m];
        let sk = atol + rtol * y[m].abs().max(yn[m].abs());
        err += (e / sk).powi(2);
        err2 += (e2 / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let norm = h.abs() * err * (1.0 / (N as f64 * deno)).sqrt();
    Some((yn, norm))
}

/// Result of [`solve`]: final time and state, and whether the event fired.
#[derive(Clone, Debug)]
pub struct OdeRun<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub hit: bool,
}

/// Adaptive DOP853 solve of an autonomous system from `t = 0` up to `t_max`,
/// stopping at the first falling zero of `event` located by bisection.
pub fn solve<const N: usize, F, G>(mut f: F, y0: [f64; N], t_max: f64, h_max: f64, tol: f64, event: G) -> Result<OdeRun<N>>
where
    F: FnMut(&[f64; N]) -> Option<[f64; N]>,
    G: Fn(&[f64; N]) -> f64,
{
    let mut y = y0;
    let mut t = 0.0;
    let mut h = h_max.min(1e-2);
    let mut g0 = event(&y);
    while t < t_max {
        if h < 1e-14 {
            return Err(GeoError::Integration(format!("step size underflow at t = {t}")));
        }
        let hs = h.min(t_max - t);
        let Some((yn, err)) = dop853_step(&mut f, &y, hs, tol, tol) else {
            h *= 0.25;
            continue;
        };
        if !(err <= 1.0) {
            h *= if err.is_finite() { (0.9 * err.powf(-1.0 / 8.0)).max(0.2) } else { 0.2 };
            continue;
        }
        let g1 = event(&yn);
        if g0 > 0.0 && g1 <= 0.0 {
            let (mut a, mut b) = (0.0, hs);
            let mut yb = yn;
            for _ in 0..200 {
                if b - a <= 1e-13 * hs.max(1.0) {
                    break;
                }
                let m = 0.5 * (a + b);
                let Some((ym, _)) = dop853_step(&mut f, &y, m, 1.0, 1.0) else { break };
                if event(&ym) > 0.0 {
                    a = m;
                } else {
                    b = m;
                    yb = ym;
                }
            }
            return Ok(OdeRun { t: t + b, y: yb, hit: true });
        }
        g0 = g1;
        y = yn;
        t += hs;
        h = (hs * (0.9 * err.max(1e-10).powf(-1.0 / 8.0)).clamp(0.333, 6.0)).min(h_max);
    }
    Ok(OdeRun { t, y, hit: false })
}

fn step4(chart: &MetricChart, y: &[f64; 4], h: f64, rtol: f64, atol: f64) -> Option<([f64; 4], f64)> {
    dop853_step(&mut |z: &[f64; 4]| rhs(chart, z), y, h, rtol, atol)
}

fn renormalize(chart: &MetricChart, y: &mut [f64; 4]) -> Option<f64> {
    let n = chart.norm([y[0], y[1]], [y[2], y[3]]).ok()?;
    if !(n > 0.0) {
        return None;
    }
    y[2] /= n;
    y[3] /= n;
    Some((n - 1.0).abs())
}

/// Integrate a unit-speed geodesic until the length budget, a terminal event,
/// or the determinant guard.
pub fn integrate(chart: &MetricChart, start: GeodesicState, controls: &Controls) -> Trajectory {
    let mut y = start.to_vec();
    let mut s = start.s;
    let s_end = start.s + controls.max_length;
    let mut samples = vec![start];
    let mut events = Vec::new();
    let mut defect = match renormalize(chart, &mut y) {
        Some(d) => d,
        None => {
            return Trajectory {
                samples,
                events,
                status: Status::Halted("invalid start".into()),
                speed_defect: f64::NAN,
            }
        }
    };
    let mut h = controls.h_max.min(0.01);
    let mut facold: f64 = 1e-4;
    let mut gvals: Vec<f64> = controls.events.iter().map(|e| (e.g)(&GeodesicState::from_vec(y, s))).collect();
    let status = loop {
        if s >= s_end - 1e-15 {
            break Status::Completed;
        }
        if h < 1e-14 {
            break Status::Halted("step size underflow".into());
        }
        let hs = h.min(s_end - s);
        let Some((mut yn, err)) = step4(chart, &y, hs, controls.rtol, controls.atol) else {
            h *= 0.25;
            continue;
        };
        if !(err <= 1.0) {
            let fac = if err.is_finite() { (0.9 * err.powf(-1.0 / 8.0)).max(0.2) } else { 0.2 };
            h *= fac;
            continue;
        }
        let Some(d) = renormalize(chart, &mut yn) else {
            h *= 0.25;
            continue;
        };
        defect = defect.max(d);
        let sn = s + hs;
        let new_state = GeodesicState::from_vec(yn, sn);
        match chart.local(new_state.p) {
            Ok(loc) if loc.det >= DET_GUARD => {}
            _ => {
                break Status::Halted("metric determinant below guard".into());
            }
        }
        // first triggered event within the step
        let mut hit: Option<(usize, f64, [f64; 4])> = None;
        for (i, ev) in controls.events.iter().enumerate() {
            let g1 = (ev.g)(&new_state);
            if ev.triggered(gvals[i], g1) {
                if let Some((tau, ye)) = locate(chart, ev, &y, s, gvals[i], g1, hs) {
                    if hit.map(|(_, t, _)| tau < t).unwrap_or(true) {
                        hit = Some((i, tau, ye));
                    }
                }
            }
        }
        if let Some((i, tau, ye)) = hit {
            let ev = &controls.events[i];
            let st = GeodesicState::from_vec(ye, s + tau);
            events.push(EventHit { id: ev.id.clone(), state: st });
            if ev.terminal {
                samples.push(st);
                break Status::Event(ev.id.clone());
            }
        }
        for (i, ev) in controls.events.iter().enumerate() {
            gvals[i] = (ev.g)(&new_state);
        }
        y = yn;
        s = sn;
        if controls.record {
            samples.push(new_state);
        }
        // PI step control
        let beta = 0.04;
        let e = err.max(1e-10);
        let fac = (0.9 * e.powf(-1.0 / 8.0 + 0.2 * beta) * facold.powf(beta)).clamp(0.333, 6.0);
        facold = e.max(1e-4);
        h = (hs * fac).min(controls.h_max);
    };
    if !controls.record || samples.last().map(|l| l.s < s).unwrap_or(true) {
        if !matches!(status, Status::Event(_)) {
            samples.push(GeodesicState::from_vec(y, s));
        }
    }
    Trajectory { samples, events, status, speed_defect: defect }
}

/// Illinois iteration on the step size for a sign change inside a step.
fn locate(chart: &MetricChart, ev: &Event, y0: &[f64; 4], s0: f64, g0: f64, g1: f64, h: f64) -> Option<(f64, [f64; 4])> {
    let eval = |tau: f64| -> Option<(f64, [f64; 4])> {
        if tau <= 0.0 {
            return Some((g0, *y0));
        }
        let (mut y, _) = step4(chart, y0, tau, 1.0, 1.0)?;
        renormalize(chart, &mut y)?;
        Some(((ev.g)(&GeodesicState::from_vec(y, s0 + tau)), y))
    };
    let (mut a, mut fa) = (0.0, g0);
    let (mut b, mut fb) = (h, g1);
    let mut yb = eval(h)?.1;
    let mut side = 0;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let (fc, yc) = eval(c)?;
        if fc == 0.0 {
            return Some((c, yc));
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            yb = yc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < 1e-11 {
            break;
        }
    }
    Some((b, yb))
}

/// Conserved angular momentum `g(v, ∂_θ)` on rotationally symmetric charts.
pub fn clairaut_constant(chart: &MetricChart, state: &GeodesicState) -> Result<f64> {
    let coords = match &chart.kind {
        ChartKind::Revolution { coords, .. } | ChartKind::Model { coords, .. } => *coords,
        _ => return Err(GeoError::NotRevolution),
    };
    match coords {
        Coords::Polar => chart.inner(state.p, state.v, [0.0, 1.0]),
        Coords::Cartesian => chart.inner(state.p, state.v, [-state.p[1], state.p[0]]),
    }
}

/// Unit-speed defect `|g(v, v) − 1|`.
pub fn speed_defect(chart: &MetricChart, state: &GeodesicState) -> Result<f64> {
    Ok((chart.inner(state.p, state.v, state.v)? - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Coords, Profile};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn square_rhs_matches_closed_form() {
        let c = MetricChart::product_square();
        let st = GeodesicState::unit(&c, [0.0, 0.5], [1.0, 0.0]).unwrap();
        let a = geodesic_rhs(&c, &st).unwrap();
        let (x, y) = (st.p[0], st.p[1]);
        let (xd, yd) = (st.v[0], st.v[1]);
        let xdd = 2.0 * y / (1.0 - y * y) * xd * yd - x / (1.0 - y * y) * yd * yd;
        let ydd = -y / (1.0 - x * x) * xd * xd + 2.0 * x / (1.0 - x * x) * xd * yd;
        assert!((a[0] - xdd).abs() < 1e-14 && (a[1] - ydd).abs() < 1e-14);
        assert!(a[1] < 0.0);
    }

    #[test]
    fn critical_circle_is_invariant() {
        let c = MetricChart::revolution(Profile::Clifford, Coords::Polar);
        let st = GeodesicState::unit(&c, [FRAC_1_SQRT_2, 0.0], [0.0, 1.0]).unwrap();
        let tr = integrate(&c, st, &Controls::length(2.0 * PI));
        for s in &tr.samples {
            assert!((s.p[0] - FRAC_1_SQRT_2).abs() < 1e-8);
        }
        assert!((clairaut_constant(&c, &st).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn events_are_located() {
        let c = MetricChart::revolution(Profile::Sine, Coords::Polar);
        let st = GeodesicState::unit(&c, [0.3, 0.0], [1.0, 0.0]).unwrap();
        let tr = integrate(&c, st, &Controls::length(5.0).with_event(Event::coordinate("r1", 0, 1.0)));
        assert_eq!(tr.status, Status::Event("r1".into()));
        let hit = tr.event("r1").unwrap();
        assert!((hit.state.s - 0.7).abs() < 1e-10, "{}", hit.state.s);
    }

    #[test]
    fn reversibility() {
        let c = MetricChart::product_square();
        let st = GeodesicState::unit(&c, [0.1, 0.2], [0.3, 1.0]).unwrap();
        let tr = integrate(&c, st, &Controls::length(1.5));
        let back = integrate(&c, tr.last().reversed(), &Controls::length(1.5));
        let p = back.last().p;
        assert!((p[0] - 0.1).abs() < 1e-8 && (p[1] - 0.2).abs() < 1e-8);
    }

    #[test]
    fn halts_near_locus() {
        let c = MetricChart::revolution(Profile::Clifford, Coords::Polar);
        let st = GeodesicState::unit(&c, [0.5, 0.0], [1.0, 0.0]).unwrap();
        let tr = integrate(&c, st, &Controls::length(3.0).with_event(Event::locus_band(&c, 1e-6)));
        assert_eq!(tr.status, Status::Event("locus".into()));
        assert!((tr.last().p[0] - (1.0 - 1e-6)).abs() < 1e-9);
    }
}
