use super::*;
use crate::metric::{Coords, Profile};

fn clifford() -> MetricChart {
    MetricChart::revolution(Profile::Clifford, Coords::Cartesian)
}

#[test]
fn flat_circle_total_curvature() {
    let chart = MetricChart::revolution(Profile::Linear, Coords::Cartesian);
    let c = DiscreteCurve::from_fn(200, |s| [0.3 + 0.2 * (2.0 * PI * s).cos(), 0.1 + 0.2 * (2.0 * PI * s).sin()]);
    let k = total_geodesic_curvature(&chart, &c).unwrap();
    assert!((k - 2.0 * PI).abs() < 1e-10, "{k}");
}

#[test]
fn stokes_matches_sublevel_disk() {
    let chart = clifford();
    let c = DiscreteCurve::from_fn(400, |s| [0.5 * (2.0 * PI * s).cos(), 0.5 * (2.0 * PI * s).sin()]);
    let q = enclosed_curvature(&chart, &c).unwrap().value().unwrap();
    // ∫K over r ≤ r0 is 2π(1 - f'(r0)) on the smooth disk
    let (_, fp, _) = Profile::Clifford.derivs(0.5).unwrap();
    let exact = 2.0 * PI * (1.0 - fp);
    assert!((q - exact).abs() < 1e-3, "{q} {exact}");
    let k = total_geodesic_curvature(&chart, &c).unwrap();
    assert!((q + k - 2.0 * PI).abs() < 1e-10, "discrete Gauss-Bonnet {q} {k}");
}

fn circle(c: [f64; 2], r: f64, n: usize) -> DiscreteCurve {
    DiscreteCurve::from_fn(n, |s| [c[0] + r * (2.0 * PI * s).cos(), c[1] + r * (2.0 * PI * s).sin()])
}

#[test]
fn model_circle_shrinks_exponentially() {
    let chart = MetricChart::model(1.0, Coords::Cartesian);
    let mut worst = 0.0f64;
    flow_for(&chart, &circle([0.0, 0.0], 1.0, 64), 2.0, 0.2, |t, c| {
        for p in &c.vertices {
            worst = worst.max((p[0].hypot(p[1]) - (-2.0 * t).exp()).abs());
        }
    })
    .unwrap();
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn revolution_circle_slope_grows_exponentially() {
    let chart = clifford();
    let r0 = 0.6;
    let fp0 = Profile::Clifford.derivs(r0).unwrap().1;
    let mut worst = 0.0f64;
    flow_for(&chart, &circle([0.0, 0.0], r0, 400), 0.8, 0.2, |t, c| {
        for p in &c.vertices {
            let fp = Profile::Clifford.derivs(p[0].hypot(p[1])).unwrap().1;
            worst = worst.max((fp - fp0 * t.exp()).abs());
        }
    })
    .unwrap();
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn corner_level_set_stays_between_bounds() {
    let chart = MetricChart::corner();
    let eps = 0.01f64;
    let n = 81;
    let (u0, u1) = (1e-3f64.ln(), 10f64.ln());
    let v = (0..n)
        .map(|i| {
            let x = (u0 + (u1 - u0) * i as f64 / (n - 1) as f64).exp();
            [x, eps / x]
        })
        .collect();
    let mut ok = true;
    flow_for(&chart, &DiscreteCurve::new(v, false), 1.0, 0.2, |t, c| {
        for p in c.vertices.iter().filter(|p| p[0] > 0.03 && p[0] < 0.3) {
            let xy = p[0] * p[1];
            ok &= xy >= eps * (-2.0 * t).exp() * (1.0 - 1e-9) && xy <= eps * (-t).exp() * (1.0 + 1e-9);
        }
    })
    .unwrap();
    assert!(ok);
}

#[test]
fn total_curvature_grows_with_unit_exponent() {
    let chart = clifford();
    let c = disk_with_enclosed(&chart, [0.0, 0.0], 2.0 * PI - 0.05, 128).unwrap();
    let mut series = vec![(0.0, total_geodesic_curvature(&chart, &c).unwrap())];
    flow_for(&chart, &c, 1.0, 0.2, |t, c| series.push((t, total_geodesic_curvature(&chart, c).unwrap()))).unwrap();
    let n = series.len() as f64;
    let (mx, my) = series.iter().fold((0.0, 0.0), |a, s| (a.0 + s.0 / n, a.1 + s.1.ln() / n));
    let (num, den) = series.iter().fold((0.0, 0.0), |a, s| (a.0 + (s.0 - mx) * (s.1.ln() - my), a.1 + (s.0 - mx).powi(2)));
    let slope = num / den;
    assert!((slope - 1.0).abs() < 0.05, "{slope}");
}

#[test]
fn small_loop_on_model_chart_shrinks_to_point() {
    let chart = MetricChart::model(1.0, Coords::Cartesian);
    let o = evolve(&chart, &circle([1.0, 0.0], 0.5, 48), &FlowControls::default()).unwrap();
    assert!(matches!(o.kind, OutcomeKind::ShrunkToPoint { .. }), "{:?}", o.kind);
    assert_eq!(o.length_increases, 0);
}

#[test]
fn critical_circle_disk_is_closed_geodesic() {
    let chart = clifford();
    let c = disk_with_2pi(&chart, [0.0, 0.0]).unwrap();
    let o = evolve(&chart, &c, &FlowControls { max_time: 3.0, ..Default::default() }).unwrap();
    assert_eq!(o.kind, OutcomeKind::ClosedGeodesic);
    assert!((o.final_length - PI).abs() < 1e-3, "{}", o.final_length);
    let r = o.curve.vertices[0][0].hypot(o.curve.vertices[0][1]);
    assert!((r - 0.5f64.sqrt()).abs() < 1e-3, "{r}");
}

#[test]
fn ellipse_with_2pi_converges_to_critical_circle() {
    let chart = clifford();
    let f = |s: f64| {
        let c = DiscreteCurve::from_fn(128, |t| [s * 1.08 * (2.0 * PI * t).cos(), s / 1.08 * (2.0 * PI * t).sin()]);
        enclosed_curvature(&chart, &c).unwrap().value().unwrap() - 2.0 * PI
    };
    let s = crate::quad::brent(f, 0.3, 0.85, 1e-15).unwrap();
    let c = DiscreteCurve::from_fn(128, |t| [s * 1.08 * (2.0 * PI * t).cos(), s / 1.08 * (2.0 * PI * t).sin()]);
    let o = evolve(&chart, &c, &FlowControls { max_time: 15.0, ..Default::default() }).unwrap();
    assert_eq!(o.kind, OutcomeKind::ClosedGeodesic, "{o:?}");
    assert!((o.final_length - PI).abs() < 1e-3, "{}", o.final_length);
    assert!(o.enclosed_drift < 1e-3, "{}", o.enclosed_drift);
}

#[test]
fn neck_loop_becomes_doubled_vertical_arc() {
    let chart = MetricChart::neck(3.0, false);
    let c = disk_with_2pi_n(&chart, [0.0, PI / 2.0], 128).unwrap();
    let o = evolve(&chart, &c, &FlowControls { max_time: 40.0, ..Default::default() }).unwrap();
    let OutcomeKind::DoubledArc { theta1, theta2 } = o.kind else { panic!("{:?}", o.kind) };
    let mut t = [theta1, theta2];
    t.sort_by(f64::total_cmp);
    assert!((t[0] + PI / 2.0).abs() < 0.05 && (t[1] - PI / 2.0).abs() < 0.05, "{t:?}");
    assert!((o.final_length - 4.0).abs() < 0.05, "{}", o.final_length);
}

#[test]
fn loops_never_cross_outer_barrier_circle() {
    let chart = MetricChart::model(1.0, Coords::Cartesian);
    let mut rmax = 0.0f64;
    flow_for(&chart, &circle([0.5, 0.0], 0.3, 64), 0.05, 0.2, |_, c| {
        rmax = c.vertices.iter().fold(rmax, |m, p| m.max(p[0].hypot(p[1])));
    })
    .unwrap();
    assert!(rmax <= 0.8 + 1e-12, "{rmax}");
}

#[test]
fn static_profiles_enclose_alpha_plus_beta() {
    for (a, b) in [(1.0, 0.5), (1.0, 2.0), (0.3, 1.0), (2.0, 5.0)] {
        let p = static_profile(a, b).unwrap();
        assert!((p.enclosed - p.alpha - p.beta).abs() < 1e-3, "{a} {b}");
        assert!(p.total_k.abs() < 1e-4);
        assert!(p.min_rdot > 0.0);
        assert!(p.alpha > 0.0 && p.alpha <= PI / 2.0 && p.beta > 0.0 && p.beta <= PI / 2.0);
    }
    let p = static_profile(1.0, 50.0).unwrap();
    assert!((p.enclosed - PI).abs() < 0.05);
}

#[test]
fn disk_family_is_continuous_and_monotone() {
    let chart = clifford();
    let a = disk_with_2pi(&chart, [0.3, 0.1]).unwrap();
    let b = disk_with_2pi(&chart, [0.3 + 1e-6, 0.1]).unwrap();
    let ra = (a.vertices[0][0] - 0.3).hypot(a.vertices[0][1] - 0.1);
    let rb = (b.vertices[0][0] - 0.3 - 1e-6).hypot(b.vertices[0][1] - 0.1);
    assert!((ra - rb).abs() < 1e-4);
    let q = enclosed_curvature(&chart, &a).unwrap().value().unwrap();
    assert!((q - 2.0 * PI).abs() < 1e-4);
    let mut prev = 0.0;
    let cap = chart.locus_distance([0.3, 0.1]) * 0.999;
    for i in 1..40 {
        let v = enclosed_curvature(&chart, &circle([0.3, 0.1], cap * i as f64 / 40.0, 128)).unwrap().value().unwrap();
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn touching_disk_curvature_is_unbounded() {
    let chart = MetricChart::model(1.0, Coords::Polar);
    let a = 0.5;
    let q = |rho: f64| enclosed_curvature(&chart, &circle([a, 0.0], rho, 4096)).unwrap().value().unwrap();
    let (q1, q2, q3) = (q(a * 0.99), q(a * 0.9999), q(a * (1.0 - 1e-7)));
    assert!(q1 < q2 && q2 < q3 && q3 > 2.0 * PI, "{q1} {q2} {q3}");
    let touching = enclosed_curvature(&chart, &circle([a, 0.0], a, 64)).unwrap();
    assert!(touching.is_unbounded());
}

#[test]
fn boundary_arcs_and_long_arc_condition() {
    let chart = clifford();
    let arc = shortest_boundary_arc(&chart).unwrap();
    assert!((arc.length - 2.0).abs() < 1e-3);
    let rep = long_arc_test(&chart).unwrap();
    assert!(rep.long && (rep.family_max - PI).abs() < 1e-3);
}
