//! Randomized invariants across modules.

use geoflow::counterexample::{neck_period, neck_period_bound};
use geoflow::curve::DiscreteCurve;
use geoflow::expr::{Bindings, Expr};
use geoflow::flow::{enclosed_curvature, evolve, flow_for, total_geodesic_curvature, FlowControls};
use geoflow::geodesic::{clairaut_constant, integrate, Controls, GeodesicState};
use geoflow::metric::{Coords, MetricChart, Profile, RegionSpec};
use geoflow::period::PeriodProblem;
use geoflow::scalar::Jet2;
use geoflow::sweepout::{corner_chart, corner_loop_length, measured_corner_loop_length};
use geoflow::toric::{cp2_chart, DelzantPolygon};
use proptest::prelude::*;
use std::f64::consts::PI;

fn catalog() -> Vec<MetricChart> {
    vec![
        MetricChart::revolution(Profile::Sine, Coords::Cartesian),
        MetricChart::revolution(Profile::Clifford, Coords::Cartesian),
        MetricChart::revolution(Profile::Clifford, Coords::Polar),
        MetricChart::model(1.0, Coords::Cartesian),
        MetricChart::corner(),
        MetricChart::product_square(),
        MetricChart::product_triangle(),
        MetricChart::product_hexagon(),
        MetricChart::neck(PI, false),
        MetricChart::neck(PI, true),
        cp2_chart().unwrap(),
    ]
}

/// Map `(s, t) ∈ [0, 1]²` to an interior point at least `gap` from the locus, if one exists nearby.
fn interior(chart: &MetricChart, s: f64, t: f64, gap: f64) -> Option<[f64; 2]> {
    let c = chart.center();
    for scale in [1.0, 0.5, 0.25] {
        let p = [c[0] + scale * 4.0 * (s - 0.5), c[1] + scale * 4.0 * (t - 0.5)];
        if chart.in_domain(p) && chart.locus_distance(p) > gap && chart.boundary_distance(p) > gap {
            return Some(p);
        }
    }
    None
}

fn ellipse(c: [f64; 2], a: f64, b: f64, tilt: f64, n: usize) -> DiscreteCurve {
    let (s, co) = tilt.sin_cos();
    DiscreteCurve::from_fn(n, |t| {
        let (x, y) = (a * (2.0 * PI * t).cos(), b * (2.0 * PI * t).sin());
        [c[0] + co * x - s * y, c[1] + s * x + co * y]
    })
}

/// Random expression text in `r`, finite with finite derivatives on `r > 0`.
fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("r".to_string()),
        (0.5f64..2.0).prop_map(|v| format!("{v:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (1 + ({b})^2))")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("ln(1 + ({a})^2)")),
            inner.prop_map(|a| format!("({a})^2")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn expression_autodiff_matches_finite_differences(text in expr_text(), r in 0.2f64..2.0) {
        let e = Expr::parse(&text).unwrap();
        prop_assert_eq!(&Expr::parse(&e.to_string()).unwrap(), &e);
        let j = e.eval(&Bindings::r(Jet2::var_u(r))).unwrap();
        let f = |x: f64| e.eval_f64(&Bindings::r(x)).unwrap();
        let h = 1e-5;
        let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
        let scale = 1.0f64.max(j.v.abs()).max(j.du.abs()).max(j.duu.abs());
        prop_assert!((j.du - d1).abs() <= 1e-7 * scale, "{} f' {} vs {}", text, j.du, d1);
        let h = 1e-4;
        let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
        prop_assert!((j.duu - d2).abs() <= 1e-5 * scale, "{} f'' {} vs {}", text, j.duu, d2);
    }

    #[test]
    fn curvature_matches_finite_differences(i in 0usize..11, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let chart = &catalog()[i];
        if let Some(p) = interior(chart, s, t, 0.05) {
            let k = chart.gaussian_curvature(p).unwrap();
            let kf = chart.curvature_fd(p, 1e-4).unwrap();
            prop_assert!((k - kf).abs() <= 1e-4 * k.abs().max(1.0), "{} at {:?}: {} vs {}", chart.id, p, k, kf);
        }
    }

    #[test]
    fn declared_symmetries_are_isometries(i in 0usize..11, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let chart = &catalog()[i];
        if let Some(p) = interior(chart, s, t, 0.05) {
            for g in &chart.symmetry {
                if chart.in_domain(g.apply(p)) {
                    let d = chart.isometry_defect(g, p).unwrap();
                    prop_assert!(d <= 1e-10, "{} {:?}: {}", chart.id, p, d);
                }
            }
        }
    }

    #[test]
    fn sublevel_integral_matches_closed_form(r0 in 0.05f64..0.99, sine in any::<bool>()) {
        let (profile, r) = if sine { (Profile::Sine, r0 * PI) } else { (Profile::Clifford, r0) };
        let chart = MetricChart::revolution(profile.clone(), Coords::Polar);
        let q = chart.curvature_integral(&RegionSpec::SublevelDisk { radius: r }, 1e-10).unwrap().value().unwrap();
        let exact = 2.0 * PI * (profile.derivs(0.0).unwrap().1 - profile.derivs(r).unwrap().1);
        prop_assert!((q - exact).abs() < 1e-6, "{} vs {}", q, exact);
    }

    #[test]
    fn positive_curvature_charts(i in 0usize..3, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let chart = [
            MetricChart::product_square(),
            cp2_chart().unwrap(),
            MetricChart::revolution(Profile::Clifford, Coords::Cartesian),
        ][i].clone();
        if let Some(p) = interior(&chart, s, t, 1e-3) {
            prop_assert!(chart.gaussian_curvature(p).unwrap() > 0.0);
        }
    }

    #[test]
    fn geodesics_keep_unit_speed_and_reverse(i in 0usize..11, s in 0.0f64..1.0, t in 0.0f64..1.0, a in 0.0f64..(2.0 * PI)) {
        let chart = &catalog()[i];
        if let Some(p) = interior(chart, s, t, 0.1) {
            let st = GeodesicState::unit(chart, p, [a.cos(), a.sin()]).unwrap();
            let fwd = integrate(chart, st, &Controls::length(1.0));
            prop_assert!(!(fwd.speed_defect > 1e-8), "{}: {}", chart.id, fwd.speed_defect);
            let end = *fwd.samples.last().unwrap();
            let back = integrate(chart, end.reversed(), &Controls::length(end.s - st.s));
            let q = back.samples.last().unwrap().p;
            prop_assert!((q[0] - p[0]).hypot(q[1] - p[1]) < 1e-6, "{}: {:?} vs {:?}", chart.id, q, p);
        }
    }

    #[test]
    fn clairaut_constant_and_profile_bound(sine in any::<bool>(), r in 0.1f64..0.9, a in 0.0f64..(2.0 * PI)) {
        let profile = if sine { Profile::Sine } else { Profile::Clifford };
        let chart = MetricChart::revolution(profile.clone(), Coords::Polar);
        let r = r * profile.r_max();
        let st = GeodesicState::unit(&chart, [r, 0.3], [a.cos(), a.sin()]).unwrap();
        let c0 = clairaut_constant(&chart, &st).unwrap();
        for s in &integrate(&chart, st, &Controls::length(5.0)).samples {
            prop_assert!((clairaut_constant(&chart, s).unwrap() - c0).abs() <= 1e-8);
            prop_assert!(profile.eval(s.p[0]).unwrap() >= c0.abs() - 1e-10);
        }
    }

    #[test]
    fn discrete_gauss_bonnet_on_random_ellipses(cx in -0.2f64..0.2, cy in -0.2f64..0.2, a in 0.05f64..0.3, e in 0.3f64..1.0, tilt in 0.0f64..PI) {
        let chart = MetricChart::revolution(Profile::Clifford, Coords::Cartesian);
        let c = ellipse([cx, cy], a, a * e, tilt, 256);
        let q = enclosed_curvature(&chart, &c).unwrap().value().unwrap();
        let k = total_geodesic_curvature(&chart, &c).unwrap();
        prop_assert!((q + k - 2.0 * PI).abs() < 1e-9, "{} + {}", q, k);
    }

    #[test]
    fn period_bound_of_capped_neck(c in 0.01f64..0.99) {
        prop_assert!(neck_period(c).unwrap() < neck_period_bound(c));
    }

    #[test]
    fn toric_hessian_and_collar(s in 0.0f64..1.0, t in 0.0f64..1.0, d in -8.0f64..-1.0) {
        let poly = DelzantPolygon::preset("cp2").unwrap();
        let (x, y) = (s * (1.0 - t), t * (1.0 - s) * 0.999);
        if poly.contains([x, y]) && x > 0.0 && y > 0.0 && x + y < 1.0 {
            let h = poly.hessian_matrix([x, y]).unwrap();
            prop_assert!(h[0][0] > 0.0 && h[0][0] * h[1][1] - h[0][1] * h[1][0] > 0.0);
        }
        let eps = 10f64.powf(d);
        let v = poly.det_times_prod([eps, 0.5 * (1.0 - eps) * s + eps]).unwrap();
        prop_assert!(v > 0.0 && v.is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn period_quadrature_matches_geodesic_oracle(c in 0.03f64..0.47) {
        let pb = PeriodProblem::new(Profile::Clifford).unwrap();
        let q = pb.period(c).unwrap().omega;
        let o = pb.ode_period(c).unwrap();
        prop_assert!((q - o).abs() < 1e-5, "{} vs {}", q, o);
    }

    #[test]
    fn corner_loop_formula_matches_polyline(r in 0.05f64..0.99, th in 0.1f64..3.0) {
        let m = measured_corner_loop_length(&corner_chart(), r, th, 4096);
        prop_assert!((m - corner_loop_length(r, th)).abs() < 1e-5);
    }

    #[test]
    fn flow_shortens_and_keeps_loops_embedded(cx in -0.2f64..0.2, a in 0.3f64..0.45, e in 0.6f64..1.0, tilt in 0.0f64..PI) {
        let chart = MetricChart::revolution(Profile::Clifford, Coords::Cartesian);
        let c = ellipse([cx, 0.0], a, a * e, tilt, 64);
        let o = evolve(&chart, &c, &FlowControls { max_time: 0.3, ..Default::default() }).unwrap();
        prop_assert_eq!(o.length_increases, 0);
        let mut simple = true;
        flow_for(&chart, &c, 0.02, 0.2, |_, c| simple &= c.first_crossing().is_none()).unwrap();
        prop_assert!(simple);
    }

    #[test]
    fn model_chart_barrier(ax in 0.4f64..0.7, s in 0.25f64..0.35) {
        let chart = MetricChart::model(1.0, Coords::Cartesian);
        let barrier = ax + s.min(0.9 * ax);
        let mut rmax = 0.0f64;
        flow_for(&chart, &ellipse([ax, 0.0], s.min(0.9 * ax), s.min(0.9 * ax), 0.0, 64), 0.01, 0.2, |_, c| {
            rmax = c.vertices.iter().fold(rmax, |m, p| m.max(p[0].hypot(p[1])));
        }).unwrap();
        prop_assert!(rmax <= barrier + 1e-12);
    }
}
