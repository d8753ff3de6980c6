use super::*;

#[test]
fn period_below_bound_and_matches_shooting() {
    for i in 1..100 {
        let c = i as f64 / 100.0;
        let p = neck_period(c).unwrap();
        assert!(p < neck_period_bound(c), "c = {c}: {p}");
    }
    for c in [0.1, 0.5, 0.9] {
        let q = neck_period(c).unwrap();
        let s = neck_period_shooting(c).unwrap();
        assert!((q - s).abs() < 1e-8, "c = {c}: {q} vs {s}");
    }
    assert!((neck_period_bound(0.5) - 5.13).abs() < 5e-3);
    assert!(neck_period(1e-6).unwrap() < 1e-2);
}

#[test]
fn neck_length_from_margin() {
    assert!((choose_r(1.0).unwrap() - PI).abs() < 1e-15);
    assert!((choose_r(2.0).unwrap() - 2.0 * PI).abs() < 1e-15);
    assert!(choose_r(0.5).is_err());
    assert!((neck_period_bound(1.0) - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn random_geodesic_pairs_intersect_in_neck() {
    let rep = pairwise_intersections(choose_r(1.0).unwrap(), 200, 7).unwrap();
    assert_eq!(rep.intersecting, 200, "{:?}", rep.misses);
}

#[test]
fn caps_expel_geodesics() {
    for smooth in [false, true] {
        let rep = cap_escape_check(PI, smooth, 1000, 3).unwrap();
        assert_eq!(rep.turning_inward, 1000, "{rep:?}");
        assert_eq!(rep.trapped, 0, "{rep:?}");
        assert!(rep.meridian_drift < 1e-12, "{rep:?}");
    }
}

#[test]
fn no_closed_geodesic_evidence() {
    let r = choose_r(1.0).unwrap();
    let rep = demonstrate_no_closed_geodesic(r, [12, 12]).unwrap();
    let OutcomeKind::DoubledArc { theta1, theta2 } = rep.flow.outcome.kind else { panic!("{:?}", rep.flow.outcome.kind) };
    let mut t = [theta1, theta2];
    t.sort_by(f64::total_cmp);
    assert!((t[0] + FRAC_PI_2).abs() < 0.05 && (t[1] - FRAC_PI_2).abs() < 0.05, "{t:?}");
    assert!(rep.classification_stable);
    assert!(rep.flow.outcome.enclosed_drift < 1e-3);
    assert_eq!(rep.flow.outcome.length_increases, 0);
    assert!(rep.flow.max_extent <= rep.flow.initial_extent + 1e-9);
    assert_eq!(rep.shooting.vertical_tangencies, 0);
    assert!(rep.shooting.min_return_distance > 1e-2, "{:?}", rep.shooting);
}
