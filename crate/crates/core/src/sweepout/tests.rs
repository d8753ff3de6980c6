use super::*;

#[test]
fn corner_loop_closed_forms() {
    for r in [0.2, 0.5, 0.83, 0.97] {
        let full = 2.0 * PI * r * (1.0 - r * r).sqrt();
        assert!((corner_loop_length(r, PI) - full).abs() < 1e-14);
        let half = 2.0 * r + PI * r * (1.0 - r * r).sqrt();
        assert!((corner_loop_length(r, FRAC_PI_2) - half).abs() < 1e-14);
    }
}

#[test]
fn corner_loop_matches_measured_polyline() {
    let chart = corner_chart();
    for (r, t) in [(0.3, 0.4), (0.83, FRAC_PI_2), (0.6, 2.5), (0.95, 3.0)] {
        let m = measured_corner_loop_length(&chart, r, t, 4096);
        assert!((m - corner_loop_length(r, t)).abs() < 1e-5, "({r}, {t}): {m}");
    }
}

#[test]
fn corner_half_loop_peaks_near_083() {
    let (g, s) = corner_half_argmax().unwrap();
    assert!((s - 0.83).abs() < 1e-2, "{s}");
    assert!((g - s).abs() < 1e-8, "{g} vs {s}");
}

#[test]
fn disk_sweepouts_are_certified_and_decreasing() {
    let cs = [0.85, 0.9, 0.95, 0.99, 0.999];
    let seq = disk_minimax_sequence(&cs).unwrap();
    for s in &seq {
        assert!(s.disjoint, "c = {}", s.c);
        assert!(s.r0 > 0.0);
        assert_eq!(s.argmax, [s.c, FRAC_PI_2]);
        assert!((s.radius(PI) - 1.0).abs() < 1e-15);
        assert!((s.radius(FRAC_PI_2) - s.c).abs() < 1e-15);
    }
    assert_eq!(seq[1].argmax, [0.9, FRAC_PI_2]);
    let maxima: Vec<f64> = seq.iter().map(|s| s.max_length).collect();
    assert!(strictly_decreasing(&maxima), "{maxima:?}");
    assert!((maxima[4] - 2.0).abs() < 0.15);
    assert!((corner_loop_length(1.0, FRAC_PI_2) - 2.0).abs() < 1e-15);
}

#[test]
fn disk_sweepout_rejects_small_c() {
    assert!(disk_sweepout(0.7).is_err());
}

#[test]
fn hypotenuse_maximum_at_three_quarters() {
    let m = formula_maxima().unwrap();
    assert!((m.l_golden - m.l_stationary).abs() < 1e-8, "{m:?}");
    assert!((m.big_l_golden - m.big_l_stationary).abs() < 1e-8, "{m:?}");
    assert!((hypotenuse_length(0.75) - 0.75 * 0.375f64.sqrt()).abs() < 1e-15);
    assert!((hypotenuse_length(0.75) - 0.4593).abs() < 5e-5);
}

#[test]
fn big_l_derivative_blows_up_at_zero() {
    let mut prev = 0.0;
    for k in 2..12 {
        let a = 10f64.powi(-k);
        let d = big_l_prime(a);
        assert!(d > prev);
        prev = d;
        assert!(big_l(a) > hypotenuse_length(0.75));
        let h = 1e-3 * a;
        let fd = (big_l(a + h) - big_l(a - h)) / (2.0 * h);
        assert!((fd - d).abs() < 1e-6 * d.abs(), "{a}: {fd} vs {d}");
    }
    assert!(prev > 1e4);
    assert!((big_l(0.0) - hypotenuse_length(0.75)).abs() < 1e-15);
}

#[test]
fn leaf_formula_matches_projective_plane_chart() {
    let chart = crate::toric::cp2_chart().unwrap();
    for (p, q) in [(0.05, 0.75), (0.2, 0.6), (0.01, 0.9)] {
        let pts = triangle_leaf(p, q, 400);
        let n = pts.len();
        let m: f64 = (0..n).map(|i| chart.chord_length(pts[i], pts[(i + 1) % n])).sum();
        assert!((m - triangle_leaf_length(p, q)).abs() < 1e-6, "({p}, {q}): {m}");
    }
}

#[test]
fn triangle_sweepouts_peak_at_ta_and_decrease() {
    let a = halving_sequence(0.05, 6);
    let seq = triangle_minimax_sequence(&a).unwrap();
    for s in &seq {
        assert!(s.nested && s.disjoint, "a = {}", s.a);
        assert!(s.balance_residual < 1e-12);
        assert!((s.max_length - s.big_l).abs() < 1e-12, "a = {}: {} vs {}", s.a, s.max_length, s.big_l);
        assert_eq!(s.argmax, [s.a, 0.75]);
        assert_eq!(s.path[0], [0.0, 1.0]);
        let last = s.path.last().unwrap();
        assert!(last[1] - 2.0 * last[0] < 1e-9);
    }
    let maxima: Vec<f64> = seq.iter().map(|s| s.max_length).collect();
    assert!(strictly_decreasing(&maxima), "{maxima:?}");
    assert!(maxima[5] - hypotenuse_length(0.75) < 0.1);
}

#[test]
fn equal_shortest_paths_at_radius_one_tenth() {
    let e = equal_shortest_paths(0.1).unwrap();
    assert!((e.geodesic.length - 0.2).abs() < 1e-5, "{}", e.geodesic.length);
    assert!((e.radial_length - 0.2).abs() < 1e-12);
    assert!((e.geodesic_exact - 0.2).abs() < 1e-5);
    let (_, th) = model_chord_exact(0.1, e.geodesic.psi);
    assert!((th - e.geodesic.exit_theta).abs() < 1e-8);
    assert!(e.mirror_defect < 1e-3, "{}", e.mirror_defect);
    for c in &e.near {
        assert!(c.exit_theta > 0.0);
        assert!(c.length > 0.2, "ψ = {}: {}", c.psi, c.length);
    }
}

#[test]
fn exact_leaf_intersection_agrees_with_polylines() {
    let pairs = [([0.5, 1.0], [0.6, 0.8]), ([0.5, 1.0], [0.6, 1.2]), ([0.4, 2.0], [0.7, 2.5]), ([0.3, 0.2], [0.35, 0.1])];
    for (a, b) in pairs {
        let pa = corner_loop(a[0], a[1], 2000);
        let pb = corner_loop(b[0], b[1], 2000);
        assert_eq!(corner_loops_meet(a, b), loops_cross(&pa, &pb), "{a:?} {b:?}");
    }
    assert!(corner_loops_meet([0.5, 1.0], [0.6, 0.8]));
}
