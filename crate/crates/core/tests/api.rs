use chm_core::*;
use proptest::prelude::*;

fn set(points: &[&[f64]]) -> PointSet {
    PointSet::from_points(points).unwrap()
}

fn check_inside(out: &ChmOutcome, s: &PointSet, p: &[f64], eps: f64) {
    let Verdict::InsideApprox { iterate, residual } = &out.verdict else {
        panic!("expected inside, got {:?}", out.verdict.name());
    };
    let total: f64 = iterate.coeffs().iter().map(|c| c.1).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(iterate.coeffs().iter().all(|c| c.1 >= 0.0));
    let x = s.combine(iterate.coeffs());
    let r = x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    assert!((r - residual).abs() < 1e-9);
    assert!(r <= eps * out.radius + 1e-9);
}

fn check_outside(out: &ChmOutcome, s: &PointSet, p: &[f64]) {
    let Verdict::Witness { cert, .. } = &out.verdict else {
        panic!("expected witness, got {:?}", out.verdict.name());
    };
    assert!(cert.plane.strictly_separates(p, s, 1e-12));
}

#[test]
fn segment_midpoint() {
    let s = set(&[&[1.0, 0.0], &[-1.0, 0.0]]);
    let cfg = SolverConfig::new(0.01);
    for out in [solve_ta(&s, &[0.0, 0.0], &cfg).unwrap(), solve_spherical_ta(&s, &[0.0, 0.0], &cfg).unwrap()] {
        check_inside(&out, &s, &[0.0, 0.0], 0.01);
        assert!(out.iterations <= 2);
    }
}

#[test]
fn positive_quadrant_excludes_origin() {
    let s = set(&[&[1.0, 1.0], &[2.0, 1.0], &[1.0, 2.0]]);
    let cfg = SolverConfig::new(0.01);
    check_outside(&solve_ta(&s, &[0.0, 0.0], &cfg).unwrap(), &s, &[0.0, 0.0]);
    check_outside(&solve_spherical_ta(&s, &[0.0, 0.0], &cfg).unwrap(), &s, &[0.0, 0.0]);
}

#[test]
fn triangle_around_origin() {
    let s = set(&[&[1.0, 0.0], &[0.0, 2.0], &[-1.0, -1.0]]);
    for eps in [0.1, 0.01, 1e-4] {
        let cfg = SolverConfig::new(eps);
        check_inside(&solve_spherical_ta(&s, &[0.0, 0.0], &cfg).unwrap(), &s, &[0.0, 0.0], eps);
        check_inside(&solve_ta(&s, &[0.0, 0.0], &cfg).unwrap(), &s, &[0.0, 0.0], eps);
    }
}

#[test]
fn query_in_set() {
    let s = set(&[&[3.0, 1.0], &[0.0, 2.0]]);
    let out = solve_ta(&s, &[0.0, 2.0], &SolverConfig::new(0.01)).unwrap();
    assert_eq!(out.iterations, 0);
    check_inside(&out, &s, &[0.0, 2.0], 0.01);
}

#[test]
fn traces_follow_envelope() {
    let s = set(&[&[1.0, 0.2], &[-0.7, 0.9], &[-0.4, -1.3], &[0.5, -0.6]]);
    let cfg = SolverConfig::new(1e-3).with_trace(true);
    let out = solve_spherical_ta(&s, &[0.05, 0.02], &cfg).unwrap();
    let trace = out.trace.unwrap();
    for (k, w) in trace.deltas.windows(2).enumerate() {
        assert!(w[1] < w[0]);
        assert!(w[1] <= worst_case_delta_bound(k as u64 + 1) + 1e-12);
    }
}

#[test]
fn strict_lp_small() {
    // x < 1 and -x < 0.
    let inst = StrictLpInstance::new(2, 1, vec![1.0, -1.0], vec![1.0, 0.0]).unwrap();
    match solve_strict_lp(&inst, &SolverConfig::new(0.01)).unwrap() {
        StrictLpResult::StrictlyFeasible { x, .. } => assert!(x[0] > 0.0 && x[0] < 1.0),
        r => panic!("{r:?}"),
    }
    // x < 0 and -x < 0.
    let inst = StrictLpInstance::new(2, 1, vec![1.0, -1.0], vec![0.0, 0.0]).unwrap();
    assert!(matches!(
        solve_strict_lp(&inst, &SolverConfig::new(0.01)).unwrap(),
        StrictLpResult::InfeasibleWithinTolerance { .. }
    ));
}

#[test]
fn lp_feasibility_small() {
    // x1 + x2 = 1, x ≥ 0.
    let inst = LpFeasInstance::new(1, 2, vec![1.0, 1.0], vec![1.0], 10.0).unwrap();
    match solve_lp_feasibility(&inst, &SolverConfig::new(1e-3)).unwrap() {
        LpFeasResult::Feasible { x, residual, residual_bound, .. } => {
            assert!(x.iter().all(|&v| v >= -1e-9));
            assert!(residual <= residual_bound);
        }
        r => panic!("{r:?}"),
    }
}

#[test]
fn avta_agrees_with_avta_plus_on_pentagon() {
    let mut pts: Vec<Vec<f64>> = (0..5)
        .map(|k| {
            let t = k as f64 * core::f64::consts::TAU / 5.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    pts.push(vec![0.1, 0.1]);
    pts.push(vec![-0.2, 0.05]);
    let s = PointSet::from_points(&pts).unwrap();
    let cfg = AvtaConfig::new(0.1, Oracle::SphericalTa, 1);
    let mut a = avta(&s, &cfg).unwrap().vertex_indices;
    let mut b = avta_plus(&s, &cfg).unwrap().vertex_indices;
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, vec![0, 1, 2, 3, 4]);
    assert_eq!(a, b);
}

#[test]
fn mvee_of_square_is_circumscribed_circle() {
    let s = set(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[0.5, 0.5]]);
    let e = mvee(&s, 1e-4).unwrap();
    assert!((e.center_b[0] - 0.5).abs() < 1e-3 && (e.center_b[1] - 0.5).abs() < 1e-3);
    assert!(e.max_level(&s) <= (1.0 + 1e-4) * (1.0 + 1e-6));
    let p = avta_plus_mvee(&s, &AvtaConfig::new(0.1, Oracle::SphericalTa, 1), 1e-4).unwrap();
    assert!(p.relative_shape_distance(&e) < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_are_certified(
        pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..12),
        p in prop::collection::vec(-4.0f64..4.0, 3),
    ) {
        let s = PointSet::from_points(&pts).unwrap();
        let cfg = SolverConfig::new(0.01);
        for out in [solve_ta(&s, &p, &cfg).unwrap(), solve_spherical_ta(&s, &p, &cfg).unwrap()] {
            match &out.verdict {
                Verdict::InsideApprox { .. } => check_inside(&out, &s, &p, 0.01),
                Verdict::Witness { .. } => check_outside(&out, &s, &p),
                Verdict::IterationLimit { .. } => prop_assert!(false, "iteration limit"),
            }
        }
    }

    #[test]
    fn both_solvers_agree_on_clear_cases(
        pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 3..10),
        w in prop::collection::vec(0.01f64..1.0, 10),
    ) {
        let s = PointSet::from_points(&pts).unwrap();
        let total: f64 = w[..s.len()].iter().sum();
        let coeffs: Vec<(usize, f64)> = (0..s.len()).map(|i| (i, w[i] / total)).collect();
        let p = s.combine(&coeffs);
        let cfg = SolverConfig::new(1e-3);
        prop_assert!(solve_ta(&s, &p, &cfg).unwrap().verdict.is_inside());
        prop_assert!(solve_spherical_ta(&s, &p, &cfg).unwrap().verdict.is_inside());
    }
}
