//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p chm --test acceptance -- --nocapture` to see the
//! lines; the tests are serialized so that wall-clock comparisons do not
//! compete for cores.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use chm::exact::{exact_oracle, exact_separates};
use chm::generate::{
    gen_ball_instance, gen_chm_instance, gen_lp_instance, gen_strict_lp_instance, gen_vertex_instance, GenSpec, Kind,
};
use chm::nearest::robustness;
use chm_core::{
    avta, avta_plus, avta_plus_mvee, mvee, solve_lp_feasibility, solve_spherical_ta, solve_strict_lp, solve_ta,
    to_spherical, verify_witness, worst_case_delta_bound, AvtaConfig, ChmOutcome, LpFeasResult, Oracle,
    SolverConfig, Spherical, StrictLpResult, Verdict,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("{} criterion {id:>2} [{name}]: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

/// Least-squares slope of `log y` against `log x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// The 200 membership instances shared by criteria 2–4.
fn oracle_instances() -> Vec<(GenSpec, chm::generate::ChmInstance)> {
    (0..200u64)
        .map(|i| {
            let kind = if i % 4 < 2 { Kind::Gaussian } else { Kind::Sphere };
            let m = 2 + (i % 5) as usize;
            // A hull of fewer than m+1 points is flat, and a rounded convex
            // combination then sits a hair off it.
            let n = (3 + ((i / 5) % 10) as usize).max(m + 1);
            let spec = GenSpec::new(kind, m, n, 1000 + i).feasible(i % 2 == 0);
            let inst = gen_chm_instance(&spec);
            (spec, inst)
        })
        .collect()
}

const ORACLE_EPS: f64 = 1e-3;

#[test]
fn criterion_01_worst_case_envelope() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut worst_rel = 0.0f64;
    let mut prev = worst_case_delta_bound(0);
    let mut ok = prev == 1.0;
    for k in 1..=1_000_000u64 {
        let cur = worst_case_delta_bound(k);
        let want = prev * prev / (1.0 + prev * prev);
        let rel = ((cur * cur) - want).abs() / want;
        worst_rel = worst_rel.max(rel);
        prev = cur;
    }
    ok &= worst_rel <= 1e-12;

    let mut steps = 0usize;
    let mut violations = 0usize;
    for seed in 0..50 {
        let inst = gen_chm_instance(&GenSpec::new(Kind::Sphere, 20, 100, seed));
        let cfg = SolverConfig::new(0.01).with_trace(true);
        let out = solve_spherical_ta(&inst.points, &inst.query, &cfg).unwrap();
        ok &= out.verdict.is_inside();
        let trace = out.trace.unwrap();
        for (k, d) in trace.deltas.iter().enumerate() {
            steps += 1;
            if *d > worst_case_delta_bound(k as u64) + 1e-12 {
                violations += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= violations == 0 && secs < 30.0;
    report(
        1,
        "worst-case envelope",
        ok,
        format!(
            "recurrence max rel err {worst_rel:.2e} (≤1e-12) for k≤1e6; {violations} envelope violations over {steps} iterates of 50 traces; {secs:.2}s (<30s)"
        ),
    );
}

fn solve_both(inst: &chm::generate::ChmInstance) -> [(&'static str, ChmOutcome); 2] {
    let cfg = SolverConfig::new(ORACLE_EPS);
    [
        ("ta", solve_ta(&inst.points, &inst.query, &cfg).unwrap()),
        ("spherical-ta", solve_spherical_ta(&inst.points, &inst.query, &cfg).unwrap()),
    ]
}

#[test]
fn criterion_02_oracle_equivalence() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut matches = [0usize; 2];
    let mut margin_ok = 0usize;
    let insts = oracle_instances();
    for (_, inst) in &insts {
        let exact = exact_oracle(&inst.points, &inst.query).unwrap();
        let r = inst.points.max_distance_from(&inst.query);
        if exact.is_inside() == inst.feasible() && (inst.feasible() || exact.distance() > 4.0 * ORACLE_EPS * r) {
            margin_ok += 1;
        }
        for (slot, (_, out)) in solve_both(inst).iter().enumerate() {
            let agree = match &out.verdict {
                Verdict::InsideApprox { .. } => exact.is_inside(),
                Verdict::Witness { .. } => !exact.is_inside(),
                Verdict::IterationLimit { .. } => false,
            };
            matches[slot] += usize::from(agree);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = matches == [200, 200] && margin_ok == 200 && secs < 60.0;
    report(
        2,
        "oracle equivalence",
        ok,
        format!(
            "TA {}/200, Spherical-TA {}/200 agree with exact oracle; {margin_ok}/200 instances match construction with margin > 4εR; {secs:.2}s (<60s)",
            matches[0], matches[1]
        ),
    );
}

#[test]
fn criterion_03_certificate_validity() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut witnesses = 0usize;
    let mut valid = 0usize;
    let mut exact_ok = 0usize;
    let infeasible: Vec<_> = oracle_instances().into_iter().filter(|(_, i)| !i.feasible()).collect();
    assert_eq!(infeasible.len(), 100);
    for (_, inst) in &infeasible {
        for (name, out) in solve_both(inst) {
            let Verdict::Witness { cert, unit_witness } = &out.verdict else { continue };
            witnesses += 1;
            let eq3 = if name == "ta" {
                verify_witness(&inst.query, cert.witness.coords(), &inst.points)
            } else {
                let Ok(Spherical::Instance(sph)) = to_spherical(&inst.points, &inst.query) else { continue };
                let origin = vec![0.0; inst.points.dim()];
                verify_witness(&origin, unit_witness.as_ref().unwrap(), sph.unit_points())
            };
            let separates = cert.plane.strictly_separates(&inst.query, &inst.points, 1e-12);
            valid += usize::from(eq3 && separates);
            exact_ok += usize::from(
                exact_separates(&cert.plane.normal, cert.plane.offset, &inst.points, &inst.query).unwrap(),
            );
        }
    }
    let ok = witnesses == 200 && valid == 200 && exact_ok == 200;
    report(
        3,
        "certificate validity",
        ok,
        format!(
            "{valid}/{witnesses} witnesses pass the distance test and strict separation (1e-12 slack); {exact_ok}/{witnesses} planes separate in exact arithmetic; 200 expected (100 instances × 2 oracles)"
        ),
    );
}

#[test]
fn criterion_04_approximation_contract() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut inside = 0usize;
    let mut good = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for (_, inst) in oracle_instances().iter().filter(|(_, i)| i.feasible()) {
        let r = inst.points.max_distance_from(&inst.query);
        for (_, out) in solve_both(inst) {
            let Verdict::InsideApprox { iterate, .. } = &out.verdict else { continue };
            inside += 1;
            let err = iterate
                .coords()
                .iter()
                .zip(&inst.query)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(err - ORACLE_EPS * r);
            if err <= ORACLE_EPS * r + 1e-9 && iterate.is_consistent(&inst.points) {
                good += 1;
            }
        }
    }
    let ok = inside == 200 && good == 200;
    report(
        4,
        "approximation contract",
        ok,
        format!(
            "{good}/{inside} InsideApprox results satisfy ‖p_ε−p‖ ≤ εR + 1e-9 with simplex-valid coefficients (max excess {worst:.2e}); 200 expected"
        ),
    );
}

#[test]
fn criterion_05_iteration_scaling() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let epsilons = [0.02, 0.01, 0.005, 0.0025];
    let inv: Vec<f64> = epsilons.iter().map(|e| 1.0 / e).collect();
    let mut ball = Vec::new();
    let mut generic = Vec::new();
    for &eps in &epsilons {
        let mut b = Vec::new();
        let mut g = Vec::new();
        for seed in 0..10 {
            let inst = gen_ball_instance(10, 200, seed);
            let cfg = SolverConfig::new(eps).with_eps_property(true);
            let out = solve_spherical_ta(&inst.points, &inst.query, &cfg).unwrap();
            assert!(out.verdict.is_inside());
            b.push(out.iterations.max(1) as f64);

            let inst = gen_chm_instance(&GenSpec::new(Kind::Gaussian, 10, 200, seed));
            let out = solve_spherical_ta(&inst.points, &inst.query, &SolverConfig::new(eps)).unwrap();
            assert!(out.verdict.is_inside());
            g.push(out.iterations.max(1) as f64);
        }
        ball.push(median(b));
        generic.push(median(g));
    }
    let sb = loglog_slope(&inv, &ball);
    let sg = loglog_slope(&inv, &generic);
    let secs = start.elapsed().as_secs_f64();
    let ok = sb <= 1.3 && sg <= 2.2 && secs < 300.0;
    report(
        5,
        "iteration scaling",
        ok,
        format!(
            "ball slope {sb:.3} (≤1.3, medians {ball:?}); generic slope {sg:.3} (≤2.2, medians {generic:?}); {secs:.1}s (<300s)"
        ),
    );
}

#[test]
fn criterion_06_spherical_beats_vanilla() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let cfg = SolverConfig::new(0.01);
    let mut ts = Vec::new();
    let mut tv = Vec::new();
    for seed in 0..5 {
        let inst = gen_chm_instance(&GenSpec::new(Kind::Gaussian, 100, 500, seed));
        let (a, da) = timed(|| solve_spherical_ta(&inst.points, &inst.query, &cfg).unwrap());
        let (b, db) = timed(|| solve_ta(&inst.points, &inst.query, &cfg).unwrap());
        assert!(a.verdict.is_inside() && b.verdict.is_inside());
        ts.push(da.as_secs_f64() * 1e3);
        tv.push(db.as_secs_f64() * 1e3);
    }
    let (ms, mv) = (median(ts), median(tv));
    report(
        6,
        "spherical beats vanilla",
        ms <= mv,
        format!("median wall time Spherical-TA {ms:.3} ms vs TA {mv:.3} ms at 100×500, ε=0.01 (ordering only)"),
    );
}

#[test]
fn criterion_07_strict_lp_recovery() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let cfg = SolverConfig::new(0.01);
    let mut feas_ok = 0usize;
    let mut infeas_ok = 0usize;
    let mut notes = Vec::new();
    for i in 0..50u64 {
        let kind = if i % 2 == 0 { Kind::Sphere } else { Kind::Uniform };
        let m = 2 + (i as usize * 7) % 49;
        let n = 5 + (i as usize * 13) % 96;
        let s = gen_strict_lp_instance(&GenSpec::new(kind, m, n, 500 + i));
        match solve_strict_lp(&s.inst, &cfg) {
            Ok(StrictLpResult::StrictlyFeasible { x, .. }) => {
                feas_ok += usize::from(s.inst.slacks(&x).iter().all(|&v| v > 0.0));
            }
            other => notes.push(format!("feasible #{i}: {:?}", other.map(|_| "infeasible"))),
        }
        // One extra (closing) row keeps n ≤ 100.
        let s = gen_strict_lp_instance(&GenSpec::new(kind, m, n.min(99), 700 + i).feasible(false));
        match solve_strict_lp(&s.inst, &cfg) {
            Ok(StrictLpResult::InfeasibleWithinTolerance { residual, .. }) if residual <= cfg.epsilon => infeas_ok += 1,
            other => notes.push(format!("infeasible #{i}: {:?}", other.map(|_| "feasible"))),
        }
    }
    let ok = feas_ok == 50 && infeas_ok == 50;
    report(
        7,
        "strict LP recovery",
        ok,
        format!(
            "{feas_ok}/50 feasible instances return x with Ax < b strictly; {infeas_ok}/50 infeasible instances return InfeasibleWithinTolerance with residual ≤ ε {notes:?}"
        ),
    );
}

#[test]
fn criterion_08_lp_feasibility_recovery() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let eps = 1e-4;
    let cfg = SolverConfig::new(eps);
    let mut feas_ok = 0usize;
    let mut verdicts = 0usize;
    let mut notes = Vec::new();
    for i in 0..50u64 {
        let kind = if i % 2 == 0 { Kind::Uniform } else { Kind::Sphere };
        let m = 2 + (i as usize) % 9;
        let n = m + 2 + (i as usize * 5) % 30;
        let lp = gen_lp_instance(&GenSpec::new(kind, m, n, 900 + i), 1000.0);
        match solve_lp_feasibility(&lp.inst, &cfg) {
            Ok(LpFeasResult::Feasible {
                x,
                residual,
                residual_bound,
                ..
            }) => {
                verdicts += 1;
                feas_ok += usize::from(x.iter().all(|&v| v >= -1e-9) && residual <= residual_bound);
            }
            other => notes.push(format!("feasible #{i}: {other:?}")),
        }
        let lp = gen_lp_instance(&GenSpec::new(kind, m, n, 1900 + i).feasible(false), 1000.0);
        match solve_lp_feasibility(&lp.inst, &cfg) {
            Ok(LpFeasResult::Infeasible { .. }) => verdicts += 1,
            other => notes.push(format!("infeasible #{i}: {}", other.map(|_| "feasible").unwrap_or("error"))),
        }
    }
    let ok = feas_ok == 50 && verdicts == 100;
    report(
        8,
        "LP feasibility recovery",
        ok,
        format!(
            "{feas_ok}/50 feasible solutions have x ≥ -1e-9 and ‖Ax−b‖ within the reported bound; {verdicts}/100 verdicts match construction (ε = {eps}) {notes:?}"
        ),
    );
}

#[test]
fn criterion_09_vertex_recovery() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut runs = 0usize;
    let mut exact = 0usize;
    let mut misses = Vec::new();
    for kind in [Kind::Sphere, Kind::Gaussian] {
        for m in [5, 10] {
            for redundancy in [0.0f64, 0.2, 0.5] {
                let n = (20.0 / (1.0 - redundancy)).round() as usize;
                for seed in 0..10 {
                    let vi = gen_vertex_instance(&GenSpec::new(kind, m, n, seed).vertices(20));
                    let gamma = 0.5 * robustness(&vi.points, &vi.vertices);
                    let cfg = AvtaConfig::new(gamma, Oracle::Ta, seed);
                    for (name, r) in [("avta", avta(&vi.points, &cfg)), ("avta+", avta_plus(&vi.points, &cfg))] {
                        runs += 1;
                        let mut got = r.map(|r| r.vertex_indices).unwrap_or_default();
                        got.sort_unstable();
                        if got == vi.vertices {
                            exact += 1;
                        } else {
                            misses.push(format!("{name} {kind:?} m={m} r={redundancy} seed={seed}"));
                        }
                    }
                }
            }
        }
    }

    // Timing point: m = 10, n = 1000, half redundant.
    let vi = gen_vertex_instance(&GenSpec::new(Kind::Gaussian, 10, 1000, 7).vertices(500));
    let gamma = 0.5 * robustness(&vi.points, &vi.vertices);
    let cfg = AvtaConfig::new(gamma, Oracle::Ta, 7);
    let (plus, tp) = timed(|| avta_plus(&vi.points, &cfg));
    let (plain, tv) = timed(|| avta(&vi.points, &cfg));
    let timing_ok = plus.is_ok() && plain.is_ok() && tp <= tv;

    let ok = exact == runs && timing_ok;
    report(
        9,
        "AVTA/AVTA+ exact recovery",
        ok,
        format!(
            "{exact}/{runs} runs recover the exact vertex set (2 kinds × m∈{{5,10}} × 3 redundancies × 10 seeds × 2 oracles) {misses:?}; m=10,n=1000,50%: AVTA+ {:.1} ms vs AVTA {:.1} ms",
            tp.as_secs_f64() * 1e3,
            tv.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_10_mvee_pipeline() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let eps = 0.01;
    let vi = gen_vertex_instance(&GenSpec::new(Kind::Gaussian, 10, 5050, 3).vertices(50));
    let gamma = 0.5 * robustness(&vi.points, &vi.vertices);
    let cfg = AvtaConfig::new(gamma, Oracle::SphericalTa, 3);
    let (pipe, tp) = timed(|| avta_plus_mvee(&vi.points, &cfg, eps).unwrap());
    let (full, tf) = timed(|| mvee(&vi.points, eps).unwrap());
    let level = pipe.max_level(&vi.points);
    let contain = level <= (1.0 + eps) * (1.0 + 1e-6);
    let rel = pipe.relative_shape_distance(&full);
    let ok = contain && rel <= 10.0 * eps && tp < tf;
    report(
        10,
        "MVEE pipeline",
        ok,
        format!(
            "max level {level:.6} (≤ {:.6}); ‖M_pipe−M_full‖_F/‖M_full‖_F = {rel:.2e} (≤ {:.2}); pipeline {:.1} ms vs full {:.1} ms",
            (1.0 + eps) * (1.0 + 1e-6),
            10.0 * eps,
            tp.as_secs_f64() * 1e3,
            tf.as_secs_f64() * 1e3
        ),
    );
}
