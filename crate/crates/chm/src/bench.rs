//! Benchmark suites: one CSV row per (instance, algorithm) run.

use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Result};
use chm_core::{
    avta, avta_plus, avta_plus_mvee_report, mvee, solve_lp_feasibility_with, solve_strict_lp_with, AvtaConfig,
    LpFeasResult, Oracle, SolverConfig, StrictLpResult, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::generate::{
    gen_chm_instance, gen_lp_instance, gen_strict_lp_instance, gen_vertex_instance, GenSpec, Kind,
};
use crate::nearest::robustness;

pub const HEADER: [&str; 10] = [
    "suite",
    "feasibility",
    "epsilon",
    "rows",
    "cols",
    "algorithm",
    "seed",
    "wall_ms",
    "iterations",
    "verdict",
];

pub const DESK_SIZES: [(usize, usize); 3] = [(50, 200), (100, 500), (200, 1000)];
pub const LARGE_SIZE: (usize, usize) = (1000, 5000);
pub const DEFAULT_EPSILONS: [f64; 3] = [0.01, 0.005, 0.001];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ChmGaussian,
    ChmSphere,
    LpFeas,
    StrictLp,
    Irredundancy,
    Mvee,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::ChmGaussian,
        Suite::ChmSphere,
        Suite::LpFeas,
        Suite::StrictLp,
        Suite::Irredundancy,
        Suite::Mvee,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ChmGaussian => "chm-gaussian",
            Suite::ChmSphere => "chm-sphere",
            Suite::LpFeas => "lpfeas",
            Suite::StrictLp => "strictlp",
            Suite::Irredundancy => "irredundancy",
            Suite::Mvee => "mvee",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub suite: String,
    /// `feasible`/`infeasible` for decision suites, `redundancy=<f>` for
    /// vertex enumeration and MVEE.
    pub feasibility: String,
    pub epsilon: f64,
    pub rows: usize,
    pub cols: usize,
    pub algorithm: String,
    pub seed: u64,
    pub wall_ms: f64,
    /// Solver iterations; oracle queries for AVTA; points passed to the
    /// ellipsoid solver for MVEE.
    pub iterations: usize,
    /// `feasible`, `infeasible` or `limit`. Vertex enumeration reports
    /// `feasible` when the exact vertex set was recovered.
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub sizes: Vec<(usize, usize)>,
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Redundant fraction for vertex and MVEE suites.
    pub redundancy: f64,
}

impl Default for BenchPlan {
    fn default() -> Self {
        Self {
            sizes: DESK_SIZES.to_vec(),
            epsilons: DEFAULT_EPSILONS.to_vec(),
            seeds: vec![0],
            redundancy: 0.5,
        }
    }
}

const ORACLES: [(Oracle, &str); 2] = [(Oracle::SphericalTa, "spherical-ta"), (Oracle::Ta, "ta")];

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::InsideApprox { .. } => "feasible",
        Verdict::Witness { .. } => "infeasible",
        Verdict::IterationLimit { .. } => "limit",
    }
}

fn feas(f: bool) -> &'static str {
    if f {
        "feasible"
    } else {
        "infeasible"
    }
}

pub fn run_benchmark(suite: Suite, plan: &BenchPlan) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    let record = |feasibility: &str, eps: f64, rows, cols, algorithm: &str, seed, wall_ms, iterations, verdict: &str| {
        BenchRecord {
            suite: suite.name().into(),
            feasibility: feasibility.into(),
            epsilon: eps,
            rows,
            cols,
            algorithm: algorithm.into(),
            seed,
            wall_ms,
            iterations,
            verdict: verdict.into(),
        }
    };
    for &(m, n) in &plan.sizes {
        for &seed in &plan.seeds {
            match suite {
                Suite::ChmGaussian | Suite::ChmSphere => {
                    let kind = if suite == Suite::ChmGaussian { Kind::Gaussian } else { Kind::Sphere };
                    for feasible in [true, false] {
                        let inst = gen_chm_instance(&GenSpec::new(kind, m, n, seed).feasible(feasible));
                        for &eps in &plan.epsilons {
                            for (oracle, name) in ORACLES {
                                let t = Instant::now();
                                let o = oracle.solve(&inst.points, &inst.query, &SolverConfig::new(eps))?;
                                out.push(record(
                                    feas(feasible),
                                    eps,
                                    m,
                                    n,
                                    name,
                                    seed,
                                    elapsed_ms(t),
                                    o.iterations,
                                    verdict_name(&o.verdict),
                                ));
                            }
                        }
                    }
                }
                Suite::LpFeas => {
                    for feasible in [true, false] {
                        let lp = gen_lp_instance(&GenSpec::new(Kind::Uniform, m, n, seed).feasible(feasible), 1000.0);
                        for &eps in &plan.epsilons {
                            for (oracle, name) in ORACLES {
                                let t = Instant::now();
                                let r = solve_lp_feasibility_with(&lp.inst, &SolverConfig::new(eps), oracle);
                                let wall = elapsed_ms(t);
                                let (it, v) = match r {
                                    Ok(LpFeasResult::Feasible { iterations, .. }) => (iterations, "feasible"),
                                    Ok(LpFeasResult::Infeasible { iterations, .. }) => (iterations, "infeasible"),
                                    Err(_) => (0, "limit"),
                                };
                                out.push(record(feas(feasible), eps, m, n, name, seed, wall, it, v));
                            }
                        }
                    }
                }
                Suite::StrictLp => {
                    for feasible in [true, false] {
                        // `m` rows by `n` columns.
                        let s = gen_strict_lp_instance(&GenSpec::new(Kind::Sphere, n, m, seed).feasible(feasible));
                        for &eps in &plan.epsilons {
                            for (oracle, name) in ORACLES {
                                let t = Instant::now();
                                let r = solve_strict_lp_with(&s.inst, &SolverConfig::new(eps), oracle);
                                let wall = elapsed_ms(t);
                                let (it, v) = match r {
                                    Ok(StrictLpResult::StrictlyFeasible { iterations, .. }) => (iterations, "feasible"),
                                    Ok(StrictLpResult::InfeasibleWithinTolerance { iterations, .. }) => {
                                        (iterations, "infeasible")
                                    }
                                    Err(_) => (0, "limit"),
                                };
                                out.push(record(feas(feasible), eps, s.inst.rows(), s.inst.cols(), name, seed, wall, it, v));
                            }
                        }
                    }
                }
                Suite::Irredundancy => {
                    let k = vertex_count(n, plan.redundancy);
                    let vi = gen_vertex_instance(&GenSpec::new(Kind::Gaussian, m, n, seed).vertices(k));
                    let gamma = 0.5 * robustness(&vi.points, &vi.vertices);
                    let label = format!("redundancy={}", plan.redundancy);
                    for (oracle, name) in [(Oracle::SphericalTa, "avta-plus"), (Oracle::Ta, "avta")] {
                        let cfg = AvtaConfig::new(gamma, oracle, seed);
                        let t = Instant::now();
                        let r = if oracle == Oracle::Ta { avta(&vi.points, &cfg) } else { avta_plus(&vi.points, &cfg) };
                        let wall = elapsed_ms(t);
                        let (it, v) = match r {
                            Ok(rep) => {
                                let mut got = rep.vertex_indices.clone();
                                got.sort_unstable();
                                (rep.queries, feas(got == vi.vertices))
                            }
                            Err(_) => (0, "limit"),
                        };
                        out.push(record(&label, gamma, m, n, name, seed, wall, it, v));
                    }
                }
                Suite::Mvee => {
                    let k = vertex_count(n, plan.redundancy).max(m + 1);
                    let vi = gen_vertex_instance(&GenSpec::new(Kind::Gaussian, m, n, seed).vertices(k));
                    let gamma = 0.5 * robustness(&vi.points, &vi.vertices);
                    let label = format!("redundancy={}", plan.redundancy);
                    for &eps in &plan.epsilons {
                        let t = Instant::now();
                        let r = avta_plus_mvee_report(&vi.points, &AvtaConfig::new(gamma, Oracle::SphericalTa, seed), eps);
                        let wall = elapsed_ms(t);
                        let (it, v) = match r {
                            Ok((_, rep)) => (rep.vertex_indices.len(), "feasible"),
                            Err(_) => (0, "limit"),
                        };
                        out.push(record(&label, eps, m, n, "avta-plus+mvee", seed, wall, it, v));
                        let t = Instant::now();
                        let r = mvee(&vi.points, eps);
                        let wall = elapsed_ms(t);
                        let v = if r.is_ok() { "feasible" } else { "limit" };
                        out.push(record(&label, eps, m, n, "mvee", seed, wall, n, v));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn vertex_count(n: usize, redundancy: f64) -> usize {
    (((1.0 - redundancy) * n as f64).round() as usize).clamp(1, n)
}

/// Writes the header even when there are no records.
pub fn write_records<W: Write>(writer: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(HEADER) {
        bail!("unexpected bench header {headers:?}");
    }
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(sizes: Vec<(usize, usize)>) -> BenchPlan {
        BenchPlan {
            sizes,
            epsilons: vec![0.01],
            seeds: vec![1],
            redundancy: 0.5,
        }
    }

    #[test]
    fn empty_sizes_give_header_only() {
        let recs = run_benchmark(Suite::ChmGaussian, &tiny(vec![])).unwrap();
        assert!(recs.is_empty());
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), HEADER.join(","));
    }

    #[test]
    fn records_roundtrip() {
        let mut all = Vec::new();
        for suite in Suite::ALL {
            let recs = run_benchmark(suite, &tiny(vec![(5, 20)])).unwrap();
            assert!(!recs.is_empty(), "{}", suite.name());
            all.extend(recs);
        }
        let mut buf = Vec::new();
        write_records(&mut buf, &all).unwrap();
        assert_eq!(read_records(buf.as_slice()).unwrap(), all);
    }

    #[test]
    fn chm_rows_for_both_oracles() {
        let recs = run_benchmark(Suite::ChmGaussian, &tiny(vec![(10, 50)])).unwrap();
        let algs: Vec<&str> = recs.iter().map(|r| r.algorithm.as_str()).collect();
        assert!(algs.contains(&"spherical-ta") && algs.contains(&"ta"));
        for r in &recs {
            assert_eq!(r.verdict, r.feasibility, "{r:?}");
            assert!(r.wall_ms >= 0.0);
        }
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
