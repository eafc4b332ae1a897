use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use chm::bench::{read_records, run_benchmark, write_records, BenchPlan, Suite, DESK_SIZES, LARGE_SIZE};
use chm::certify::confirm_gordan;
use chm::generate::{gen_chm_instance, gen_lp_instance, gen_strict_lp_instance, gen_vertex_instance, GenSpec, Kind};
use chm::io::{
    parse_query, read_matrix_file, read_points_file, read_vector_file, write_points, write_rows,
    write_trace, EllipsoidDoc, ResultDoc, VerticesDoc,
};
use chm_core::{
    avta_plus_mvee_report, avta_with, mvee, solve_lp_feasibility_with, solve_strict_lp_with, AvtaConfig,
    LpFeasInstance, LpFeasResult, Oracle, PivotRule, SolverConfig, StrictLpInstance, StrictLpResult,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "chm", version, about = "Convex hull membership with the (Spherical) Triangle Algorithm")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Ta,
    Spherical,
}

impl From<OracleArg> for Oracle {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Ta => Oracle::Ta,
            OracleArg::Spherical => Oracle::SphericalTa,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Relative precision ε.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap (default 10⌈1/ε²⌉ + 1000).
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum, default_value = "spherical")]
    oracle: OracleArg,
    /// Write the per-iteration trace to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Input CSV files start with a header line.
    #[arg(long)]
    header: bool,
    /// Write the JSON result here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Common {
    fn solver(&self) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.epsilon).with_trace(self.trace.is_some());
        if let Some(n) = self.max_iters {
            cfg = cfg.with_max_iterations(n);
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a query point lies in the convex hull of a point set.
    Chm {
        /// CSV file, one point per row.
        points: PathBuf,
        /// Query as "c1,c2,...".
        #[arg(long, conflicts_with = "query_file")]
        query: Option<String>,
        /// Query as a one-row (or one-column) CSV file.
        #[arg(long)]
        query_file: Option<PathBuf>,
        /// Enable the ε-property fast path.
        #[arg(long)]
        eps_property: bool,
        /// Take the first pivot found instead of the greedy one.
        #[arg(long)]
        first_found: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Feasibility of Ax = b, x ≥ 0, eᵀx ≤ M.
    Lpfeas {
        /// CSV matrix A, one row per constraint.
        #[arg(long)]
        matrix: PathBuf,
        /// CSV vector b.
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = chm_core::lp::DEFAULT_BOUND_M)]
        bound_m: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Strict feasibility of Ax < b.
    Strictlp {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate the vertices of the convex hull (AVTA / AVTA⁺).
    Vertices {
        points: PathBuf,
        /// Robustness parameter γ (absolute distance).
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum-volume enclosing ellipsoid, optionally after AVTA⁺.
    Mvee {
        points: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        eps_mvee: f64,
        /// Run AVTA⁺ with this γ first and fit only the vertices.
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Write a random instance to a directory.
    Gen {
        #[arg(value_enum)]
        problem: Problem,
        #[arg(long, default_value = "gaussian")]
        kind: Kind,
        /// Dimension (rows).
        #[arg(long)]
        m: usize,
        /// Number of points (columns).
        #[arg(long)]
        n: usize,
        /// Vertex count for `vertices` instances.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        infeasible: bool,
        #[arg(long, default_value_t = chm_core::lp::DEFAULT_BOUND_M)]
        bound_m: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run benchmark suites and write one CSV per suite.
    Bench {
        /// Suites to run (default: all).
        #[arg(long, value_delimiter = ',')]
        suite: Vec<Suite>,
        /// Sizes as "ROWSxCOLS,..." (default 50x200,100x500,200x1000).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<Size>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.005, 0.001])]
        epsilons: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0u64])]
        seeds: Vec<u64>,
        /// Fraction of redundant points for vertex and MVEE suites.
        #[arg(long, default_value_t = 0.5)]
        redundancy: f64,
        /// Also run 1000x5000.
        #[arg(long)]
        large: bool,
        /// Directory for <suite>.csv files; stdout when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Validate a benchmark CSV and print a summary.
    BenchCheck { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Chm,
    Lp,
    Strictlp,
    Vertices,
}

#[derive(Clone, Copy)]
struct Size(usize, usize);

impl std::str::FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('x').ok_or_else(|| format!("size {s:?} is not ROWSxCOLS"))?;
        let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Size(p(a)?, p(b)?))
    }
}

fn main() -> Result<()> {
    init_threads()?;
    match Cli::parse().cmd {
        Cmd::Chm {
            points,
            query,
            query_file,
            eps_property,
            first_found,
            common,
        } => {
            let s = read_points_file(&points, common.header)?;
            let p = match (query, query_file) {
                (Some(q), _) => parse_query(&q)?,
                (None, Some(f)) => read_vector_file(&f, common.header)?,
                (None, None) => bail!("give --query or --query-file"),
            };
            let mut cfg = common.solver().with_eps_property(eps_property);
            if first_found {
                cfg = cfg.with_pivot_rule(PivotRule::FirstFound);
            }
            let t = Instant::now();
            let out = Oracle::from(common.oracle).solve(&s, &p, &cfg)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            if let (Some(path), Some(trace)) = (&common.trace, &out.trace) {
                write_trace(create(path)?, trace)?;
            }
            emit(&common.output, &ResultDoc::from_outcome(&out, &p, common.epsilon, ms))
        }
        Cmd::Lpfeas {
            matrix,
            rhs,
            bound_m,
            common,
        } => {
            let (rows, cols, a) = read_matrix_file(&matrix, common.header)?;
            let b = read_vector_file(&rhs, common.header)?;
            let inst = LpFeasInstance::new(rows, cols, a, b, bound_m)?;
            let t = Instant::now();
            let r = solve_lp_feasibility_with(&inst, &common.solver(), common.oracle.into())?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            let doc = match r {
                LpFeasResult::Feasible {
                    x,
                    gamma,
                    residual,
                    residual_bound,
                    iterations,
                } => json!({"status": "feasible", "epsilon": common.epsilon, "iterations": iterations,
                    "elapsed_ms": ms, "x": x, "gamma": gamma, "residual": residual, "residual_bound": residual_bound}),
                LpFeasResult::Infeasible { plane, iterations } => json!({"status": "infeasible",
                    "epsilon": common.epsilon, "iterations": iterations, "elapsed_ms": ms,
                    "plane": {"normal": plane.normal, "offset": plane.offset}}),
            };
            emit(&common.output, &doc)
        }
        Cmd::Strictlp { matrix, rhs, common } => {
            let (rows, cols, a) = read_matrix_file(&matrix, common.header)?;
            let b = read_vector_file(&rhs, common.header)?;
            let inst = StrictLpInstance::new(rows, cols, a, b)?;
            let t = Instant::now();
            let r = solve_strict_lp_with(&inst, &common.solver(), common.oracle.into())?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            let doc = match r {
                StrictLpResult::StrictlyFeasible { x, iterations } => json!({"status": "feasible",
                    "epsilon": common.epsilon, "iterations": iterations, "elapsed_ms": ms,
                    "x": x, "slacks": inst.slacks(&x)}),
                StrictLpResult::InfeasibleWithinTolerance {
                    y,
                    s,
                    residual,
                    certificate_residual,
                    iterations,
                } => json!({"status": "infeasible", "epsilon": common.epsilon, "iterations": iterations,
                    "elapsed_ms": ms, "y": y, "s": s, "residual": residual,
                    "certificate_residual": certificate_residual,
                    "exact_certificate": confirm_gordan(&inst, &y, s)}),
            };
            emit(&common.output, &doc)
        }
        Cmd::Vertices { points, gamma, common } => {
            let s = read_points_file(&points, common.header)?;
            let cfg = AvtaConfig::new(gamma, common.oracle.into(), common.seed);
            let t = Instant::now();
            let r = avta_with(&s, &cfg)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            emit(&common.output, &VerticesDoc::from_report(&r, gamma, ms))
        }
        Cmd::Mvee {
            points,
            eps_mvee,
            gamma,
            common,
        } => {
            let s = read_points_file(&points, common.header)?;
            let t = Instant::now();
            let (e, used) = match gamma {
                Some(g) => {
                    let (e, rep) = avta_plus_mvee_report(&s, &AvtaConfig::new(g, Oracle::SphericalTa, common.seed), eps_mvee)?;
                    (e, Some(rep.vertex_indices.len()))
                }
                None => (mvee(&s, eps_mvee)?, None),
            };
            let ms = t.elapsed().as_secs_f64() * 1e3;
            emit(&common.output, &EllipsoidDoc::new(&e, eps_mvee, ms, used))
        }
        Cmd::Gen {
            problem,
            kind,
            m,
            n,
            k,
            infeasible,
            bound_m,
            seed,
            out_dir,
        } => {
            fs::create_dir_all(&out_dir)?;
            let mut spec = GenSpec::new(kind, m, n, seed).feasible(!infeasible);
            match problem {
                Problem::Chm => {
                    let inst = gen_chm_instance(&spec);
                    write_points(create(&out_dir.join("points.csv"))?, &inst.points)?;
                    write_rows(create(&out_dir.join("query.csv"))?, &[&inst.query])?;
                }
                Problem::Lp => {
                    let lp = gen_lp_instance(&spec, bound_m);
                    write_matrix(&out_dir.join("A.csv"), lp.inst.a(), lp.inst.cols())?;
                    write_rows(create(&out_dir.join("b.csv"))?, &[lp.inst.b()])?;
                }
                Problem::Strictlp => {
                    let s = gen_strict_lp_instance(&spec);
                    write_matrix(&out_dir.join("A.csv"), s.inst.a(), s.inst.cols())?;
                    write_rows(create(&out_dir.join("b.csv"))?, &[s.inst.b()])?;
                }
                Problem::Vertices => {
                    spec = spec.vertices(k.unwrap_or(n));
                    let v = gen_vertex_instance(&spec);
                    write_points(create(&out_dir.join("points.csv"))?, &v.points)?;
                    let idx: Vec<f64> = v.vertices.iter().map(|&i| i as f64).collect();
                    write_rows(create(&out_dir.join("vertices.csv"))?, &[&idx])?;
                }
            }
            Ok(())
        }
        Cmd::Bench {
            suite,
            sizes,
            epsilons,
            seeds,
            redundancy,
            large,
            out_dir,
        } => {
            let suites = if suite.is_empty() { Suite::ALL.to_vec() } else { suite };
            let mut sizes: Vec<(usize, usize)> = if sizes.is_empty() {
                DESK_SIZES.to_vec()
            } else {
                sizes.into_iter().map(|s| (s.0, s.1)).collect()
            };
            if large {
                sizes.push(LARGE_SIZE);
            }
            let plan = BenchPlan {
                sizes,
                epsilons,
                seeds,
                redundancy,
            };
            for s in suites {
                let recs = run_benchmark(s, &plan)?;
                match &out_dir {
                    Some(dir) => {
                        fs::create_dir_all(dir)?;
                        write_records(create(&dir.join(format!("{}.csv", s.name())))?, &recs)?;
                    }
                    None => write_records(io::stdout().lock(), &recs)?,
                }
            }
            Ok(())
        }
        Cmd::BenchCheck { file } => {
            let recs = read_records(File::open(&file).with_context(|| format!("opening {}", file.display()))?)?;
            println!("{} records", recs.len());
            Ok(())
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CHM_THREADS") {
        let n: usize = v.parse().with_context(|| format!("CHM_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn write_matrix(path: &Path, a: &[f64], cols: usize) -> Result<()> {
    let rows: Vec<&[f64]> = a.chunks(cols).collect();
    write_rows(create(path)?, &rows)
}

fn emit<T: serde::Serialize>(path: &Option<PathBuf>, doc: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}
