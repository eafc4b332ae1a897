//! Linear feasibility problems solved as convex hull membership.
//!
//! Strict feasibility `Ax < b` is decided through Gordan's alternative:
//! it holds iff `0 ∉ conv{(aᵢ; bᵢ)} ∪ {(0; 1)}`, and any witness `(x̂; α̂)` of
//! that homogeneous query yields the solution `x = -x̂/α̂`.
//!
//! Feasibility of `Ax = b, x ≥ 0, eᵀx ≤ M` is equivalent to
//! `0 ∈ conv{(Aⱼ; 1)} ∪ {(0; 1), (-b; -M)}`; a convex combination
//! `(α, β, γ)` reaching `0` gives `x = α/γ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, Hyperplane, PointSet};
use crate::solver::{ChmOutcome, Oracle, SolverConfig, Verdict};

/// `Ax < b` with `A` of shape `rows × cols`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictLpInstance {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl StrictLpInstance {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols, &a, &b, rows)?;
        Ok(Self { rows, cols, a, b })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `bᵢ - aᵢᵀx` for every row.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| self.b[i] - dot(self.row(i), x)).collect()
    }
}

fn check_shape(rows: usize, cols: usize, a: &[f64], b: &[f64], b_len: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyPointSet);
    }
    if a.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            got: a.len(),
        });
    }
    if b.len() != b_len {
        return Err(Error::DimensionMismatch {
            expected: b_len,
            got: b.len(),
        });
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrictLpResult {
    /// `Ax < b` holds componentwise for `x` as returned.
    StrictlyFeasible { x: Vec<f64>, iterations: usize },
    /// An approximate Gordan certificate: `y ≥ 0`, `s ≥ 0`, `Σy + s = 1`
    /// with `(Aᵀy; bᵀy + s)` small.
    InfeasibleWithinTolerance {
        y: Vec<f64>,
        s: f64,
        /// `‖Σ λᵢ uᵢ‖` over the unit-normalized columns, `≤ ε`.
        residual: f64,
        /// `‖(Aᵀy; bᵀy + s)‖` for the returned un-normalized weights.
        certificate_residual: f64,
        iterations: usize,
    },
}

/// Unit-normalized columns `(aᵢ; bᵢ)/‖(aᵢ; bᵢ)‖`, then `(0; 1)`, in ℝ^{cols+1}.
pub fn build_gordan_columns(inst: &StrictLpInstance) -> Result<PointSet> {
    Ok(gordan_columns(inst)?.0)
}

fn gordan_columns(inst: &StrictLpInstance) -> Result<(PointSet, Vec<f64>)> {
    let d = inst.cols + 1;
    let mut data = Vec::with_capacity((inst.rows + 1) * d);
    let mut norms = Vec::with_capacity(inst.rows + 1);
    for i in 0..inst.rows {
        let start = data.len();
        data.extend_from_slice(inst.row(i));
        data.push(inst.b[i]);
        let n = norm(&data[start..]);
        if n == 0.0 {
            return Err(Error::DegenerateRow(i));
        }
        for v in &mut data[start..] {
            *v /= n;
        }
        norms.push(n);
    }
    data.extend(core::iter::repeat_n(0.0, inst.cols));
    data.push(1.0);
    norms.push(1.0);
    Ok((PointSet::from_columns(d, data)?, norms))
}

/// Decides `Ax < b` with Spherical-TA on the Gordan columns.
pub fn solve_strict_lp(inst: &StrictLpInstance, cfg: &SolverConfig) -> Result<StrictLpResult> {
    solve_strict_lp_with(inst, cfg, Oracle::SphericalTa)
}

/// [`solve_strict_lp`] with a chosen membership oracle.
pub fn solve_strict_lp_with(
    inst: &StrictLpInstance,
    cfg: &SolverConfig,
    oracle: Oracle,
) -> Result<StrictLpResult> {
    let (cols, norms) = gordan_columns(inst)?;
    let origin = vec![0.0; cols.dim()];
    let out = oracle.solve(&cols, &origin, cfg)?;
    match out.verdict {
        Verdict::Witness { cert, unit_witness } => {
            let w = unit_witness.unwrap_or_else(|| cert.witness.coords().to_vec());
            let alpha = w[inst.cols];
            if !(alpha > 0.0) {
                return Err(Error::NonPositiveAlpha(alpha));
            }
            let x: Vec<f64> = w[..inst.cols].iter().map(|v| -v / alpha).collect();
            for (row, slack) in inst.slacks(&x).into_iter().enumerate() {
                if !(slack > 0.0) {
                    return Err(Error::StrictCheckFailed { row, slack });
                }
            }
            Ok(StrictLpResult::StrictlyFeasible {
                x,
                iterations: out.iterations,
            })
        }
        Verdict::InsideApprox { iterate, .. } => {
            // The oracle's coefficients are over the columns as given (unit).
            let lambda = iterate.dense_weights(cols.len());
            let residual = norm(&cols.combine(iterate.coeffs()));
            let mut y: Vec<f64> = (0..inst.rows).map(|i| lambda[i] / norms[i]).collect();
            let mut s = lambda[inst.rows];
            let total: f64 = y.iter().sum::<f64>() + s;
            if !(total > 0.0) {
                return Err(Error::ZeroWeights);
            }
            y.iter_mut().for_each(|v| *v /= total);
            s /= total;
            let certificate_residual = gordan_residual(inst, &y, s);
            Ok(StrictLpResult::InfeasibleWithinTolerance {
                y,
                s,
                residual,
                certificate_residual,
                iterations: out.iterations,
            })
        }
        Verdict::IterationLimit { .. } => Err(Error::IterationLimit(out.iterations)),
    }
}

/// `‖(Aᵀy; bᵀy + s)‖`.
pub fn gordan_residual(inst: &StrictLpInstance, y: &[f64], s: f64) -> f64 {
    let mut v = vec![0.0; inst.cols + 1];
    for i in 0..inst.rows {
        for (acc, a) in v.iter_mut().zip(inst.row(i)) {
            *acc += y[i] * a;
        }
        v[inst.cols] += y[i] * inst.b[i];
    }
    v[inst.cols] += s;
    norm(&v)
}

/// `Ax = b, x ≥ 0` with `A` of shape `rows × cols` (row-major) and a bound
/// `eᵀx ≤ M` on the solutions sought.
#[derive(Debug, Clone, PartialEq)]
pub struct LpFeasInstance {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    bound_m: f64,
}

/// The bound used when none is given.
pub const DEFAULT_BOUND_M: f64 = 1000.0;

impl LpFeasInstance {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>, b: Vec<f64>, bound_m: f64) -> Result<Self> {
        check_shape(rows, cols, &a, &b, rows)?;
        if !(bound_m > 0.0 && bound_m.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "bound M must be positive, got {bound_m}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            a,
            b,
            bound_m,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    /// `‖Ax - b‖`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let r: Vec<f64> = (0..self.rows)
            .map(|i| dot(&self.a[i * self.cols..(i + 1) * self.cols], x) - self.b[i])
            .collect();
        norm(&r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpFeasResult {
    Feasible {
        x: Vec<f64>,
        gamma: f64,
        /// `‖Ax - b‖`.
        residual: f64,
        /// `ε·R/γ`, where `R` is the largest column norm of the reduction.
        residual_bound: f64,
        iterations: usize,
    },
    /// No `x ≥ 0` with `Ax = b` and `eᵀx ≤ M`; the plane separates the origin
    /// from the reduction's columns.
    Infeasible { plane: Hyperplane, iterations: usize },
}

/// Columns `(Aⱼ; 1)` for each `j`, then `(0; 1)`, then `(-b; -M)`.
pub fn build_lpfeas_columns(inst: &LpFeasInstance) -> PointSet {
    let d = inst.rows + 1;
    let mut data = Vec::with_capacity((inst.cols + 2) * d);
    for j in 0..inst.cols {
        data.extend((0..inst.rows).map(|i| inst.a[i * inst.cols + j]));
        data.push(1.0);
    }
    data.extend(core::iter::repeat_n(0.0, inst.rows));
    data.push(1.0);
    data.extend(inst.b.iter().map(|v| -v));
    data.push(-inst.bound_m);
    PointSet::from_columns(d, data).expect("validated instance")
}

/// Smallest `γ` accepted when recovering `x = α/γ`.
pub fn gamma_floor(epsilon: f64, bound_m: f64) -> f64 {
    epsilon.max(1e-10) / (bound_m + 1.0)
}

/// Decides `Ax = b, x ≥ 0, eᵀx ≤ M` with Spherical-TA.
pub fn solve_lp_feasibility(inst: &LpFeasInstance, cfg: &SolverConfig) -> Result<LpFeasResult> {
    solve_lp_feasibility_with(inst, cfg, Oracle::SphericalTa)
}

pub fn solve_lp_feasibility_with(
    inst: &LpFeasInstance,
    cfg: &SolverConfig,
    oracle: Oracle,
) -> Result<LpFeasResult> {
    let cols = build_lpfeas_columns(inst);
    let origin = vec![0.0; cols.dim()];
    let out: ChmOutcome = oracle.solve(&cols, &origin, cfg)?;
    match out.verdict {
        Verdict::InsideApprox { iterate, .. } => {
            let w = iterate.dense_weights(cols.len());
            let gamma = w[inst.cols + 1];
            let floor = gamma_floor(cfg.epsilon, inst.bound_m);
            if !(gamma > floor) {
                return Err(Error::GammaDegenerate { gamma, floor });
            }
            let x: Vec<f64> = w[..inst.cols].iter().map(|a| a / gamma).collect();
            let residual = inst.residual(&x);
            Ok(LpFeasResult::Feasible {
                x,
                gamma,
                residual,
                residual_bound: cfg.epsilon * out.radius / gamma,
                iterations: out.iterations,
            })
        }
        Verdict::Witness { cert, .. } => Ok(LpFeasResult::Infeasible {
            plane: cert.plane,
            iterations: out.iterations,
        }),
        Verdict::IterationLimit { .. } => Err(Error::IterationLimit(out.iterations)),
    }
}
