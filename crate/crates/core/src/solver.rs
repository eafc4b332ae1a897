//! Triangle Algorithm solvers.
//!
//! [`solve_ta`] runs the Triangle Algorithm directly on the raw instance;
//! [`solve_spherical_ta`] first moves the instance onto the unit sphere
//! around the query and maps the answer back. Both stop with an
//! ε-approximate member, a witness, or an explicit iteration limit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{
    bisector_hyperplane, dist_sq, norm_sq, scan_pivot, segment_step, verify_witness, Iterate,
    PivotChoice, PointSet, WitnessCertificate,
};
use crate::spherical::{recover_solution, recover_witness, to_spherical, Spherical, SphericalInstance};

pub use crate::geometry::PivotRule;

/// Coordinates are recomputed from coefficients this often.
const REFRESH_EVERY: usize = 1000;

/// Solver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative precision `ε ∈ (0, 1)`.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub pivot_rule: PivotRule,
    /// Spherical-TA only: once `‖p'‖ ≤ √ε`, fall back to a composite
    /// iterate whenever the ε-property fails.
    pub enable_eps_property: bool,
    pub record_trace: bool,
}

impl SolverConfig {
    /// Defaults for a given `ε`: iteration cap `10·⌈1/ε²⌉ + 1000`, greedy
    /// pivots, no fast path, no trace.
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            max_iterations: default_max_iterations(epsilon),
            pivot_rule: PivotRule::Greedy,
            enable_eps_property: false,
            record_trace: false,
        }
    }

    pub fn with_max_iterations(mut self, max: usize) -> Self {
        self.max_iterations = max;
        self
    }

    pub fn with_pivot_rule(mut self, rule: PivotRule) -> Self {
        self.pivot_rule = rule;
        self
    }

    pub fn with_eps_property(mut self, on: bool) -> Self {
        self.enable_eps_property = on;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(0.01)
    }
}

fn default_max_iterations(eps: f64) -> usize {
    let inv = libm::ceil(1.0 / (eps * eps));
    if inv.is_finite() && inv < 1e12 {
        10 * inv as usize + 1000
    } else {
        usize::MAX / 2
    }
}

/// Per-iteration record of a solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    /// `‖p_k‖` in the spherical frame or `‖p_k - p‖/R` in the raw frame,
    /// starting with the initial iterate.
    pub deltas: Vec<f64>,
    /// Pivot used to move from iterate `k` to `k+1`.
    pub pivot_indices: Vec<usize>,
    /// Whether iterate `k` was handled by the ε-property fast path.
    pub eps_property_flags: Vec<bool>,
}

/// Final state of a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// `‖p - iterate‖ = residual ≤ εR`.
    InsideApprox { iterate: Iterate, residual: f64 },
    /// `p ∉ conv(S)`. For Spherical-TA, `cert.witness` is the raw-frame image
    /// of the spherical witness (a point of `conv(S)`), `cert.plane` the
    /// back-converted separating plane, and `unit_witness` the spherical
    /// witness itself, verifiable against the unit points with query `0`.
    Witness {
        cert: WitnessCertificate,
        unit_witness: Option<Vec<f64>>,
    },
    /// The iteration cap was hit before either verdict could be certified.
    IterationLimit { best: Iterate, residual: f64 },
}

impl Verdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, Verdict::InsideApprox { .. })
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, Verdict::Witness { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::InsideApprox { .. } => "inside",
            Verdict::Witness { .. } => "outside",
            Verdict::IterationLimit { .. } => "limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChmOutcome {
    pub verdict: Verdict,
    pub iterations: usize,
    /// The `R` of the ε-approximation criterion, in raw coordinates.
    pub radius: f64,
    pub trace: Option<IterationTrace>,
}

/// `δ̂_k = 1/√(1+k)`, the closed form of `δ̂²_{k+1} = δ̂²_k/(1+δ̂²_k)` from
/// `δ̂_0 = 1`. Every Spherical-TA iterate sequence using strict pivots
/// satisfies `δ_k ≤ δ̂_k`.
pub fn worst_case_delta_bound(k: u64) -> f64 {
    1.0 / libm::sqrt(1.0 + k as f64)
}

enum LoopEnd {
    Inside(Iterate),
    Witness(Iterate),
    Limit(Iterate),
}

struct Loop<'a> {
    s: &'a PointSet,
    query: &'a [f64],
    tol: f64,
    cfg: &'a SolverConfig,
    /// `Some(ε)` enables the ε-property fast path (spherical frame only).
    eps_fast_path: Option<f64>,
    trace: Option<IterationTrace>,
    trace_scale: f64,
    iterations: usize,
}

impl Loop<'_> {
    fn record_start(&mut self, delta_sq: f64) {
        let scale = self.trace_scale;
        if let Some(t) = self.trace.as_mut() {
            t.deltas.push(libm::sqrt(delta_sq) / scale);
        }
    }

    fn record(&mut self, pivot: usize, eps_flag: bool, delta_sq: f64) {
        let scale = self.trace_scale;
        if let Some(t) = self.trace.as_mut() {
            t.pivot_indices.push(pivot);
            t.eps_property_flags.push(eps_flag);
            t.deltas.push(libm::sqrt(delta_sq) / scale);
        }
    }

    fn run(&mut self, mut it: Iterate) -> LoopEnd {
        let tol_sq = self.tol * self.tol;
        let mut delta_sq = dist_sq(it.coords(), self.query);
        let mut since_refresh = 0usize;
        self.record_start(delta_sq);
        loop {
            if delta_sq <= tol_sq {
                it.refresh(self.s);
                delta_sq = dist_sq(it.coords(), self.query);
                if delta_sq <= tol_sq {
                    return LoopEnd::Inside(it);
                }
            }
            if self.iterations >= self.cfg.max_iterations {
                return LoopEnd::Limit(it);
            }

            let mut choice = scan_pivot(self.s, self.query, it.coords(), self.cfg.pivot_rule);
            if choice == PivotChoice::None {
                it.refresh(self.s);
                delta_sq = dist_sq(it.coords(), self.query);
                choice = scan_pivot(self.s, self.query, it.coords(), self.cfg.pivot_rule);
                if choice == PivotChoice::None {
                    return LoopEnd::Witness(it);
                }
            }
            let j = choice.index().expect("pivot present");

            let mut eps_flag = false;
            if let Some(eps) = self.eps_fast_path {
                if delta_sq <= eps {
                    // On the unit sphere the greedy pivot is also the pivot farthest from p'.
                    let far_sq = dist_sq(it.coords(), self.s.point(j));
                    if far_sq >= 1.0 + eps {
                        eps_flag = true;
                    } else {
                        let budget = self.cfg.max_iterations - self.iterations;
                        match composite_iterate_bounded(&it, self.s, eps, self.cfg, budget) {
                            CompositeOutcome::Reduced { iterate, steps } => {
                                self.iterations += steps;
                                it = iterate;
                                delta_sq = norm_sq(it.coords());
                                let last = it.coeffs().last().map_or(j, |c| c.0);
                                self.record(last, false, delta_sq);
                                since_refresh += steps;
                                continue;
                            }
                            CompositeOutcome::Witness { iterate, steps } => {
                                self.iterations += steps;
                                return LoopEnd::Witness(iterate);
                            }
                            CompositeOutcome::IterationLimit { steps, .. } => {
                                self.iterations += steps;
                                if self.iterations >= self.cfg.max_iterations {
                                    return LoopEnd::Limit(it);
                                }
                            }
                        }
                    }
                }
            }

            let alpha = segment_step(self.query, it.coords(), self.s.point(j));
            let prev = it.clone();
            it.step_toward(self.s, j, alpha);
            self.iterations += 1;
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                it.refresh(self.s);
                since_refresh = 0;
            }
            let next_sq = dist_sq(it.coords(), self.query);
            if !(next_sq < delta_sq) {
                // Floating-point stall: the step no longer reduces the gap.
                return LoopEnd::Limit(prev);
            }
            delta_sq = next_sq;
            self.record(j, eps_flag, delta_sq);
        }
    }
}

fn check_inputs(s: &PointSet, p: &[f64], cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if s.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if p.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: p.len(),
        });
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Membership oracle used by the reductions and by vertex enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Oracle {
    /// Vanilla Triangle Algorithm on the raw instance.
    Ta,
    /// Triangle Algorithm on the instance moved onto the unit sphere.
    #[default]
    SphericalTa,
}

impl Oracle {
    pub fn solve(self, s: &PointSet, p: &[f64], cfg: &SolverConfig) -> Result<ChmOutcome> {
        self.solve_from(s, p, cfg, None)
    }

    /// Solve with an optional warm start given as convex coefficients over `s`.
    pub fn solve_from(
        self,
        s: &PointSet,
        p: &[f64],
        cfg: &SolverConfig,
        start: Option<&[(usize, f64)]>,
    ) -> Result<ChmOutcome> {
        match self {
            Oracle::Ta => {
                let start = start.and_then(|c| Iterate::from_coefficients(s, c.to_vec()).ok());
                solve_ta_from(s, p, cfg, start)
            }
            Oracle::SphericalTa => solve_spherical_ta_from(s, p, cfg, start),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Oracle::Ta => "ta",
            Oracle::SphericalTa => "spherical-ta",
        }
    }
}

/// Vanilla Triangle Algorithm for `p ∈ conv(s)?`, started at the point of
/// `s` closest to `p`.
pub fn solve_ta(s: &PointSet, p: &[f64], cfg: &SolverConfig) -> Result<ChmOutcome> {
    solve_ta_from(s, p, cfg, None)
}

/// [`solve_ta`] with an optional warm-start iterate over `s`.
pub fn solve_ta_from(
    s: &PointSet,
    p: &[f64],
    cfg: &SolverConfig,
    start: Option<Iterate>,
) -> Result<ChmOutcome> {
    check_inputs(s, p, cfg)?;
    let radius = s.max_distance_from(p);
    let start = match start {
        Some(it) => it,
        None => Iterate::vertex(s, s.closest_to(p)),
    };
    let mut lp = Loop {
        s,
        query: p,
        tol: cfg.epsilon * radius,
        cfg,
        eps_fast_path: None,
        trace: cfg.record_trace.then(IterationTrace::default),
        trace_scale: if radius > 0.0 { radius } else { 1.0 },
        iterations: 0,
    };
    let end = lp.run(start);
    let verdict = match end {
        LoopEnd::Inside(iterate) => {
            let residual = libm::sqrt(dist_sq(iterate.coords(), p));
            Verdict::InsideApprox { iterate, residual }
        }
        LoopEnd::Witness(iterate) => {
            debug_assert!(verify_witness(p, iterate.coords(), s));
            let plane = bisector_hyperplane(p, iterate.coords())?;
            Verdict::Witness {
                cert: WitnessCertificate {
                    witness: iterate,
                    plane,
                },
                unit_witness: None,
            }
        }
        LoopEnd::Limit(best) => {
            let residual = libm::sqrt(dist_sq(best.coords(), p));
            Verdict::IterationLimit { best, residual }
        }
    };
    Ok(ChmOutcome {
        verdict,
        iterations: lp.iterations,
        radius,
        trace: lp.trace,
    })
}

/// Spherical Triangle Algorithm: reduce to the unit sphere around `p_raw`,
/// run TA there to precision `ε`, and map the result back to raw
/// coordinates (an `εR`-approximate member, or a raw separating plane).
pub fn solve_spherical_ta(raw: &PointSet, p_raw: &[f64], cfg: &SolverConfig) -> Result<ChmOutcome> {
    solve_spherical_ta_from(raw, p_raw, cfg, None)
}

/// [`solve_spherical_ta`] with an optional warm start given as raw convex
/// coefficients over `raw`.
pub fn solve_spherical_ta_from(
    raw: &PointSet,
    p_raw: &[f64],
    cfg: &SolverConfig,
    start: Option<&[(usize, f64)]>,
) -> Result<ChmOutcome> {
    check_inputs(raw, p_raw, cfg)?;
    let inst = match to_spherical(raw, p_raw)? {
        Spherical::ImmediateMember(i) => {
            let trace = cfg.record_trace.then(|| IterationTrace {
                deltas: vec![0.0],
                ..Default::default()
            });
            return Ok(ChmOutcome {
                verdict: Verdict::InsideApprox {
                    iterate: Iterate::vertex(raw, i),
                    residual: 0.0,
                },
                iterations: 0,
                radius: raw.max_distance_from(p_raw),
                trace,
            });
        }
        Spherical::Instance(inst) => inst,
    };
    let unit = inst.unit_points();
    let origin = vec![0.0; raw.dim()];
    let start_it = match start.and_then(|c| warm_start_unit(c, &inst)) {
        Some(it) => it,
        None => Iterate::vertex(unit, 0),
    };
    let mut lp = Loop {
        s: unit,
        query: &origin,
        tol: cfg.epsilon,
        cfg,
        eps_fast_path: cfg.enable_eps_property.then_some(cfg.epsilon),
        trace: cfg.record_trace.then(IterationTrace::default),
        trace_scale: 1.0,
        iterations: 0,
    };
    let end = lp.run(start_it);
    let radius = inst.radius();
    let verdict = match end {
        LoopEnd::Inside(it) => {
            let iterate = recover_solution(it.coeffs(), &inst, raw)?;
            let residual = libm::sqrt(dist_sq(iterate.coords(), p_raw));
            Verdict::InsideApprox { iterate, residual }
        }
        LoopEnd::Witness(it) => {
            debug_assert!(verify_witness(&origin, it.coords(), unit));
            let plane = recover_witness(it.coords(), &inst)?;
            let witness = recover_solution(it.coeffs(), &inst, raw)?;
            Verdict::Witness {
                cert: WitnessCertificate { witness, plane },
                unit_witness: Some(it.coords().to_vec()),
            }
        }
        LoopEnd::Limit(it) => {
            let best = recover_solution(it.coeffs(), &inst, raw)?;
            let residual = libm::sqrt(dist_sq(best.coords(), p_raw));
            Verdict::IterationLimit { best, residual }
        }
    };
    Ok(ChmOutcome {
        verdict,
        iterations: lp.iterations,
        radius,
        trace: lp.trace,
    })
}

/// Inverse of the coefficient map in [`recover_solution`]: raw weights `β`
/// become unit-frame weights `α ∝ βᵢ·scaleᵢ`.
fn warm_start_unit(coeffs: &[(usize, f64)], inst: &SphericalInstance) -> Option<Iterate> {
    let n = inst.scales().len();
    let mut alpha: Vec<(usize, f64)> = coeffs
        .iter()
        .filter(|&&(i, w)| i < n && w > 0.0)
        .map(|&(i, w)| (i, w * inst.scales()[i]))
        .collect();
    let total: f64 = alpha.iter().map(|a| a.1).sum();
    if !(total > 0.0) {
        return None;
    }
    for a in &mut alpha {
        a.1 /= total;
    }
    Iterate::from_coefficients(inst.unit_points(), alpha).ok()
}

/// ε-property test at spherical iterate `p'`: returns the pivot `v`
/// maximizing `‖p' - v‖` among pivots with `‖p' - v‖ ≥ √(1+ε)`, lowest index
/// on ties, or `None`.
pub fn check_eps_property(p_prime: &[f64], s: &PointSet, eps: f64) -> Option<usize> {
    let origin = vec![0.0; s.dim()];
    let threshold = 1.0 + eps;
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in s.iter().enumerate() {
        let d = dist_sq(p_prime, v);
        if d >= threshold
            && crate::geometry::is_pivot(&origin, p_prime, v)
            && best.is_none_or(|(_, b)| d > b)
        {
            best = Some((j, d));
        }
    }
    best.map(|b| b.0)
}

/// Outcome of a composite iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositeOutcome {
    /// An iterate with `‖p_t‖² ≤ ‖p_k‖² - (0.4ε)²` (or `‖p_t‖ ≤ ε`).
    Reduced { iterate: Iterate, steps: usize },
    /// A witness with respect to the full point set.
    Witness { iterate: Iterate, steps: usize },
    /// The inner cap `50·|restricted set|` was reached.
    IterationLimit { best: Iterate, steps: usize },
}

/// Composite iterate at a spherical iterate `p_k` lacking the ε-property.
///
/// Solves the restricted problem `0 ∈ conv({p_k, v^k, v^{k+1}, ...})` with
/// TA, where `v^k` is a strict pivot for `p_k` and `v^{k+1}` a strict pivot
/// for the projection of `0` onto `p_k v^k`. The restricted set grows by one
/// full-set pivot each time the inner solve stalls at a relative witness.
pub fn composite_iterate(
    p_k: &Iterate,
    s: &PointSet,
    eps: f64,
    cfg: &SolverConfig,
) -> CompositeOutcome {
    composite_iterate_bounded(p_k, s, eps, cfg, usize::MAX)
}

/// One restricted-set member: its coordinates and its expansion over `S`.
struct Member {
    expansion: Vec<(usize, f64)>,
    source: Option<usize>,
}

fn compose(members: &[Member], weights: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for &(r, lam) in weights {
        for &(i, w) in &members[r].expansion {
            let add = lam * w;
            if add <= 0.0 {
                continue;
            }
            match out.iter_mut().find(|c| c.0 == i) {
                Some(c) => c.1 += add,
                None => out.push((i, add)),
            }
        }
    }
    out
}

fn composite_iterate_bounded(
    p_k: &Iterate,
    s: &PointSet,
    eps: f64,
    cfg: &SolverConfig,
    budget: usize,
) -> CompositeOutcome {
    let m = s.dim();
    let origin = vec![0.0; m];
    let start_sq = norm_sq(p_k.coords());
    let target_sq = start_sq - (0.4 * eps) * (0.4 * eps);
    let done = |x: f64| x <= target_sq || x <= eps * eps;

    let vk = match scan_pivot(s, &origin, p_k.coords(), PivotRule::Greedy).index() {
        Some(j) => j,
        None => {
            return CompositeOutcome::Witness {
                iterate: p_k.clone(),
                steps: 0,
            }
        }
    };
    let mut members = vec![
        Member {
            expansion: p_k.coeffs().to_vec(),
            source: None,
        },
        Member {
            expansion: vec![(vk, 1.0)],
            source: Some(vk),
        },
    ];
    let mut data: Vec<f64> = p_k.coords().to_vec();
    data.extend_from_slice(s.point(vk));
    let mut restricted = PointSet::from_columns(m, data.clone()).expect("finite points");

    let mut inner = Iterate::vertex(&restricted, 0);
    let alpha = segment_step(&origin, inner.coords(), restricted.point(1));
    inner.step_toward(&restricted, 1, alpha);
    let mut steps = 1usize;
    let mut cur_sq = norm_sq(inner.coords());

    let finish = |inner: &Iterate, members: &[Member]| {
        Iterate::from_parts(inner.coords().to_vec(), compose(members, inner.coeffs()))
    };

    if done(cur_sq) {
        return CompositeOutcome::Reduced {
            iterate: finish(&inner, &members),
            steps,
        };
    }

    loop {
        match scan_pivot(&restricted, &origin, inner.coords(), PivotRule::Greedy).index() {
            Some(r) => {
                let alpha = segment_step(&origin, inner.coords(), restricted.point(r));
                let before = cur_sq;
                inner.step_toward(&restricted, r, alpha);
                steps += 1;
                cur_sq = norm_sq(inner.coords());
                if done(cur_sq) {
                    return CompositeOutcome::Reduced {
                        iterate: finish(&inner, &members),
                        steps,
                    };
                }
                if !(cur_sq < before) {
                    return CompositeOutcome::IterationLimit {
                        best: finish(&inner, &members),
                        steps,
                    };
                }
            }
            None => {
                // Relative witness: look for a pivot in the full set.
                let full = finish(&inner, &members);
                let Some(j) = scan_pivot(s, &origin, full.coords(), PivotRule::Greedy).index() else {
                    return CompositeOutcome::Witness {
                        iterate: full,
                        steps,
                    };
                };
                if members.iter().any(|mb| mb.source == Some(j)) {
                    return CompositeOutcome::IterationLimit { best: full, steps };
                }
                members.push(Member {
                    expansion: vec![(j, 1.0)],
                    source: Some(j),
                });
                data.extend_from_slice(s.point(j));
                restricted = PointSet::from_columns(m, data.clone()).expect("finite points");
            }
        }
        let cap = 50 * members.len();
        if steps >= cap || steps >= budget || steps >= cfg.max_iterations {
            return CompositeOutcome::IterationLimit {
                best: finish(&inner, &members),
                steps,
            };
        }
    }
}

/// `‖Σ wᵢ vᵢ - p‖` recomputed densely from coefficients.
pub fn dense_residual(s: &PointSet, coeffs: &[(usize, f64)], p: &[f64]) -> f64 {
    libm::sqrt(dist_sq(&s.combine(coeffs), p))
}
