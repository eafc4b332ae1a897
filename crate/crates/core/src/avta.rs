//! All-vertex enumeration (AVTA / AVTA⁺).
//!
//! Grows a working set `Ŝ` of vertices of `conv(S)`. Each remaining point is
//! tested against `conv(Ŝ)` at absolute precision `γ/2`; points that are that
//! close are redundant, and a witness for a point that is not yields a
//! direction along which a new vertex is found. Under γ-robustness (every
//! vertex at distance ≥ γ from the hull of the others) the final `Ŝ` is
//! exactly the vertex set.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{dist_sq, dot, PointSet};
use crate::solver::{Oracle, SolverConfig, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct AvtaConfig {
    /// Robustness parameter, in absolute distance units.
    pub gamma: f64,
    pub oracle: Oracle,
    pub seed: u64,
}

impl AvtaConfig {
    pub fn new(gamma: f64, oracle: Oracle, seed: u64) -> Self {
        Self {
            gamma,
            oracle,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Vertex,
    Redundant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexReport {
    /// `Ŝ` in order of discovery.
    pub vertex_indices: Vec<usize>,
    pub labels: Vec<Label>,
    /// Number of membership oracle calls.
    pub queries: usize,
    /// Largest `R` used to turn `γ/2` into the oracle's relative precision.
    pub diameter_r: f64,
    /// `γ` exceeded the hull diameter; the report holds a single vertex.
    pub gamma_exceeds_diameter: bool,
}

/// Index of the point of `s` farthest from `v`, lowest index on ties.
pub fn farthest(v: &[f64], s: &PointSet) -> usize {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, u) in s.iter().enumerate() {
        let d = dist_sq(u, v);
        if d > best.0 {
            best = (d, i);
        }
    }
    best.1
}

/// Maximizes `c'ᵀx` over points outside the working set. If several points
/// tie (within `1e-9·‖c'‖·max‖x‖`), picks one at random and returns the tied
/// point farthest from it, which is an endpoint of the maximizing face.
pub fn discover_vertex<R: Rng + ?Sized>(
    c_prime: &[f64],
    s: &PointSet,
    working: &[bool],
    rng: &mut R,
) -> Result<usize> {
    let c_norm = libm::sqrt(dot(c_prime, c_prime));
    if !(c_norm > 0.0) {
        return Err(Error::InvalidParameter("direction c' is zero".into()));
    }
    let scores: Vec<(usize, f64)> = (0..s.len())
        .filter(|&i| !working[i])
        .map(|i| (i, dot(c_prime, s.point(i))))
        .collect();
    let best = scores
        .iter()
        .map(|x| x.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if scores.is_empty() {
        return Err(Error::NoCandidates);
    }
    let tol = 1e-9 * c_norm * s.max_norm().max(1.0);
    let face: Vec<usize> = scores
        .iter()
        .filter(|x| x.1 >= best - tol)
        .map(|x| x.0)
        .collect();
    if face.len() == 1 {
        return Ok(face[0]);
    }
    let pick = face[rng.random_range(0..face.len())];
    let anchor = s.point(pick);
    let mut far = (f64::NEG_INFINITY, pick);
    for &i in &face {
        let d = dist_sq(s.point(i), anchor);
        if d > far.0 {
            far = (d, i);
        }
    }
    Ok(far.1)
}

/// AVTA with the vanilla Triangle Algorithm as membership oracle.
pub fn avta(s: &PointSet, cfg: &AvtaConfig) -> Result<VertexReport> {
    run(s, cfg.gamma, Oracle::Ta, cfg.seed)
}

/// AVTA⁺: AVTA with Spherical-TA as membership oracle.
pub fn avta_plus(s: &PointSet, cfg: &AvtaConfig) -> Result<VertexReport> {
    run(s, cfg.gamma, Oracle::SphericalTa, cfg.seed)
}

/// AVTA with the oracle named in the config.
pub fn avta_with(s: &PointSet, cfg: &AvtaConfig) -> Result<VertexReport> {
    run(s, cfg.gamma, cfg.oracle, cfg.seed)
}

fn run(s: &PointSet, gamma: f64, oracle: Oracle, seed: u64) -> Result<VertexReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let n = s.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let first = farthest(s.point(order[0]), s);
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut in_working = vec![false; n];
    let mut working = vec![first];
    labels[first] = Some(Label::Vertex);
    in_working[first] = true;

    let mut report = VertexReport {
        vertex_indices: Vec::new(),
        labels: Vec::new(),
        queries: 0,
        diameter_r: 0.0,
        gamma_exceeds_diameter: false,
    };

    // diam(S) ≤ 2·max‖v - v_first‖
    let reach = libm::sqrt(s.iter().map(|v| dist_sq(v, s.point(first))).fold(0.0, f64::max));
    if gamma >= 2.0 * reach {
        report.gamma_exceeds_diameter = true;
        report.labels = (0..n)
            .map(|i| if i == first { Label::Vertex } else { Label::Redundant })
            .collect();
        report.vertex_indices = working;
        return Ok(report);
    }

    let half = 0.5 * gamma;
    for &v in &order {
        if labels[v].is_some() {
            continue;
        }
        let point = s.point(v);
        // Warm start: convex coefficients over positions in `working`.
        let mut warm: Option<Vec<(usize, f64)>> = None;
        loop {
            let radius = libm::sqrt(
                working
                    .iter()
                    .map(|&i| dist_sq(s.point(i), point))
                    .fold(0.0, f64::max),
            );
            if radius <= half {
                labels[v] = Some(Label::Redundant);
                break;
            }
            report.diameter_r = report.diameter_r.max(radius);
            let eps = (half / radius).min(0.5);
            let sub = s.subset(&working)?;
            let out = oracle.solve_from(&sub, point, &SolverConfig::new(eps), warm.as_deref())?;
            report.queries += 1;
            match out.verdict {
                Verdict::InsideApprox { .. } => {
                    labels[v] = Some(Label::Redundant);
                    break;
                }
                Verdict::IterationLimit { .. } => return Err(Error::OracleLimit { point: v }),
                Verdict::Witness { cert, .. } => {
                    let c: Vec<f64> = point
                        .iter()
                        .zip(cert.witness.coords())
                        .map(|(a, b)| a - b)
                        .collect();
                    let found = discover_vertex(&c, s, &in_working, &mut rng)?;
                    working.push(found);
                    in_working[found] = true;
                    labels[found] = Some(Label::Vertex);
                    if found == v {
                        break;
                    }
                    warm = Some(cert.witness.coeffs().to_vec());
                }
            }
        }
    }

    report.labels = labels
        .into_iter()
        .map(|l| l.expect("every point labeled"))
        .collect();
    report.vertex_indices = working;
    Ok(report)
}
