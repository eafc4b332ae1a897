//! Point sets, iterates, pivots and witnesses.
//!
//! Everything here is a pure function of its inputs. The hot loop of every
//! solver is [`scan_pivot`], a single pass over the point set computing
//! `(p' - p)ᵀ(v_j - p)` for each column.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[inline]
pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(norm_sq(a))
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A finite set of points in ℝᵐ, stored column-major with cached norms.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    norms: Vec<f64>,
    m: usize,
    n: usize,
}

impl PointSet {
    /// Builds a point set from column-major data: point `i` occupies
    /// `data[i*m..(i+1)*m]`.
    pub fn from_columns(m: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 || data.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if !data.len().is_multiple_of(m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: data.len() % m,
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = data.len() / m;
        let norms = data.chunks_exact(m).map(norm).collect();
        Ok(Self { data, norms, m, n })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let m = first.as_ref().len();
        let mut data = Vec::with_capacity(m * points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: p.len(),
                });
            }
            data.extend_from_slice(p);
        }
        Self::from_columns(m, data)
    }

    /// Ambient dimension `m`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    /// Number of points `n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    #[inline]
    pub fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Column-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.m)
    }

    pub fn max_norm(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.m);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        Self::from_columns(self.m, data)
    }

    /// Dense `Σ wᵢ vᵢ` over a sparse weight list.
    pub fn combine(&self, coeffs: &[(usize, f64)]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for &(i, w) in coeffs {
            for (o, x) in out.iter_mut().zip(self.point(i)) {
                *o += w * x;
            }
        }
        out
    }

    /// Largest distance from `p` to any point of the set (the `R` of the
    /// ε-approximation criterion).
    pub fn max_distance_from(&self, p: &[f64]) -> f64 {
        libm::sqrt(self.iter().map(|v| dist_sq(v, p)).fold(0.0, f64::max))
    }

    /// Index of the point closest to `p`, lowest index on ties.
    pub fn closest_to(&self, p: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, v) in self.iter().enumerate() {
            let d = dist_sq(v, p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// A point of `conv(S)` kept both as dense coordinates and as sparse convex
/// coefficients over `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    coords: Vec<f64>,
    coeffs: Vec<(usize, f64)>,
}

impl Iterate {
    /// The iterate sitting exactly on point `i`.
    pub fn vertex(s: &PointSet, i: usize) -> Self {
        Self {
            coords: s.point(i).to_vec(),
            coeffs: vec![(i, 1.0)],
        }
    }

    /// Builds an iterate from convex coefficients, validating the simplex
    /// constraint within `1e-9`.
    pub fn from_coefficients(s: &PointSet, coeffs: Vec<(usize, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(i, w) in &coeffs {
            if i >= s.len() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "coefficient index {i} out of range"
                )));
            }
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "negative coefficient {w} at index {i}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(alloc::format!(
                "coefficients sum to {total}, expected 1"
            )));
        }
        let coords = s.combine(&coeffs);
        Ok(Self { coords, coeffs })
    }

    pub(crate) fn from_parts(coords: Vec<f64>, coeffs: Vec<(usize, f64)>) -> Self {
        Self { coords, coeffs }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Sparse `(index, weight)` pairs, indices ascending by first insertion.
    pub fn coeffs(&self) -> &[(usize, f64)] {
        &self.coeffs
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<(usize, f64)>) {
        (self.coords, self.coeffs)
    }

    /// Dense weight vector of length `n`.
    pub fn dense_weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for &(i, a) in &self.coeffs {
            w[i] += a;
        }
        w
    }

    /// Moves to `(1-α)·self + α·v_j`, updating coefficients as
    /// `α'_j = (1-α)α_j + α`, `α'_i = (1-α)α_i`.
    pub(crate) fn step_toward(&mut self, s: &PointSet, j: usize, alpha: f64) {
        let keep = 1.0 - alpha;
        for (c, v) in self.coords.iter_mut().zip(s.point(j)) {
            *c = keep * *c + alpha * v;
        }
        let mut found = false;
        for (i, w) in self.coeffs.iter_mut() {
            *w *= keep;
            if *i == j {
                *w += alpha;
                found = true;
            }
        }
        if !found {
            self.coeffs.push((j, alpha));
        }
        self.coeffs.retain(|&(_, w)| w > 0.0);
    }

    /// Recomputes the dense coordinates from the coefficients and rescales the
    /// coefficients onto the simplex, discarding accumulated drift.
    pub fn refresh(&mut self, s: &PointSet) {
        let total: f64 = self.coeffs.iter().map(|c| c.1).sum();
        if total > 0.0 {
            for c in &mut self.coeffs {
                c.1 /= total;
            }
        }
        self.coords = s.combine(&self.coeffs);
    }

    /// Checks nonnegativity, unit sum (within `1e-9`) and coordinate
    /// consistency (within `1e-9·(1 + max norm)`).
    pub fn is_consistent(&self, s: &PointSet) -> bool {
        if self.coeffs.iter().any(|&(i, w)| i >= s.len() || !(w >= 0.0)) {
            return false;
        }
        let total: f64 = self.coeffs.iter().map(|c| c.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return false;
        }
        let dense = s.combine(&self.coeffs);
        libm::sqrt(dist_sq(&dense, &self.coords)) <= 1e-9 * (1.0 + s.max_norm())
    }
}

/// An affine hyperplane `{x : normalᵀx = offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    /// Signed value `normalᵀx - offset`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    /// True when `p` and every point of `s` lie strictly on opposite sides,
    /// each at signed value beyond `slack`. Orientation-agnostic.
    pub fn strictly_separates(&self, p: &[f64], s: &PointSet, slack: f64) -> bool {
        let side = self.eval(p);
        if side.abs() <= slack {
            return false;
        }
        let sign = side.signum();
        s.iter().all(|v| -sign * self.eval(v) > slack)
    }
}

/// A witness point together with a hyperplane separating the query from the
/// hull.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub witness: Iterate,
    pub plane: Hyperplane,
}

/// Closest point to `p` on the closed segment `[a, b]`, with the clamped step
/// `α = (p-a)ᵀ(b-a)/‖b-a‖²`.
///
/// A degenerate segment (`‖b-a‖ ≤ 1e-14`) returns `(a, 0)`.
pub fn nearest_on_segment(p: &[f64], a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let alpha = segment_step(p, a, b);
    let q = a
        .iter()
        .zip(b)
        .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
        .collect();
    (q, alpha)
}

pub(crate) fn segment_step(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((pi, ai), bi) in p.iter().zip(a).zip(b) {
        let d = bi - ai;
        num += (pi - ai) * d;
        den += d * d;
    }
    if den <= 1e-28 {
        return 0.0;
    }
    (num / den).clamp(0.0, 1.0)
}

/// `v` is a pivot for iterate `p'` when `(p-p')ᵀv ≥ ½(‖p‖² - ‖p'‖²)`, i.e.
/// `‖p'-v‖ ≥ ‖p-v‖`.
pub fn is_pivot(p: &[f64], p_prime: &[f64], v: &[f64]) -> bool {
    let lhs: f64 = p
        .iter()
        .zip(p_prime)
        .zip(v)
        .map(|((a, b), c)| (a - b) * c)
        .sum();
    lhs >= 0.5 * (norm_sq(p) - norm_sq(p_prime))
}

/// `v` is a strict pivot when the angle `p' p v` is at least a right angle,
/// i.e. `(p'-p)ᵀ(v-p) ≤ 0`.
pub fn is_strict_pivot(p: &[f64], p_prime: &[f64], v: &[f64]) -> Result<bool> {
    if p == p_prime {
        return Err(Error::AtQueryPoint);
    }
    let d: f64 = p
        .iter()
        .zip(p_prime)
        .zip(v)
        .map(|((pi, qi), vi)| (qi - pi) * (vi - pi))
        .sum();
    Ok(d <= 0.0)
}

/// Rule for choosing among admissible pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Minimize `(p'-p)ᵀ(v-p)` over the whole set, lowest index on ties.
    #[default]
    Greedy,
    /// First strict pivot by index, else first plain pivot.
    FirstFound,
}

/// Result of one pass over the point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PivotChoice {
    /// `(p'-p)ᵀ(v-p) ≤ 0`.
    Strict(usize),
    /// A pivot by distance that is not strict.
    Plain(usize),
    /// No pivot anywhere: the iterate is a witness.
    None,
}

impl PivotChoice {
    pub(crate) fn index(self) -> Option<usize> {
        match self {
            PivotChoice::Strict(j) | PivotChoice::Plain(j) => Some(j),
            PivotChoice::None => None,
        }
    }
}

#[cfg(feature = "parallel")]
pub(crate) const PARALLEL_WORK: usize = 1 << 18;

/// Minimum of `dᵀv_j` over the set, lowest index on ties.
fn argmin_dot(s: &PointSet, d: &[f64]) -> (usize, f64) {
    #[cfg(feature = "parallel")]
    if s.len() * s.dim() >= PARALLEL_WORK && rayon::current_num_threads() > 1 {
        use rayon::prelude::*;
        let chunk = (s.len() / (4 * rayon::current_num_threads())).max(64);
        let m = s.dim();
        return s
            .as_slice()
            .par_chunks(chunk * m)
            .enumerate()
            .map(|(c, block)| {
                let mut best = (usize::MAX, f64::INFINITY);
                for (k, v) in block.chunks_exact(m).enumerate() {
                    let val = dot(d, v);
                    if val < best.1 {
                        best = (c * chunk + k, val);
                    }
                }
                best
            })
            .reduce(
                || (usize::MAX, f64::INFINITY),
                |a, b| {
                    if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                        b
                    } else {
                        a
                    }
                },
            );
    }
    let mut best = (0, f64::INFINITY);
    for (j, v) in s.iter().enumerate() {
        let val = dot(d, v);
        if val < best.1 {
            best = (j, val);
        }
    }
    best
}

/// Scans `s` for a pivot of iterate `p_prime` with respect to query `p`.
///
/// Writing `d = p' - p` and `gⱼ = dᵀ(vⱼ - p)`, point `j` is a strict pivot
/// when `gⱼ ≤ 0` and a pivot when `gⱼ ≤ ½‖d‖²`. Under [`PivotRule::Greedy`]
/// the minimizer of `gⱼ` is returned, which is strict whenever any strict
/// pivot exists.
pub(crate) fn scan_pivot(s: &PointSet, p: &[f64], p_prime: &[f64], rule: PivotRule) -> PivotChoice {
    let d = sub(p_prime, p);
    let shift = dot(&d, p);
    let half = 0.5 * norm_sq(&d);
    match rule {
        PivotRule::Greedy => {
            let (j, g) = argmin_dot(s, &d);
            let g = g - shift;
            if g <= 0.0 {
                PivotChoice::Strict(j)
            } else if g <= half {
                PivotChoice::Plain(j)
            } else {
                PivotChoice::None
            }
        }
        PivotRule::FirstFound => {
            let mut plain = None;
            for (j, v) in s.iter().enumerate() {
                let g = dot(&d, v) - shift;
                if g <= 0.0 {
                    return PivotChoice::Strict(j);
                }
                if plain.is_none() && g <= half {
                    plain = Some(j);
                }
            }
            plain.map_or(PivotChoice::None, PivotChoice::Plain)
        }
    }
}

/// Greedy strict pivot: the index minimizing `(p'-p)ᵀ(vⱼ-p)` when that
/// minimum is `≤ 0`, lowest index on ties; `None` when no strict pivot exists.
///
/// `None` certifies `p ∉ conv(S)` whenever `p'` lies in `conv(S)` and
/// differs from `p`.
pub fn find_strict_pivot(p: &[f64], p_prime: &[f64], s: &PointSet) -> Option<usize> {
    match scan_pivot(s, p, p_prime, PivotRule::Greedy) {
        PivotChoice::Strict(j) => Some(j),
        _ => None,
    }
}

/// Orthogonal bisector of the segment `p p'`: `normal = p - p'`,
/// `offset = ½(‖p‖² - ‖p'‖²)`. The query lies on the positive side.
pub fn bisector_hyperplane(p: &[f64], p_prime: &[f64]) -> Result<Hyperplane> {
    let normal = sub(p, p_prime);
    if normal.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateBisector);
    }
    Ok(Hyperplane {
        normal,
        offset: 0.5 * (norm_sq(p) - norm_sq(p_prime)),
    })
}

/// True iff `‖p' - vᵢ‖ < ‖p - vᵢ‖` for every point of `s`.
pub fn verify_witness(p: &[f64], p_prime: &[f64], s: &PointSet) -> bool {
    verify_witness_with_slack(p, p_prime, s, 0.0)
}

/// [`verify_witness`] requiring each squared-distance gap
/// `‖p - vᵢ‖² - ‖p' - vᵢ‖²` to exceed `slack`.
pub fn verify_witness_with_slack(p: &[f64], p_prime: &[f64], s: &PointSet, slack: f64) -> bool {
    s.iter().all(|v| dist_sq(p, v) - dist_sq(p_prime, v) > slack)
}
