//! Exact convex hull membership over the rationals, for small instances.
//!
//! Every `f64` input is converted to the rational it represents exactly, so
//! the verdict is the true answer for the stored floating-point data.

use chm_core::PointSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const MAX_DIM: usize = 8;
pub const MAX_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("exact oracle is limited to m ≤ {MAX_DIM}, n ≤ {MAX_POINTS}; got m = {m}, n = {n}")]
    TooLarge { m: usize, n: usize },
    #[error("input is not finite")]
    NonFinite,
    #[error("query has {got} coordinates, points have {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactVerdict {
    /// `p ∈ conv(S)`, with exact convex weights.
    Inside { weights: Vec<BigRational> },
    /// `p ∉ conv(S)`: squared distance and nearest hull point, exactly.
    Outside {
        distance_sq: BigRational,
        nearest: Vec<BigRational>,
    },
}

impl ExactVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, ExactVerdict::Inside { .. })
    }

    /// Distance to the hull as `f64` (0 when inside).
    pub fn distance(&self) -> f64 {
        match self {
            ExactVerdict::Inside { .. } => 0.0,
            ExactVerdict::Outside { distance_sq, .. } => to_f64(distance_sq).sqrt(),
        }
    }
}

pub fn rational(x: f64) -> Result<BigRational, ExactError> {
    BigRational::from_float(x).ok_or(ExactError::NonFinite)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn rat_point(v: &[f64]) -> Result<Vec<BigRational>, ExactError> {
    v.iter().map(|&x| rational(x)).collect()
}

/// Exact membership of `p` in `conv(S)`; outside points also get the exact
/// squared distance.
pub fn exact_oracle(s: &PointSet, p: &[f64]) -> Result<ExactVerdict, ExactError> {
    let (m, n) = (s.dim(), s.len());
    if m > MAX_DIM || n > MAX_POINTS {
        return Err(ExactError::TooLarge { m, n });
    }
    if p.len() != m {
        return Err(ExactError::DimensionMismatch {
            expected: m,
            got: p.len(),
        });
    }
    let pts: Vec<Vec<BigRational>> = s.iter().map(rat_point).collect::<Result<_, _>>()?;
    let q = rat_point(p)?;
    if let Some(weights) = simplex_membership(&pts, &q) {
        return Ok(ExactVerdict::Inside { weights });
    }
    // The floating-point support is almost always the exact one; checking it
    // first avoids enumerating every face.
    let hint: Vec<usize> = crate::nearest::nearest_point(s, p)
        .weights
        .iter()
        .filter(|w| w.1 > 0.0)
        .map(|w| w.0)
        .collect();
    let (distance_sq, nearest) = optimal_on(&pts, &hint, &q).unwrap_or_else(|| nearest_point(&pts, &q));
    Ok(ExactVerdict::Outside {
        distance_sq,
        nearest,
    })
}

/// Phase-I simplex with Bland's rule on `Σλᵢvᵢ = p, Σλᵢ = 1, λ ≥ 0`.
fn simplex_membership(pts: &[Vec<BigRational>], p: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = pts.len();
    let m = p.len();
    let rows = m + 1;
    // Columns: n structural, then `rows` artificials, then the rhs.
    let width = n + rows + 1;
    let mut t: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row = vec![BigRational::zero(); width];
            let rhs = if r < m { p[r].clone() } else { BigRational::one() };
            let flip = rhs.is_negative();
            for (j, v) in pts.iter().enumerate() {
                let a = if r < m { v[r].clone() } else { BigRational::one() };
                row[j] = if flip { -a } else { a };
            }
            row[n + r] = BigRational::one();
            row[width - 1] = if flip { -rhs } else { rhs };
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + rows).collect();

    // Reduced costs of the phase-I objective: minimize the sum of artificials.
    let cost = |t: &Vec<Vec<BigRational>>, basis: &[usize], j: usize| -> BigRational {
        let mut c = if j >= n && j < n + rows {
            BigRational::one()
        } else {
            BigRational::zero()
        };
        for (r, &b) in basis.iter().enumerate() {
            if b >= n {
                c -= &t[r][j];
            }
        }
        c
    };

    loop {
        let entering = (0..n + rows).find(|&j| !basis.contains(&j) && cost(&t, &basis, j).is_negative());
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..rows {
            if t[r][e].is_positive() {
                let ratio = &t[r][width - 1] / &t[r][e];
                let better = match &leave {
                    None => true,
                    Some((lr, lv)) => ratio < *lv || (ratio == *lv && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        pivot(&mut t, r, e);
        basis[r] = e;
    }

    let infeasibility: BigRational = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n)
        .map(|(r, _)| t[r][width - 1].clone())
        .sum();
    if !infeasibility.is_zero() {
        return None;
    }
    let mut w = vec![BigRational::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            w[b] = t[r][width - 1].clone();
        }
    }
    Some(w)
}

fn pivot(t: &mut [Vec<BigRational>], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for x in t[r].iter_mut() {
        *x *= &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, y) in row.iter_mut().zip(&prow) {
            *x -= &f * y;
        }
    }
}

/// Nearest point of the hull by enumerating supports in increasing size and
/// accepting the first affine projection with positive weights that satisfies
/// the optimality condition against every point.
fn nearest_point(pts: &[Vec<BigRational>], p: &[BigRational]) -> (BigRational, Vec<BigRational>) {
    let n = pts.len();
    let m = p.len();
    for size in 1..=n.min(m + 1) {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if let Some(found) = optimal_on(pts, &subset, p) {
                return found;
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    unreachable!("some face of a polytope contains the nearest point")
}

/// The nearest point when it lies in the relative interior of `conv(subset)`.
fn optimal_on(pts: &[Vec<BigRational>], subset: &[usize], p: &[BigRational]) -> Option<(BigRational, Vec<BigRational>)> {
    if subset.is_empty() {
        return None;
    }
    let q = affine_projection(pts, subset, p)?;
    let diff: Vec<BigRational> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let qd = dot(&q, &diff);
    pts.iter().all(|v| dot(v, &diff) >= qd).then(|| (dot(&diff, &diff), q))
}

/// Projection of `p` onto the affine hull of the subset, if the subset is
/// affinely independent and the projection has strictly positive weights.
fn affine_projection(pts: &[Vec<BigRational>], subset: &[usize], p: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = subset.len();
    // [VᵀV 1; 1ᵀ 0] [λ; μ] = [Vᵀp; 1]
    let mut a = vec![vec![BigRational::zero(); k + 2]; k + 1];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(&pts[subset[i]], &pts[subset[j]]);
        }
        a[i][k] = BigRational::one();
        a[i][k + 1] = dot(&pts[subset[i]], p);
        a[k][i] = BigRational::one();
    }
    a[k][k + 1] = BigRational::one();
    let sol = solve(a)?;
    if sol[..k].iter().any(|l| !l.is_positive()) {
        return None;
    }
    let mut q = vec![BigRational::zero(); p.len()];
    for (&i, l) in subset.iter().zip(&sol) {
        for (qc, vc) in q.iter_mut().zip(&pts[i]) {
            *qc += l * vc;
        }
    }
    Some(q)
}

/// Gauss–Jordan on an augmented matrix; `None` if singular.
fn solve(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for c in 0..n {
        let r = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(r, c);
        pivot(&mut a, c, c);
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact check that `normalᵀv > offset` for every point while `normalᵀp < offset`,
/// or the reverse orientation.
pub fn exact_separates(normal: &[f64], offset: f64, s: &PointSet, p: &[f64]) -> Result<bool, ExactError> {
    let nrm = rat_point(normal)?;
    let off = rational(offset)?;
    let side = |x: &[f64]| -> Result<BigRational, ExactError> { Ok(dot(&nrm, &rat_point(x)?) - &off) };
    let sp = side(p)?;
    if sp.is_zero() {
        return Ok(false);
    }
    for v in s.iter() {
        let sv = side(v)?;
        if sv.is_zero() || sv.is_positive() == sp.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `x` as an exact integer ratio, for display.
pub fn ratio_string(x: &BigRational) -> String {
    if x.denom() == &BigInt::one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
