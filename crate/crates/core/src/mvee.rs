//! Minimum-volume enclosing ellipsoid and the AVTA⁺ preprocessing pipeline.
//!
//! The solver is Khachiyan's multiplicative coordinate ascent on the dual with
//! Todd–Yildirim away steps, working on the lifted points `q = (v; 1)`. With
//! `X(u) = Σ uᵢ qᵢqᵢᵀ` and leverages `κᵢ = qᵢᵀX⁻¹qᵢ`, the primal ellipsoid is
//! `M = (1/m)(Σ uᵢvᵢvᵢᵀ - ccᵀ)⁻¹`, `c = Σ uᵢvᵢ`, and every point satisfies
//! `(v-c)ᵀM(v-c) = (κ - 1)/m`.

use alloc::vec;
use alloc::vec::Vec;

use crate::avta::{avta_plus, AvtaConfig, VertexReport};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::linalg::{cholesky, log_det, spd_inverse, Square};

/// `{x : (x-b)ᵀM(x-b) ≤ 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    /// Row-major `m×m` symmetric positive-definite shape matrix.
    pub shape_m: Vec<f64>,
    pub center_b: Vec<f64>,
}

impl Ellipsoid {
    pub fn dim(&self) -> usize {
        self.center_b.len()
    }

    /// `(x-b)ᵀM(x-b)`.
    pub fn level(&self, x: &[f64]) -> f64 {
        let m = self.dim();
        let d: Vec<f64> = x.iter().zip(&self.center_b).map(|(a, b)| a - b).collect();
        let mut acc = 0.0;
        for i in 0..m {
            let row = &self.shape_m[i * m..(i + 1) * m];
            acc += d[i] * row.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }

    /// Largest level over a point set.
    pub fn max_level(&self, s: &PointSet) -> f64 {
        s.iter().map(|v| self.level(v)).fold(0.0, f64::max)
    }

    /// `log det M`; the volume is proportional to `det(M)^{-1/2}`.
    pub fn log_det_shape(&self) -> Result<f64> {
        let sq = Square {
            n: self.dim(),
            a: self.shape_m.clone(),
        };
        cholesky(&sq)
            .map(|l| log_det(&l))
            .ok_or(Error::Numerical("shape matrix is not positive definite"))
    }

    /// `‖M₁ - M₂‖_F / ‖M₂‖_F`.
    pub fn relative_shape_distance(&self, reference: &Ellipsoid) -> f64 {
        let diff: f64 = self
            .shape_m
            .iter()
            .zip(&reference.shape_m)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let base: f64 = reference.shape_m.iter().map(|a| a * a).sum();
        libm::sqrt(diff / base)
    }
}

/// Rebuild `X⁻¹` from scratch every this many updates.
const REFRESH_EVERY: usize = 256;

/// Minimum-volume enclosing ellipsoid with `(v-b)ᵀM(v-b) ≤ 1 + eps_mvee` for
/// every input point.
pub fn mvee(s: &PointSet, eps_mvee: f64) -> Result<Ellipsoid> {
    mvee_with_limit(s, eps_mvee, usize::MAX)
}

/// As [`mvee`] with an explicit cap on coordinate updates.
pub fn mvee_with_limit(s: &PointSet, eps_mvee: f64, max_updates: usize) -> Result<Ellipsoid> {
    if !(eps_mvee > 0.0 && eps_mvee < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "eps_mvee must lie in (0,1), got {eps_mvee}"
        )));
    }
    let m = s.dim();
    let n = s.len();
    if n < m + 1 {
        return Err(Error::DimensionDeficient);
    }
    let d = (m + 1) as f64;
    let target = 1.0 + m as f64 * (1.0 + eps_mvee);

    let mut u = vec![1.0 / n as f64; n];
    let mut inv = lifted_inverse(s, &u)?;
    let mut kappa = leverages(s, &inv);
    let mut w = vec![0.0; m + 1];
    let mut proj = vec![0.0; n];
    let mut updates = 0usize;

    loop {
        let (j_up, k_up) = argmax(&kappa);
        if k_up <= target {
            // Confirm against a freshly factored X before accepting.
            inv = lifted_inverse(s, &u)?;
            kappa = leverages(s, &inv);
            if argmax(&kappa).1 <= target {
                break;
            }
            continue;
        }
        if updates >= max_updates {
            return Err(Error::IterationLimit(updates));
        }

        // Away candidate: smallest leverage among supported points.
        let (j_dn, k_dn) = kappa
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .fold((0, f64::INFINITY), |b, (i, &k)| if k < b.1 { (i, k) } else { b });

        let (j, alpha) = if k_up - d >= d - k_dn {
            (j_up, (k_up - d) / (d * (k_up - 1.0)))
        } else {
            let full = (k_dn - d) / (d * (k_dn - 1.0));
            (j_dn, full.max(-u[j_dn] / (1.0 - u[j_dn])))
        };
        if alpha == 0.0 {
            break;
        }

        // X' = (1-α)X + α q qᵀ, via Sherman–Morrison.
        let q = lift(s.point(j));
        for (r, wr) in w.iter_mut().enumerate() {
            *wr = (0..=m).map(|c| inv.at(r, c) * q[c]).sum();
        }
        let kj = kappa[j];
        let denom = (1.0 - alpha) + alpha * kj;
        if !(denom > 0.0) {
            return Err(Error::Numerical("ellipsoid update lost definiteness"));
        }
        let scale = 1.0 / (1.0 - alpha);
        let coef = alpha / denom;
        for r in 0..=m {
            for c in 0..=m {
                let v = inv.at(r, c) - coef * w[r] * w[c];
                *inv.at_mut(r, c) = scale * v;
            }
        }
        project(s, &w, &mut proj);
        for (k, p) in kappa.iter_mut().zip(&proj) {
            *k = scale * (*k - coef * p * p);
        }
        for ui in u.iter_mut() {
            *ui *= 1.0 - alpha;
        }
        u[j] += alpha;
        if u[j] < 1e-300 {
            u[j] = 0.0;
        }

        updates += 1;
        if updates.is_multiple_of(REFRESH_EVERY) {
            inv = lifted_inverse(s, &u)?;
            kappa = leverages(s, &inv);
        }
    }

    primal(s, &u)
}

/// AVTA⁺ followed by [`mvee`] on the discovered vertices only.
pub fn avta_plus_mvee(s: &PointSet, cfg: &AvtaConfig, eps_mvee: f64) -> Result<Ellipsoid> {
    avta_plus_mvee_report(s, cfg, eps_mvee).map(|(e, _)| e)
}

/// As [`avta_plus_mvee`], also returning the vertex report.
pub fn avta_plus_mvee_report(
    s: &PointSet,
    cfg: &AvtaConfig,
    eps_mvee: f64,
) -> Result<(Ellipsoid, VertexReport)> {
    let report = avta_plus(s, cfg)?;
    let mut idx = report.vertex_indices.clone();
    idx.sort_unstable();
    let e = mvee(&s.subset(&idx)?, eps_mvee)?;
    Ok((e, report))
}

fn lift(v: &[f64]) -> Vec<f64> {
    let mut q = v.to_vec();
    q.push(1.0);
    q
}

fn argmax(x: &[f64]) -> (usize, f64) {
    x.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &k)| if k > b.1 { (i, k) } else { b })
}

/// `(X(u))⁻¹` for the lifted points.
fn lifted_inverse(s: &PointSet, u: &[f64]) -> Result<Square> {
    let m = s.dim();
    let mut x = Square::zeros(m + 1);
    for (v, &ui) in s.iter().zip(u) {
        if ui == 0.0 {
            continue;
        }
        for r in 0..=m {
            let qr = if r < m { v[r] } else { 1.0 };
            for c in 0..=r {
                let qc = if c < m { v[c] } else { 1.0 };
                *x.at_mut(r, c) += ui * qr * qc;
            }
        }
    }
    for r in 0..=m {
        for c in 0..r {
            *x.at_mut(c, r) = x.at(r, c);
        }
    }
    let l = factor_checked(&x)?;
    Ok(spd_inverse(&l))
}

/// Cholesky with a relative pivot floor so that nearly flat point sets are
/// reported rather than producing enormous ellipsoids.
fn factor_checked(x: &Square) -> Result<Square> {
    let scale = (0..x.n).map(|i| x.at(i, i)).fold(0.0, f64::max);
    let l = cholesky(x).ok_or(Error::DimensionDeficient)?;
    let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
    if (0..l.n).any(|i| l.at(i, i) * l.at(i, i) <= floor) {
        return Err(Error::DimensionDeficient);
    }
    Ok(l)
}

fn leverages(s: &PointSet, inv: &Square) -> Vec<f64> {
    let m = s.dim();
    let mut scratch = vec![0.0; m + 1];
    s.iter()
        .map(|v| {
            for (r, out) in scratch.iter_mut().enumerate() {
                let row = &inv.a[r * (m + 1)..(r + 1) * (m + 1)];
                *out = row[..m].iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + row[m];
            }
            scratch[..m].iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + scratch[m]
        })
        .collect()
}

/// `out[i] = wᵀ(vᵢ; 1)`.
fn project(s: &PointSet, w: &[f64], out: &mut [f64]) {
    let m = s.dim();
    let body = |(o, v): (&mut f64, &[f64])| {
        *o = v.iter().zip(&w[..m]).map(|(a, b)| a * b).sum::<f64>() + w[m];
    };
    #[cfg(feature = "parallel")]
    if s.len() * m >= crate::geometry::PARALLEL_WORK && rayon::current_num_threads() > 1 {
        use rayon::prelude::*;
        out.par_iter_mut()
            .zip(s.as_slice().par_chunks_exact(m))
            .for_each(body);
        return;
    }
    out.iter_mut().zip(s.iter()).for_each(body);
}

fn primal(s: &PointSet, u: &[f64]) -> Result<Ellipsoid> {
    let m = s.dim();
    let mut c = vec![0.0; m];
    for (v, &ui) in s.iter().zip(u) {
        for (ck, vk) in c.iter_mut().zip(v) {
            *ck += ui * vk;
        }
    }
    let mut cov = Square::zeros(m);
    for (v, &ui) in s.iter().zip(u) {
        if ui == 0.0 {
            continue;
        }
        for r in 0..m {
            let dr = v[r] - c[r];
            for k in 0..=r {
                *cov.at_mut(r, k) += ui * dr * (v[k] - c[k]);
            }
        }
    }
    for r in 0..m {
        for k in 0..r {
            *cov.at_mut(k, r) = cov.at(r, k);
        }
    }
    let l = factor_checked(&cov)?;
    let mut shape = spd_inverse(&l);
    let inv_m = 1.0 / m as f64;
    shape.a.iter_mut().for_each(|x| *x *= inv_m);
    Ok(Ellipsoid {
        shape_m: shape.a,
        center_b: c,
    })
}
