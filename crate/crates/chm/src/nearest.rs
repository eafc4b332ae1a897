//! Wolfe's minimum-norm-point algorithm, used to measure distances to hulls
//! in floating point (robustness of generated vertex sets, instance margins).

use chm_core::PointSet;
use nalgebra::{DMatrix, DVector};

/// Nearest point of `conv(S)` to `p` and its convex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Nearest {
    pub point: Vec<f64>,
    pub weights: Vec<(usize, f64)>,
    pub distance: f64,
}

const MAX_MAJOR: usize = 100_000;

/// Minimum distance from `p` to `conv(S)`.
pub fn nearest_point(s: &PointSet, p: &[f64]) -> Nearest {
    let pts: Vec<Vec<f64>> = s.iter().map(|v| v.iter().zip(p).map(|(a, b)| a - b).collect()).collect();
    let scale = pts.iter().map(|v| norm_sq(v)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;

    let first = (0..pts.len())
        .min_by(|&a, &b| norm_sq(&pts[a]).total_cmp(&norm_sq(&pts[b])))
        .expect("non-empty point set");
    let mut support = vec![first];
    let mut lambda = vec![1.0];
    let mut x = pts[first].clone();

    for _ in 0..MAX_MAJOR {
        let xx = norm_sq(&x);
        let (j, xj) = (0..pts.len())
            .map(|j| (j, dot(&x, &pts[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xj <= tol || support.contains(&j) {
            break;
        }
        support.push(j);
        lambda.push(0.0);
        loop {
            let Some(w) = affine_min_norm(&pts, &support) else {
                // Affinely dependent support: drop the newest point.
                support.pop();
                lambda.pop();
                break;
            };
            if w.iter().all(|&v| v > 1e-14) {
                lambda = w;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&w)
                .filter(|(_, &wi)| wi <= 1e-14)
                .map(|(&l, &wi)| l / (l - wi))
                .fold(1.0, f64::min);
            for (l, wi) in lambda.iter_mut().zip(&w) {
                *l = theta * wi + (1.0 - theta) * *l;
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-14).collect();
            let mut k = 0;
            support.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            lambda.retain(|&l| l > 1e-14);
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        let next = combine(&pts, &support, &lambda);
        if norm_sq(&next) >= xx && support.len() > 1 {
            x = next;
            break;
        }
        x = next;
    }

    let point: Vec<f64> = x.iter().zip(p).map(|(a, b)| a + b).collect();
    Nearest {
        distance: norm_sq(&x).sqrt(),
        point,
        weights: support.into_iter().zip(lambda).collect(),
    }
}

/// γ-robustness: the smallest distance from a listed vertex to the hull of
/// all other points.
pub fn robustness(s: &PointSet, vertices: &[usize]) -> f64 {
    vertices
        .iter()
        .map(|&v| {
            let others: Vec<usize> = (0..s.len()).filter(|&i| i != v).collect();
            let rest = s.subset(&others).expect("at least two points");
            nearest_point(&rest, s.point(v)).distance
        })
        .fold(f64::INFINITY, f64::min)
}

/// Weights of the point of minimum norm in the affine hull of the support.
fn affine_min_norm(pts: &[Vec<f64>], support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = dot(&pts[support[i]], &pts[support[j]]);
        }
        a[(i, k)] = 1.0;
        a[(k, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = a.lu().solve(&rhs)?;
    let w: Vec<f64> = sol.iter().take(k).copied().collect();
    w.iter().all(|v| v.is_finite()).then_some(w)
}

fn combine(pts: &[Vec<f64>], support: &[usize], lambda: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; pts[0].len()];
    for (&i, &l) in support.iter().zip(lambda) {
        for (xc, vc) in x.iter_mut().zip(&pts[i]) {
            *xc += l * vc;
        }
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}
