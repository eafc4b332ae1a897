//! Small dense symmetric linear algebra for the ellipsoid solver.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Square {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix;
/// `None` if a pivot is not positive.
pub(crate) fn cholesky(m: &Square) -> Option<Square> {
    let n = m.n;
    let mut l = Square::zeros(n);
    for j in 0..n {
        let mut d = m.at(j, j);
        for k in 0..j {
            d -= l.at(j, k) * l.at(j, k);
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = libm::sqrt(d);
        *l.at_mut(j, j) = djj;
        for i in j + 1..n {
            let mut s = m.at(i, j);
            for k in 0..j {
                s -= l.at(i, k) * l.at(j, k);
            }
            *l.at_mut(i, j) = s / djj;
        }
    }
    Some(l)
}

/// Solves `L y = b` in place.
pub(crate) fn forward_solve(l: &Square, b: &mut [f64]) {
    for i in 0..l.n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.at(i, k) * b[k];
        }
        b[i] = s / l.at(i, i);
    }
}

/// Solves `Lᵀ x = y` in place.
pub(crate) fn backward_solve(l: &Square, b: &mut [f64]) {
    for i in (0..l.n).rev() {
        let mut s = b[i];
        for k in i + 1..l.n {
            s -= l.at(k, i) * b[k];
        }
        b[i] = s / l.at(i, i);
    }
}

/// Inverse of an SPD matrix given its Cholesky factor.
pub(crate) fn spd_inverse(l: &Square) -> Square {
    let n = l.n;
    let mut inv = Square::zeros(n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        forward_solve(l, &mut col);
        backward_solve(l, &mut col);
        for i in 0..n {
            *inv.at_mut(i, j) = col[i];
        }
    }
    // symmetrize
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (inv.at(i, j) + inv.at(j, i));
            *inv.at_mut(i, j) = v;
            *inv.at_mut(j, i) = v;
        }
    }
    inv
}

/// `log det` from a Cholesky factor.
pub(crate) fn log_det(l: &Square) -> f64 {
    2.0 * (0..l.n).map(|i| libm::log(l.at(i, i))).sum::<f64>()
}
