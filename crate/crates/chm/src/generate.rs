//! Seeded random instances for every problem the library solves.
//!
//! Identical spec and seed give bit-identical instances.

use chm_core::{LpFeasInstance, PointSet, StrictLpInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::nearest::nearest_point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Entries `N(0, 1)`.
    Gaussian,
    /// Uniform on the unit sphere.
    Sphere,
    /// Entries uniform on `(0, 1)`.
    Uniform,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Gaussian => "gaussian",
            Kind::Sphere => "sphere",
            Kind::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Kind::Gaussian),
            "sphere" => Ok(Kind::Sphere),
            "uniform" => Ok(Kind::Uniform),
            _ => Err(format!("unknown kind {s:?} (gaussian|sphere|uniform)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: Kind,
    /// Dimension (rows of a matrix).
    pub m: usize,
    /// Number of points (columns of a matrix).
    pub n: usize,
    /// Number of vertices for vertex-enumeration instances.
    pub k: usize,
    pub redundant_fraction: f64,
    pub feasible: bool,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: Kind, m: usize, n: usize, seed: u64) -> Self {
        Self {
            kind,
            m,
            n,
            k: n,
            redundant_fraction: 0.0,
            feasible: true,
            seed,
        }
    }

    pub fn feasible(mut self, feasible: bool) -> Self {
        self.feasible = feasible;
        self
    }

    /// `k` vertices plus `n - k` redundant points.
    pub fn vertices(mut self, k: usize) -> Self {
        self.k = k;
        self.redundant_fraction = 1.0 - k as f64 / self.n as f64;
        self
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// What the construction guarantees about a membership query.
#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    /// The query is this convex combination of the points.
    Inside { coeffs: Vec<(usize, f64)> },
    /// The query is at least `margin` away from the hull.
    Outside { margin: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChmInstance {
    pub points: PointSet,
    pub query: Vec<f64>,
    pub truth: Truth,
}

impl ChmInstance {
    pub fn feasible(&self) -> bool {
        matches!(self.truth, Truth::Inside { .. })
    }
}

fn draw_point(kind: Kind, m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match kind {
        Kind::Uniform => (0..m).map(|_| rng.random::<f64>()).collect(),
        Kind::Gaussian => (0..m).map(|_| StandardNormal.sample(rng)).collect(),
        Kind::Sphere => loop {
            let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
            let n = norm(&v);
            if n > 1e-12 {
                break v.into_iter().map(|x| x / n).collect();
            }
        },
    }
}

fn simplex_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn points_from(rows: &[Vec<f64>]) -> PointSet {
    PointSet::from_points(rows).expect("generated points are finite and consistent")
}

/// Points drawn from `spec.kind` and a query inside (a random convex
/// combination) or outside (pushed past the supporting plane along the mean
/// direction, with margin ≥ 0.1·R).
pub fn gen_chm_instance(spec: &GenSpec) -> ChmInstance {
    let mut rng = spec.rng();
    let pts: Vec<Vec<f64>> = (0..spec.n).map(|_| draw_point(spec.kind, spec.m, &mut rng)).collect();
    let w = simplex_weights(spec.n, &mut rng);
    let points = points_from(&pts);
    if spec.feasible {
        let coeffs: Vec<(usize, f64)> = w.into_iter().enumerate().collect();
        let query = points.combine(&coeffs);
        return ChmInstance {
            points,
            query,
            truth: Truth::Inside { coeffs },
        };
    }
    let (query, margin) = push_outside(&points, &mut rng);
    ChmInstance {
        points,
        query,
        truth: Truth::Outside { margin },
    }
}

/// A query outside `conv(S)` with distance ≥ margin ≥ 0.1·max‖p - vᵢ‖.
fn push_outside(points: &PointSet, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
    let m = points.dim();
    let n = points.len() as f64;
    let mut c = vec![0.0; m];
    for v in points.iter() {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi / n;
        }
    }
    let mut u = c.clone();
    if norm(&u) < 1e-6 {
        u = draw_point(Kind::Sphere, m, rng);
    }
    let un = norm(&u);
    u.iter_mut().for_each(|x| *x /= un);
    let h = points.iter().map(|v| dot(&u, v)).fold(f64::NEG_INFINITY, f64::max);
    let spread = points.max_distance_from(&c).max(1e-12);
    // R ≤ 2·spread + δ, so δ = spread/4 gives δ ≥ 0.1·R.
    let delta = spread / 4.0;
    let t = h - dot(&u, &c) + delta;
    let query: Vec<f64> = c.iter().zip(&u).map(|(a, b)| a + t * b).collect();
    (query, delta)
}

/// A vertex-enumeration instance: `k` points from `spec.kind`, then
/// `n - k` random convex combinations of them, shuffled together.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexInstance {
    pub points: PointSet,
    /// Positions of the generated vertices that are extreme points of the
    /// hull (checked numerically), sorted.
    pub vertices: Vec<usize>,
}

pub fn gen_vertex_instance(spec: &GenSpec) -> VertexInstance {
    let mut rng = spec.rng();
    let k = spec.k.min(spec.n).max(1);
    let base: Vec<Vec<f64>> = (0..k).map(|_| draw_point(spec.kind, spec.m, &mut rng)).collect();
    let base_set = points_from(&base);
    let mut rows: Vec<(Vec<f64>, bool)> = base.iter().cloned().map(|v| (v, true)).collect();
    for _ in k..spec.n {
        let w: Vec<(usize, f64)> = simplex_weights(k, &mut rng).into_iter().enumerate().collect();
        rows.push((base_set.combine(&w), false));
    }
    rows.shuffle(&mut rng);

    let scale = base_set.max_norm().max(1.0);
    let extreme: Vec<bool> = (0..k)
        .map(|i| {
            if k == 1 {
                return true;
            }
            let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
            let rest = base_set.subset(&others).expect("non-empty");
            nearest_point(&rest, base_set.point(i)).distance > 1e-9 * scale
        })
        .collect();
    // Map base index → shuffled position via identity of the row data.
    let mut vertices = Vec::new();
    for (pos, (row, is_base)) in rows.iter().enumerate() {
        if *is_base {
            let i = base.iter().position(|b| b == row).expect("base row present");
            if extreme[i] {
                vertices.push(pos);
            }
        }
    }
    let points = points_from(&rows.into_iter().map(|r| r.0).collect::<Vec<_>>());
    VertexInstance { points, vertices }
}

/// Cross-polytope `±eᵢ` plus random sphere points; the hull contains the
/// ball of radius `1/√m` about the origin, which is the query.
pub fn gen_ball_instance(m: usize, n: usize, seed: u64) -> ChmInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n.max(2 * m));
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; m];
            e[i] = s;
            rows.push(e);
        }
    }
    while rows.len() < n {
        rows.push(draw_point(Kind::Sphere, m, &mut rng));
    }
    rows.shuffle(&mut rng);
    let points = points_from(&rows);
    let coeffs = (0..points.len())
        .filter(|&i| rows[i].iter().filter(|&&x| x != 0.0).count() == 1)
        .map(|i| (i, 1.0 / (2 * m) as f64))
        .collect();
    ChmInstance {
        points,
        query: vec![0.0; m],
        truth: Truth::Inside { coeffs },
    }
}

/// `Ax = b, x ≥ 0` instance with ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    pub inst: LpFeasInstance,
    pub feasible: bool,
    /// The planted solution when feasible.
    pub x: Option<Vec<f64>>,
}

fn draw_matrix(kind: Kind, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Columns drawn as points, stored row-major.
    let cols_v: Vec<Vec<f64>> = (0..cols).map(|_| draw_point(kind, rows, rng)).collect();
    let mut a = vec![0.0; rows * cols];
    for (j, c) in cols_v.iter().enumerate() {
        for i in 0..rows {
            a[i * cols + j] = c[i];
        }
    }
    a
}

fn mat_vec(a: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    (0..rows).map(|i| dot(&a[i * cols..(i + 1) * cols], x)).collect()
}

/// `A` is `m × n` with columns from `spec.kind`. Feasible: `x ~ U(0,1)ⁿ`,
/// `b = Ax`. Infeasible: columns are flipped so that `Aᵀy ≥ 0` for a random
/// unit `y`, then `b = -Ax₀`, giving the Farkas certificate `bᵀy < 0`.
pub fn gen_lp_instance(spec: &GenSpec, bound_m: f64) -> LpInstance {
    let mut rng = spec.rng();
    let (rows, cols) = (spec.m, spec.n);
    let mut a = draw_matrix(spec.kind, rows, cols, &mut rng);
    let x: Vec<f64> = (0..cols).map(|_| rng.random::<f64>()).collect();
    if spec.feasible {
        let b = mat_vec(&a, rows, cols, &x);
        let inst = LpFeasInstance::new(rows, cols, a, b, bound_m).expect("valid shape");
        return LpInstance {
            inst,
            feasible: true,
            x: Some(x),
        };
    }
    let y = match spec.kind {
        Kind::Uniform => vec![1.0 / (rows as f64).sqrt(); rows],
        _ => draw_point(Kind::Sphere, rows, &mut rng),
    };
    for j in 0..cols {
        let s: f64 = (0..rows).map(|i| a[i * cols + j] * y[i]).sum();
        if s < 0.0 {
            for i in 0..rows {
                a[i * cols + j] = -a[i * cols + j];
            }
        }
    }
    let b: Vec<f64> = mat_vec(&a, rows, cols, &x).into_iter().map(|v| -v).collect();
    let inst = LpFeasInstance::new(rows, cols, a, b, bound_m).expect("valid shape");
    LpInstance {
        inst,
        feasible: false,
        x: None,
    }
}

/// `Ax < b` instance with ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictInstance {
    pub inst: StrictLpInstance,
    pub feasible: bool,
}

/// `A` is `n × m` (`n` rows, `m` columns) with rows from `spec.kind`.
/// Feasible: `b = Ax + ξ + 0.1e` with `x, ξ ~ U(0,1)`. Infeasible:
/// `b = Ax + ξ'` with half of `ξ'` zero, plus one row `-Σ yᵢaᵢ` over the
/// tight rows (`y > 0` random) with `b = (-Σ yᵢaᵢ)ᵀx`, which closes a Gordan
/// certificate.
pub fn gen_strict_lp_instance(spec: &GenSpec) -> StrictInstance {
    let mut rng = spec.rng();
    let (rows, cols) = (spec.n, spec.m);
    let x: Vec<f64> = (0..cols).map(|_| rng.random::<f64>()).collect();
    let mut a_rows: Vec<Vec<f64>> = (0..rows).map(|_| draw_point(spec.kind, cols, &mut rng)).collect();
    let mut b: Vec<f64> = a_rows.iter().map(|r| dot(r, &x)).collect();
    if spec.feasible {
        for bi in b.iter_mut() {
            *bi += rng.random::<f64>() + 0.1;
        }
    } else {
        let mut order: Vec<usize> = (0..rows).collect();
        order.shuffle(&mut rng);
        let tight: Vec<usize> = order[..rows.div_ceil(2)].to_vec();
        for (i, bi) in b.iter_mut().enumerate() {
            if !tight.contains(&i) {
                *bi += rng.random::<f64>();
            }
        }
        let mut closing = vec![0.0; cols];
        for &i in &tight {
            let y = 0.5 + rng.random::<f64>();
            for (c, v) in closing.iter_mut().zip(&a_rows[i]) {
                *c -= y * v;
            }
        }
        b.push(dot(&closing, &x));
        a_rows.push(closing);
    }
    let n_rows = a_rows.len();
    let a: Vec<f64> = a_rows.into_iter().flatten().collect();
    StrictInstance {
        inst: StrictLpInstance::new(n_rows, cols, a, b).expect("valid shape"),
        feasible: spec.feasible,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
