//! Reduction of a general membership query onto the unit sphere.
//!
//! Testing `pʳ ∈ conv(Sʳ)` is equivalent to testing `0 ∈ conv(S₀)` where
//! `S₀ = {(vᵢʳ - pʳ)/‖vᵢʳ - pʳ‖}`. Approximate solutions map back through a
//! reweighting of the convex coefficients, and a witness for `S₀` maps back to
//! a separating hyperplane in raw coordinates.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, norm_sq, Hyperplane, Iterate, PointSet};

/// A membership query moved to the unit sphere around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalInstance {
    unit_points: PointSet,
    scales: Vec<f64>,
    radius: f64,
    query_origin: Vec<f64>,
}

impl SphericalInstance {
    /// `uᵢ = (vᵢʳ - pʳ)/‖vᵢʳ - pʳ‖`, all of unit norm.
    pub fn unit_points(&self) -> &PointSet {
        &self.unit_points
    }

    /// `‖vᵢʳ - pʳ‖ > 0` per point.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// `R = max(scales)`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The original query point `pʳ`.
    pub fn query_origin(&self) -> &[f64] {
        &self.query_origin
    }
}

/// Outcome of [`to_spherical`].
#[derive(Debug, Clone, PartialEq)]
pub enum Spherical {
    Instance(SphericalInstance),
    /// The query coincides with point `index`, so it is a member with
    /// coefficient vector `e_index`.
    ImmediateMember(usize),
}

/// Translates `raw` by `-p_raw` and normalizes every point to unit length.
pub fn to_spherical(raw: &PointSet, p_raw: &[f64]) -> Result<Spherical> {
    if raw.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let m = raw.dim();
    if p_raw.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p_raw.len(),
        });
    }
    if p_raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let coincide = 1e-14 * (1.0 + norm(p_raw));
    let mut data = Vec::with_capacity(raw.len() * m);
    let mut scales = Vec::with_capacity(raw.len());
    for (i, v) in raw.iter().enumerate() {
        let start = data.len();
        data.extend(v.iter().zip(p_raw).map(|(a, b)| a - b));
        let scale = norm(&data[start..]);
        if scale <= coincide {
            return Ok(Spherical::ImmediateMember(i));
        }
        for x in &mut data[start..] {
            *x /= scale;
        }
        scales.push(scale);
    }
    let radius = scales.iter().copied().fold(0.0, f64::max);
    Ok(Spherical::Instance(SphericalInstance {
        unit_points: PointSet::from_columns(m, data)?,
        scales,
        radius,
        query_origin: p_raw.to_vec(),
    }))
}

/// Maps simplex weights `α` over the unit points to weights
/// `βᵢ = (αᵢ/scaleᵢ) / Σⱼ(αⱼ/scaleⱼ)` over the raw points, and returns the
/// raw iterate `Σ βᵢ vᵢʳ`.
///
/// If `‖Σ αᵢ uᵢ‖ ≤ ε` then `‖pʳ - Σ βᵢ vᵢʳ‖ ≤ εR`.
pub fn recover_solution(
    alpha: &[(usize, f64)],
    inst: &SphericalInstance,
    raw: &PointSet,
) -> Result<Iterate> {
    let mut beta: Vec<(usize, f64)> = alpha
        .iter()
        .filter(|&&(_, a)| a > 0.0)
        .map(|&(i, a)| (i, a / inst.scales[i]))
        .collect();
    let total: f64 = beta.iter().map(|b| b.1).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroWeights);
    }
    for b in &mut beta {
        b.1 /= total;
    }
    let coords = raw.combine(&beta);
    Ok(Iterate::from_parts(coords, beta))
}

/// Projection coefficients `tᵢ = p'ᵀwᵢ/‖p'‖²` with `wᵢ = (scaleᵢ/R)·uᵢ`, and
/// their minimum.
fn min_projection(p_prime: &[f64], inst: &SphericalInstance) -> Result<f64> {
    let pn = norm_sq(p_prime);
    if !(pn > 0.0) {
        return Err(Error::DegenerateBisector);
    }
    let mut t_min = f64::INFINITY;
    for (i, u) in inst.unit_points.iter().enumerate() {
        let t = inst.scales[i] / inst.radius * dot(p_prime, u) / pn;
        if !(t > 0.0) {
            return Err(Error::NotAWitness { index: i, t });
        }
        t_min = t_min.min(t);
    }
    Ok(t_min)
}

/// Converts a witness `p'` for the unit points into a hyperplane separating
/// `pʳ` from `conv(Sʳ)` in raw coordinates:
/// `{x : p'ᵀ(x - pʳ) = ½·t_min·‖p'‖²·R}`.
///
/// The raw points lie on the positive side, `pʳ` on the negative side.
pub fn recover_witness(p_prime: &[f64], inst: &SphericalInstance) -> Result<Hyperplane> {
    let t_min = min_projection(p_prime, inst)?;
    let half = 0.5 * t_min * norm_sq(p_prime) * inst.radius;
    Ok(Hyperplane {
        normal: p_prime.to_vec(),
        offset: dot(p_prime, &inst.query_origin) + half,
    })
}

/// The same separating plane expressed in the scaled frame
/// `wᵢ = (vᵢʳ - pʳ)/R`: the orthogonal bisector of `0` and `t_min·p'`.
pub fn recover_witness_scaled(p_prime: &[f64], inst: &SphericalInstance) -> Result<Hyperplane> {
    let t_min = min_projection(p_prime, inst)?;
    Ok(Hyperplane {
        normal: p_prime.to_vec(),
        offset: 0.5 * t_min * norm_sq(p_prime),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dist_sq, verify_witness};
    use alloc::vec;
    use proptest::prelude::*;

    fn instance(raw: &PointSet, p: &[f64]) -> SphericalInstance {
        match to_spherical(raw, p).unwrap() {
            Spherical::Instance(i) => i,
            Spherical::ImmediateMember(i) => panic!("unexpected member {i}"),
        }
    }

    #[test]
    fn to_spherical_examples() {
        let raw = PointSet::from_points(&[[3.0, 0.0]]).unwrap();
        let inst = instance(&raw, &[1.0, 0.0]);
        assert_eq!(inst.unit_points().point(0), &[1.0, 0.0]);
        assert_eq!(inst.scales(), &[2.0]);
        assert_eq!(inst.radius(), 2.0);

        let raw = PointSet::from_points(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
        let inst = instance(&raw, &[0.0, 0.0]);
        assert_eq!(inst.unit_points().point(1), &[0.0, 1.0]);
        assert_eq!(inst.scales(), &[1.0, 2.0]);
        assert_eq!(inst.radius(), 2.0);

        let raw = PointSet::from_points(&[[1.0, 0.0], [0.5, 0.5]]).unwrap();
        assert_eq!(
            to_spherical(&raw, &[0.5, 0.5]).unwrap(),
            Spherical::ImmediateMember(1)
        );
    }

    #[test]
    fn recover_solution_examples() {
        let raw = PointSet::from_points(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
        let inst = instance(&raw, &[0.0, 0.0]);
        let it = recover_solution(&[(0, 0.5), (1, 0.5)], &inst, &raw).unwrap();
        let w = it.dense_weights(2);
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w[1] - 1.0 / 3.0).abs() < 1e-15);

        let it = recover_solution(&[(1, 1.0)], &inst, &raw).unwrap();
        assert_eq!(it.coeffs(), &[(1, 1.0)]);

        let raw = PointSet::from_points(&[[2.0, 0.0], [0.0, 2.0], [-2.0, 0.0]]).unwrap();
        let inst = instance(&raw, &[0.0, 0.0]);
        let alpha = [(0, 0.2), (1, 0.3), (2, 0.5)];
        let it = recover_solution(&alpha, &inst, &raw).unwrap();
        for (a, b) in alpha.iter().zip(it.coeffs()) {
            assert!((a.1 - b.1).abs() < 1e-15);
        }

        assert_eq!(
            recover_solution(&[(0, 0.0)], &inst, &raw),
            Err(Error::ZeroWeights)
        );
    }

    #[test]
    fn recover_witness_single_point() {
        let raw = PointSet::from_points(&[[1.0, 0.0]]).unwrap();
        let inst = instance(&raw, &[0.0, 0.0]);
        // t = p'ᵀw/‖p'‖² = 0.5/0.25 = 2, so t_min·p' = (1, 0) and the plane is
        // its bisector with the origin, x₁ = 0.5.
        let h = recover_witness(&[0.5, 0.0], &inst).unwrap();
        assert_eq!(h.normal, vec![0.5, 0.0]);
        assert!((h.offset - 0.25).abs() < 1e-15);
        assert!(h.eval(&[0.0, 0.0]) < 0.0 && h.eval(&[1.0, 0.0]) > 0.0);
    }

    #[test]
    fn recover_witness_equal_scales_matches_unit_bisector() {
        let raw = PointSet::from_points(&[[3.0, 0.0], [0.0, 3.0]]).unwrap();
        let inst = instance(&raw, &[0.0, 0.0]);
        let pp = [0.5, 0.5];
        assert!(verify_witness(&[0.0, 0.0], &pp, inst.unit_points()));
        let h = recover_witness(&pp, &inst).unwrap();
        // t_i = 0.5/0.5 = 1 for both, plane p'ᵀx = ½·‖p'‖²·R = 0.75
        assert!((h.offset - 0.75).abs() < 1e-15);
        let scaled = recover_witness_scaled(&pp, &inst).unwrap();
        assert!((scaled.offset - 0.25).abs() < 1e-15);
    }

    #[test]
    fn recover_witness_shifted_instance_separates() {
        let raw = PointSet::from_points(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let p = [1.0, 1.0];
        let inst = instance(&raw, &p);
        let pp = inst.unit_points().combine(&[(0, 0.5), (1, 0.5)]);
        assert!(verify_witness(&[0.0, 0.0], &pp, inst.unit_points()));
        let h = recover_witness(&pp, &inst).unwrap();
        assert!(h.eval(&p) < 0.0);
        for v in raw.iter() {
            assert!(h.eval(v) > 0.0);
        }
    }

    #[test]
    fn recover_witness_rejects_non_witness() {
        let raw = PointSet::from_points(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        let inst = instance(&raw, &[0.0, 0.0]);
        assert!(matches!(
            recover_witness(&[0.5, 0.0], &inst),
            Err(Error::NotAWitness { index: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn unit_points_have_unit_norm(
            pts in proptest::collection::vec(proptest::collection::vec(-10.0f64..10.0, 4), 1..20),
            p in proptest::collection::vec(-10.0f64..10.0, 4),
        ) {
            let raw = PointSet::from_points(&pts).unwrap();
            if let Spherical::Instance(inst) = to_spherical(&raw, &p).unwrap() {
                for i in 0..raw.len() {
                    prop_assert!((inst.unit_points().norm(i) - 1.0).abs() <= 1e-12);
                    prop_assert!(inst.scales()[i] > 0.0);
                }
                prop_assert_eq!(inst.radius(), inst.scales().iter().copied().fold(0.0, f64::max));
            }
        }

        #[test]
        fn recovered_solution_respects_radius_bound(
            pts in proptest::collection::vec(proptest::collection::vec(-10.0f64..10.0, 3), 2..12),
            p in proptest::collection::vec(-10.0f64..10.0, 3),
            w in proptest::collection::vec(0.0f64..1.0, 12),
        ) {
            let raw = PointSet::from_points(&pts).unwrap();
            let Spherical::Instance(inst) = to_spherical(&raw, &p).unwrap() else { return Ok(()); };
            let total: f64 = w[..raw.len()].iter().sum();
            prop_assume!(total > 1e-6);
            let alpha: Vec<(usize, f64)> = (0..raw.len()).map(|i| (i, w[i] / total)).collect();
            let eps = norm(&inst.unit_points().combine(&alpha));
            let it = recover_solution(&alpha, &inst, &raw).unwrap();
            prop_assert!(it.is_consistent(&raw));
            let err = libm::sqrt(dist_sq(it.coords(), &p));
            prop_assert!(err <= eps * inst.radius() + 1e-9);
        }
    }
}
