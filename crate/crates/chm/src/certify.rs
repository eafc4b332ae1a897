//! Exact confirmation of approximate infeasibility certificates.

use chm_core::{PointSet, StrictLpInstance};

use crate::exact::{exact_oracle, ExactVerdict, MAX_DIM, MAX_POINTS};

/// Largest support the upgrade is attempted on.
pub const MAX_SUPPORT: usize = 20;

/// Re-decides `0 ∈ conv{(aᵢ; bᵢ) : yᵢ > 0} ∪ {(0; 1) if s > 0}` exactly.
///
/// `Some(true)` proves `Ax < b` infeasible; `Some(false)` means the support
/// alone does not certify it; `None` when the support exceeds the exact
/// oracle's limits.
pub fn confirm_gordan(inst: &StrictLpInstance, y: &[f64], s: f64) -> Option<bool> {
    let support: Vec<usize> = (0..inst.rows()).filter(|&i| y[i] > 0.0).collect();
    let k = support.len() + usize::from(s > 0.0);
    let d = inst.cols() + 1;
    if k == 0 || k > MAX_SUPPORT.min(MAX_POINTS) || d > MAX_DIM {
        return None;
    }
    let mut cols: Vec<Vec<f64>> = support
        .iter()
        .map(|&i| {
            let mut c = inst.row(i).to_vec();
            c.push(inst.b()[i]);
            c
        })
        .collect();
    if s > 0.0 {
        let mut c = vec![0.0; d];
        c[d - 1] = 1.0;
        cols.push(c);
    }
    let pts = PointSet::from_points(&cols).ok()?;
    match exact_oracle(&pts, &vec![0.0; d]).ok()? {
        ExactVerdict::Inside { .. } => Some(true),
        ExactVerdict::Outside { .. } => Some(false),
    }
}
