//! Convex hull membership (CHM) solvers built on the Triangle Algorithm.
//!
//! Given a finite point set `S` and a query `p`, the solvers either return a
//! point of `conv(S)` within `ε·R` of `p` (with its convex coefficients), or a
//! witness point whose orthogonal bisector with `p` separates `p` from
//! `conv(S)`.
//!
//! The crate is `no_std` (it needs `alloc`). Enable `std` for
//! `std::error::Error` interop and `parallel` for a rayon-backed pivot scan.
//!
//! Modules:
//!
//! - [`geometry`]: point sets, iterates, pivots, witnesses and segment projection.
//! - [`spherical`]: reduction of a general instance onto the unit sphere and back.
//! - [`solver`]: vanilla TA, Spherical-TA, the ε-property fast path and composite iterates.
//! - [`lp`]: strict LP feasibility (`Ax < b`) and LP feasibility (`Ax = b, x ≥ 0`) via CHM.
//! - [`avta`]: AVTA / AVTA⁺ vertex enumeration under γ-robustness.
//! - [`mvee`]: minimum volume enclosing ellipsoid, optionally preprocessed by AVTA⁺.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x >= 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod avta;
mod error;
pub mod geometry;
pub(crate) mod linalg;
pub mod lp;
pub mod mvee;
pub mod solver;
pub mod spherical;

pub use avta::{avta, avta_plus, avta_with, discover_vertex, farthest, AvtaConfig, Label, VertexReport};
pub use error::{Error, Result};
pub use geometry::{
    bisector_hyperplane, find_strict_pivot, is_pivot, is_strict_pivot, nearest_on_segment,
    verify_witness, Hyperplane, Iterate, PointSet, WitnessCertificate,
};
pub use lp::{
    build_gordan_columns, build_lpfeas_columns, gordan_residual, solve_lp_feasibility,
    solve_lp_feasibility_with, solve_strict_lp, solve_strict_lp_with,
    LpFeasInstance, LpFeasResult, StrictLpInstance, StrictLpResult,
};
pub use mvee::{avta_plus_mvee, avta_plus_mvee_report, mvee, mvee_with_limit, Ellipsoid};
pub use solver::{
    check_eps_property, composite_iterate, solve_spherical_ta, solve_spherical_ta_from, solve_ta,
    solve_ta_from, worst_case_delta_bound,
    ChmOutcome, CompositeOutcome, IterationTrace, Oracle, PivotRule, SolverConfig, Verdict,
};
pub use spherical::{recover_solution, recover_witness, to_spherical, SphericalInstance, Spherical};
