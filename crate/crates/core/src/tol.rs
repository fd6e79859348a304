//! Default tolerances.
//!
//! Constructions (duals, projectors, restricted inverses) are held to
//! [`CONSTRUCTION_TOL`]; verification assertions use the looser
//! [`VERIFY_TOL`]. Strict comparisons of norms against 1 require a margin of
//! [`NORM_MARGIN`] so that rounding cannot turn `‖·‖ = 1` into `‖·‖ < 1`.

pub const CONSTRUCTION_TOL: f64 = 1e-9;
pub const VERIFY_TOL: f64 = 1e-8;
pub const NORM_MARGIN: f64 = 1e-6;

/// Relative Hermiticity / semidefiniteness tolerance: `‖M − M*‖ ≤ 1e-10·(1 + ‖M‖)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative gap below which singular values or eigenvalues are treated as one
/// cluster when rebuilding quaternion vectors from the complex embedding.
pub(crate) const CLUSTER_RTOL: f64 = 1e-12;

/// `x < 1` with the strict margin applied.
#[inline]
pub fn below_one(x: f64) -> bool {
    x < 1.0 - NORM_MARGIN
}
