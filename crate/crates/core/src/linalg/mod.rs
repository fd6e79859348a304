//! Right quaternionic vectors, matrices as right-linear operators, and the
//! dense decompositions built on the complex adjoint embedding.

mod decomp;
mod embed;
mod matrix;
mod vector;

pub use decomp::{
    default_rcond, herm_eig, opnorm, pinv, pinv_with_rcond, range_basis, range_projector, singular_values,
    solve_on_subspace, solve_on_subspace_with_tol, sqrt_psd, svd, svd_with_rcond, HermitianEigen, Svd,
};
pub use embed::{embed, ComplexMatrix, C64};
pub use matrix::QMatrix;
pub use vector::QVector;
