use thiserror::Error;

/// Errors raised by the quaternionic linear algebra and frame routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quaternion has zero modulus and no inverse")]
    ZeroQuaternion,

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is not Hermitian (residual {residual:.3e} > {tolerance:.3e})")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("range of K is not contained in the range of S (residual {residual:.3e})")]
    RangeNotContained { residual: f64 },

    #[error("family is not a K-frame")]
    NotKFrame,

    #[error("pair is not a K-dual (residual {residual:.3e} > {tolerance:.3e})")]
    NotKDual { residual: f64, tolerance: f64 },

    #[error("factor constraint violated (residual {residual:.3e} > {tolerance:.3e})")]
    ConstraintViolated { residual: f64, tolerance: f64 },

    #[error("Psi is not invertible on R(K) (smallest singular value {sigma_min:.3e})")]
    PsiNotInvertible { sigma_min: f64 },

    #[error("not an approximate K-dual (deficit {deficit:.3e} is not below 1)")]
    NotApproximateDual { deficit: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("frame family must contain at least one finite vector: {0}")]
    InvalidFrame(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_mismatch(op: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
