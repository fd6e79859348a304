//! Quaternionic frame theory toolkit.
//!
//! Finite families of vectors in ℍⁿ (right scalar action), their synthesis,
//! analysis and frame operators, K-frame bounds, exact and approximate
//! K-duals, and a seeded verification harness that checks the structural
//! identities linking them on random instances.

pub mod dual;
pub mod error;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod quaternion;
pub mod random;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use frame::{FrameSystem, KFrameCertificate};
pub use linalg::{QMatrix, QVector};
pub use quaternion::Quaternion;

#[cfg(test)]
pub(crate) mod test_util;
