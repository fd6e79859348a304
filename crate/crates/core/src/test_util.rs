use crate::linalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;
use crate::random::{self, Prng};

pub fn rng(seed: u64) -> Prng {
    random::prng(seed)
}

pub fn rand_quat(r: &mut Prng) -> Quaternion {
    random::quaternion(r)
}

pub fn rand_vec(r: &mut Prng, n: usize) -> QVector {
    random::vector(r, n)
}

pub fn rand_matrix(r: &mut Prng, rows: usize, cols: usize) -> QMatrix {
    random::matrix(r, rows, cols)
}

pub fn rand_low_rank(r: &mut Prng, rows: usize, cols: usize, rank: usize) -> QMatrix {
    random::low_rank(r, rows, cols, rank)
}

/// Operator on ℍ⁴ with `Ke₁ = Ke₂ = e₁`, `Ke₃ = e₂`, `Ke₄ = e₃`.
pub fn h4_operator() -> QMatrix {
    QMatrix::from_real_rows(&[
        &[1.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 0.0, 0.0],
    ])
}
