//! Seeded random quaternions and matrices.
//!
//! All instance generation goes through [`Prng`], a ChaCha8 stream seeded
//! from a `u64`, so a seed regenerates the same bits on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;

pub type Prng = ChaCha8Rng;

/// Name reported in verification headers.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

pub fn prng(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Four independent components, uniform in `[-1, 1]`.
pub fn quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    )
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QVector {
    (0..n).map(|_| quaternion(rng)).collect()
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| quaternion(rng))
}

/// Product of random `rows × rank` and `rank × cols` factors.
pub fn low_rank<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, rank: usize) -> QMatrix {
    let a = matrix(rng, rows, rank);
    let b = matrix(rng, rank, cols);
    &a * &b
}
