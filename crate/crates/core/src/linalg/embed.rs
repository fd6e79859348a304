//! Complex adjoint embedding ℍ^{n×m} → ℂ^{2n×2m}.
//!
//! A quaternion matrix is split as `M = A + B·j` with complex `A`, `B`
//! (a complex number `c` is read as the quaternion `Re c + Im c·i`), and
//! mapped to
//!
//! ```text
//! χ(M) = [  A        B      ]
//!        [ -conj(B)  conj(A) ]
//! ```
//!
//! χ is a unital *-homomorphism and its image is exactly the set of complex
//! matrices with `X·J_m = J_n·conj(X)`, `J = [[0, I], [-I, 0]]`.
//!
//! A quaternion vector `x = a + b·j` corresponds to the first column of its
//! embedding, `φ(x) = (a; -conj(b))`, and `χ(M)·φ(x) = φ(M·x)`.

#[cfg(test)]
use nalgebra::DVector;
use nalgebra::{Complex, DMatrix};

use crate::linalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;

pub type C64 = Complex<f64>;

/// Image of a quaternion matrix under the adjoint embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(pub DMatrix<C64>);

#[inline]
fn split(q: Quaternion) -> (C64, C64) {
    (C64::new(q.w, q.x), C64::new(q.y, q.z))
}

#[inline]
fn join(a: C64, b: C64) -> Quaternion {
    Quaternion::new(a.re, a.im, b.re, b.im)
}

impl ComplexMatrix {
    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn conjugate(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.map(|c| c.conj()))
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        (&self.0 - &other.0).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Standard symplectic form `[[0, I_n], [-I_n, 0]]` of size `2n`.
    pub fn symplectic(n: usize) -> ComplexMatrix {
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = C64::new(1.0, 0.0);
            j[(n + i, i)] = C64::new(-1.0, 0.0);
        }
        ComplexMatrix(j)
    }

    /// `max |X·J − J·conj(X)|`; zero exactly on the embedding image.
    pub fn j_symmetry_defect(&self) -> f64 {
        let (r, c) = (self.nrows() / 2, self.ncols() / 2);
        let lhs = &self.0 * &Self::symplectic(c).0;
        let rhs = &Self::symplectic(r).0 * self.conjugate().0;
        (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Inverse of [`embed`] on the embedding image. Reads the `A` and `B`
    /// blocks only; the lower blocks are assumed consistent.
    pub fn to_quaternion(&self) -> QMatrix {
        let (r, c) = (self.nrows() / 2, self.ncols() / 2);
        QMatrix::from_fn(r, c, |i, j| join(self.0[(i, j)], self.0[(i, c + j)]))
    }
}

/// Adjoint embedding χ(M).
pub fn embed(m: &QMatrix) -> ComplexMatrix {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let (a, b) = split(m[(i, j)]);
            out[(i, j)] = a;
            out[(i, c + j)] = b;
            out[(r + i, j)] = -b.conj();
            out[(r + i, c + j)] = a.conj();
        }
    }
    ComplexMatrix(out)
}

/// `φ(x) = (a; -conj(b))` for `x = a + b·j`.
#[cfg(test)]
pub(crate) fn vector_to_complex(x: &QVector) -> DVector<C64> {
    let n = x.len();
    let mut v = DVector::zeros(2 * n);
    for (i, &q) in x.iter().enumerate() {
        let (a, b) = split(q);
        v[i] = a;
        v[n + i] = -b.conj();
    }
    v
}

/// Inverse of `φ`: any complex 2n-vector is the image of exactly one
/// quaternion vector.
pub(crate) fn complex_to_vector<'a, I>(v: I, n: usize) -> QVector
where
    I: IntoIterator<Item = &'a C64>,
{
    let vals: Vec<C64> = v.into_iter().copied().collect();
    debug_assert_eq!(vals.len(), 2 * n);
    (0..n).map(|i| join(vals[i], -vals[n + i].conj())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::{rand_matrix, rand_vec, rng};

    // Oracle: the quaternion product computed entrywise in ℍ, then embedded,
    // against the complex product of the embeddings.
    #[test]
    fn embedding_of_j() {
        let e = embed(&QMatrix::diag(&[Quaternion::J]));
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert_eq!(e.0, expected);
    }

    #[test]
    fn star_homomorphism() {
        let mut r = rng(17);
        for _ in 0..100 {
            let m = rand_matrix(&mut r, 3, 5);
            let n = rand_matrix(&mut r, 5, 2);
            let lhs = embed(&(&m * &n));
            let rhs = embed(&m).mul(&embed(&n));
            assert!(lhs.max_abs_diff(&rhs) < 1e-13);
            assert!(embed(&m.adjoint()).max_abs_diff(&embed(&m).adjoint()) == 0.0);
            assert!(embed(&m).j_symmetry_defect() == 0.0);
            assert_eq!(embed(&m).to_quaternion(), m);
        }
        assert_eq!(embed(&QMatrix::identity(3)).0, DMatrix::identity(6, 6));
    }

    #[test]
    fn vector_map_intertwines() {
        let mut r = rng(23);
        for _ in 0..50 {
            let m = rand_matrix(&mut r, 4, 3);
            let x = rand_vec(&mut r, 3);
            let lhs = &embed(&m).0 * vector_to_complex(&x);
            let rhs = vector_to_complex(&(&m * &x));
            assert!((lhs - rhs).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-13);
            assert_eq!(complex_to_vector(vector_to_complex(&x).iter(), 3), x);
        }
    }
}
