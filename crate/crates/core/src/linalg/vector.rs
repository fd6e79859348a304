use std::ops::{Add, Index, IndexMut, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{shape_mismatch, Result};
use crate::quaternion::Quaternion;

/// Element of ℍⁿ. Scalars act on the right.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QVector(Vec<Quaternion>);

impl QVector {
    pub fn new(entries: Vec<Quaternion>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::ZERO; n])
    }

    /// Standard basis vector `e_k` of length `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Quaternion::ONE;
        v
    }

    pub fn from_reals(values: &[f64]) -> Self {
        Self(values.iter().map(|&r| Quaternion::real(r)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Quaternion> {
        self.0
    }

    /// Right scalar action `x·q`.
    pub fn scale_right(&self, q: Quaternion) -> QVector {
        QVector(self.0.iter().map(|&e| e * q).collect())
    }

    pub fn scale(&self, s: f64) -> QVector {
        QVector(self.0.iter().map(|&e| e * s).collect())
    }

    /// `⟨self, other⟩ = Σ conj(self_i)·other_i`, right-linear in `other`.
    pub fn inner(&self, other: &QVector) -> Result<Quaternion> {
        if self.len() != other.len() {
            return Err(shape_mismatch("inner", self.len(), other.len()));
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &QVector) -> Quaternion {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sqr()).sum()
    }

    /// `√Re⟨x, x⟩`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs_diff(&self, other: &QVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a - b).modulus())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|q| q.is_finite())
    }
}

impl From<Vec<Quaternion>> for QVector {
    fn from(v: Vec<Quaternion>) -> Self {
        Self(v)
    }
}

impl FromIterator<Quaternion> for QVector {
    fn from_iter<I: IntoIterator<Item = Quaternion>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Index<usize> for QVector {
    type Output = Quaternion;
    fn index(&self, i: usize) -> &Quaternion {
        &self.0[i]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion {
        &mut self.0[i]
    }
}

impl Add for &QVector {
    type Output = QVector;
    fn add(self, rhs: &QVector) -> QVector {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect()
    }
}

impl Sub for &QVector {
    type Output = QVector;
    fn sub(self, rhs: &QVector) -> QVector {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect()
    }
}

impl Neg for &QVector {
    type Output = QVector;
    fn neg(self) -> QVector {
        self.0.iter().map(|&a| -a).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion as Q;
    use crate::test_util::{rand_quat, rand_vec, rng};

    #[test]
    fn inner_of_units() {
        let x = QVector::new(vec![Q::I, Q::ZERO]);
        let y = QVector::new(vec![Q::J, Q::ZERO]);
        assert_eq!(x.inner(&y).unwrap(), -Q::K);
        let v = QVector::new(vec![Q::ONE, Q::I]);
        assert_eq!(v.inner(&v).unwrap(), Q::real(2.0));
        assert!((v.norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(QVector::zeros(3).norm(), 0.0);
    }

    #[test]
    fn inner_length_mismatch() {
        assert!(QVector::zeros(2).inner(&QVector::zeros(3)).is_err());
    }

    #[test]
    fn inner_product_axioms_on_random_vectors() {
        let mut r = rng(11);
        for _ in 0..200 {
            let n = 1 + (rand_quat(&mut r).w.abs() * 6.0) as usize;
            let x = rand_vec(&mut r, n);
            let y = rand_vec(&mut r, n);
            let z = rand_vec(&mut r, n);
            let q = rand_quat(&mut r);
            let xy = x.inner(&y).unwrap();
            // conjugate symmetry
            assert!((xy.conj() - y.inner(&x).unwrap()).modulus() < 1e-14);
            // additivity in the second slot
            let lhs = x.inner(&(&y + &z)).unwrap();
            assert!((lhs - xy - x.inner(&z).unwrap()).modulus() < 1e-14);
            // right-linearity and conjugate-linearity
            assert!((x.inner(&y.scale_right(q)).unwrap() - xy * q).modulus() < 1e-14);
            assert!((x.scale_right(q).inner(&y).unwrap() - q.conj() * xy).modulus() < 1e-14);
            // ⟨x, x⟩ is real and positive
            let xx = x.inner(&x).unwrap();
            assert!(xx.im().modulus() < 1e-15);
            assert!(xx.re() > 0.0);
            // Cauchy–Schwarz
            assert!(xy.norm_sqr() <= x.norm_sqr() * y.norm_sqr() * (1.0 + 1e-14));
            // ‖x·q‖ = ‖x‖·|q|
            let lhs = x.scale_right(q).norm();
            assert!((lhs - x.norm() * q.modulus()).abs() <= 1e-14 * lhs.max(1.0));
            // triangle inequality
            assert!((&x + &y).norm() <= x.norm() + y.norm() + 1e-14);
        }
    }
}
