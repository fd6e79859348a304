//! Finite frame systems in ℍⁿ and K-frame classification.
//!
//! Coefficients are taken as `⟨f_k, x⟩` so that the analysis operator is
//! the adjoint `T_F*` of the synthesis operator `T_F c = Σ f_k c_k` and both
//! are right-linear. Only moduli `|⟨f_k, x⟩|` enter the frame inequalities,
//! and those do not depend on the order of the arguments.
//!
//! The optimal lower K-frame bound is the largest `A` with `A·KK* ≤ S`
//! (Loewner order). When `R(K) ⊆ R(S)` this is `1 / λ_max(K* S† K)`; the
//! eigenproblem is solved on `R(K)` using the thin SVD `K = U Σ V*`, i.e. on
//! the `rank(K) × rank(K)` matrix `Σ U* S† U Σ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{shape_mismatch, Error, Result};
use crate::linalg::{herm_eig, opnorm, pinv, range_projector, svd, QMatrix, QVector};
use crate::tol::CONSTRUCTION_TOL;

/// Finite family `{f_k}` stored as the columns of an `n × m` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QMatrix", into = "QMatrix")]
pub struct FrameSystem {
    vectors: QMatrix,
}

impl TryFrom<QMatrix> for FrameSystem {
    type Error = Error;
    fn try_from(m: QMatrix) -> Result<Self> {
        FrameSystem::new(m)
    }
}

impl From<FrameSystem> for QMatrix {
    fn from(f: FrameSystem) -> QMatrix {
        f.vectors
    }
}

impl FrameSystem {
    /// Column `k` of `vectors` is `f_k`. Requires `m ≥ 1` and finite entries.
    pub fn new(vectors: QMatrix) -> Result<Self> {
        if vectors.cols() == 0 || vectors.rows() == 0 {
            return Err(Error::InvalidFrame(format!(
                "family of shape {}x{}",
                vectors.rows(),
                vectors.cols()
            )));
        }
        if !vectors.is_finite() {
            return Err(Error::InvalidFrame("non-finite entry".into()));
        }
        Ok(Self { vectors })
    }

    pub fn from_vectors(vectors: &[QVector]) -> Result<Self> {
        let n = vectors.first().map_or(0, QVector::len);
        Self::new(QMatrix::from_columns(n, vectors)?)
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.vectors.rows()
    }

    /// Family size.
    pub fn m(&self) -> usize {
        self.vectors.cols()
    }

    /// Synthesis operator `T_F`.
    pub fn matrix(&self) -> &QMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> QVector {
        self.vectors.column(k)
    }

    /// `T_F c = Σ f_k c_k`.
    pub fn synthesis(&self, c: &QVector) -> Result<QVector> {
        if c.len() != self.m() {
            return Err(shape_mismatch("synthesis", self.m(), c.len()));
        }
        self.vectors.apply(c)
    }

    /// `T_F* x = (⟨f_k, x⟩)_k`.
    pub fn analysis(&self, x: &QVector) -> Result<QVector> {
        if x.len() != self.n() {
            return Err(shape_mismatch("analysis", self.n(), x.len()));
        }
        Ok((0..self.m())
            .map(|k| (0..self.n()).map(|i| self.vectors[(i, k)].conj() * x[i]).sum())
            .collect())
    }

    /// `S = T_F T_F*`.
    pub fn frame_operator(&self) -> QMatrix {
        let s = &self.vectors * &self.vectors.adjoint();
        // exact Hermitian symmetry; the product is Hermitian up to rounding
        s.hermitian_part()
    }

    /// `Σ_k |⟨f_k, x⟩|²`.
    pub fn coefficient_energy(&self, x: &QVector) -> Result<f64> {
        Ok(self.analysis(x)?.norm_sqr())
    }

    /// The family with column `k` removed; `None` when only one vector remains.
    pub fn without(&self, k: usize) -> Option<FrameSystem> {
        if self.m() <= 1 {
            return None;
        }
        let keep: Vec<usize> = (0..self.m()).filter(|&j| j != k).collect();
        Some(FrameSystem {
            vectors: self.vectors.select_columns(&keep),
        })
    }

    /// `{op·f_k}`.
    pub fn map(&self, op: &QMatrix) -> Result<FrameSystem> {
        FrameSystem::new(op.matmul(&self.vectors)?)
    }
}

/// Optimal bounds and classification flags for a family relative to `K`.
#[derive(Debug, Clone, Serialize)]
pub struct KFrameCertificate {
    /// Optimal lower bound in `A‖K*x‖² ≤ Σ|⟨f_k,x⟩|²`. `+∞` (serialized as
    /// `null`) when `K = 0`, `0` when the family is not a K-frame.
    #[serde(rename = "A_opt")]
    pub lower_bound: f64,
    /// Optimal Bessel bound `λ_max(S)`.
    #[serde(rename = "B_opt")]
    pub upper_bound: f64,
    #[serde(rename = "isBessel")]
    pub is_bessel: bool,
    #[serde(rename = "isKFrame")]
    pub is_k_frame: bool,
    #[serde(rename = "isParsevalK")]
    pub is_parseval_k: bool,
    #[serde(rename = "isTight")]
    pub is_tight: bool,
    #[serde(rename = "isExact")]
    pub is_exact: bool,
    #[serde(rename = "rankK")]
    pub rank_k: usize,
    #[serde(rename = "rankF")]
    pub rank_f: usize,
    pub residuals: BTreeMap<String, f64>,
    /// Vector attaining the lower bound, when one exists.
    #[serde(skip)]
    pub lower_extremal: Option<QVector>,
    /// Vector attaining the upper bound.
    #[serde(skip)]
    pub upper_extremal: Option<QVector>,
}

fn check_operator(f: &FrameSystem, k: &QMatrix) -> Result<()> {
    if !k.is_square() || k.rows() != f.n() {
        return Err(shape_mismatch(
            "k_frame_bounds",
            format!("{0}x{0} operator", f.n()),
            format!("{}x{}", k.rows(), k.cols()),
        ));
    }
    Ok(())
}

/// `‖(I − P_{R(F)})K‖`, the distance of `R(K)` from `R(F)`.
pub fn range_inclusion_residual(f: &FrameSystem, k: &QMatrix) -> Result<f64> {
    let p = range_projector(f.matrix())?;
    opnorm(&(k - &(&p * k)))
}

fn range_contained(f: &FrameSystem, k: &QMatrix, k_norm: f64, tol: f64) -> Result<(bool, f64)> {
    let r = range_inclusion_residual(f, k)?;
    Ok((r <= tol * (1.0 + k_norm), r))
}

/// Optimal K-frame bounds with the default construction tolerance.
pub fn k_frame_bounds(f: &FrameSystem, k: &QMatrix) -> Result<KFrameCertificate> {
    k_frame_bounds_with_tol(f, k, CONSTRUCTION_TOL)
}

pub fn k_frame_bounds_with_tol(f: &FrameSystem, k: &QMatrix, tol: f64) -> Result<KFrameCertificate> {
    check_operator(f, k)?;
    let s = f.frame_operator();
    let s_eig = herm_eig(&s)?;
    let upper = s_eig.values[0].max(0.0);
    let upper_extremal = Some(s_eig.vectors.column(0));

    let k_svd = svd(k)?;
    let k_norm = k_svd.sigma.first().copied().unwrap_or(0.0);
    let f_svd = svd(f.matrix())?;
    let mut residuals = BTreeMap::new();

    let (contained, inclusion) = range_contained(f, k, k_norm, tol)?;
    residuals.insert("rangeInclusion".to_string(), inclusion);

    let (lower, lower_extremal) = if k_svd.rank == 0 {
        (f64::INFINITY, None)
    } else if !contained {
        (0.0, None)
    } else {
        // Σ U* S† U Σ on R(K)
        let s_pinv = pinv(&s)?;
        let mut u_sigma = k_svd.u.clone();
        for (c, &sg) in k_svd.sigma.iter().enumerate() {
            for i in 0..u_sigma.rows() {
                u_sigma[(i, c)] = u_sigma[(i, c)] * sg;
            }
        }
        let w = &(&u_sigma.adjoint() * &s_pinv) * &u_sigma;
        let w_eig = herm_eig(&w.hermitian_part())?;
        let top = w_eig.values[0];
        if top > 0.0 {
            let x = &(&s_pinv * &u_sigma) * &w_eig.vectors.column(0);
            (1.0 / top, Some(x))
        } else {
            (0.0, None)
        }
    };

    let is_k_frame = k_svd.rank == 0 || (contained && lower > tol);

    let kk = k * &k.adjoint();
    let parseval = opnorm(&(&s - &kk))?;
    residuals.insert("parseval".to_string(), parseval);
    let is_parseval_k = parseval <= tol * (1.0 + k_norm * k_norm);

    let is_tight = if is_k_frame && lower.is_finite() {
        let r = opnorm(&(&s - &kk.scale(lower)))?;
        residuals.insert("tight".to_string(), r);
        r <= tol * (1.0 + upper)
    } else {
        false
    };

    let is_exact = is_k_frame && k_svd.rank > 0 && {
        let mut all_fail = true;
        for j in 0..f.m() {
            let still = match f.without(j) {
                Some(sub) => range_contained(&sub, k, k_norm, tol)?.0,
                None => false,
            };
            if still {
                all_fail = false;
                break;
            }
        }
        all_fail
    };

    Ok(KFrameCertificate {
        lower_bound: lower,
        upper_bound: upper,
        is_bessel: upper.is_finite(),
        is_k_frame,
        is_parseval_k,
        is_tight,
        is_exact,
        rank_k: k_svd.rank,
        rank_f: f_svd.rank,
        residuals,
        lower_extremal,
        upper_extremal,
    })
}

/// `‖S − KK*‖ ≤ tol·(1 + ‖K‖²)`.
pub fn is_parseval_k_frame(f: &FrameSystem, k: &QMatrix, tol: f64) -> Result<bool> {
    check_operator(f, k)?;
    let s = f.frame_operator();
    let r = opnorm(&(&s - &(k * &k.adjoint())))?;
    let kn = opnorm(k)?;
    Ok(r <= tol * (1.0 + kn * kn))
}

/// Classification as an ordinary frame (`K = I`).
pub fn classify_frame(f: &FrameSystem, tol: f64) -> Result<KFrameCertificate> {
    k_frame_bounds_with_tol(f, &QMatrix::identity(f.n()), tol)
}
