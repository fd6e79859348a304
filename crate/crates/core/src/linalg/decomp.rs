//! Dense decompositions of quaternion matrices through the complex embedding.
//!
//! The complex SVD / Hermitian eigensolver runs on χ(M); every quaternionic
//! singular value (eigenvalue) shows up twice. Quaternion singular vectors are
//! rebuilt cluster by cluster: within a cluster of (numerically) equal values
//! the complex vectors span a subspace that is invariant under the
//! quaternionic structure, so a quaternion Gram–Schmidt pass over them yields
//! half as many quaternion-orthonormal vectors spanning the same space.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{shape_mismatch, Error, Result};
use crate::linalg::embed::{complex_to_vector, embed, C64};
use crate::linalg::{QMatrix, QVector};
use crate::tol::{CLUSTER_RTOL, CONSTRUCTION_TOL, HERMITIAN_TOL};

const MAX_SWEEPS_PER_DIM: usize = 200;
/// nalgebra's own default convergence threshold.
const SOLVER_EPS: f64 = 5.0 * f64::EPSILON;

/// Thin quaternionic SVD `M ≈ U·diag(σ)·V*` restricted to the numerical rank.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × rank`, orthonormal columns.
    pub u: QMatrix,
    /// Positive singular values, descending.
    pub sigma: Vec<f64>,
    /// `cols × rank`, orthonormal columns.
    pub v: QMatrix,
    pub rank: usize,
}

impl Svd {
    pub fn reconstruct(&self) -> QMatrix {
        let mut us = self.u.clone();
        for (k, &s) in self.sigma.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, k)] = us[(i, k)] * s;
            }
        }
        &us * &self.v.adjoint()
    }
}

/// Eigen-decomposition of a Hermitian quaternion matrix; eigenvalues real
/// and descending, `vectors` column `k` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: QMatrix,
}

impl HermitianEigen {
    pub fn pairs(&self) -> impl Iterator<Item = (f64, QVector)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &l)| (l, self.vectors.column(k)))
    }

    /// `V·diag(f(λ))·V*`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> QMatrix {
        let n = self.vectors.rows();
        let mut scaled = self.vectors.clone();
        for (k, &l) in self.values.iter().enumerate() {
            let s = f(l);
            for i in 0..n {
                scaled[(i, k)] = scaled[(i, k)] * s;
            }
        }
        &scaled * &self.vectors.adjoint()
    }
}

/// Default relative rank cutoff `max(rows, cols)·ε`.
pub fn default_rcond(m: &QMatrix) -> f64 {
    m.rows().max(m.cols()) as f64 * f64::EPSILON
}

/// Singular values of χ(M), descending, and optionally the matching right
/// singular vectors as columns.
///
/// Computed from the Hermitian dilation `[[0, χ], [χ*, 0]]`, whose
/// eigenvalues are `±σ` with eigenvectors `(u; v)/√2`. nalgebra's direct
/// complex SVD occasionally returns a wrong factorization for rank-deficient
/// input; its Hermitian eigensolver does not, and the dilation keeps full
/// accuracy in `σ` (unlike `χ*χ`).
fn complex_svd(m: &QMatrix, want_v: bool) -> Result<(Vec<f64>, Option<DMatrix<C64>>)> {
    let chi = embed(m).0;
    let (r, c) = chi.shape();
    let dim = r + c;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    h.view_mut((0, r), (r, c)).copy_from(&chi);
    h.view_mut((r, 0), (c, r)).copy_from(&chi.adjoint());
    let eig =
        SymmetricEigen::try_new(h, SOLVER_EPS, MAX_SWEEPS_PER_DIM * dim).ok_or(Error::NoConvergence("complex SVD"))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(r.min(c));
    let values = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let v = want_v.then(|| {
        let cols: Vec<DVector<C64>> = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).rows(r, c).into_owned())
            .collect();
        DMatrix::from_columns(&cols)
    });
    Ok((values, v))
}

/// Quaternionic singular values (all `min(rows, cols)` of them), descending.
pub fn singular_values(m: &QMatrix) -> Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Vec::new());
    }
    let (s, _) = complex_svd(m, false)?;
    Ok(pair_values(&s))
}

fn pair_values(s: &[f64]) -> Vec<f64> {
    s.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Groups consecutive values whose neighbours differ by at most `ctol`.
fn clusters(values: &[f64], ctol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || (values[k - 1] - values[k]).abs() > ctol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Removes the components of `y` along the right spans of `basis`.
fn project_out(y: &mut QVector, basis: &[QVector]) {
    // two passes of classical Gram–Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = b.inner_unchecked(y);
            for i in 0..y.len() {
                y[i] -= b[i] * c;
            }
        }
    }
}

/// Rebuilds quaternion-orthonormal vectors from complex eigenvectors of an
/// embedded operator. `complex` holds `2·values.len()` columns ordered like
/// the doubled values.
fn quaternion_vectors(complex: &DMatrix<C64>, values: &[f64], n: usize, ctol: f64) -> Vec<QVector> {
    let mut basis: Vec<QVector> = Vec::with_capacity(values.len());
    for range in clusters(values, ctol) {
        let mut candidates: Vec<QVector> = (2 * range.start..2 * range.end)
            .map(|c| complex_to_vector(complex.column(c).iter(), n))
            .collect();
        for _ in range {
            let mut best: Option<(usize, QVector, f64)> = None;
            for (idx, cand) in candidates.iter().enumerate() {
                let mut y = cand.clone();
                project_out(&mut y, &basis);
                let norm = y.norm();
                if best.as_ref().is_none_or(|b| norm > b.2) {
                    best = Some((idx, y, norm));
                }
            }
            let (idx, mut y, mut norm) = best.expect("cluster has candidates");
            candidates.swap_remove(idx);
            if norm < 1e-6 {
                // degenerate cluster: complete with the standard basis vector
                // that is least represented so far
                let (y2, n2) = (0..n)
                    .map(|i| {
                        let mut e = QVector::basis(n, i);
                        project_out(&mut e, &basis);
                        let nn = e.norm();
                        (e, nn)
                    })
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("n > 0");
                y = y2;
                norm = n2;
            }
            basis.push(y.scale(1.0 / norm));
        }
    }
    basis
}

/// Thin SVD with the default rank cutoff.
pub fn svd(m: &QMatrix) -> Result<Svd> {
    svd_with_rcond(m, default_rcond(m))
}

/// Thin SVD keeping singular values `σ > rcond·σ₁`.
pub fn svd_with_rcond(m: &QMatrix, rcond: f64) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let empty = || Svd {
        u: QMatrix::zeros(rows, 0),
        sigma: Vec::new(),
        v: QMatrix::zeros(cols, 0),
        rank: 0,
    };
    if rows == 0 || cols == 0 {
        return Ok(empty());
    }
    let (s, v) = complex_svd(m, true)?;
    let sigma_all = pair_values(&s);
    let s1 = sigma_all[0];
    if s1 == 0.0 || !s1.is_finite() {
        return Ok(empty());
    }
    let cutoff = rcond * s1;
    let rank = sigma_all.iter().take_while(|&&x| x > cutoff).count();
    let kept = &sigma_all[..rank];
    let v_vecs = quaternion_vectors(&v.expect("requested V"), kept, cols, CLUSTER_RTOL * s1);

    let mut sigma = Vec::with_capacity(rank);
    let mut u_cols = Vec::with_capacity(rank);
    for vk in &v_vecs {
        let mv = m * vk;
        let sk = mv.norm();
        sigma.push(sk);
        u_cols.push(mv.scale(1.0 / sk));
    }
    let v_mat = QMatrix::from_columns(cols, &v_vecs)?;
    let u_mat = QMatrix::from_columns(rows, &u_cols)?;
    Ok(Svd {
        u: u_mat,
        sigma,
        v: v_mat,
        rank,
    })
}

/// Moore–Penrose pseudo-inverse with the default rank cutoff. The zero
/// matrix maps to the zero matrix.
pub fn pinv(m: &QMatrix) -> Result<QMatrix> {
    pinv_with_rcond(m, default_rcond(m))
}

pub fn pinv_with_rcond(m: &QMatrix, rcond: f64) -> Result<QMatrix> {
    let d = svd_with_rcond(m, rcond)?;
    Ok(pinv_from_svd(&d))
}

pub(crate) fn pinv_from_svd(d: &Svd) -> QMatrix {
    let mut vs = d.v.clone();
    for (k, &s) in d.sigma.iter().enumerate() {
        for i in 0..vs.rows() {
            vs[(i, k)] = vs[(i, k)] * (1.0 / s);
        }
    }
    &vs * &d.u.adjoint()
}

/// Operator 2-norm (largest singular value).
pub fn opnorm(m: &QMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Orthogonal projector onto `R(M)`, equal to `M·pinv(M)` and built as `U·U*`.
pub fn range_projector(m: &QMatrix) -> Result<QMatrix> {
    let d = svd(m)?;
    Ok(&d.u * &d.u.adjoint())
}

/// Orthonormal basis of `R(M)` as the columns of an `rows × rank` matrix.
pub fn range_basis(m: &QMatrix) -> Result<QMatrix> {
    Ok(svd(m)?.u)
}

fn hermitian_tolerance(m: &QMatrix) -> f64 {
    HERMITIAN_TOL * (1.0 + m.frobenius_norm())
}

/// Real eigenvalues (descending) and orthonormal eigenvectors of a Hermitian
/// matrix. Fails when `‖M − M*‖ > 1e-10·(1 + ‖M‖)`.
pub fn herm_eig(m: &QMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(shape_mismatch(
            "herm_eig",
            "square matrix",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let tolerance = hermitian_tolerance(m);
    let residual = m.hermitian_defect();
    if residual > tolerance {
        return Err(Error::NotHermitian { residual, tolerance });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: QMatrix::zeros(0, 0),
        });
    }
    let chi = embed(&m.hermitian_part()).0;
    let eig = SymmetricEigen::try_new(chi, SOLVER_EPS, MAX_SWEEPS_PER_DIM * 2 * n)
        .ok_or(Error::NoConvergence("Hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<C64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let complex = DMatrix::from_columns(&cols);
    let values = pair_values(&sorted);
    let scale = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let vecs = quaternion_vectors(&complex, &values, n, CLUSTER_RTOL * scale);
    Ok(HermitianEigen {
        values,
        vectors: QMatrix::from_columns(n, &vecs)?,
    })
}

/// Unique positive semidefinite square root.
pub fn sqrt_psd(m: &QMatrix) -> Result<QMatrix> {
    let eig = herm_eig(m)?;
    let floor = -HERMITIAN_TOL * (1.0 + eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
    if let Some(&min) = eig.values.last() {
        if min < floor {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
        }
    }
    Ok(eig.map_values(|l| l.max(0.0).sqrt()))
}

/// Restricted inverse `S⁻¹·P_{S(R(K))}` of a PSD `S` that is injective on
/// `R(K) ⊆ R(S)`, realised as `U·pinv(S·U)` for an orthonormal basis `U` of
/// `R(K)`. The result `D` satisfies
/// `D·S·x = x` for every `x ∈ R(K)` and maps into `R(K)`.
pub fn solve_on_subspace(s: &QMatrix, k: &QMatrix) -> Result<QMatrix> {
    solve_on_subspace_with_tol(s, k, CONSTRUCTION_TOL)
}

pub fn solve_on_subspace_with_tol(s: &QMatrix, k: &QMatrix, tol: f64) -> Result<QMatrix> {
    if !s.is_square() || s.rows() != k.rows() {
        return Err(shape_mismatch(
            "solve_on_subspace",
            format!("square S matching K rows ({})", k.rows()),
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let tolerance = hermitian_tolerance(s);
    let defect = s.hermitian_defect();
    if defect > tolerance {
        return Err(Error::NotHermitian {
            residual: defect,
            tolerance,
        });
    }
    let s_svd = svd(s)?;
    let p_s = &s_svd.u * &s_svd.u.adjoint();
    let outside = k - &(&p_s * k);
    let residual = opnorm(&outside)?;
    if residual > tol * (1.0 + opnorm(k)?) {
        return Err(Error::RangeNotContained { residual });
    }
    // with U an orthonormal basis of R(K): S⁻¹ P_{S(R(K))} = U (SU)†, which
    // avoids inverting S on all of R(S)
    let u = svd(k)?.u;
    if u.cols() == 0 {
        return Ok(QMatrix::zeros(k.rows(), k.rows()));
    }
    Ok(&u * &pinv(&(s * &u))?)
}
