//! K-duals, the canonical K-dual, their two parameterisations, atomic
//! reconstruction sequences, and approximate K-duals.
//!
//! A family `G` is a K-dual of `F` when `K = T_F T_G*`, i.e.
//! `Kx = Σ f_k ⟨g_k, x⟩`. The operator form is taken as the definition, so
//! nothing below depends on the order of the inner-product arguments.
//! Throughout, `P` is the orthogonal projector onto `R(K)` and `Fproj` is the
//! projected family `{P f_k}`.

use rand::Rng;
use serde::Serialize;

use crate::error::{shape_mismatch, Error, Result};
use crate::frame::{k_frame_bounds, k_frame_bounds_with_tol, FrameSystem, KFrameCertificate};
use crate::linalg::{opnorm, pinv, range_projector, solve_on_subspace, svd, QMatrix, QVector};
use crate::random;
use crate::tol::{below_one, CONSTRUCTION_TOL, NORM_MARGIN};

/// A frame, a candidate dual and the operator they reproduce.
#[derive(Debug, Clone)]
pub struct DualPair {
    pub frame: FrameSystem,
    pub dual: FrameSystem,
    pub operator: QMatrix,
    /// `‖K − T_F T_G*‖`.
    pub duality_residual: f64,
}

impl DualPair {
    pub fn new(frame: FrameSystem, dual: FrameSystem, operator: QMatrix) -> Result<Self> {
        let duality_residual = duality_residual(&frame, &dual, &operator)?;
        Ok(Self {
            frame,
            dual,
            operator,
            duality_residual,
        })
    }

    pub fn is_exact(&self, tol: f64) -> bool {
        self.duality_residual <= tol
    }

    pub fn is_approximate(&self) -> bool {
        below_one(self.duality_residual)
    }
}

/// Characterisation parameter `M` of the free-factor form
/// `g_k = (canonical dual)_k + M* e_k` with `P·T_F·M = 0` (`M` is `m × n`).
#[derive(Debug, Clone)]
pub struct FreeFactor {
    pub m: QMatrix,
    /// `‖P·T_F·M‖`.
    pub constraint_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualCheck {
    #[serde(rename = "isKDual")]
    pub is_dual: bool,
    /// `‖K − T_F T_G*‖`.
    pub residual: f64,
    /// `‖K* − T_G T_F*‖`.
    #[serde(rename = "adjointResidual")]
    pub adjoint_residual: f64,
}

fn check_pair(f: &FrameSystem, g: &FrameSystem, k: &QMatrix) -> Result<()> {
    if f.n() != g.n() || f.m() != g.m() {
        return Err(shape_mismatch(
            "dual pair",
            format!("{}x{} family", f.n(), f.m()),
            format!("{}x{}", g.n(), g.m()),
        ));
    }
    check_operator(f, k)
}

fn check_operator(f: &FrameSystem, k: &QMatrix) -> Result<()> {
    if !k.is_square() || k.rows() != f.n() {
        return Err(shape_mismatch(
            "operator",
            format!("{0}x{0}", f.n()),
            format!("{}x{}", k.rows(), k.cols()),
        ));
    }
    Ok(())
}

/// `T_F T_G*`.
pub fn cross_operator(f: &FrameSystem, g: &FrameSystem) -> QMatrix {
    f.matrix() * &g.matrix().adjoint()
}

/// `‖K − T_F T_G*‖`.
pub fn duality_residual(f: &FrameSystem, g: &FrameSystem, k: &QMatrix) -> Result<f64> {
    check_pair(f, g, k)?;
    opnorm(&(k - &cross_operator(f, g)))
}

pub fn is_k_dual(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<DualCheck> {
    let residual = duality_residual(f, g, k)?;
    let adjoint_residual = opnorm(&(&k.adjoint() - &cross_operator(g, f)))?;
    Ok(DualCheck {
        is_dual: residual <= tol,
        residual,
        adjoint_residual,
    })
}

fn require_dual(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<()> {
    let check = is_k_dual(f, g, k, tol)?;
    if !check.is_dual {
        return Err(Error::NotKDual {
            residual: check.residual,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Lower bounds forced on a K-dual pair: `G` is a K*-frame with lower bound
/// `1/B_F` and `F` is a K-frame with lower bound `1/B_G`, where `B_·` are the
/// Bessel bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaBounds {
    /// `1/B_F`: `‖Kx‖²/B_F ≤ Σ|⟨g_k, x⟩|²`.
    pub dual_lower: f64,
    /// `1/B_G`: `‖K*x‖²/B_G ≤ Σ|⟨f_k, x⟩|²`.
    pub frame_lower: f64,
}

/// `1/B_F` for a verified K-dual pair.
pub fn duality_lower_bound(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<LemmaBounds> {
    require_dual(f, g, k, tol)?;
    let bf = opnorm(f.matrix())?.powi(2);
    let bg = opnorm(g.matrix())?.powi(2);
    Ok(LemmaBounds {
        dual_lower: 1.0 / bf,
        frame_lower: 1.0 / bg,
    })
}

/// Largest relative violation of both lemma inequalities over `samples`
/// random vectors; non-positive means every sample satisfied them.
pub fn lemma_bound_violation<R: Rng + ?Sized>(
    f: &FrameSystem,
    g: &FrameSystem,
    k: &QMatrix,
    bounds: &LemmaBounds,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_pair(f, g, k)?;
    let kstar = k.adjoint();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = random::vector(rng, f.n());
        let scale = x.norm_sqr();
        let lhs_g = bounds.dual_lower * (k * &x).norm_sqr();
        let rhs_g = g.coefficient_energy(&x)?;
        let lhs_f = bounds.frame_lower * (&kstar * &x).norm_sqr();
        let rhs_f = f.coefficient_energy(&x)?;
        worst = worst.max((lhs_g - rhs_g) / scale).max((lhs_f - rhs_f) / scale);
    }
    Ok(worst)
}

/// Canonical K-dual `{K* S⁻¹ P_{S(R(K))} f_k}` of the projected family.
#[derive(Debug, Clone)]
pub struct CanonicalDual {
    /// `{P f_k}`.
    pub projected: FrameSystem,
    pub dual: FrameSystem,
    /// `S⁻¹ P_{S(R(K))}`.
    pub restricted_inverse: QMatrix,
    /// K-frame certificate of the input family.
    pub certificate: KFrameCertificate,
}

pub fn canonical_k_dual(f: &FrameSystem, k: &QMatrix) -> Result<CanonicalDual> {
    check_operator(f, k)?;
    let certificate = k_frame_bounds(f, k)?;
    if !certificate.is_k_frame {
        return Err(Error::NotKFrame);
    }
    let p = range_projector(k)?;
    let s = f.frame_operator();
    let d = solve_on_subspace(&s, k)?;
    let projected = f.map(&p)?;
    let dual = f.map(&(&k.adjoint() * &d))?;
    Ok(CanonicalDual {
        projected,
        dual,
        restricted_inverse: d,
        certificate,
    })
}

/// Optimal K*-frame bounds of the canonical dual against the interval
/// `[1/B, ‖K‖²‖K†‖²/A]` they must lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundBracket {
    #[serde(rename = "lowerLimit")]
    pub lower_limit: f64,
    #[serde(rename = "upperLimit")]
    pub upper_limit: f64,
    #[serde(rename = "dualLower")]
    pub dual_lower: f64,
    #[serde(rename = "dualUpper")]
    pub dual_upper: f64,
}

impl BoundBracket {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower_holds(tol) && self.upper_holds(tol)
    }

    /// `1/B` is a lower K*-frame bound of the canonical dual. This half
    /// always holds (it is the lemma bound applied to the projected family).
    pub fn lower_holds(&self, tol: f64) -> bool {
        self.dual_lower >= self.lower_limit - tol
    }

    /// `‖K‖²‖K†‖²/A` is an upper bound of the canonical dual. This half can
    /// fail when `S(R(K)) ≠ R(K)`: `P S (S⁻¹P_{S(R(K))})* = P` holds, but
    /// `S (S⁻¹P_{S(R(K))})*` need not be the identity on `R(K)`. Example:
    /// `S = [[1, ½], [½, 4]]`, `K = diag(1, 0)` gives a Bessel bound of 1.6
    /// against `1/A = 16/15`.
    pub fn upper_holds(&self, tol: f64) -> bool {
        self.dual_upper <= self.upper_limit + tol
    }

    /// Amount by which the bracket is exceeded (≤ 0 when it holds).
    pub fn excess(&self) -> f64 {
        (self.lower_limit - self.dual_lower).max(self.dual_upper - self.upper_limit)
    }
}

pub fn canonical_bound_bracket(k: &QMatrix, canon: &CanonicalDual) -> Result<BoundBracket> {
    let a = canon.certificate.lower_bound;
    let b = canon.certificate.upper_bound;
    let k_svd = svd(k)?;
    let k_norm = k_svd.sigma.first().copied().unwrap_or(0.0);
    let kp_norm = k_svd.sigma.last().map_or(0.0, |s| 1.0 / s);
    let dual_cert = k_frame_bounds_with_tol(&canon.dual, &k.adjoint(), CONSTRUCTION_TOL)?;
    Ok(BoundBracket {
        lower_limit: 1.0 / b,
        upper_limit: k_norm * k_norm * kp_norm * kp_norm / a,
        dual_lower: dual_cert.lower_bound,
        dual_upper: dual_cert.upper_bound,
    })
}

/// Free factor `M = T_G* − T_F* P_{S(R(K))} (S⁻¹)* K` of a K-dual `G` of the
/// projected family.
pub fn extract_free_factor(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<FreeFactor> {
    check_pair(f, g, k)?;
    let canon = canonical_k_dual(f, k)?;
    require_dual(&canon.projected, g, k, tol)?;
    let m = &g.matrix().adjoint() - &canon.dual.matrix().adjoint();
    let constraint_residual = opnorm(&(canon.projected.matrix() * &m))?;
    Ok(FreeFactor { m, constraint_residual })
}

/// `g_k = K* S⁻¹ P_{S(R(K))} f_k + M* e_k`, for `M` with `P T_F M = 0`.
pub fn dual_from_free_factor(f: &FrameSystem, k: &QMatrix, m: &QMatrix, tol: f64) -> Result<FrameSystem> {
    check_operator(f, k)?;
    if m.shape() != (f.m(), f.n()) {
        return Err(shape_mismatch(
            "dual_from_free_factor",
            format!("{}x{}", f.m(), f.n()),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let canon = canonical_k_dual(f, k)?;
    let residual = opnorm(&(canon.projected.matrix() * m))?;
    if residual > tol * (1.0 + opnorm(m)?) {
        return Err(Error::ConstraintViolated {
            residual,
            tolerance: tol,
        });
    }
    FrameSystem::new(canon.dual.matrix() + &m.adjoint())
}

/// `G = M` for an `n × m` factor with `T_F M* = K`.
pub fn dual_from_synthesis_factor(f: &FrameSystem, k: &QMatrix, m: &QMatrix, tol: f64) -> Result<FrameSystem> {
    check_operator(f, k)?;
    if m.shape() != (f.n(), f.m()) {
        return Err(shape_mismatch(
            "dual_from_synthesis_factor",
            format!("{}x{}", f.n(), f.m()),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let residual = opnorm(&(&(f.matrix() * &m.adjoint()) - k))?;
    if residual > tol {
        return Err(Error::ConstraintViolated {
            residual,
            tolerance: tol,
        });
    }
    FrameSystem::new(m.clone())
}

/// Inverse of [`dual_from_synthesis_factor`]: the factor of a K-dual is its
/// synthesis matrix.
pub fn extract_synthesis_factor(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<QMatrix> {
    require_dual(f, g, k, tol)?;
    Ok(g.matrix().clone())
}

/// `h_k = (K† P)* g_k`; reconstructs `x = Σ f_k ⟨h_k, x⟩` on `R(K)`.
pub fn atomic_sequence(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<FrameSystem> {
    require_dual(f, g, k, tol)?;
    let restricted = &pinv(k)? * &range_projector(k)?;
    g.map(&restricted.adjoint())
}

/// Worst relative error of `x ≈ T_F T_H* x` over random `x ∈ R(K)`.
pub fn atomic_reconstruction_residual<R: Rng + ?Sized>(
    f: &FrameSystem,
    h: &FrameSystem,
    k: &QMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_pair(f, h, k)?;
    let fh = cross_operator(f, h);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = k * &random::vector(rng, f.n());
        let nx = x.norm();
        if nx == 0.0 {
            continue;
        }
        worst = worst.max((&x - &(&fh * &x)).norm() / nx);
    }
    Ok(worst)
}

/// `‖T_H T_F* P − P‖`: `T_H` is a left inverse of `T_F*` on `R(K)`.
pub fn left_inverse_residual(f: &FrameSystem, h: &FrameSystem, k: &QMatrix) -> Result<f64> {
    check_pair(f, h, k)?;
    let p = range_projector(k)?;
    opnorm(&(&(&cross_operator(h, f) * &p) - &p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxDeficit {
    /// `‖K − T_F T_G*‖`.
    pub deficit: f64,
    #[serde(rename = "isApproximateDual")]
    pub is_approximate: bool,
}

pub fn approx_deficit(f: &FrameSystem, g: &FrameSystem, k: &QMatrix) -> Result<ApproxDeficit> {
    let deficit = duality_residual(f, g, k)?;
    Ok(ApproxDeficit {
        deficit,
        is_approximate: below_one(deficit),
    })
}

/// `Ψ = P T_F T_G* K†` together with its restriction to `R(K)`.
#[derive(Debug, Clone)]
pub struct PsiOperator {
    pub psi: QMatrix,
    /// Orthonormal basis `U` of `R(K)` (`n × rank`).
    pub range_basis: QMatrix,
    /// `U* Ψ U`.
    pub restricted: QMatrix,
    pub min_singular: f64,
    pub invertible_on_range: bool,
    /// `‖K†‖`.
    pub pinv_norm: f64,
}

impl PsiOperator {
    /// `Ψ⁻¹` on `R(K)`, extended by zero on `R(K)^⊥`.
    pub fn inverse_on_range(&self) -> Result<QMatrix> {
        if !self.invertible_on_range {
            return Err(Error::PsiNotInvertible {
                sigma_min: self.min_singular,
            });
        }
        let inv = pinv(&self.restricted)?;
        Ok(&(&self.range_basis * &inv) * &self.range_basis.adjoint())
    }
}

pub fn psi_operator(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<PsiOperator> {
    check_pair(f, g, k)?;
    let k_svd = svd(k)?;
    let u = k_svd.u;
    let p = &u * &u.adjoint();
    let kp = pinv(k)?;
    let psi = &(&p * &cross_operator(f, g)) * &kp;
    let restricted = &(&u.adjoint() * &psi) * &u;
    let min_singular = if k_svd.rank == 0 {
        f64::INFINITY
    } else {
        let sv = crate::linalg::singular_values(&restricted)?;
        sv.last().copied().unwrap_or(0.0)
    };
    let pinv_norm = k_svd.sigma.last().map_or(0.0, |s| 1.0 / s);
    Ok(PsiOperator {
        psi,
        range_basis: u,
        restricted,
        min_singular,
        invertible_on_range: min_singular > tol,
        pinv_norm,
    })
}

/// The two exact dual pairs built from an approximate K-dual:
/// `({Ψ⁻¹P f_k}, {K*(K†)* g_k})` and `({(K†)* g_k}, {K* Ψ⁻¹ P f_k})`.
pub fn approx_upgrade(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<(DualPair, DualPair)> {
    let psi = psi_operator(f, g, k, tol)?;
    if (psi.pinv_norm - 1.0).abs() > NORM_MARGIN && psi.pinv_norm > 0.0 {
        log::warn!(
            "approx_upgrade: ‖K†‖ = {:.6} differs from 1; the invertibility guarantee does not apply",
            psi.pinv_norm
        );
    }
    let psi_inv = psi.inverse_on_range()?;
    let p = &psi.range_basis * &psi.range_basis.adjoint();
    let kp_adj = pinv(k)?.adjoint();
    let kstar = k.adjoint();

    let inv_proj = &psi_inv * &p;
    let frame_a = f.map(&inv_proj)?;
    let dual_a = g.map(&(&kstar * &kp_adj))?;
    let frame_b = g.map(&kp_adj)?;
    let dual_b = f.map(&(&kstar * &inv_proj))?;

    Ok((
        DualPair::new(frame_a, dual_a, k.clone())?,
        DualPair::new(frame_b, dual_b, k.clone())?,
    ))
}

/// Outcome of checking a conditional statement on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Implication {
    #[serde(rename = "hypothesisMet")]
    pub hypothesis_met: bool,
    #[serde(rename = "conclusionHolds")]
    pub conclusion_holds: bool,
    /// `‖K − T_F T_G*‖`.
    pub deficit: f64,
}

impl Implication {
    pub fn holds(&self) -> bool {
        !self.hypothesis_met || self.conclusion_holds
    }
}

fn projection_split(f: &FrameSystem, g: &FrameSystem, k: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    let p = range_projector(k)?;
    let fg = cross_operator(f, g);
    let pfg = &p * &fg;
    Ok((fg, pfg))
}

/// For a K-dual `G` of the projected family: `‖T_F T_G*‖ < 1` implies
/// `‖K − T_F T_G*‖ < 1`.
pub fn projected_dual_approx(f: &FrameSystem, g: &FrameSystem, k: &QMatrix, tol: f64) -> Result<Implication> {
    check_pair(f, g, k)?;
    let (fg, pfg) = projection_split(f, g, k)?;
    let residual = opnorm(&(k - &pfg))?;
    if residual > tol {
        return Err(Error::NotKDual {
            residual,
            tolerance: tol,
        });
    }
    let deficit = opnorm(&(k - &fg))?;
    Ok(Implication {
        hypothesis_met: below_one(opnorm(&fg)?),
        conclusion_holds: deficit < 1.0,
        deficit,
    })
}

/// For an approximate K-dual `G` of the projected family:
/// `‖(I − P) T_F T_G*‖ ≤ 1 − ‖K − P T_F T_G*‖` implies `‖K − T_F T_G*‖ < 1`.
///
/// The two error terms have orthogonal ranges (`R(K)` and `R(K)^⊥`), so the
/// deficit is at most `√(a² + b²) ≤ a + b ≤ 1`, with equality only when
/// `a = 0, b = 1`.
pub fn approx_transfer(f: &FrameSystem, g: &FrameSystem, k: &QMatrix) -> Result<Implication> {
    check_pair(f, g, k)?;
    let (fg, pfg) = projection_split(f, g, k)?;
    let a = opnorm(&(k - &pfg))?;
    if !below_one(a) {
        return Err(Error::NotApproximateDual { deficit: a });
    }
    let b = opnorm(&(&fg - &pfg))?;
    let deficit = opnorm(&(k - &fg))?;
    Ok(Implication {
        hypothesis_met: b <= 1.0 - a,
        conclusion_holds: deficit < 1.0,
        deficit,
    })
}

/// Family with every vector zero except those given; convenience for
/// fixtures and tests.
pub fn family_from_columns(n: usize, columns: &[QVector]) -> Result<FrameSystem> {
    FrameSystem::new(QMatrix::from_columns(n, columns)?)
}
