use serde::Serialize;

use super::instance::Instance;
use crate::dual::{canonical_k_dual, dual_from_free_factor, extract_free_factor};
use crate::error::Result;
use crate::frame::FrameSystem;
use crate::linalg::{opnorm, pinv, QMatrix};
use crate::quaternion::Quaternion;
use crate::random::{self, Prng};

/// Agreement between the two descriptions of the K-duals of the projected
/// family `{P f_k}`:
///
/// * brute force: `T_G* = pinv(Fp)K + (I − pinv(Fp)Fp)X` for swept `X`;
/// * free factor: `T_G* = (canonical)* + M` with `Fp M = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompletenessReport {
    #[serde(rename = "bruteForceDuals")]
    pub brute_force_duals: usize,
    #[serde(rename = "freeFactorDuals")]
    pub free_factor_duals: usize,
    /// Worst relative mismatch when a brute-force dual is rebuilt from its
    /// extracted free factor.
    #[serde(rename = "bruteToFree")]
    pub brute_to_free: f64,
    /// Worst relative distance of a free-factor dual from the brute-force
    /// affine set.
    #[serde(rename = "freeToBrute")]
    pub free_to_brute: f64,
}

impl CompletenessReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.brute_to_free <= tol && self.free_to_brute <= tol
    }
}

/// Coordinate directions `E_ij·u`, `u ∈ {1, i, j, k}`, followed by `extra`
/// random `rows × cols` matrices.
fn sweep(rows: usize, cols: usize, extra: usize, rng: &mut Prng) -> Vec<QMatrix> {
    let units = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    let mut out = Vec::with_capacity(rows * cols * 4 + extra);
    for i in 0..rows {
        for j in 0..cols {
            for u in units {
                let mut x = QMatrix::zeros(rows, cols);
                x[(i, j)] = u;
                out.push(x);
            }
        }
    }
    out.extend((0..extra).map(|_| random::matrix(rng, rows, cols)));
    out
}

fn rel(a: &QMatrix, b: &QMatrix) -> Result<f64> {
    Ok(opnorm(&(a - b))? / (1.0 + opnorm(b)?))
}

pub fn completeness_sweep(inst: &Instance, extra: usize, tol: f64, rng: &mut Prng) -> Result<CompletenessReport> {
    let canon = canonical_k_dual(&inst.f, &inst.k)?;
    let fp = canon.projected.matrix();
    let fp_pinv = pinv(fp)?;
    let base = &fp_pinv * &inst.k;
    let kernel = &QMatrix::identity(inst.m) - &(&fp_pinv * fp);

    let mut brute_to_free: f64 = 0.0;
    let brute = sweep(inst.m, inst.n, extra, rng);
    for x in &brute {
        let gstar = &base + &(&kernel * x);
        let g = FrameSystem::new(gstar.adjoint())?;
        let m = extract_free_factor(&inst.f, &g, &inst.k, tol)?;
        let rebuilt = dual_from_free_factor(&inst.f, &inst.k, &m.m, tol)?;
        brute_to_free = brute_to_free
            .max(rel(rebuilt.matrix(), g.matrix())?)
            .max(m.constraint_residual / (1.0 + opnorm(&m.m)?));
    }

    let mut free_to_brute: f64 = 0.0;
    let free = sweep(inst.m, inst.n, extra, rng);
    for y in &free {
        // admissible factor: project Y onto the kernel of P T_F by least squares
        let m = y - &(&fp_pinv * &(fp * y));
        let g = dual_from_free_factor(&inst.f, &inst.k, &m, tol)?;
        let offset = &g.matrix().adjoint() - &base;
        let d = rel(&(&kernel * &offset), &offset)?;
        let duality = opnorm(&(&(fp * &g.matrix().adjoint()) - &inst.k))?;
        free_to_brute = free_to_brute.max(d).max(duality);
    }

    Ok(CompletenessReport {
        brute_force_duals: brute.len(),
        free_factor_duals: free.len(),
        brute_to_free,
        free_to_brute,
    })
}
