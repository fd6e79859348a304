use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{shape_mismatch, Result};
use crate::frame::FrameSystem;
use crate::linalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;
use crate::random;

/// Sampling estimates of the extremal Rayleigh quotients
/// `Σ|⟨f_k, x⟩|² / ‖K*x‖²` (lower) and `Σ|⟨f_k, x⟩|² / ‖x‖²` (upper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    /// Smallest lower quotient seen; `+∞` if `K*x` vanished on every sample.
    pub lower: f64,
    /// Largest upper quotient seen.
    pub upper: f64,
}

/// Estimates the optimal K-frame bounds using quaternion matrix–vector
/// products only.
///
/// Half of the `trials` evaluations go to uniform random starting points;
/// the rest refine the best start for each quotient by a (1+1) evolution
/// strategy with the one-fifth success rule. Every evaluated point is a
/// genuine test vector, so the estimates always bracket the true bounds from
/// the inside: `lower ≥ A_opt`, `upper ≤ B_opt` up to rounding.
pub fn brute_force_bound_oracle<R: Rng + ?Sized>(
    f: &FrameSystem,
    k: &QMatrix,
    trials: usize,
    rng: &mut R,
) -> Result<BoundEstimate> {
    if !k.is_square() || k.rows() != f.n() {
        return Err(shape_mismatch(
            "brute_force_bound_oracle",
            format!("{0}x{0}", f.n()),
            format!("{}x{}", k.rows(), k.cols()),
        ));
    }
    let n = f.n();
    let kstar = k.adjoint();
    let energy = |x: &QVector| f.coefficient_energy(x).expect("shape checked");
    let lower_q = |x: &QVector| {
        let d = (&kstar * x).norm_sqr();
        if d > 0.0 {
            energy(x) / d
        } else {
            f64::INFINITY
        }
    };
    let upper_q = |x: &QVector| {
        let d = x.norm_sqr();
        if d > 0.0 {
            -energy(x) / d
        } else {
            f64::INFINITY
        }
    };

    let sampling = (trials / 2).max(1);
    let mut best_lower = (f64::INFINITY, random::vector(rng, n));
    let mut best_upper = (f64::INFINITY, random::vector(rng, n));
    for _ in 0..sampling {
        let x = random::vector(rng, n);
        let l = lower_q(&x);
        if l < best_lower.0 {
            best_lower = (l, x.clone());
        }
        let u = upper_q(&x);
        if u < best_upper.0 {
            best_upper = (u, x);
        }
    }

    let refine = (trials - sampling.min(trials)) / 2;
    let lower = minimise(&lower_q, best_lower, refine, rng);
    let upper = minimise(&upper_q, best_upper, refine, rng);
    Ok(BoundEstimate { lower, upper: -upper })
}

fn minimise<R: Rng + ?Sized>(
    q: &impl Fn(&QVector) -> f64,
    (mut fx, mut x): (f64, QVector),
    evals: usize,
    rng: &mut R,
) -> f64 {
    let mut step = 0.3;
    let grow = 1.5f64;
    let shrink = grow.powf(-0.25);
    for _ in 0..evals {
        let norm = x.norm();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        let xn = x.scale(1.0 / norm);
        let y: QVector = xn.iter().map(|&e| e + gaussian_quaternion(rng) * step).collect();
        let fy = q(&y);
        if fy < fx {
            fx = fy;
            x = y;
            step *= grow;
        } else {
            x = xn;
            step *= shrink;
        }
        step = step.clamp(1e-12, 1.0);
    }
    fx
}

fn gaussian_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    let mut c = || -> f64 { StandardNormal.sample(rng) };
    Quaternion::new(c(), c(), c(), c())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::k_frame_bounds;
    use crate::test_util::{h4_operator, rng};
    use crate::verify::{gen_instance, InstanceKind};

    #[test]
    fn h4_example() {
        let f = FrameSystem::new(h4_operator()).unwrap();
        let est = brute_force_bound_oracle(&f, &h4_operator(), 100_000, &mut rng(1)).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-3 && est.lower >= 1.0 - 1e-12);
        assert!((est.upper - 2.0).abs() < 1e-3 && est.upper <= 2.0 + 1e-12);
    }

    #[test]
    fn orthonormal_basis() {
        let f = FrameSystem::new(QMatrix::identity(3)).unwrap();
        let est = brute_force_bound_oracle(&f, &QMatrix::identity(3), 2000, &mut rng(2)).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-12 && (est.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brackets_random_instances() {
        for seed in 0..10 {
            let inst = gen_instance(
                seed,
                3 + (seed as usize) % 3,
                5,
                1 + (seed as usize) % 3,
                InstanceKind::ExactDual,
            )
            .unwrap();
            let cert = k_frame_bounds(&inst.f, &inst.k).unwrap();
            let est = brute_force_bound_oracle(&inst.f, &inst.k, 20_000, &mut rng(seed)).unwrap();
            assert!(est.lower >= cert.lower_bound * (1.0 - 1e-9), "seed {seed}");
            assert!(est.upper <= cert.upper_bound * (1.0 + 1e-9), "seed {seed}");
            assert!(
                (est.lower - cert.lower_bound).abs() <= 1e-3 * cert.lower_bound,
                "seed {seed}: {est:?} {cert:?}"
            );
            assert!(
                (est.upper - cert.upper_bound).abs() <= 1e-3 * cert.upper_bound,
                "seed {seed}"
            );
        }
    }
}
