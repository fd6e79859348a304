use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{cross_operator, dual_from_synthesis_factor};
use crate::error::{Error, Result};
use crate::frame::FrameSystem;
use crate::linalg::{opnorm, pinv, range_projector, svd, QMatrix};
use crate::random::{self, Prng};
use crate::tol::CONSTRUCTION_TOL;

pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    ExactDual,
    ApproxDual,
    NonDual,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::ExactDual => "exact-dual",
            InstanceKind::ApproxDual => "approx-dual",
            InstanceKind::NonDual => "non-dual",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-dual" | "exact" => Ok(InstanceKind::ExactDual),
            "approx-dual" | "approx" => Ok(InstanceKind::ApproxDual),
            "non-dual" | "none" => Ok(InstanceKind::NonDual),
            other => Err(Error::InvalidParameters(format!("unknown instance kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Operator `K`, family `F` and (optionally) a candidate dual `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub rank_k: usize,
    pub k: QMatrix,
    pub f: FrameSystem,
    pub g: Option<FrameSystem>,
    pub kind: InstanceKind,
}

fn check_params(n: usize, m: usize, rank_k: usize) -> Result<()> {
    if !(1..=MAX_DIM).contains(&n) {
        return Err(Error::InvalidParameters(format!("n = {n} outside 1..={MAX_DIM}")));
    }
    if m < n || m > 2 * n {
        return Err(Error::InvalidParameters(format!("m = {m} outside {n}..={}", 2 * n)));
    }
    if rank_k == 0 || rank_k > n {
        return Err(Error::InvalidParameters(format!("rank {rank_k} outside 1..={n}")));
    }
    Ok(())
}

/// Seeded instance.
///
/// `K` is a product of random factors of inner dimension `rank_k`, rescaled
/// so its smallest nonzero singular value is 1. `F = [U_K | Z]·C` with `U_K`
/// an orthonormal basis of `R(K)`, so `R(K) ⊆ R(F)`. `G` is the dual with
/// synthesis factor `pinv(F)K`, optionally perturbed by `pinv(F)Δ` where
/// `Δ ∈ R(F)` has random components both in and orthogonal to `R(K)` and
/// `‖Δ‖` is drawn from `[0.1, 0.5]`; non-dual instances get a random `G`.
pub fn gen_instance(seed: u64, n: usize, m: usize, rank_k: usize, kind: InstanceKind) -> Result<Instance> {
    check_params(n, m, rank_k)?;
    let mut rng = random::prng(seed);

    let k0 = random::low_rank(&mut rng, n, n, rank_k);
    let k_svd = svd(&k0)?;
    if k_svd.rank != rank_k {
        return Err(Error::InvalidParameters(format!(
            "seed {seed}: generated operator has rank {} instead of {rank_k}",
            k_svd.rank
        )));
    }
    let k = k0.scale(1.0 / k_svd.sigma[rank_k - 1]);

    let rank_f = rng.gen_range(rank_k..=n);
    let extra = random::matrix(&mut rng, n, rank_f - rank_k);
    let span = QMatrix::from_columns(n, &[k_svd.u.columns(), extra.columns()].concat())?;
    let f = FrameSystem::new(&span * &random::matrix(&mut rng, rank_f, m))?;

    let g = match kind {
        InstanceKind::NonDual => FrameSystem::new(random::matrix(&mut rng, n, m))?,
        InstanceKind::ExactDual | InstanceKind::ApproxDual => {
            let fp = pinv(f.matrix())?;
            let exact =
                dual_from_synthesis_factor(&f, &k, &(&fp * &k).adjoint(), CONSTRUCTION_TOL * (1.0 + opnorm(&k)?))?;
            if kind == InstanceKind::ExactDual {
                exact
            } else {
                let target = rng.gen_range(0.1..=0.5);
                let delta = &range_projector(f.matrix())? * &random::matrix(&mut rng, n, n);
                let delta = delta.scale(target / opnorm(&delta)?);
                FrameSystem::new(exact.matrix() + &(&fp * &delta).adjoint())?
            }
        }
    };

    Ok(Instance {
        seed,
        n,
        m,
        rank_k,
        k,
        f,
        g: Some(g),
        kind,
    })
}

/// Shape parameters for the `index`-th member of a random batch, drawn from
/// a separate stream of the instance seed. `n ∈ 2..=max_n`, `m ∈ n..=2n`.
pub fn random_shape(seed: u64, max_n: usize) -> (usize, usize, usize) {
    let mut rng: Prng = random::prng(seed);
    rng.set_stream(1);
    let n = rng.gen_range(2..=max_n.clamp(2, MAX_DIM));
    let m = rng.gen_range(n..=2 * n);
    let r = rng.gen_range(1..=n);
    (n, m, r)
}

/// Batch member `index` of a run started at `base_seed`.
pub fn random_instance(base_seed: u64, index: u64, max_n: usize, kind: InstanceKind) -> Result<Instance> {
    let seed = base_seed.wrapping_add(index);
    let (n, m, r) = random_shape(seed, max_n);
    gen_instance(seed, n, m, r, kind)
}

impl Instance {
    /// `T_F T_G*`, if a dual candidate is present.
    pub fn cross_operator(&self) -> Option<QMatrix> {
        self.g.as_ref().map(|g| cross_operator(&self.f, g))
    }
}
