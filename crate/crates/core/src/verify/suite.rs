use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{random_instance, Instance, InstanceKind};
use crate::dual::{
    approx_upgrade, atomic_reconstruction_residual, atomic_sequence, canonical_bound_bracket, canonical_k_dual,
    cross_operator, dual_from_free_factor, dual_from_synthesis_factor, duality_lower_bound, extract_free_factor,
    is_k_dual, left_inverse_residual, lemma_bound_violation, psi_operator, CanonicalDual,
};
use crate::error::Result;
use crate::frame::{k_frame_bounds, FrameSystem};
use crate::linalg::{opnorm, pinv, range_projector, svd, QMatrix, QVector};
use crate::quaternion::Quaternion;
use crate::random::{self, Prng, PRNG_NAME};
use crate::tol::{below_one, NORM_MARGIN};

/// Residual bound for the Penrose identities, relative to `1 + ‖A‖`.
pub const PENROSE_TOL: f64 = 1e-10;
/// Random vectors per sampled inequality.
pub const SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    #[serde(rename = "hypothesisMet")]
    pub hypothesis_met: bool,
    #[serde(rename = "conclusionHolds")]
    pub conclusion_holds: bool,
    /// `null` in JSON when not finite.
    pub residual: Option<f64>,
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        !self.hypothesis_met || self.conclusion_holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "rankK")]
    pub rank_k: usize,
    pub kind: InstanceKind,
    pub prng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: InstanceHeader,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

struct Recorder {
    checks: Vec<CheckRecord>,
}

impl Recorder {
    fn push(&mut self, name: &str, hypothesis_met: bool, conclusion_holds: bool, residual: f64, tolerance: f64) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            hypothesis_met,
            conclusion_holds,
            residual: residual.is_finite().then_some(residual),
            tolerance,
        });
    }

    /// `residual ≤ tolerance`, or a failed record if the computation errored.
    fn bounded(&mut self, name: &str, hypothesis_met: bool, residual: Result<f64>, tolerance: f64) {
        match residual {
            Ok(r) => self.push(name, hypothesis_met, r <= tolerance, r, tolerance),
            Err(e) => {
                log::debug!("{name}: {e}");
                self.push(name, hypothesis_met, false, f64::INFINITY, tolerance);
            }
        }
    }
}

fn check_rng(seed: u64, stream: u64) -> Prng {
    let mut rng = random::prng(seed);
    rng.set_stream(2 + stream);
    rng
}

fn quaternion_axioms(rng: &mut Prng, f: &FrameSystem) -> f64 {
    let pool: Vec<Quaternion> = f
        .matrix()
        .as_slice()
        .iter()
        .copied()
        .chain((0..8).map(|_| random::quaternion(rng)))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let p = pool[rng.gen_range(0..pool.len())];
        let q = pool[rng.gen_range(0..pool.len())];
        let r = pool[rng.gen_range(0..pool.len())];
        let scale = 1.0 + p.modulus() * q.modulus() * r.modulus();
        worst = worst
            .max(((p * q) * r - p * (q * r)).modulus() / scale)
            .max(((p * q).modulus() - p.modulus() * q.modulus()).abs() / scale)
            .max(((p * q).conj() - q.conj() * p.conj()).modulus() / scale);
        if p.norm_sqr() > 0.0 {
            let inv = p.inv().expect("nonzero");
            worst = worst.max((p * inv - Quaternion::ONE).modulus());
        }
    }
    worst
}

fn inner_product_axioms(rng: &mut Prng, f: &FrameSystem) -> f64 {
    let n = f.n();
    let cols = f.matrix().columns();
    let draw = |rng: &mut Prng| -> QVector {
        if rng.gen_bool(0.5) {
            cols[rng.gen_range(0..cols.len())].clone()
        } else {
            random::vector(rng, n)
        }
    };
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let x = draw(rng);
        let y = draw(rng);
        let z = draw(rng);
        let a = random::quaternion(rng);
        let b = random::quaternion(rng);
        let scale = 1.0 + x.norm() * (y.norm() + z.norm()) * 2.0;
        let xy = x.inner_unchecked(&y);
        let yx = y.inner_unchecked(&x);
        worst = worst.max((xy - yx.conj()).modulus() / scale);
        let comb = &y.scale_right(a) + &z.scale_right(b);
        let lin = x.inner_unchecked(&comb) - (xy * a + x.inner_unchecked(&z) * b);
        worst = worst.max(lin.modulus() / scale);
        let xx = x.inner_unchecked(&x);
        worst = worst.max(xx.im().modulus() / scale).max((-xx.w).max(0.0));
        let cs = xy.modulus() - x.norm() * y.norm();
        worst = worst.max(cs.max(0.0) / scale);
    }
    worst
}

/// Largest of the four Penrose residuals, relative to `1 + ‖A‖`.
pub fn penrose_residual(a: &QMatrix) -> Result<f64> {
    let ap = pinv(a)?;
    let a_ap = a * &ap;
    let ap_a = &ap * a;
    let r = [
        opnorm(&(&(&a_ap * a) - a))?,
        opnorm(&(&(&ap_a * &ap) - &ap))?,
        opnorm(&(&a_ap - &a_ap.adjoint()))?,
        opnorm(&(&ap_a - &ap_a.adjoint()))?,
    ];
    let scale = 1.0 + opnorm(a)?;
    Ok(r.iter().fold(0.0f64, |acc, &v| acc.max(v)) / scale)
}

fn relative_diff(a: &QMatrix, b: &QMatrix) -> Result<f64> {
    Ok(opnorm(&(a - b))? / (1.0 + opnorm(b)?))
}

/// Free-factor round trips: `G → M → G`, and a random admissible `M` (drawn
/// from the kernel of `P T_F`) `→ G → M`.
fn free_factor_round_trip(
    inst: &Instance,
    g: &FrameSystem,
    canon: &CanonicalDual,
    tol: f64,
    rng: &mut Prng,
) -> Result<f64> {
    let ff = extract_free_factor(&inst.f, g, &inst.k, tol)?;
    let rebuilt = dual_from_free_factor(&inst.f, &inst.k, &ff.m, tol)?;
    let mut worst = relative_diff(rebuilt.matrix(), g.matrix())?;
    worst = worst.max(ff.constraint_residual / (1.0 + opnorm(&ff.m)?));

    let pf = canon.projected.matrix();
    let kernel = &QMatrix::identity(inst.m) - &(&pinv(pf)? * pf);
    let m = &kernel * &random::matrix(rng, inst.m, inst.n);
    let g2 = dual_from_free_factor(&inst.f, &inst.k, &m, tol)?;
    worst = worst.max(is_k_dual(&canon.projected, &g2, &inst.k, tol)?.residual);
    let back = extract_free_factor(&inst.f, &g2, &inst.k, tol)?;
    worst = worst.max(relative_diff(&back.m, &m)?);
    Ok(worst)
}

/// Synthesis-factor round trips: `G → M → G`, and `M* = pinv(F)K + (I − pinv(F)F)X`
/// `→ G` with `T_F T_G* = K`.
fn synthesis_round_trip(inst: &Instance, g: &FrameSystem, tol: f64, rng: &mut Prng) -> Result<f64> {
    let rebuilt = dual_from_synthesis_factor(&inst.f, &inst.k, g.matrix(), tol)?;
    let mut worst = relative_diff(rebuilt.matrix(), g.matrix())?;

    let fp = pinv(inst.f.matrix())?;
    let kernel = &QMatrix::identity(inst.m) - &(&fp * inst.f.matrix());
    let mstar = &(&fp * &inst.k) + &(&kernel * &random::matrix(rng, inst.m, inst.n));
    let g2 = dual_from_synthesis_factor(&inst.f, &inst.k, &mstar.adjoint(), tol)?;
    worst = worst.max(is_k_dual(&inst.f, &g2, &inst.k, tol)?.residual);
    Ok(worst)
}

/// Runs every check, in order, against one instance. Failures (including
/// errors raised by the operations) become report entries.
pub fn run_suite(inst: &Instance, tol: f64) -> VerificationReport {
    let mut rec = Recorder { checks: Vec::new() };
    let k = &inst.k;
    let f = &inst.f;

    let r = quaternion_axioms(&mut check_rng(inst.seed, 0), f);
    rec.push("axioms.quaternion", true, r <= tol, r, tol);
    let r = inner_product_axioms(&mut check_rng(inst.seed, 1), f);
    rec.push("axioms.inner_product", true, r <= tol, r, tol);

    rec.bounded("penrose.K", true, penrose_residual(k), PENROSE_TOL);
    rec.bounded("penrose.F", true, penrose_residual(f.matrix()), PENROSE_TOL);

    let cert = k_frame_bounds(f, k);
    let is_k_frame = cert.as_ref().is_ok_and(|c| c.is_k_frame);
    let inclusion = cert
        .as_ref()
        .map(|c| c.residuals.get("rangeInclusion").copied().unwrap_or(0.0))
        .unwrap_or(f64::INFINITY);
    rec.push("kframe.range_inclusion", true, is_k_frame, inclusion, tol);

    let canon = if is_k_frame { canonical_k_dual(f, k).ok() } else { None };
    match &canon {
        Some(c) => {
            let r = is_k_dual(&c.projected, &c.dual, k, tol).map(|d| d.residual);
            rec.bounded("canonical.duality", true, r, tol);
            match canonical_bound_bracket(k, c) {
                Ok(b) => {
                    let t = NORM_MARGIN * (1.0 + b.lower_limit);
                    let gap = (b.lower_limit - b.dual_lower).max(0.0);
                    rec.push("canonical.lower_bound", true, b.lower_holds(t), gap, t);
                    let t = NORM_MARGIN * (1.0 + b.upper_limit);
                    let gap = (b.dual_upper - b.upper_limit).max(0.0);
                    rec.push("canonical.upper_bound", true, b.upper_holds(t), gap, t);
                }
                Err(_) => {
                    rec.push("canonical.lower_bound", true, false, f64::INFINITY, NORM_MARGIN);
                    rec.push("canonical.upper_bound", true, false, f64::INFINITY, NORM_MARGIN);
                }
            }
        }
        None => {
            rec.push("canonical.duality", is_k_frame, false, f64::INFINITY, tol);
            rec.push("canonical.lower_bound", is_k_frame, false, f64::INFINITY, NORM_MARGIN);
            rec.push("canonical.upper_bound", is_k_frame, false, f64::INFINITY, NORM_MARGIN);
        }
    }

    let Some(g) = &inst.g else {
        return finish(inst, rec);
    };

    let dual = is_k_dual(f, g, k, tol);
    let (is_dual, dual_res, adj_res) = match &dual {
        Ok(d) => (d.is_dual, d.residual, d.adjoint_residual),
        Err(_) => (false, f64::INFINITY, f64::INFINITY),
    };
    rec.push(
        "kdual.exact",
        inst.kind == InstanceKind::ExactDual,
        is_dual,
        dual_res,
        tol,
    );
    rec.push("kdual.adjoint", is_dual, adj_res <= tol, adj_res, tol);

    let lemma = duality_lower_bound(f, g, k, tol).and_then(|b| {
        let v = lemma_bound_violation(f, g, k, &b, SAMPLES, &mut check_rng(inst.seed, 2))?;
        Ok(v.max(0.0))
    });
    rec.bounded("lemma.bound", is_dual, lemma, tol);

    let projected_dual = canon
        .as_ref()
        .is_some_and(|c| is_k_dual(&c.projected, g, k, tol).is_ok_and(|d| d.is_dual));
    let ff = match &canon {
        Some(c) if projected_dual => free_factor_round_trip(inst, g, c, tol, &mut check_rng(inst.seed, 3)),
        _ => Ok(f64::INFINITY),
    };
    rec.bounded("characterization.free_factor", projected_dual, ff, tol);
    let sf = if is_dual {
        synthesis_round_trip(inst, g, tol, &mut check_rng(inst.seed, 4))
    } else {
        Ok(f64::INFINITY)
    };
    rec.bounded("characterization.synthesis_factor", is_dual, sf, tol);

    let atomic = atomic_sequence(f, g, k, tol).and_then(|h| {
        let rr = atomic_reconstruction_residual(f, &h, k, SAMPLES, &mut check_rng(inst.seed, 5))?;
        Ok(rr.max(left_inverse_residual(f, &h, k)?))
    });
    rec.bounded(
        "atomic.reconstruction",
        is_dual,
        if is_dual { atomic } else { Ok(f64::INFINITY) },
        tol,
    );

    let fg = cross_operator(f, g);
    let deficit = opnorm(&(k - &fg)).unwrap_or(f64::INFINITY);
    let claimed_approx = matches!(inst.kind, InstanceKind::ExactDual | InstanceKind::ApproxDual);
    rec.push(
        "approx.deficit",
        claimed_approx,
        below_one(deficit),
        deficit,
        1.0 - NORM_MARGIN,
    );

    let pinv_norm = svd(k).ok().and_then(|s| s.sigma.last().map(|v| 1.0 / v)).unwrap_or(0.0);
    let upgrade_hyp = is_k_frame && below_one(deficit) && (pinv_norm - 1.0).abs() <= NORM_MARGIN;
    let psi = psi_operator(f, g, k, tol);
    let sigma_min = psi.as_ref().map(|p| p.min_singular).unwrap_or(0.0);
    rec.push(
        "psi.invertible",
        upgrade_hyp,
        psi.as_ref().is_ok_and(|p| p.invertible_on_range),
        sigma_min,
        tol,
    );
    match approx_upgrade(f, g, k, tol) {
        Ok((a, b)) => {
            rec.push("psi_upgrade.a", upgrade_hyp, a.is_exact(tol), a.duality_residual, tol);
            rec.push("psi_upgrade.b", upgrade_hyp, b.is_exact(tol), b.duality_residual, tol);
        }
        Err(_) => {
            rec.push("psi_upgrade.a", upgrade_hyp, false, f64::INFINITY, tol);
            rec.push("psi_upgrade.b", upgrade_hyp, false, f64::INFINITY, tol);
        }
    }

    // the two sufficient conditions for an approximate dual
    let split = range_projector(k).and_then(|p| {
        let pfg = &p * &fg;
        Ok((opnorm(&(k - &pfg))?, opnorm(&(&fg - &pfg))?, opnorm(&fg)?))
    });
    let (a, b, fg_norm) = split.unwrap_or((f64::INFINITY, f64::INFINITY, f64::INFINITY));
    rec.push(
        "implication.projected_dual",
        a <= tol && below_one(fg_norm),
        deficit < 1.0,
        deficit,
        1.0,
    );
    rec.push(
        "implication.transfer",
        below_one(a) && b <= 1.0 - a,
        deficit < 1.0,
        deficit,
        1.0,
    );

    finish(inst, rec)
}

fn finish(inst: &Instance, rec: Recorder) -> VerificationReport {
    let pass = rec.checks.iter().all(CheckRecord::passed);
    VerificationReport {
        instance: InstanceHeader {
            seed: inst.seed,
            n: inst.n,
            m: inst.m,
            rank_k: inst.rank_k,
            kind: inst.kind,
            prng: PRNG_NAME.to_string(),
        },
        checks: rec.checks,
        pass,
    }
}

/// Summary of a seeded batch; `reports` is ordered by seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    #[serde(rename = "baseSeed")]
    pub base_seed: u64,
    pub count: usize,
    pub kind: InstanceKind,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

/// Generates and checks `count` instances with seeds `base_seed + i`, in
/// parallel. Generation errors are reported as a failed instance.
pub fn run_random_suite(base_seed: u64, count: usize, max_n: usize, kind: InstanceKind, tol: f64) -> BatchReport {
    let reports: Vec<VerificationReport> = (0..count as u64)
        .into_par_iter()
        .map(|i| match random_instance(base_seed, i, max_n, kind) {
            Ok(inst) => run_suite(&inst, tol),
            Err(e) => generation_failure(base_seed.wrapping_add(i), kind, &e.to_string()),
        })
        .collect();
    let passed = reports.iter().filter(|r| r.pass).count();
    BatchReport {
        base_seed,
        count,
        kind,
        passed,
        failed: count - passed,
        pass: passed == count,
        reports,
    }
}

fn generation_failure(seed: u64, kind: InstanceKind, msg: &str) -> VerificationReport {
    log::warn!("seed {seed}: {msg}");
    VerificationReport {
        instance: InstanceHeader {
            seed,
            n: 0,
            m: 0,
            rank_k: 0,
            kind,
            prng: PRNG_NAME.to_string(),
        },
        checks: vec![CheckRecord {
            name: "generate".to_string(),
            hypothesis_met: true,
            conclusion_holds: false,
            residual: None,
            tolerance: 0.0,
        }],
        pass: false,
    }
}
