use proptest::prelude::*;

use quatframe_core::dual::{
    approx_deficit, approx_upgrade, atomic_sequence, canonical_bound_bracket, canonical_k_dual, is_k_dual,
    left_inverse_residual,
};
use quatframe_core::frame::k_frame_bounds;
use quatframe_core::io::{parse_instance_str, to_json};
use quatframe_core::tol::VERIFY_TOL;
use quatframe_core::verify::{gen_instance, random_instance, run_suite, InstanceKind};
use quatframe_core::{QMatrix, Quaternion};

fn quat() -> impl Strategy<Value = Quaternion> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
        .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
}

proptest! {
    #[test]
    fn modulus_is_multiplicative(p in quat(), q in quat()) {
        let lhs = (p * q).modulus();
        let rhs = p.modulus() * q.modulus();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        let d = (p * q).conj() - q.conj() * p.conj();
        prop_assert!(d.modulus() <= 1e-12 * (1.0 + p.modulus() * q.modulus()));
    }
}

#[test]
fn instance_files_round_trip_exactly() {
    for kind in [InstanceKind::ExactDual, InstanceKind::ApproxDual, InstanceKind::NonDual] {
        for i in 0..10 {
            let inst = random_instance(40, i, 6, kind).unwrap();
            let back = parse_instance_str(&to_json(&inst)).unwrap();
            assert_eq!(
                (back.seed, back.n, back.m, back.rank_k, back.kind),
                (inst.seed, inst.n, inst.m, inst.rank_k, kind)
            );
            assert_eq!(back.k.max_abs_diff(&inst.k), 0.0);
            assert_eq!(back.f.matrix().max_abs_diff(inst.f.matrix()), 0.0);
            let (g, h) = (back.g.unwrap(), inst.g.unwrap());
            assert_eq!(g.matrix().max_abs_diff(h.matrix()), 0.0);
        }
    }
}

#[test]
fn generated_kinds_match_their_deficits() {
    for seed in 0..20 {
        let exact = gen_instance(seed, 5, 7, 3, InstanceKind::ExactDual).unwrap();
        let d = approx_deficit(&exact.f, exact.g.as_ref().unwrap(), &exact.k).unwrap();
        assert!(d.deficit <= 1e-9, "seed {seed}: {}", d.deficit);

        let approx = gen_instance(seed, 5, 7, 3, InstanceKind::ApproxDual).unwrap();
        let d = approx_deficit(&approx.f, approx.g.as_ref().unwrap(), &approx.k).unwrap();
        assert!(d.is_approximate && d.deficit > 1e-3, "seed {seed}: {}", d.deficit);
    }
}

#[test]
fn upgrade_turns_approximate_duals_exact() {
    for i in 0..20 {
        let inst = random_instance(3, i, 5, InstanceKind::ApproxDual).unwrap();
        let g = inst.g.as_ref().unwrap();
        let (a, b) = approx_upgrade(&inst.f, g, &inst.k, 1e-9).unwrap();
        assert!(a.is_exact(VERIFY_TOL), "seed {}: {}", inst.seed, a.duality_residual);
        assert!(b.is_exact(VERIFY_TOL), "seed {}: {}", inst.seed, b.duality_residual);
    }
}

#[test]
fn canonical_dual_of_a_k_frame() {
    for i in 0..20 {
        let inst = random_instance(11, i, 6, InstanceKind::ExactDual).unwrap();
        let canon = canonical_k_dual(&inst.f, &inst.k).unwrap();
        let check = is_k_dual(&canon.projected, &canon.dual, &inst.k, VERIFY_TOL).unwrap();
        assert!(check.is_dual, "seed {}: {}", inst.seed, check.residual);
        let bracket = canonical_bound_bracket(&inst.k, &canon).unwrap();
        assert!(bracket.lower_holds(1e-9), "seed {}: {bracket:?}", inst.seed);
    }
}

#[test]
fn atomic_sequence_is_a_left_inverse_on_the_range() {
    for i in 0..20 {
        let inst = random_instance(17, i, 6, InstanceKind::ExactDual).unwrap();
        let h = atomic_sequence(&inst.f, inst.g.as_ref().unwrap(), &inst.k, 1e-9).unwrap();
        let r = left_inverse_residual(&inst.f, &h, &inst.k).unwrap();
        assert!(r <= VERIFY_TOL, "seed {}: {r}", inst.seed);
    }
}

#[test]
fn zero_operator_is_handled() {
    let inst = gen_instance(1, 3, 4, 1, InstanceKind::ExactDual).unwrap();
    let k = QMatrix::zeros(3, 3);
    let cert = k_frame_bounds(&inst.f, &k).unwrap();
    assert!(cert.is_k_frame);
    let canon = canonical_k_dual(&inst.f, &k).unwrap();
    assert_eq!(canon.dual.matrix().max_abs_diff(&QMatrix::zeros(3, 4)), 0.0);
}

#[test]
fn suite_reports_are_deterministic() {
    let inst = random_instance(9, 2, 5, InstanceKind::ApproxDual).unwrap();
    let a = serde_json::to_string(&run_suite(&inst, VERIFY_TOL)).unwrap();
    let b = serde_json::to_string(&run_suite(&inst, VERIFY_TOL)).unwrap();
    assert_eq!(a, b);
}
