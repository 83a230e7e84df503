use pkit_core::inversion::{
    build_context, inverse_realization, resolvent_difference_residual, verify_multivalued_part,
};
use pkit_core::linalg::{c64, identity, inverse_checked, real_matrix, spectral_norm, CMatrix};
use pkit_core::models::{diag_model, jordan_model, rank_one_model};
use pkit_core::pontryagin::orthogonal_projection;
use pkit_core::random::random_realization;
use pkit_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense_qhat(r: &pkit_core::nevanlinna::Realization, z: C64) -> CMatrix {
    -inverse_checked(&r.evaluate(z).unwrap(), 1e-14).unwrap()
}

#[test]
fn diag_model_qhat_closed_form() {
    let ctx = build_context(&diag_model()).unwrap();
    for z in [c64(0.0, 1.0), c64(2.5, -0.3), c64(0.0, 0.0)] {
        let q = ctx.qhat_evaluate(z).unwrap();
        let mut want = CMatrix::zeros(2, 2);
        want[(0, 0)] = z - 1.0;
        want[(1, 1)] = -z - 1.0;
        assert!((q - want).norm() < 1e-14);
    }
    let z = c64(0.0, 1.0);
    assert!((ctx.qhat_evaluate(z).unwrap() - dense_qhat(&diag_model(), z)).norm() < 1e-14);
}

#[test]
fn pole_of_a_is_rejected() {
    let ctx = build_context(&diag_model()).unwrap();
    assert!(ctx.qhat_evaluate(c64(1.0, 0.0)).is_err());
}

#[test]
fn jordan_model_qhat_matches_dense_inverse() {
    let r = jordan_model();
    let ctx = build_context(&r).unwrap();
    let z = c64(0.0, 1.0);
    assert!((ctx.qhat_evaluate(z).unwrap() - dense_qhat(&r, z)).norm() < 1e-13);
}

#[test]
fn schur_route_examples() {
    let z = c64(0.0, 1.0);
    let r = diag_model();
    let ctx = build_context(&r).unwrap();
    assert!((ctx.schur_evaluate(z).unwrap() - r.evaluate(z).unwrap()).norm() < 1e-14);
    let z = c64(0.0, 2.0);
    let r = jordan_model();
    let ctx = build_context(&r).unwrap();
    assert!((ctx.schur_evaluate(z).unwrap() - r.evaluate(z).unwrap()).norm() < 1e-14);
    let r = rank_one_model();
    let ctx = build_context(&r).unwrap();
    assert!((ctx.schur_evaluate(z).unwrap() - r.evaluate(z).unwrap()).norm() < 1e-14);
}

#[test]
fn qhat_gamma_plus_examples() {
    let sig = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let ctx = build_context(&diag_model()).unwrap();
    let z = c64(0.0, 1.0);
    let mut d = CMatrix::zeros(2, 2);
    d[(0, 0)] = z - 1.0;
    d[(1, 1)] = -z - 1.0;
    assert!((ctx.qhat_gamma_plus(z).unwrap() - d * sig).norm() < 1e-14);

    let r = jordan_model();
    let ctx = build_context(&r).unwrap();
    let z = c64(0.0, 2.0);
    let want = ctx.qhat_evaluate(z).unwrap() * r.gamma_plus();
    assert!((ctx.qhat_gamma_plus(z).unwrap() - want).norm() < 1e-13);
}

#[test]
fn diag_model_inverse_relation_is_purely_multivalued() {
    let r = diag_model();
    let inv = inverse_realization(&r, c64(0.0, 1.0)).unwrap();
    assert!(inv.op().is_selfadjoint());
    assert_eq!(inv.op().multivalued_part().dim(), 2);
    let rep = verify_multivalued_part(&r).unwrap();
    assert_eq!(rep.multivalued_dim, 2);
    assert!(rep.distance <= 1e-10 && rep.kernel_distance <= 1e-10);
}

#[test]
fn jordan_model_inverse_realization_cross_check() {
    let r = jordan_model();
    let inv = inverse_realization(&r, c64(0.0, 1.0)).unwrap();
    let ctx = build_context(&r).unwrap();
    let z = c64(0.0, 2.0);
    let d = inv.evaluate(z).unwrap() - ctx.qhat_evaluate(z).unwrap();
    assert!(spectral_norm(&d) <= 1e-8);
    assert!(verify_multivalued_part(&r).unwrap().matches(1e-8));
}

#[test]
fn rank_deficient_gamma_multivalued_dimension() {
    let r = rank_one_model();
    let rep = verify_multivalued_part(&r).unwrap();
    assert_eq!(rep.multivalued_dim, 1);
    assert!(rep.matches(1e-8));
}

fn random_z<R: Rng>(rng: &mut R) -> C64 {
    c64(rng.random_range(-3.0..3.0), rng.random_range(0.1..3.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_identities(seed in 0u64..100_000, n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=n);
        let neg = rng.random_range(0..=n);
        let r = random_realization(&mut rng, n, m, neg);
        let Ok(ctx) = build_context(&r) else { return Ok(()); };
        prop_assert!(ctx.residuals().max() <= 1e-8);
        let (ran_c, ran_p) = ctx.ranges();
        let e = orthogonal_projection(&ran_p).unwrap();
        prop_assert!(spectral_norm(&(e - ctx.p())) <= 1e-8 * spectral_norm(ctx.p()).max(1.0));
        prop_assert_eq!(ran_c.dim() + ran_p.dim(), n);
        for _ in 0..5 {
            let z = random_z(&mut rng);
            let Ok(q) = r.evaluate(z) else { continue };
            let Ok(qh) = ctx.qhat_evaluate(z) else { continue };
            prop_assert!(spectral_norm(&(&q * &qh + identity(m))) <= 1e-8);
            prop_assert!(spectral_norm(&(&qh * &q + identity(m))) <= 1e-8);
            let qh_bar = ctx.qhat_evaluate(z.conj()).unwrap();
            prop_assert!(spectral_norm(&(qh_bar.adjoint() - &qh)) <= 1e-8 * spectral_norm(&qh).max(1.0));
        }
    }

    #[test]
    fn inverse_relation_properties(seed in 0u64..100_000, n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=n);
        let neg = rng.random_range(0..=n);
        let r = random_realization(&mut rng, n, m, neg);
        let Ok(_) = build_context(&r) else { return Ok(()); };
        let inv = inverse_realization(&r, c64(0.0, 1.0)).unwrap();
        prop_assert!(inv.op().is_selfadjoint());
        prop_assert!(inv.op().multivalued_part().dim() > 0);
        for _ in 0..3 {
            let z = random_z(&mut rng);
            if let Ok(res) = resolvent_difference_residual(&r, &inv, z) {
                prop_assert!(res <= 1e-8);
            }
        }
    }
}
