use pkit_core::decomposition::{
    block_diag, invert_with_split, lemma4_minimality_check, local_split,
    split_by_invariant_subspace, sum_realizations, theorem1_converse_probe, VERIFICATION_GRID,
};
use pkit_core::jordan::root_manifold;
use pkit_core::linalg::{c64, identity, real_matrix, spectral_norm, zeros, CMatrix};
use pkit_core::models::{
    diag_model, example1, example1_closed_form, example1_components, jordan_model, three_dim_model,
    zero_realization,
};
use pkit_core::nevanlinna::{
    exact_negative_index, is_minimal, negative_squares_sampled, GnFunction, RationalFunction,
    Realization, SamplerConfig,
};
use pkit_core::pontryagin::{hermitian_inertia, PontryaginSpace, Subspace};
use pkit_core::random::{invariant_split, planted_jordan, random_realization};
use pkit_core::{Error, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn diag2(a: C64, b: C64) -> CMatrix {
    let mut m = zeros(2, 2);
    m[(0, 0)] = a;
    m[(1, 1)] = b;
    m
}

fn one() -> C64 {
    c64(1.0, 0.0)
}

/// `J = diag(-1, 1)`, `A = diag(2, -2)`, `Γ₀ = I`.
fn flipped_copy() -> Realization {
    let sp = PontryaginSpace::from_signs(&[false, true]);
    Realization::bounded(&sp, real_matrix(2, 2, &[2.0, 0.0, 0.0, -2.0]), identity(2)).unwrap()
}

#[test]
fn jordan_model_full_subspace_is_trivial_split() {
    let r = jordan_model();
    let rep = split_by_invariant_subspace(&r, &Subspace::full(r.space())).unwrap();
    assert_eq!(rep.components[0].kappa.value, 1);
    assert_eq!(rep.components[1].kappa.value, 0);
    assert_eq!(
        rep.components[1].realization.as_ref().unwrap().state_dim(),
        0
    );
    assert!(rep.desirable && rep.residual < 1e-12);
}

#[test]
fn diag_model_split_by_first_axis() {
    let r = diag_model();
    let s = Subspace::span(r.space(), &real_matrix(2, 1, &[1.0, 0.0]));
    let rep = split_by_invariant_subspace(&r, &s).unwrap();
    for z in [c64(0.0, 1.0), c64(0.5, -2.0)] {
        let q1 = rep.components[0].function.evaluate(z).unwrap();
        let q2 = rep.components[1].function.evaluate(z).unwrap();
        assert!((q1 - diag2(one() / (one() - z), c64(0.0, 0.0))).norm() < 1e-14);
        assert!((q2 - diag2(c64(0.0, 0.0), one() / (one() + z))).norm() < 1e-14);
    }
    assert_eq!(
        (rep.components[0].kappa.value, rep.components[1].kappa.value),
        (0, 1)
    );
    assert!(rep.desirable);
}

#[test]
fn four_dim_block_model_splits_one_plus_one() {
    let r = sum_realizations(&diag_model(), &flipped_copy()).unwrap();
    assert!(is_minimal(&r));
    let first = real_matrix(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let rep = split_by_invariant_subspace(&r, &Subspace::span(r.space(), &first)).unwrap();
    assert_eq!(rep.kappa_whole, 2);
    assert_eq!(
        (rep.components[0].kappa.value, rep.components[1].kappa.value),
        (1, 1)
    );
    assert!(rep.residual < 1e-12);
}

#[test]
fn split_rejects_bad_subspaces() {
    let r = diag_model();
    let mixed = Subspace::span(r.space(), &real_matrix(2, 1, &[1.0, 0.5]));
    assert!(matches!(
        split_by_invariant_subspace(&r, &mixed),
        Err(Error::NotInvariant { .. })
    ));
    let j = jordan_model();
    let neutral = Subspace::span(j.space(), &real_matrix(2, 1, &[1.0, 0.0]));
    assert!(matches!(
        split_by_invariant_subspace(&j, &neutral),
        Err(Error::DegenerateSubspace { .. })
    ));
    let e = example1();
    assert!(matches!(
        split_by_invariant_subspace(&e, &Subspace::full(e.space())),
        Err(Error::NotMinimal { .. })
    ));
}

#[test]
fn example1_sum_reproduces_triplet_and_closed_form() {
    let (r1, r2) = example1_components();
    let sum = sum_realizations(&r1, &r2).unwrap();
    let printed = example1();
    assert!((sum.space().gram() - printed.space().gram()).norm() < 1e-15);
    assert!((sum.operator().unwrap() - printed.operator().unwrap()).norm() < 1e-15);
    assert!((sum.gamma() - printed.gamma()).norm() < 1e-15);
    let closed = example1_closed_form();
    for z in VERIFICATION_GRID {
        assert!((sum.evaluate(z).unwrap() - closed.evaluate(z).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn sum_with_zero_realization_and_doubling() {
    let r = jordan_model();
    let s = sum_realizations(&r, &zero_realization(2)).unwrap();
    let z = c64(0.4, 0.9);
    assert!((s.evaluate(z).unwrap() - r.evaluate(z).unwrap()).norm() < 1e-14);
    let d = sum_realizations(&diag_model(), &diag_model()).unwrap();
    assert_eq!(d.space().neg_index(), 2);
    assert!(
        (d.evaluate(z).unwrap() - diag_model().evaluate(z).unwrap() * c64(2.0, 0.0)).norm() < 1e-14
    );
    assert!(sum_realizations(&r, &zero_realization(3)).is_err());
}

#[test]
fn general_form_sum_matches_pointwise() {
    let g1 = diag_model().to_general(c64(0.0, 1.0)).unwrap();
    let s = sum_realizations(&g1, &jordan_model()).unwrap();
    assert!(!s.is_bounded());
    for z in VERIFICATION_GRID {
        let want = diag_model().evaluate(z).unwrap() + jordan_model().evaluate(z).unwrap();
        assert!((s.evaluate(z).unwrap() - want).norm() < 1e-10);
    }
}

#[test]
fn lemma4_examples() {
    let (r1, r2) = example1_components();
    let rep = lemma4_minimality_check(&r1, &r2).unwrap();
    assert_eq!(rep.components_minimal, [true, true]);
    assert!(!rep.sum_minimal && !rep.gamma_plus_injective);
    assert!(rep.violations.is_empty());

    let rep = lemma4_minimality_check(&diag_model(), &flipped_copy()).unwrap();
    assert!(rep.sum_minimal);
    assert_eq!(rep.sum_separating, Some(true));
    assert!(rep.violations.is_empty());

    let sp = PontryaginSpace::from_signs(&[true, false]);
    let z =
        Realization::bounded(&sp, real_matrix(2, 2, &[1.0, 0.0, 0.0, 2.0]), zeros(2, 1)).unwrap();
    let rep = lemma4_minimality_check(&z, &z).unwrap();
    assert!(!rep.sum_minimal && rep.violations.is_empty());
}

#[test]
fn block_diag_examples() {
    let cfg = SamplerConfig::default();
    let q = || -> GnFunction { RationalFunction::scalar_pole(-1.0, 0.0).into() };
    let p: GnFunction = RationalFunction::scalar_pole(1.0, -1.0).into();
    assert_eq!(
        negative_squares_sampled(&block_diag(q(), q()), &cfg).value,
        0
    );
    assert_eq!(negative_squares_sampled(&block_diag(q(), p), &cfg).value, 1);
    let f: GnFunction = jordan_model().into();
    let g = block_diag(f.clone(), GnFunction::block_diag(Vec::new()));
    let z = c64(0.2, 1.4);
    assert!((g.evaluate(z).unwrap() - f.evaluate(z).unwrap()).norm() < 1e-15);
}

#[test]
fn converse_probe_examples() {
    let (r1, r2) = example1_components();
    let p = theorem1_converse_probe(&r1, &r2).unwrap();
    assert!(p.components_minimal && p.additive);
    assert!(!p.gamma_plus_injective && !p.sum_minimal);
    assert!(p.sum_residual < 1e-12);

    // Γ₀ᵢ act on separate halves of C⁴, so the stacked Γ⁺ is injective
    let wide = |first: bool| {
        let mut g = zeros(2, 4);
        let off = if first { 0 } else { 2 };
        g[(0, off)] = one();
        g[(1, off + 1)] = one();
        g
    };
    let d1 = Realization::bounded(
        diag_model().space(),
        diag_model().operator().unwrap().clone(),
        wide(true),
    )
    .unwrap();
    let f = flipped_copy();
    let d2 = Realization::bounded(f.space(), f.operator().unwrap().clone(), wide(false)).unwrap();
    let p = theorem1_converse_probe(&d1, &d2).unwrap();
    assert!(p.gamma_plus_injective && p.sum_minimal && p.additive);
    assert_eq!(p.kappa_sum.value, 2);
    assert!(p.violations.is_empty());

    let p = theorem1_converse_probe(&zero_realization(1), &zero_realization(1)).unwrap();
    assert_eq!(p.kappa_sum.value, 0);
    assert!(p.violations.is_empty());
}

#[test]
fn local_split_examples() {
    let r = jordan_model();
    let rep = local_split(&r, 0.0).unwrap();
    assert_eq!(
        rep.components[1].realization.as_ref().unwrap().state_dim(),
        0
    );
    assert!(rep.residual < 1e-12);

    let rep = local_split(&example1(), 0.0).unwrap();
    assert_eq!(
        rep.components[0].realization.as_ref().unwrap().state_dim(),
        4
    );
    assert!(rep.residual < 1e-12);

    let r = diag_model();
    let rep = local_split(&r, 1.0).unwrap();
    let z = c64(0.3, 0.7);
    let qa = rep.components[0].function.evaluate(z).unwrap();
    let ha = rep.components[1].function.evaluate(z).unwrap();
    assert!((qa - diag2(one() / (one() - z), c64(0.0, 0.0))).norm() < 1e-14);
    assert!((ha - diag2(c64(0.0, 0.0), one() / (one() + z))).norm() < 1e-14);
    assert!(rep.components[1].function.evaluate(c64(1.0, 0.0)).is_ok());
    let root = root_manifold(&r, 1.0).unwrap();
    assert!(rep.components[0].subspace.as_ref().unwrap().distance(&root) < 1e-12);
    assert!(matches!(
        local_split(&r, 0.5),
        Err(Error::NotEigenvalue { .. })
    ));
}

#[test]
fn invert_with_split_examples() {
    let s = invert_with_split(&diag_model()).unwrap();
    let (c0, c1) = &s.affine;
    let z = c64(0.7, 1.2);
    let want = diag2(z - 1.0, -z - 1.0);
    assert!((c0 + c1 * z - want).norm() < 1e-14);
    assert_eq!((s.kappa_hat1, s.kappa_hat2), (1, 0));
    assert!(s.report.desirable && s.report.residual < 1e-12);

    let s = invert_with_split(&jordan_model()).unwrap();
    assert_eq!((s.kappa_hat1, s.kappa_hat2), (1, 0));
    assert!(s.report.residual < 1e-12);

    let s = invert_with_split(&three_dim_model()).unwrap();
    assert_eq!(s.kappa_hat1, 0);
    assert_eq!(s.kappa_hat2_ambient, 1);
    assert_eq!(s.kappa_hat2, 0);
    assert_eq!(s.report.kappa_whole, 0);
    let sub = s.report.components[1].subspace.as_ref().unwrap();
    let e3 = Subspace::span(sub.ambient(), &real_matrix(3, 1, &[0.0, 0.0, 1.0]));
    assert!(sub.distance(&e3) < 1e-12);
    assert!(s.report.residual < 1e-12);

    assert!(matches!(
        invert_with_split(&example1()),
        Err(Error::GramProductSingular { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariant_split_is_desirable(seed in 0u64..100_000, n1 in 1usize..4, n2 in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=3);
        let inst = invariant_split(&mut rng, n1, n2, m);
        let r = &inst.realization;
        prop_assume!(is_minimal(r));
        let rep = split_by_invariant_subspace(r, &inst.subspace).unwrap();
        prop_assert!(rep.residual <= 1e-8, "residual {}", rep.residual);
        prop_assert_eq!(rep.components[0].kappa.value, inst.kappa1);
        prop_assert_eq!(rep.components[1].kappa.value, inst.kappa2);
        prop_assert_eq!(rep.kappa_sum, rep.kappa_whole);
        for c in &rep.components {
            prop_assert!(is_minimal(c.realization.as_ref().unwrap()));
        }
    }

    #[test]
    fn inverse_split_accounts_for_index(seed in 0u64..100_000, n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=n);
        let neg = rng.random_range(0..=n);
        let r = random_realization(&mut rng, n, m, neg);
        prop_assume!(is_minimal(&r));
        let Ok(s) = invert_with_split(&r) else { return Ok(()); };
        let g = r.gamma_plus() * r.gamma();
        prop_assert_eq!(s.kappa_hat1, hermitian_inertia(&g, 1e-9).unwrap().negative);
        prop_assert_eq!(s.kappa_hat1 + s.kappa_hat2, exact_negative_index(&r).unwrap().value);
        prop_assert!(s.affine_defect <= 1e-8);
        prop_assert!(s.report.residual <= 1e-8);
        let q2 = s.report.components[1].realization.as_ref().unwrap();
        let far = q2.evaluate(c64(0.0, 1e7)).unwrap();
        prop_assert!(spectral_norm(&far) <= 1e-5 * spectral_norm(&q2.gamma_plus()).max(1.0) * spectral_norm(q2.gamma()).max(1.0));
    }

    #[test]
    fn block_diag_index_is_additive(seed in 0u64..100_000, n1 in 1usize..4, n2 in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k1, k2) = (rng.random_range(0..=n1), rng.random_range(0..=n2));
        let a = random_realization(&mut rng, n1, n1, k1);
        let b = random_realization(&mut rng, n2, n2, k2);
        let ka = exact_negative_index(&a).unwrap().value;
        let kb = exact_negative_index(&b).unwrap().value;
        let f = block_diag(a.into(), b.into());
        prop_assert_eq!(negative_squares_sampled(&f, &SamplerConfig::default()).value, ka + kb);
    }

    #[test]
    fn local_split_keeps_root_manifold(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = planted_jordan(&mut rng, 7);
        let r = &p.realization;
        let rep = local_split(r, p.alpha).unwrap();
        prop_assert!(rep.residual <= 1e-8);
        let root = root_manifold(r, p.alpha).unwrap();
        let planted: usize = p.blocks.iter().map(|b| b.0).sum();
        prop_assert_eq!(root.dim(), planted);
        prop_assert!(rep.components[0].subspace.as_ref().unwrap().distance(&root) <= 1e-8);
        let q_alpha = rep.components[0].realization.as_ref().unwrap();
        let inner = root_manifold(q_alpha, p.alpha).unwrap();
        prop_assert_eq!(inner.dim(), planted);
        prop_assert!(rep.components[1].function.evaluate(c64(p.alpha, 0.0)).is_ok());
    }
}
