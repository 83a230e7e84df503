//! Random-instance invariant checking.
//!
//! Instance `i` draws from ChaCha stream `i` of the seed, so results do not
//! depend on scheduling; the report prints counts only.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pkit_core::decomposition::{
    invert_with_split, split_by_invariant_subspace, theorem1_converse_probe,
};
use pkit_core::inversion::{
    build_context, inverse_realization, resolvent_difference_residual, verify_multivalued_part,
    INVERSE_ANCHORS,
};
use pkit_core::jordan::{
    alpha_decomposition, chain_generator_in_range, maximal_nondegenerate_chain, pole_cancellation,
    regenerate_chain,
};
use pkit_core::linalg::{identity, rank, spectral_norm, zeros};
use pkit_core::nevanlinna::{
    check_symmetry, exact_negative_index, is_minimal, lemma3_predicates, negative_squares_sampled,
    Realization, SamplerConfig,
};
use pkit_core::pontryagin::hermitian_inertia;
use pkit_core::random::{
    invariant_split, planted_jordan, random_realization, singular_gamma_realization,
};
use pkit_core::{c64, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Inversion,
    Split,
    Jordan,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Inversion => "inversion",
            Kind::Split => "split",
            Kind::Jordan => "jordan",
        }
    }
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failures: Vec<String>,
    skips: Vec<&'static str>,
}

impl Tally {
    fn check(&mut self, name: &str, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(name.to_string());
        }
    }
}

pub struct FuzzReport {
    pub text: String,
    pub failed: usize,
}

fn random_z(rng: &mut ChaCha8Rng) -> C64 {
    let im = rng.random_range(0.1..3.0);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    c64(rng.random_range(-3.0..3.0), sign * im)
}

fn common_checks(t: &mut Tally, r: &Realization, rng: &mut ChaCha8Rng) {
    let pts: Vec<C64> = (0..3).map(|_| random_z(rng)).collect();
    let f = r.clone().into();
    let sym = check_symmetry(&f, &pts);
    let scale = pts
        .iter()
        .filter_map(|&z| r.evaluate(z).ok())
        .map(|q| spectral_norm(&q))
        .fold(1.0f64, f64::max);
    t.check(
        "symmetry Q(conj z)* = Q(z)",
        sym.max_residual <= 1e-8 * scale,
    );
    t.check(
        "injectivity implications",
        lemma3_predicates(r).implications_hold(),
    );
    match exact_negative_index(r) {
        Ok(exact) => {
            let sampled = negative_squares_sampled(&f, &SamplerConfig::default());
            t.check("sampled kappa = exact kappa", sampled.value == exact.value);
        }
        Err(_) => t.skips.push("degenerate minimal subspace"),
    }
}

fn inversion_checks(t: &mut Tally, r: &Realization, rng: &mut ChaCha8Rng) {
    let Ok(ctx) = build_context(r) else {
        t.skips.push("gram product singular");
        return;
    };
    let m = r.coeff_dim();
    let gp = r.gamma_plus();
    for _ in 0..5 {
        let z = random_z(rng);
        let (Ok(q), Ok(qh)) = (r.evaluate(z), ctx.qhat_evaluate(z)) else {
            t.skips.push("evaluation point at a pole");
            continue;
        };
        t.check(
            "Q Qhat = -I",
            spectral_norm(&(&q * &qh + identity(m))) <= 1e-8,
        );
        let schur_ok = ctx
            .schur_evaluate(z)
            .is_ok_and(|s| spectral_norm(&(s - &q)) <= 1e-8 * spectral_norm(&q).max(1.0));
        t.check("schur route = Q", schur_ok);
        let want = &qh * &gp;
        let gp_ok = ctx
            .qhat_gamma_plus(z)
            .is_ok_and(|v| spectral_norm(&(v - &want)) <= 1e-8 * spectral_norm(&want).max(1.0));
        t.check("Qhat Gamma0+ identity", gp_ok);
    }
    match INVERSE_ANCHORS
        .iter()
        .find_map(|&z0| inverse_realization(r, z0).ok())
    {
        Some(inv) => {
            for _ in 0..3 {
                let z = random_z(rng);
                if let Ok(res) = resolvent_difference_residual(r, &inv, z) {
                    t.check("resolvent difference", res <= 1e-8);
                }
            }
        }
        None => t.check("inverse realization exists", false),
    }
    t.check(
        "multivalued part = range(Gamma0)",
        verify_multivalued_part(r).is_ok_and(|mv| mv.matches(1e-8)),
    );
    match invert_with_split(r) {
        Ok(s) => {
            t.check(
                "kappa_hat_1 + kappa_hat_2 = kappa",
                s.kappa_hat1 + s.kappa_hat2 == s.report.kappa_whole,
            );
            let g = &gp * r.gamma();
            let neg = hermitian_inertia(&g, r.tol()).map(|i| i.negative).ok();
            t.check(
                "kappa_hat_1 = negative inertia of Gamma0+ Gamma0",
                Some(s.kappa_hat1) == neg,
            );
            t.check("Qhat_1 affine", s.affine_defect <= 1e-8);
            t.check("Qhat = Qhat_1 + Qhat_2", s.report.residual <= 1e-8);
        }
        Err(_) => t.check("inverse split", false),
    }
}

fn split_checks(t: &mut Tally, rng: &mut ChaCha8Rng, max_dim: usize) {
    let n1 = rng.random_range(1..max_dim);
    let n2 = rng.random_range(1..=max_dim - n1);
    let m = rng.random_range(1..=n1 + n2);
    let inst = invariant_split(rng, n1, n2, m);
    let r = &inst.realization;
    if !is_minimal(r) {
        t.skips.push("not minimal");
        return;
    }
    let rep = match split_by_invariant_subspace(r, &inst.subspace) {
        Ok(rep) => rep,
        Err(_) => {
            t.check("invariant split", false);
            return;
        }
    };
    t.check("Q = Q1 + Q2", rep.residual <= 1e-8);
    t.check("kappa1 + kappa2 = kappa", rep.kappa_sum == rep.kappa_whole);
    t.check(
        "component kappas match construction",
        rep.components[0].kappa.value == inst.kappa1
            && rep.components[1].kappa.value == inst.kappa2,
    );
    if let [Some(r1), Some(r2)] = [
        &rep.components[0].realization,
        &rep.components[1].realization,
    ] {
        match theorem1_converse_probe(r1, r2) {
            Ok(p) if p.gamma_plus_injective => {
                t.check("injective Gamma+ gives a minimal sum", p.sum_minimal)
            }
            Ok(_) => {}
            Err(_) => t.check("sum probe", false),
        }
    }
    common_checks(t, r, rng);
}

fn jordan_checks(t: &mut Tally, rng: &mut ChaCha8Rng, max_dim: usize) {
    let p = planted_jordan(rng, max_dim);
    let r = &p.realization;
    let d = match alpha_decomposition(r, p.alpha) {
        Ok(d) => d,
        Err(_) => {
            t.check("alpha decomposition", false);
            return;
        }
    };
    t.check("block kappas sum to kappa", d.kappa_total() == p.kappa);
    t.check("blocks J-orthogonal", d.orthogonality_defect() <= 1e-8);
    t.check("Q = sum of block functions", d.residual(r) <= 1e-8);
    let a = r.operator().expect("bounded form");
    for c in d.chains() {
        t.check("chain residual", c.residual(a) <= 1e-9);
        let again = chain_generator_in_range(r, c).and_then(|h| regenerate_chain(r, c, &h));
        t.check(
            "generator regenerates the chain",
            again.is_ok_and(|g| g.span(r.space()).distance(&c.span(r.space())) <= 1e-8),
        );
    }
    let Ok(Some(c)) = maximal_nondegenerate_chain(r, p.alpha) else {
        t.skips.push("no non-degenerate chain");
        return;
    };
    let mut g = r.gamma().clone();
    g.set_column(0, &c.top().column(0));
    let Ok(r2) = Realization::bounded(r.space(), a.clone(), g) else {
        t.check("chain-top realization", false);
        return;
    };
    if rank(r2.gamma(), 1e-10) < r2.coeff_dim() {
        t.skips.push("chain top makes gamma0 rank deficient");
        return;
    }
    let mut h = zeros(r2.coeff_dim(), 1);
    h[(0, 0)] = c64(1.0, 0.0);
    let Ok(eta) = pole_cancellation(&r2, &c) else {
        t.check("pole cancellation", false);
        return;
    };
    for k in 0..10 {
        let z = c64(-1.5 + 0.31 * k as f64, 0.2 + 0.13 * k as f64);
        if let Ok(v) = eta.evaluate(z) {
            let want = eta.predicted(z, &h);
            t.check(
                "eta = -(z-alpha)^l h",
                (&v - &want).norm() <= 1e-7 * want.norm(),
            );
        }
    }
    let rate_ok = eta
        .decay_rate()
        .is_ok_and(|rate| (rate - c.len() as f64).abs() <= 0.05);
    t.check("eta decay rate = l", rate_ok);
}

fn run_instance(seed: u64, index: usize, max_dim: usize) -> (Kind, Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut t = Tally::default();
    let kind = match index % 3 {
        0 => Kind::Inversion,
        1 => Kind::Split,
        _ => Kind::Jordan,
    };
    match kind {
        Kind::Inversion => {
            let n = rng.random_range(2..=max_dim);
            let neg = rng.random_range(0..=n);
            // every tenth instance has a repeated Γ₀ column
            let r = if index % 10 == 9 {
                let m = rng.random_range(2..=n);
                singular_gamma_realization(&mut rng, n, m, neg)
            } else {
                let m = rng.random_range(1..=n);
                random_realization(&mut rng, n, m, neg)
            };
            common_checks(&mut t, &r, &mut rng);
            inversion_checks(&mut t, &r, &mut rng);
        }
        Kind::Split => split_checks(&mut t, &mut rng, max_dim),
        Kind::Jordan => jordan_checks(&mut t, &mut rng, max_dim),
    }
    (kind, t)
}

pub fn run(seed: u64, count: usize, max_dim: usize) -> FuzzReport {
    let max_dim = max_dim.max(2);
    let results: Vec<(Kind, Tally)> = (0..count)
        .into_par_iter()
        .map(|i| run_instance(seed, i, max_dim))
        .collect();

    let mut kinds: BTreeMap<Kind, usize> = BTreeMap::new();
    let mut skips: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut passed = 0;
    let mut failures = Vec::new();
    for (i, (kind, t)) in results.iter().enumerate() {
        *kinds.entry(*kind).or_default() += 1;
        passed += t.passed;
        for s in &t.skips {
            *skips.entry(s).or_default() += 1;
        }
        for f in &t.failures {
            failures.push(format!("instance {i} ({}): {f}", kind.name()));
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "fuzz: seed {seed}, count {count}, max dim {max_dim}");
    let by_kind: Vec<String> = kinds
        .iter()
        .map(|(k, n)| format!("{} {n}", k.name()))
        .collect();
    if by_kind.is_empty() {
        let _ = writeln!(out, "instances: {count}");
    } else {
        let _ = writeln!(out, "instances: {count} ({})", by_kind.join(", "));
    }
    let _ = writeln!(out, "checks passed: {passed}");
    let _ = writeln!(out, "checks failed: {}", failures.len());
    let _ = writeln!(out, "skipped: {}", skips.values().sum::<usize>());
    for (reason, n) in &skips {
        let _ = writeln!(out, "  {reason}: {n}");
    }
    if !failures.is_empty() {
        out.push_str("failures:\n");
        for f in &failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    let _ = writeln!(
        out,
        "result: {}",
        if failures.is_empty() { "PASS" } else { "FAIL" }
    );
    FuzzReport {
        text: out,
        failed: failures.len(),
    }
}
