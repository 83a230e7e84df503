//! One function per subcommand; each returns the full report text.

use std::fmt::Write as _;

use pkit_core::decomposition::{
    invert_with_split, lemma4_minimality_check, split_by_invariant_subspace,
    theorem1_converse_probe,
};
use pkit_core::inversion::{build_context, verify_multivalued_part};
use pkit_core::jordan::{
    alpha_decomposition, chain_generator_in_range, pole_cancellation, root_manifold, top_generator,
    BlockKind, JordanChain,
};
use pkit_core::linalg::{identity, spectral_norm};
use pkit_core::models::{example1, example1_closed_form, example1_components};
use pkit_core::nevanlinna::{
    exact_negative_index, lemma3_predicates, minimal_subspace, negative_index,
    negative_squares_sampled, KappaMethod, Realization, SamplerConfig,
};
use pkit_core::pontryagin::{hermitian_inertia, Inertia, DEFAULT_TOL};
use pkit_core::{c64, CMatrix, C64};

use crate::error::{CliError, CliResult};
use crate::format::{complex, matrix, pass_fail, short, yes_no};
use crate::problem::{FormTag, ProblemFile};

/// Tolerance shared by every command.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: DEFAULT_TOL }
    }
}

impl Settings {
    /// Reads `PKIT_TOL` when set.
    pub fn from_env() -> CliResult<Self> {
        match std::env::var("PKIT_TOL") {
            Err(_) => Ok(Self::default()),
            Ok(s) => match s.trim().parse::<f64>() {
                Ok(t) if t > 0.0 && t < 1.0 => Ok(Settings { tol: t }),
                _ => Err(CliError::parse(format!(
                    "PKIT_TOL: expected a number in (0, 1), found \"{s}\""
                ))),
            },
        }
    }

    fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            tol: self.tol,
            ..SamplerConfig::default()
        }
    }
}

/// `RE,IM` or a bare real number.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| format!("\"{s}\" is not RE,IM"))
    };
    let z = match parts[..] {
        [re] => c64(num(re)?, 0.0),
        [re, im] => c64(num(re)?, num(im)?),
        _ => return Err(format!("\"{s}\" is not RE,IM")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("\"{s}\" is not finite"))
    }
}

fn inertia(i: &Inertia) -> String {
    format!("plus {}, zero {}, minus {}", i.positive, i.zero, i.negative)
}

fn method(m: KappaMethod) -> &'static str {
    match m {
        KappaMethod::Exact => "exact",
        KappaMethod::Sampled => "sampled",
    }
}

fn opt_yes_no(b: Option<bool>) -> &'static str {
    b.map_or("n/a", yes_no)
}

pub fn inspect(p: &ProblemFile, s: &Settings) -> CliResult<String> {
    let r = p.realization(s.tol)?;
    let mut out = String::new();
    if let Some(name) = &p.name {
        let _ = writeln!(out, "name: {name}");
    }
    match p.effective_form() {
        FormTag::Bounded => out.push_str("form: bounded\n"),
        FormTag::General => {
            let _ = writeln!(
                out,
                "form: general (z0 = {})",
                complex(r.ref_point().expect("general form"))
            );
        }
    }
    let _ = writeln!(out, "dimension: {}", r.state_dim());
    let _ = writeln!(out, "coefficient dimension: {}", r.coeff_dim());
    let _ = writeln!(out, "inertia of J: {}", inertia(&r.space().inertia()));
    let pred = lemma3_predicates(&r);
    let _ = writeln!(out, "minimal: {}", pred.minimal);
    let _ = writeln!(
        out,
        "minimal subspace dimension: {}",
        minimal_subspace(&r).dim()
    );
    let k = negative_index(&r, &s.sampler());
    let _ = writeln!(out, "kappa: {}", k.value);
    let _ = writeln!(out, "kappa method: {}", method(k.method));
    let sampled = negative_squares_sampled(&r.clone().into(), &s.sampler());
    let _ = writeln!(out, "kappa sampled: {}", sampled.value);
    let _ = writeln!(out, "gamma0 injective: {}", yes_no(pred.gamma_injective));
    let _ = writeln!(
        out,
        "gamma0+ injective: {}",
        yes_no(pred.gamma_plus_injective)
    );
    let _ = writeln!(
        out,
        "gamma0+ gamma0 injective: {}",
        opt_yes_no(pred.gram_product_injective)
    );
    let _ = writeln!(out, "separating: {}", opt_yes_no(pred.separating));
    if pred.violations.is_empty() {
        out.push_str("implications: hold\n");
    } else {
        for v in &pred.violations {
            let _ = writeln!(out, "implication violated: {v}");
        }
    }
    Ok(out)
}

pub fn eval(p: &ProblemFile, z: C64, s: &Settings) -> CliResult<String> {
    let r = p.realization(s.tol)?;
    let q = r.evaluate(z)?;
    Ok(format!("z: {}\nQ(z):\n{}", complex(z), matrix(&q, "  ")))
}

pub fn invert(p: &ProblemFile, points: &[C64], s: &Settings) -> CliResult<String> {
    let r = p.realization(s.tol)?;
    if !r.is_bounded() {
        return Err(pkit_core::Error::RequiresBoundedForm.into());
    }
    let ctx = build_context(&r)?;
    let m = r.coeff_dim();
    let mut out = String::new();
    let g = r.gamma_plus() * r.gamma();
    let _ = writeln!(
        out,
        "gamma0+ gamma0 inertia: {}",
        inertia(&hermitian_inertia(&g, s.tol)?)
    );
    let _ = writeln!(out, "complement dimension: {}", ctx.complement_dim());
    let default = [c64(0.0, 1.0)];
    let points = if points.is_empty() {
        &default[..]
    } else {
        points
    };
    for &z in points {
        let qh = ctx.qhat_evaluate(z)?;
        let q = r.evaluate(z)?;
        let res = spectral_norm(&(&q * &qh + identity(m)));
        let _ = writeln!(out, "z: {}", complex(z));
        let _ = write!(out, "Qhat(z):\n{}", matrix(&qh, "  "));
        let _ = writeln!(out, "residual |Q Qhat + I|: {}", short(res));
    }
    let split = invert_with_split(&r)?;
    let _ = writeln!(out, "kappa: {}", split.report.kappa_whole);
    let _ = writeln!(out, "kappa_hat_1: {}", split.kappa_hat1);
    let _ = writeln!(out, "kappa_hat_2: {}", split.kappa_hat2);
    let _ = writeln!(
        out,
        "kappa_hat_2 of the complement space: {}",
        split.kappa_hat2_ambient
    );
    let _ = writeln!(
        out,
        "index accounting: {}",
        pass_fail(split.kappa_hat1 + split.kappa_hat2 == split.report.kappa_whole)
    );
    let (c0, c1) = &split.affine;
    let _ = write!(out, "Qhat_1(z) = C0 + z C1 with C0:\n{}", matrix(c0, "  "));
    let _ = write!(out, "C1:\n{}", matrix(c1, "  "));
    let _ = writeln!(out, "split residual: {}", short(split.report.residual));
    let _ = writeln!(
        out,
        "affine second difference: {}",
        short(split.affine_defect)
    );
    match verify_multivalued_part(&r) {
        Ok(mv) => {
            let _ = writeln!(out, "multivalued part dimension: {}", mv.multivalued_dim);
            let _ = writeln!(out, "range(gamma0) dimension: {}", mv.range_dim);
            let _ = writeln!(out, "multivalued part distance: {}", short(mv.distance));
            let _ = writeln!(
                out,
                "multivalued part equals range(gamma0): {}",
                yes_no(mv.matches(1e-8))
            );
        }
        Err(e) => {
            let _ = writeln!(out, "multivalued part check failed: {e}");
        }
    }
    for n in &split.report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    Ok(out)
}

pub fn decompose(p: &ProblemFile, subspace: &std::path::Path, s: &Settings) -> CliResult<String> {
    let r = p.realization(s.tol)?;
    let sub = crate::problem::load_subspace(subspace, r.space())?;
    let rep = split_by_invariant_subspace(&r, &sub)?;
    let mut out = String::new();
    let _ = writeln!(out, "subspace dimension: {}", sub.dim());
    for (i, c) in rep.components.iter().enumerate() {
        let dim = c.subspace.as_ref().map_or(0, |s| s.dim());
        let _ = writeln!(
            out,
            "component {}: dimension {dim}, kappa {} ({})",
            i + 1,
            c.kappa.value,
            method(c.kappa.method)
        );
    }
    let _ = writeln!(out, "kappa sum: {}", rep.kappa_sum);
    let _ = writeln!(out, "kappa: {}", rep.kappa_whole);
    let _ = writeln!(out, "desirable: {}", yes_no(rep.desirable));
    let _ = writeln!(out, "residual: {}", short(rep.residual));
    if let [Some(r1), Some(r2)] = [
        &rep.components[0].realization,
        &rep.components[1].realization,
    ] {
        let probe = theorem1_converse_probe(r1, r2)?;
        let _ = writeln!(
            out,
            "components minimal: {}",
            yes_no(probe.components_minimal)
        );
        let _ = writeln!(
            out,
            "gamma+ injective: {}",
            yes_no(probe.gamma_plus_injective)
        );
        let _ = writeln!(out, "sum minimal: {}", yes_no(probe.sum_minimal));
        for v in &probe.violations {
            let _ = writeln!(out, "violation: {v}");
        }
    }
    for n in &rep.notes {
        let _ = writeln!(out, "note: {n}");
    }
    Ok(out)
}

/// Rate line for one chain; the η check applies when the top is `Γ₀h`.
fn rate_line(r: &Realization, c: &JordanChain) -> String {
    let l = c.len();
    let Some(h) = top_generator(r, c) else {
        return format!("top not in range(gamma0), eta check skipped (l = {l})");
    };
    let Ok(eta) = pole_cancellation(r, c) else {
        return format!("eta unavailable (l = {l})");
    };
    let pointwise = (0..10)
        .map(|k| c64(-1.5 + 0.31 * k as f64, 0.2 + 0.13 * k as f64))
        .filter_map(|z| {
            let v = eta.evaluate(z).ok()?;
            let want = eta.predicted(z, &h);
            Some((&v - &want).norm() <= 1e-7 * want.norm())
        })
        .all(|ok| ok);
    match eta.decay_rate() {
        Ok(rate) => format!(
            "eta rate {:.3} (l = {l}): {}, eta = -(z-alpha)^l h: {}",
            rate,
            pass_fail((rate - l as f64).abs() <= 0.05),
            pass_fail(pointwise)
        ),
        Err(e) => format!("eta rate unavailable: {e} (l = {l})"),
    }
}

fn column(m: &CMatrix) -> String {
    let entries: Vec<String> = m.iter().map(|&z| complex(z)).collect();
    format!("[{}]", entries.join(", "))
}

pub fn jordan(p: &ProblemFile, alpha: C64, s: &Settings) -> CliResult<String> {
    let r = p.realization(s.tol)?;
    let root = root_manifold(&r, alpha)?;
    let d = alpha_decomposition(&r, alpha)?;
    let mut out = String::new();
    let _ = writeln!(out, "alpha: {}", complex(alpha));
    let _ = writeln!(out, "root manifold dimension: {}", root.dim());
    let mut lengths: Vec<usize> = d.chains().map(|c| c.len()).collect();
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    let summary = match lengths.len() {
        0 => "0 chains".to_string(),
        1 => format!("1 chain of length {}", lengths[0]),
        n => format!(
            "{n} chains of lengths {}",
            lengths
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    let _ = writeln!(out, "{summary}");
    let _ = writeln!(out, "blocks: {}", d.blocks.len());
    for (i, b) in d.blocks.iter().enumerate() {
        let kind = match &b.kind {
            BlockKind::Positive => "K0 positive eigenvectors".to_string(),
            BlockKind::Chain(c) => format!("chain of length {}", c.len()),
            BlockKind::Degenerate => "remainder without non-degenerate chains".to_string(),
        };
        let _ = writeln!(
            out,
            "  block {}: {kind}, dimension {}, kappa {}",
            i + 1,
            b.subspace.dim(),
            b.kappa
        );
    }
    let mut n_chain = 0;
    for b in &d.blocks {
        match &b.kind {
            BlockKind::Chain(c) => {
                n_chain += 1;
                let _ = writeln!(out, "chain {n_chain} (length {}):", c.len());
                match chain_generator_in_range(&r, c) {
                    Ok(h) => {
                        let _ = writeln!(out, "  generator h: {}", column(&h));
                    }
                    Err(e) => {
                        let _ = writeln!(out, "  generator: {e}");
                    }
                }
                let _ = writeln!(out, "  {}", rate_line(&r, c));
            }
            BlockKind::Positive => {
                for k in 0..b.subspace.dim() {
                    let v = b.subspace.basis().columns(k, 1).into_owned();
                    let c = JordanChain::new(alpha, v);
                    let _ = writeln!(
                        out,
                        "K0 positive eigenvector {}: {}",
                        k + 1,
                        rate_line(&r, &c)
                    );
                }
            }
            BlockKind::Degenerate => {}
        }
    }
    let _ = writeln!(out, "kappa total: {}", d.kappa_total());
    let _ = writeln!(
        out,
        "orthogonality defect: {}",
        short(d.orthogonality_defect())
    );
    let _ = writeln!(out, "residual: {}", short(d.residual(&r)));
    Ok(out)
}

/// Example 1 end to end. Prints only exact facts and verdicts so the
/// output is stable across platforms.
pub fn example1_report() -> CliResult<String> {
    let r = example1();
    let closed = example1_closed_form();
    let mut out = String::from("Example 1\n");
    let _ = write!(out, "J:\n{}", matrix(r.space().gram(), "  "));
    let _ = write!(out, "A:\n{}", matrix(r.operator().expect("bounded"), "  "));
    let _ = write!(out, "Gamma0:\n{}", matrix(r.gamma(), "  "));
    let _ = write!(out, "Gamma0+:\n{}", matrix(&r.gamma_plus(), "  "));
    let _ = write!(out, "Q(1):\n{}", matrix(&r.evaluate(c64(1.0, 0.0))?, "  "));
    let matches = (0..20).all(|k| {
        let t = k as f64;
        let z = C64::from_polar(0.4 + 0.15 * t, 0.3 + 0.29 * t);
        match (r.evaluate(z), closed.evaluate(z)) {
            (Ok(q), Ok(w)) => spectral_norm(&(q - &w)) <= 1e-10 * spectral_norm(&w),
            _ => false,
        }
    });
    let _ = writeln!(out, "Q(z) matches closed form: {}", pass_fail(matches));
    let pred = lemma3_predicates(&r);
    let _ = writeln!(out, "representation minimal: {}", yes_no(pred.minimal));
    let _ = writeln!(
        out,
        "minimal subspace dimension: {}",
        minimal_subspace(&r).dim()
    );
    let _ = writeln!(
        out,
        "Gamma0 injective: {}, Gamma0+ injective: {}",
        yes_no(pred.gamma_injective),
        yes_no(pred.gamma_plus_injective)
    );
    let _ = writeln!(
        out,
        "Gamma0+ Gamma0 injective: {}",
        opt_yes_no(pred.gram_product_injective)
    );
    let _ = writeln!(out, "separating: {}", opt_yes_no(pred.separating));
    let _ = writeln!(
        out,
        "injectivity implications: {}",
        if pred.implications_hold() {
            "hold"
        } else {
            "VIOLATED"
        }
    );
    let (r1, r2) = example1_components();
    let l4 = lemma4_minimality_check(&r1, &r2)?;
    let _ = writeln!(
        out,
        "components minimal: {}, {}",
        yes_no(l4.components_minimal[0]),
        yes_no(l4.components_minimal[1])
    );
    let _ = writeln!(
        out,
        "component Gamma injective: {}, {}",
        yes_no(l4.gamma_injective[0]),
        yes_no(l4.gamma_injective[1])
    );
    let _ = writeln!(out, "sum minimal: {}", yes_no(l4.sum_minimal));
    let _ = writeln!(out, "sum separating: {}", opt_yes_no(l4.sum_separating));
    let probe = theorem1_converse_probe(&r1, &r2)?;
    let _ = writeln!(
        out,
        "component kappas: {}, {}",
        probe.kappas[0], probe.kappas[1]
    );
    let _ = writeln!(
        out,
        "sum equals Q: {}",
        pass_fail(probe.sum_residual <= 1e-10)
    );
    let _ = writeln!(out, "kappa additive: {}", yes_no(probe.additive));
    let _ = writeln!(
        out,
        "stacked Gamma+ injective: {}",
        yes_no(probe.gamma_plus_injective)
    );
    let _ = writeln!(
        out,
        "desirable but not minimal: {}",
        yes_no(probe.components_minimal && probe.additive && !probe.sum_minimal)
    );
    let exact = exact_negative_index(&r)?;
    let sampled = negative_squares_sampled(&r.clone().into(), &SamplerConfig::default());
    let _ = writeln!(out, "kappa (exact): {}", exact.value);
    let _ = writeln!(out, "kappa (sampled): {}", sampled.value);
    let _ = writeln!(
        out,
        "kappa = 1: {}",
        pass_fail(exact.value == 1 && sampled.value == 1)
    );
    let gram_ok = build_context(&r).is_err();
    let _ = writeln!(
        out,
        "inversion context rejected (singular Gamma0+ Gamma0): {}",
        yes_no(gram_ok)
    );
    Ok(out)
}
