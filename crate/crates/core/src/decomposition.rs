//! Decompositions `Q = Q₁ + Q₂` with additive negative index: splitting a
//! realization along invariant subspaces, sums and block-diagonal
//! compositions of realizations, the local split at a real eigenvalue and
//! the split of the inverse function.

use crate::error::{Error, Result};
use crate::inversion::build_context;
use crate::jordan::{staircase, CLUSTER_TOL};
use crate::linalg::{
    self, c64, identity, inverse_checked, shifted, spectral_norm, vstack, CMatrix, Svd, C64,
};
use crate::nevanlinna::{
    is_minimal, minimal_subspace, negative_index, separating, Form, GnFunction, KappaEstimate,
    KappaMethod, RationalFunction, Realization, SamplerConfig,
};
use crate::pontryagin::{
    direct_sum, hermitian_inertia, orthogonal_projection, PontryaginSpace, Subspace,
};
use crate::relations::relation_direct_sum;

/// Points in the upper half-plane on which decompositions are checked.
pub const VERIFICATION_GRID: [C64; 10] = [
    C64 { re: -2.1, im: 0.5 },
    C64 { re: -1.4, im: 1.3 },
    C64 { re: -0.7, im: 0.8 },
    C64 { re: -0.2, im: 2.2 },
    C64 { re: 0.0, im: 1.0 },
    C64 { re: 0.35, im: 0.6 },
    C64 { re: 0.9, im: 1.7 },
    C64 { re: 1.5, im: 0.9 },
    C64 { re: 2.2, im: 2.6 },
    C64 { re: 2.8, im: 0.45 },
];

/// One summand of a decomposition.
#[derive(Clone, Debug)]
pub struct Component {
    pub function: GnFunction,
    pub realization: Option<Realization>,
    /// The state subspace of the whole realization carrying this component.
    pub subspace: Option<Subspace>,
    pub kappa: KappaEstimate,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub components: Vec<Component>,
    pub kappa_sum: usize,
    pub kappa_whole: usize,
    pub desirable: bool,
    /// Largest `‖Q - ΣQᵢ‖ / max(1, ‖Q‖)` over [`VERIFICATION_GRID`].
    pub residual: f64,
    pub notes: Vec<String>,
}

fn report(
    components: Vec<Component>,
    kappa_whole: usize,
    whole: impl Fn(C64) -> Result<CMatrix>,
    notes: Vec<String>,
) -> DecompositionReport {
    let kappa_sum = components.iter().map(|c| c.kappa.value).sum();
    let residual = grid_residual(whole, components.iter().map(|c| &c.function));
    DecompositionReport {
        components,
        kappa_sum,
        kappa_whole,
        desirable: kappa_sum == kappa_whole,
        residual,
        notes,
    }
}

/// Largest relative deviation of `whole` from the sum of `parts` on the
/// verification grid; points where anything fails to evaluate are skipped.
pub fn grid_residual<'a>(
    whole: impl Fn(C64) -> Result<CMatrix>,
    parts: impl Iterator<Item = &'a GnFunction> + Clone,
) -> f64 {
    let mut worst = 0.0f64;
    for z in VERIFICATION_GRID {
        let Ok(q) = whole(z) else { continue };
        let mut total = CMatrix::zeros(q.nrows(), q.ncols());
        let mut ok = true;
        for p in parts.clone() {
            match p.evaluate(z) {
                Ok(v) => total += v,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            worst = worst.max(spectral_norm(&(&q - total)) / spectral_norm(&q).max(1.0));
        }
    }
    worst
}

/// The Pontryagin space carried by the coordinates of an orthonormal basis.
pub(crate) fn coordinate_space(sp: &PontryaginSpace, basis: &CMatrix) -> Result<PontryaginSpace> {
    if basis.ncols() == 0 {
        return Ok(PontryaginSpace::zero());
    }
    let g = sp.cross_gram(basis, basis);
    PontryaginSpace::with_tol((&g + g.adjoint()).scale(0.5), sp.tol())
}

/// `(Bᵢ, BᵢᴴABᵢ, BᵢᴴEᵢΓ₀)`: the bounded realization compressed to an
/// invariant subspace with orthonormal basis `basis` and projection `proj`.
pub(crate) fn compress_bounded(
    r: &Realization,
    basis: &CMatrix,
    proj: &CMatrix,
) -> Result<Realization> {
    let a = r
        .operator()
        .filter(|_| r.is_bounded())
        .ok_or(Error::RequiresBoundedForm)?;
    let sp = coordinate_space(r.space(), basis)?;
    let x = basis.adjoint() * a * basis;
    let g = basis.adjoint() * proj * r.gamma();
    Realization::bounded(&sp, x, g)
}

fn compress_general(
    r: &Realization,
    basis: &CMatrix,
    proj: &CMatrix,
    hermitian_part: &CMatrix,
) -> Result<Realization> {
    let z0 = r.ref_point().ok_or(Error::RequiresBoundedForm)?;
    let sp = coordinate_space(r.space(), basis)?;
    let rel = r.op().restrict_to(basis).compress(basis, &sp)?;
    let g = basis.adjoint() * proj * r.gamma();
    let gp = g.adjoint() * sp.gram() * &g;
    // Qᵢ(z₀)* = Hᵢ - i Im z₀ Γᵢ⁺Γᵢ
    let ref_adj = hermitian_part - gp * c64(0.0, z0.im);
    Realization::general(&sp, rel, g, z0, ref_adj)
}

fn component(r: Realization, subspace: Option<Subspace>, cfg: &SamplerConfig) -> Component {
    let kappa = negative_index(&r, cfg);
    Component {
        function: r.clone().into(),
        realization: Some(r),
        subspace,
        kappa,
    }
}

fn orthonormal(s: &Subspace) -> Subspace {
    Subspace::span(s.ambient(), s.basis())
}

/// Relative invariance defect `‖(I - E)AE‖ / ‖A‖` of the subspace with
/// projection `e`.
fn invariance_defect(a: &CMatrix, e: &CMatrix) -> f64 {
    let n = a.nrows();
    let scale = spectral_norm(a);
    if scale == 0.0 {
        return 0.0;
    }
    spectral_norm(&((identity(n) - e) * a * e)) / scale
}

/// Splits a minimal realization along a non-degenerate `A`-invariant
/// subspace `S` and its J-orthogonal complement.
///
/// In general form the constant `Q(z₀)*` is divided as follows: the first
/// component carries the Hermitian part of `Q(z₀)`, the second none.
pub fn split_by_invariant_subspace(r: &Realization, s: &Subspace) -> Result<DecompositionReport> {
    if s.ambient().dim() != r.state_dim() {
        return Err(Error::DimensionMismatch {
            context: "split_by_invariant_subspace",
            expected: r.state_dim(),
            found: s.ambient().dim(),
        });
    }
    if s.dim() > 0 && !s.is_nondegenerate() {
        return Err(Error::DegenerateSubspace {
            smallest: s.degeneracy(),
        });
    }
    let min_dim = minimal_subspace(r).dim();
    if min_dim != r.state_dim() {
        return Err(Error::NotMinimal {
            minimal_dim: min_dim,
            dim: r.state_dim(),
        });
    }
    let s1 = orthonormal(s);
    let s2 = orthonormal(&s1.j_orthogonal_complement());
    let e1 = orthogonal_projection(&s1)?;
    let e2 = identity(r.state_dim()) - &e1;
    let cfg = SamplerConfig::default();
    let (c1, c2) = match r.form() {
        Form::Bounded => {
            let a = r.operator().expect("bounded form has an operator");
            let defect = invariance_defect(a, &e1);
            if defect > 1e-9 {
                return Err(Error::NotInvariant { residual: defect });
            }
            (
                compress_bounded(r, s1.basis(), &e1)?,
                compress_bounded(r, s2.basis(), &e2)?,
            )
        }
        Form::General { ref_value_adj, .. } => {
            let n = r.state_dim();
            let found = r.op().restrict_to(s1.basis()).dim() + r.op().restrict_to(s2.basis()).dim();
            if found != n {
                return Err(Error::NotInvariant {
                    residual: (n as f64 - found as f64).abs(),
                });
            }
            let q0 = ref_value_adj.adjoint();
            let herm = (&q0 + q0.adjoint()).scale(0.5);
            let m = r.coeff_dim();
            (
                compress_general(r, s1.basis(), &e1, &herm)?,
                compress_general(r, s2.basis(), &e2, &CMatrix::zeros(m, m))?,
            )
        }
    };
    let kappa_whole = negative_index(r, &cfg).value;
    let comps = vec![component(c1, Some(s1), &cfg), component(c2, Some(s2), &cfg)];
    let mut notes = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        if let Some(cr) = &c.realization {
            if !is_minimal(cr) {
                notes.push(format!("component {} is not minimal", i + 1));
            }
        }
    }
    Ok(report(comps, kappa_whole, |z| r.evaluate(z), notes))
}

/// Realization of `Q₁ + Q₂` on `K₁ [+] K₂` with `Γ = Γ₁ [+] Γ₂`.
///
/// Two bounded realizations give a bounded sum; otherwise both are brought
/// to general form at a common reference point.
pub fn sum_realizations(r1: &Realization, r2: &Realization) -> Result<Realization> {
    if r1.coeff_dim() != r2.coeff_dim() {
        return Err(Error::DimensionMismatch {
            context: "sum_realizations",
            expected: r1.coeff_dim(),
            found: r2.coeff_dim(),
        });
    }
    let sp = direct_sum(r1.space(), r2.space());
    if r1.is_bounded() && r2.is_bounded() {
        let a1 = r1.operator().expect("bounded form has an operator");
        let a2 = r2.operator().expect("bounded form has an operator");
        let a = linalg::block_diag(a1, a2);
        return Realization::bounded(&sp, a, vstack(&[r1.gamma(), r2.gamma()]));
    }
    let z0 = r1.ref_point().or(r2.ref_point()).unwrap_or(c64(0.0, 1.0));
    let g1 = anchored(r1, z0)?;
    let g2 = anchored(r2, z0)?;
    let (
        Form::General {
            ref_value_adj: c1, ..
        },
        Form::General {
            ref_value_adj: c2, ..
        },
    ) = (g1.form(), g2.form())
    else {
        unreachable!("anchored realizations are in general form")
    };
    let rel = relation_direct_sum(g1.op(), g2.op());
    Realization::general(&sp, rel, vstack(&[g1.gamma(), g2.gamma()]), z0, c1 + c2)
}

fn anchored(r: &Realization, z0: C64) -> Result<Realization> {
    match r.ref_point() {
        Some(p) if p == z0 => Ok(r.clone()),
        _ => r.to_general(z0),
    }
}

/// Block-diagonal function `diag(f₁, f₂)`.
pub fn block_diag(f1: GnFunction, f2: GnFunction) -> GnFunction {
    GnFunction::block_diag(vec![f1, f2])
}

fn injective(m: &CMatrix, tol: f64) -> bool {
    m.ncols() == 0 || linalg::rank(m, tol) == m.ncols()
}

/// Hypotheses and conclusions around the minimality of a sum.
#[derive(Clone, Debug)]
pub struct Lemma4Report {
    pub components_minimal: [bool; 2],
    /// `Γ⁺ = Γ₁⁺ + Γ₂⁺` injective on `K₁ [+] K₂`.
    pub gamma_plus_injective: bool,
    pub gamma_injective: [bool; 2],
    pub sum_minimal: bool,
    /// `(f, Q(z)h) = 0` for all `z, h` only for `f = 0`; bounded form only.
    pub sum_separating: Option<bool>,
    pub violations: Vec<&'static str>,
}

pub fn lemma4_minimality_check(r1: &Realization, r2: &Realization) -> Result<Lemma4Report> {
    let sum = sum_realizations(r1, r2)?;
    let tol = sum.tol();
    let gamma_plus_injective = injective(&sum.gamma_plus(), tol);
    let sum_minimal = is_minimal(&sum);
    let components_minimal = [is_minimal(r1), is_minimal(r2)];
    let gamma_injective = [injective(r1.gamma(), tol), injective(r2.gamma(), tol)];
    let sum_separating = separating(&sum);
    let mut violations = Vec::new();
    if gamma_plus_injective && !sum_minimal {
        violations.push("injective Gamma+ but the sum is not minimal");
    }
    if sum_minimal && (gamma_injective[0] || gamma_injective[1]) && sum_separating == Some(false) {
        violations.push("minimal sum with an injective Gamma_0i is not separating");
    }
    if sum_minimal && !(components_minimal[0] && components_minimal[1]) {
        violations.push("minimal sum with a non-minimal component");
    }
    Ok(Lemma4Report {
        components_minimal,
        gamma_plus_injective,
        gamma_injective,
        sum_minimal,
        sum_separating,
        violations,
    })
}

/// The conditions (a)-(d) of the splitting theorem evaluated on a pair of
/// summands and their sum.
#[derive(Clone, Debug)]
pub struct ConverseProbe {
    /// (a): both summands minimally represented.
    pub components_minimal: bool,
    pub kappas: [usize; 2],
    /// (b): grid residual of `Q - Q₁ - Q₂` for the sum realization.
    pub sum_residual: f64,
    pub kappa_sum: KappaEstimate,
    /// (c): `κ(Q₁ + Q₂) = κ₁ + κ₂`.
    pub additive: bool,
    /// (d): `Γ⁺ = Γ₁⁺ + Γ₂⁺` injective.
    pub gamma_plus_injective: bool,
    pub sum_minimal: bool,
    pub violations: Vec<&'static str>,
}

pub fn theorem1_converse_probe(r1: &Realization, r2: &Realization) -> Result<ConverseProbe> {
    let sum = sum_realizations(r1, r2)?;
    let cfg = SamplerConfig::default();
    let k1 = negative_index(r1, &cfg).value;
    let k2 = negative_index(r2, &cfg).value;
    let kappa_sum = negative_index(&sum, &cfg);
    let parts: [GnFunction; 2] = [r1.clone().into(), r2.clone().into()];
    let sum_residual = grid_residual(|z| sum.evaluate(z), parts.iter());
    let components_minimal = is_minimal(r1) && is_minimal(r2);
    let gamma_plus_injective = injective(&sum.gamma_plus(), sum.tol());
    let sum_minimal = is_minimal(&sum);
    let additive = kappa_sum.value == k1 + k2;
    let mut violations = Vec::new();
    if components_minimal && gamma_plus_injective {
        if !sum_minimal {
            violations.push("condition (d) holds but the sum is not minimal");
        }
        if !additive {
            violations.push("condition (d) holds but the index is not additive");
        }
    }
    Ok(ConverseProbe {
        components_minimal,
        kappas: [k1, k2],
        sum_residual,
        kappa_sum,
        additive,
        gamma_plus_injective,
        sum_minimal,
        violations,
    })
}

/// `Q = Q_α + H_α`: `Q_α` lives on the root manifold of `A` at `alpha`, `H_α`
/// on the sum of the other root subspaces, and is holomorphic at `alpha`.
///
/// The split uses the Riesz projector onto `ker (A - α)^k` along
/// `range (A - α)^k`, `k` the length of the kernel staircase.
pub fn local_split(r: &Realization, alpha: f64) -> Result<DecompositionReport> {
    let a = r
        .operator()
        .filter(|_| r.is_bounded())
        .ok_or(Error::RequiresBoundedForm)?;
    let n = r.state_dim();
    let at = c64(alpha, 0.0);
    let shift = shifted(a, at);
    let kernels = staircase(&shift, CLUSTER_TOL);
    let root = kernels
        .last()
        .cloned()
        .unwrap_or_else(|| CMatrix::zeros(n, 0));
    let d = root.ncols();
    if d == 0 {
        return Err(Error::NotEigenvalue { alpha: at });
    }
    let mut power = identity(n);
    for _ in 0..kernels.len() {
        power = &shift * power;
    }
    let other = linalg::leading_columns(&power, n - d);
    let frame = linalg::hstack(&[&root, &other]);
    let frame_inv = inverse_checked(&frame, 1e-12).ok_or(Error::ProjectorNotJSymmetric {
        residual: f64::INFINITY,
    })?;
    let mut sel = CMatrix::zeros(n, n);
    for i in 0..d {
        sel[(i, i)] = c64(1.0, 0.0);
    }
    let e = &frame * sel * frame_inv;
    let j = r.space().gram();
    let je = j * &e;
    let defect =
        spectral_norm(&(&je - je.adjoint())) / (spectral_norm(j) * spectral_norm(&e).max(1.0));
    if defect > 1e-6 {
        return Err(Error::ProjectorNotJSymmetric { residual: defect });
    }
    let sp = r.space();
    let q_alpha = compress_bounded(r, &root, &e)?;
    let h_alpha = compress_bounded(r, &other, &(identity(n) - &e))?;
    let mut notes = Vec::new();
    let g = q_alpha.gamma_plus() * q_alpha.gamma();
    let svd = Svd::new(&g);
    if g.nrows() > 0 && svd.smallest() <= 1e-9 * svd.largest().max(f64::MIN_POSITIVE) {
        notes.push("Gamma0+ Gamma0 of the local component is singular".to_string());
    }
    if let Err(err) = h_alpha.evaluate(at) {
        notes.push(format!("remainder is not holomorphic at alpha: {err}"));
    }
    let cfg = SamplerConfig::default();
    let kappa_whole = negative_index(r, &cfg).value;
    let comps = vec![
        component(q_alpha, Some(Subspace::span(sp, &root)), &cfg),
        component(h_alpha, Some(Subspace::span(sp, &other)), &cfg),
    ];
    Ok(report(comps, kappa_whole, |z| r.evaluate(z), notes))
}

/// The split `Q̂ = Q̂₁ + Q̂₂` of `Q̂ = -Q⁻¹` with affine `Q̂₁` and `Q̂₂`
/// realized on `range(I - P)`.
#[derive(Clone, Debug)]
pub struct InverseSplit {
    pub report: DecompositionReport,
    /// `(C₀, C₁)` with `Q̂₁(z) = C₀ + zC₁`.
    pub affine: (CMatrix, CMatrix),
    pub kappa_hat1: usize,
    pub kappa_hat2: usize,
    /// Negative index of `range(I - P)` itself.
    pub kappa_hat2_ambient: usize,
    /// Negative inertia of `Γ₀⁺Γ₀`.
    pub gram_product_negative: usize,
    /// Largest relative second divided difference of `Q̂ - Q̂₂` over grid
    /// triples; zero for an affine function.
    pub affine_defect: f64,
}

pub fn invert_with_split(r: &Realization) -> Result<InverseSplit> {
    let ctx = build_context(r)?;
    let tol = r.tol();
    let ginv = ctx.gram_product_inv();
    let gram_inertia = hermitian_inertia(&(&r.gamma_plus() * r.gamma()), tol)?;
    let kappa_hat1 = hermitian_inertia(ginv, tol)?.negative;
    let (c0, c1) = ctx.affine_part();
    let q1 = RationalFunction::polynomial(vec![c0.clone(), c1.clone()])?;
    let c = ctx.complement_basis();
    let sp2 = coordinate_space(r.space(), c)?;
    let q2 = Realization::bounded(
        &sp2,
        ctx.atilde_restricted().clone(),
        ctx.gamma_tilde_restricted(),
    )?;
    let cfg = SamplerConfig::default();
    let k2 = negative_index(&q2, &cfg);
    let kappa_hat2 = k2.value;
    let kappa_hat2_ambient = sp2.neg_index();
    let kappa_whole = negative_index(r, &cfg).value;
    let whole = |z: C64| -> Result<CMatrix> {
        let q = r.evaluate(z)?;
        inverse_checked(&q, tol)
            .map(|v| -v)
            .ok_or(Error::SingularValue { z })
    };
    let affine_defect = affine_defect(&whole, &q2);
    let comps = vec![
        Component {
            function: q1.into(),
            realization: None,
            subspace: None,
            kappa: KappaEstimate {
                value: kappa_hat1,
                method: KappaMethod::Exact,
                samples: 0,
                witness_points: Vec::new(),
            },
        },
        Component {
            function: q2.clone().into(),
            realization: Some(q2),
            subspace: Some(Subspace::span(r.space(), c)),
            kappa: k2,
        },
    ];
    let mut notes = Vec::new();
    if !is_minimal(r) {
        notes.push("input representation is not minimal".to_string());
    }
    let report = report(comps, kappa_whole, whole, notes);
    Ok(InverseSplit {
        report,
        affine: (c0, c1),
        kappa_hat1,
        kappa_hat2,
        kappa_hat2_ambient,
        gram_product_negative: gram_inertia.negative,
        affine_defect,
    })
}

fn affine_defect(whole: &impl Fn(C64) -> Result<CMatrix>, q2: &Realization) -> f64 {
    let diff = |z: C64| -> Option<CMatrix> { Some(whole(z).ok()? - q2.evaluate(z).ok()?) };
    let pts = VERIFICATION_GRID;
    let mut worst = 0.0f64;
    for w in pts.windows(3) {
        let (Some(f0), Some(f1), Some(f2)) = (diff(w[0]), diff(w[1]), diff(w[2])) else {
            continue;
        };
        let d01 = (&f1 - &f0) / (w[1] - w[0]);
        let d12 = (&f2 - &f1) / (w[2] - w[1]);
        let dd = (d12 - &d01) / (w[2] - w[0]);
        let scale = spectral_norm(&d01).max(spectral_norm(&f0)).max(1.0);
        worst = worst.max(spectral_norm(&dd) / scale);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;
    use crate::models::{diag_model, jordan_model};

    #[test]
    fn grid_lies_in_upper_half_plane() {
        assert!(VERIFICATION_GRID.iter().all(|z| z.im > 0.0));
    }

    #[test]
    fn invariance_defect_detects_mixing() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(invariance_defect(&a, &e) > 0.5);
        assert_eq!(invariance_defect(&identity(2), &e), 0.0);
    }

    #[test]
    fn compression_to_full_space_is_identity() {
        let r = jordan_model();
        let c = compress_bounded(&r, &identity(2), &identity(2)).unwrap();
        let z = c64(0.3, 1.0);
        assert!((c.evaluate(z).unwrap() - r.evaluate(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn general_form_split_matches() {
        let r = diag_model().to_general(c64(0.2, 1.1)).unwrap();
        let s = Subspace::span(r.space(), &real_matrix(2, 1, &[1.0, 0.0]));
        let rep = split_by_invariant_subspace(&r, &s).unwrap();
        assert!(rep.residual < 1e-10);
        assert_eq!(rep.kappa_sum, 1);
    }
}
