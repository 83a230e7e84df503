use crate::linalg::{self, spectral_norm, C64};

use super::{is_minimal, minimal_subspace, GnFunction, Realization};

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    /// `max ‖Q(z̄)* - Q(z)‖₂` over the evaluable points.
    pub max_residual: f64,
    pub checked: usize,
    pub skipped: usize,
}

/// Checks `Q(z̄)* = Q(z)` at the given points.
pub fn check_symmetry(f: &GnFunction, points: &[C64]) -> SymmetryReport {
    let mut report = SymmetryReport {
        max_residual: 0.0,
        checked: 0,
        skipped: 0,
    };
    for &z in points {
        match (f.evaluate(z), f.evaluate(z.conj())) {
            (Ok(a), Ok(b)) => {
                report.checked += 1;
                report.max_residual = report.max_residual.max(spectral_norm(&(b.adjoint() - a)));
            }
            _ => report.skipped += 1,
        }
    }
    report
}

/// Injectivity and separation facts about a realization, together with any
/// implication among them that failed on this instance.
#[derive(Clone, Debug)]
pub struct Lemma3Report {
    pub gamma_plus_injective: bool,
    pub gamma_injective: bool,
    /// `None` in general form.
    pub gram_product_injective: Option<bool>,
    pub minimal: bool,
    /// `None` in general form.
    pub separating: Option<bool>,
    pub violations: Vec<&'static str>,
}

impl Lemma3Report {
    pub fn implications_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Whether `f* Q(z) h = 0` for all `z`, `h` forces `f = 0`.
///
/// Expanding `Q` at infinity, this is the rank condition on the Markov
/// parameters `Γ₀⁺AᵏΓ₀`, i.e. `rank(Γ₀⁺ V) = m` for a basis `V` of the
/// controllable subspace.
pub fn separating(r: &Realization) -> Option<bool> {
    if !r.is_bounded() {
        return None;
    }
    let m = r.coeff_dim();
    let v = minimal_subspace(r);
    let gp = r.gamma_plus();
    Some(linalg::rank(&(gp * v.basis()), r.tol()) == m)
}

pub fn lemma3_predicates(r: &Realization) -> Lemma3Report {
    let tol = r.tol();
    let n = r.state_dim();
    let m = r.coeff_dim();
    let gamma = r.gamma();
    let gp = r.gamma_plus();
    let gamma_plus_injective = linalg::rank(&gp, tol) == n;
    let gamma_injective = linalg::rank(gamma, tol) == m;
    let gram_product_injective = r
        .is_bounded()
        .then(|| linalg::rank(&(&gp * gamma), tol) == m);
    let minimal = is_minimal(r);
    let separating = separating(r);

    let mut violations = Vec::new();
    if gamma_plus_injective && !minimal {
        violations.push("injective gamma+ without minimality");
    }
    if gram_product_injective == Some(true) && separating == Some(false) {
        violations.push("injective gram product without separation");
    }
    if separating == Some(true) && !gamma_injective {
        violations.push("separation without injective gamma");
    }
    if minimal && gamma_injective && separating == Some(false) {
        violations.push("minimal with injective gamma but not separating");
    }
    Lemma3Report {
        gamma_plus_injective,
        gamma_injective,
        gram_product_injective,
        minimal,
        separating,
        violations,
    }
}
