//! Inversion of bounded-form realizations: the projection onto `Γ₀(H)`,
//! the explicit formula for `-Q(z)⁻¹`, and the relation-valued inverse
//! realization.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, identity, inverse_checked, leading_columns, shifted, spectral_norm, CMatrix, Svd,
    C64,
};
use crate::nevanlinna::Realization;
use crate::pontryagin::{map_adjoint, PontryaginSpace, Subspace};
use crate::relations::LinearRelation;

/// Data shared by all evaluations of the inverse of `Γ₀⁺(A - z)⁻¹Γ₀`.
#[derive(Clone, Debug)]
pub struct InversionContext {
    base: Realization,
    a: CMatrix,
    gamma0: CMatrix,
    gamma_plus: CMatrix,
    gram_product_inv: CMatrix,
    p: CMatrix,
    /// Orthonormal basis of `range(I - P)`.
    complement: CMatrix,
    /// Orthonormal basis of `range(P)`.
    range_basis: CMatrix,
    /// `Ã` restricted to `range(I - P)` in the basis `complement`.
    atilde_c: CMatrix,
}

/// Residuals of the defining identities of `P`.
#[derive(Clone, Debug)]
pub struct ContextResiduals {
    pub idempotent: f64,
    pub j_symmetric: f64,
    pub fixes_gamma: f64,
    pub gamma_plus_invariant: f64,
    /// Projector distance between `ker Γ₀⁺` and `range(I - P)`.
    pub kernel_match: f64,
}

impl ContextResiduals {
    pub fn max(&self) -> f64 {
        [
            self.idempotent,
            self.j_symmetric,
            self.fixes_gamma,
            self.gamma_plus_invariant,
            self.kernel_match,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn build_context(r: &Realization) -> Result<InversionContext> {
    if !r.is_bounded() {
        return Err(Error::RequiresBoundedForm);
    }
    let a = r.operator().expect("bounded form has an operator").clone();
    let gamma0 = r.gamma().clone();
    let gamma_plus = r.gamma_plus();
    let g = &gamma_plus * &gamma0;
    let m = g.nrows();
    let svd = Svd::new(&g);
    let singular = m > 0 && (svd.largest() == 0.0 || svd.smallest() <= 1e-9 * svd.largest());
    let gram_product_inv = if singular {
        None
    } else {
        inverse_checked(&g, 0.0)
    }
    .ok_or(Error::GramProductSingular {
        smallest: svd.smallest(),
        largest: svd.largest(),
    })?;
    let n = r.state_dim();
    let p = &gamma0 * &gram_product_inv * &gamma_plus;
    let i_p = identity(n) - &p;
    let complement = leading_columns(&i_p, n - m);
    let range_basis = leading_columns(&gamma0, m);
    let atilde_c = complement.adjoint() * &i_p * &a * &complement;
    Ok(InversionContext {
        base: r.clone(),
        a,
        gamma0,
        gamma_plus,
        gram_product_inv,
        p,
        complement,
        range_basis,
        atilde_c,
    })
}

impl InversionContext {
    pub fn base(&self) -> &Realization {
        &self.base
    }

    pub fn space(&self) -> &PontryaginSpace {
        self.base.space()
    }

    /// `P = Γ₀(Γ₀⁺Γ₀)⁻¹Γ₀⁺`.
    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    /// `(Γ₀⁺Γ₀)⁻¹`.
    pub fn gram_product_inv(&self) -> &CMatrix {
        &self.gram_product_inv
    }

    /// `Ã = (I - P)A(I - P)` on the full space.
    pub fn atilde(&self) -> CMatrix {
        let i_p = identity(self.a.nrows()) - &self.p;
        &i_p * &self.a * &i_p
    }

    pub fn complement_basis(&self) -> &CMatrix {
        &self.complement
    }

    /// `Ã` restricted to `range(I - P)`, in [`Self::complement_basis`].
    pub fn atilde_restricted(&self) -> &CMatrix {
        &self.atilde_c
    }

    pub fn complement_dim(&self) -> usize {
        self.complement.ncols()
    }

    fn tol(&self) -> f64 {
        self.base.tol()
    }

    pub fn residuals(&self) -> ContextResiduals {
        let sp = self.space();
        let p = &self.p;
        let scale = spectral_norm(p).max(1.0);
        let jp = sp.gram() * p;
        let ker = linalg::null_space(&self.gamma_plus, self.tol());
        let ran = &self.complement;
        ContextResiduals {
            idempotent: spectral_norm(&(p * p - p)) / scale,
            j_symmetric: spectral_norm(&(&jp - jp.adjoint())) / scale,
            fixes_gamma: spectral_norm(&(p * &self.gamma0 - &self.gamma0))
                / spectral_norm(&self.gamma0).max(f64::MIN_POSITIVE),
            gamma_plus_invariant: spectral_norm(&(&self.gamma_plus * p - &self.gamma_plus))
                / spectral_norm(&self.gamma_plus).max(f64::MIN_POSITIVE),
            kernel_match: linalg::subspace_distance(&ker, ran, self.tol()),
        }
    }

    /// Both ranges in the decomposition `K = (I-P)K [+] PK`.
    pub fn ranges(&self) -> (Subspace, Subspace) {
        let sp = self.space();
        (
            Subspace::span(sp, &self.complement),
            Subspace::span(sp, &self.range_basis),
        )
    }

    fn check_a(&self, z: C64) -> Result<()> {
        let svd = Svd::new(&shifted(&self.a, z));
        if self.a.nrows() > 0 && svd.smallest() <= self.tol() * svd.largest() {
            return Err(Error::NotInResolventSet { z });
        }
        Ok(())
    }

    /// `(I-P)(Ã - z)⁻¹(I-P)` on the full space.
    pub fn compressed_resolvent(&self, z: C64) -> Result<CMatrix> {
        let n = self.a.nrows();
        let k = self.complement_dim();
        if k == 0 {
            return Ok(linalg::zeros(n, n));
        }
        let inner = inverse_checked(&shifted(&self.atilde_c, z), self.tol())
            .ok_or(Error::NotInResolventSet { z })?;
        let i_p = identity(n) - &self.p;
        Ok(&self.complement * inner * self.complement.adjoint() * i_p)
    }

    /// `Q̂(z) = -Q(z)⁻¹` by the explicit formula.
    pub fn qhat_evaluate(&self, z: C64) -> Result<CMatrix> {
        self.check_a(z)?;
        let r = self.compressed_resolvent(z)?;
        let middle = &self.a * r * &self.a - shifted(&self.a, z);
        Ok(&self.gram_product_inv
            * &self.gamma_plus
            * middle
            * &self.gamma0
            * &self.gram_product_inv)
    }

    /// `Q(z)` through the inverse of the Schur complement on `range(P)`.
    pub fn schur_evaluate(&self, z: C64) -> Result<CMatrix> {
        self.check_a(z)?;
        let r = self.compressed_resolvent(z)?;
        let p = &self.p;
        let inner = p * shifted(&self.a, z) * p - p * &self.a * r * &self.a * p;
        let bp = &self.range_basis;
        let s = bp.adjoint() * inner * bp;
        let s_inv = inverse_checked(&s, self.tol()).ok_or(Error::SchurSingular { z })?;
        let w = bp * s_inv * bp.adjoint() * p;
        Ok(&self.gamma_plus * w * &self.gamma0)
    }

    /// `Q̂(z)Γ₀⁺` through `(Γ₀⁺Γ₀)⁻¹Γ₀⁺(-I + A(I-P)(Ã-z)⁻¹(I-P))(A - z)`.
    ///
    /// Defined at eigenvalues of `A` as long as `z` is not an eigenvalue of `Ã`.
    pub fn qhat_gamma_plus(&self, z: C64) -> Result<CMatrix> {
        let n = self.a.nrows();
        let r = self.compressed_resolvent(z)?;
        let inner = -identity(n) + &self.a * r;
        Ok(&self.gram_product_inv * &self.gamma_plus * inner * shifted(&self.a, z))
    }

    /// Affine part `-(Γ₀⁺Γ₀)⁻¹Γ₀⁺(A - z)Γ₀(Γ₀⁺Γ₀)⁻¹` as `(C₀, C₁)` with
    /// value `C₀ + z C₁`.
    pub fn affine_part(&self) -> (CMatrix, CMatrix) {
        let g = &self.gram_product_inv;
        let c0 = -(g * &self.gamma_plus * &self.a * &self.gamma0 * g);
        let c1 = g * &self.gamma_plus * &self.gamma0 * g;
        (c0, c1)
    }

    /// `Γ̃ = (I - P)AΓ₀(Γ₀⁺Γ₀)⁻¹` in the coordinates of the complement basis.
    pub fn gamma_tilde_restricted(&self) -> CMatrix {
        let n = self.a.nrows();
        let i_p = identity(n) - &self.p;
        self.complement.adjoint() * i_p * &self.a * &self.gamma0 * &self.gram_product_inv
    }
}

fn general_at(r: &Realization, z0: C64) -> Result<Realization> {
    match r.ref_point() {
        Some(p) if p == z0 => Ok(r.clone()),
        _ => r.to_general(z0),
    }
}

/// General-form realization of `-Q(z)⁻¹` anchored at `z0`.
///
/// The representing relation is recovered from its resolvent at `z0`:
/// `Â = {(Ty, y + z₀Ty)}` with `T = (A - z₀)⁻¹ - Γ Q(z₀)⁻¹ Γ_{z̄₀}⁺`.
pub fn inverse_realization(r: &Realization, z0: C64) -> Result<Realization> {
    if z0.im.is_nan() || z0.im <= 0.0 {
        return Err(Error::InvalidReferencePoint { z: z0 });
    }
    let g = general_at(r, z0)?;
    let sp = g.space();
    let q0 = g.evaluate(z0)?;
    let q0_inv = inverse_checked(&q0, g.tol()).ok_or(Error::SingularValue { z: z0 })?;
    let t = inverse_resolvent_with(&g, z0, &q0_inv)?;
    let n = sp.dim();
    let relation = LinearRelation::new(sp, t.clone(), identity(n) + &t * z0)?;
    let gamma_hat = -(g.gamma() * &q0_inv);
    let ref_value_adj = -q0_inv.adjoint();
    Realization::general(sp, relation, gamma_hat, z0, ref_value_adj)
}

fn inverse_resolvent_with(g: &Realization, z: C64, q_inv: &CMatrix) -> Result<CMatrix> {
    let res = g.resolvent(z)?;
    let gz = g.gamma_at(z)?;
    let gzbar = g.gamma_at(z.conj())?;
    let gzbar_plus = map_adjoint(&gzbar, g.space())?;
    Ok(res - gz * q_inv * gzbar_plus)
}

/// `(A - z)⁻¹ - Γ_z Q(z)⁻¹ Γ_{z̄}⁺`, the resolvent of the inverse's relation
/// predicted from the original realization.
pub fn predicted_inverse_resolvent(r: &Realization, z: C64) -> Result<CMatrix> {
    let q = r.evaluate(z)?;
    let q_inv = inverse_checked(&q, r.tol()).ok_or(Error::SingularValue { z })?;
    inverse_resolvent_with(r, z, &q_inv)
}

/// `‖(Â - z)⁻¹ - (A - z)⁻¹ + Γ_z Q(z)⁻¹ Γ_{z̄}⁺‖₂`.
pub fn resolvent_difference_residual(
    r: &Realization,
    inverse: &Realization,
    z: C64,
) -> Result<f64> {
    let actual = inverse.op().resolvent(z)?;
    let predicted = predicted_inverse_resolvent(r, z)?;
    Ok(spectral_norm(&(actual - predicted)))
}

#[derive(Clone, Debug)]
pub struct MultivaluedReport {
    pub ref_point: C64,
    pub multivalued_dim: usize,
    pub range_dim: usize,
    /// Projector distance between `Â(0)` and `range(Γ₀)`.
    pub distance: f64,
    /// Projector distance between `ker (Â - z₀)⁻¹` and `range(Γ₀)`.
    pub kernel_distance: f64,
}

impl MultivaluedReport {
    pub fn matches(&self, tol: f64) -> bool {
        self.multivalued_dim == self.range_dim
            && self.distance <= tol
            && self.kernel_distance <= tol
    }
}

/// Candidate anchors for the inverse realization, tried in order.
pub const INVERSE_ANCHORS: [C64; 4] = [
    C64 { re: 0.0, im: 1.0 },
    C64 { re: 0.37, im: 1.9 },
    C64 { re: -1.3, im: 0.7 },
    C64 { re: 2.1, im: 2.6 },
];

/// Compares the multivalued part of the inverse's relation with `range(Γ₀)`.
pub fn verify_multivalued_part(r: &Realization) -> Result<MultivaluedReport> {
    let ctx = build_context(r)?;
    let mut last = Error::SingularValue {
        z: INVERSE_ANCHORS[0],
    };
    for z0 in INVERSE_ANCHORS {
        match inverse_realization(ctx.base(), z0) {
            Ok(inv) => return Ok(multivalued_report(r, &inv, z0)),
            Err(e) => last = e,
        }
    }
    Err(last)
}

pub fn multivalued_report(r: &Realization, inverse: &Realization, z0: C64) -> MultivaluedReport {
    let tol = r.tol();
    let sp = r.space();
    let range = Subspace::span(sp, r.gamma());
    let mul = inverse.op().multivalued_part();
    let t = inverse
        .op()
        .resolvent(z0)
        .unwrap_or_else(|_| linalg::zeros(sp.dim(), sp.dim()));
    // T vanishes on range(Γ₀); judge its kernel against the scale of (A - z₀)⁻¹
    let scale = r
        .resolvent(z0)
        .map(|res| spectral_norm(&res))
        .unwrap_or(1.0)
        .max(spectral_norm(&t));
    let ker = Subspace::span(sp, &linalg::null_space_abs(&t, tol * scale));
    MultivaluedReport {
        ref_point: z0,
        multivalued_dim: mul.dim(),
        range_dim: range.dim(),
        distance: mul.distance(&range),
        kernel_distance: ker.distance(&range),
    }
}

/// Default evaluation point used by reports.
pub fn default_point() -> C64 {
    c64(0.0, 1.0)
}
