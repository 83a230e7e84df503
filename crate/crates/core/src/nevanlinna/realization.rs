use crate::error::{Error, Result};
use crate::linalg::{self, identity, shifted, CMatrix, C64};
use crate::pontryagin::{is_selfadjoint, map_adjoint, selfadjoint_defect, PontryaginSpace};
use crate::relations::LinearRelation;

/// How a realization represents its function.
#[derive(Clone, Debug)]
pub enum Form {
    /// `Q(z) = Γ₀⁺ (A - z)⁻¹ Γ₀` with a bounded operator `A`.
    Bounded,
    /// `Q(z) = Q(z₀)* + (z - z̄₀) Γ⁺ (I + (z - z₀)(A - z)⁻¹) Γ` with a
    /// self-adjoint relation `A`.
    General {
        ref_point: C64,
        ref_value_adj: CMatrix,
    },
}

/// A state-space triplet `(K, A, Γ)` together with its form.
#[derive(Clone, Debug)]
pub struct Realization {
    space: PontryaginSpace,
    op: LinearRelation,
    operator: Option<CMatrix>,
    gamma: CMatrix,
    form: Form,
}

impl Realization {
    /// Bounded-form realization `Γ₀⁺(A - z)⁻¹Γ₀`; `A` must be J-self-adjoint.
    pub fn bounded(space: &PontryaginSpace, a: CMatrix, gamma0: CMatrix) -> Result<Self> {
        let op = LinearRelation::from_operator(&a, space)?;
        check_gamma(space, &gamma0)?;
        if !is_selfadjoint(&a, space)? {
            return Err(Error::NotSelfAdjoint {
                residual: selfadjoint_defect(&a, space)?,
            });
        }
        Ok(Realization {
            space: space.clone(),
            op,
            operator: Some(a),
            gamma: gamma0,
            form: Form::Bounded,
        })
    }

    /// General-form realization anchored at `z0` (upper half-plane).
    pub fn general(
        space: &PontryaginSpace,
        op: LinearRelation,
        gamma: CMatrix,
        z0: C64,
        ref_value_adj: CMatrix,
    ) -> Result<Self> {
        check_gamma(space, &gamma)?;
        if op.space().dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "Realization::general (relation space)",
                expected: space.dim(),
                found: op.space().dim(),
            });
        }
        let m = gamma.ncols();
        if ref_value_adj.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                context: "Realization::general (reference value)",
                expected: m,
                found: ref_value_adj.nrows(),
            });
        }
        if (z0.im.is_nan() || z0.im <= 0.0) || !z0.re.is_finite() {
            return Err(Error::InvalidReferencePoint { z: z0 });
        }
        if !op.is_selfadjoint() {
            return Err(Error::NotSelfAdjoint {
                residual: op.distance(&op.adjoint()),
            });
        }
        op.resolvent(z0)?;
        let operator = op.as_operator();
        Ok(Realization {
            space: space.clone(),
            op,
            operator,
            gamma,
            form: Form::General {
                ref_point: z0,
                ref_value_adj,
            },
        })
    }

    pub fn space(&self) -> &PontryaginSpace {
        &self.space
    }

    pub fn op(&self) -> &LinearRelation {
        &self.op
    }

    /// The operator matrix `A`, if the relation is an operator graph.
    pub fn operator(&self) -> Option<&CMatrix> {
        self.operator.as_ref()
    }

    /// `Γ₀` (bounded form) or `Γ` (general form).
    pub fn gamma(&self) -> &CMatrix {
        &self.gamma
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.form, Form::Bounded)
    }

    pub fn ref_point(&self) -> Option<C64> {
        match &self.form {
            Form::General { ref_point, .. } => Some(*ref_point),
            Form::Bounded => None,
        }
    }

    /// Dimension of the state space `K`.
    pub fn state_dim(&self) -> usize {
        self.space.dim()
    }

    /// Dimension of the coefficient space `H`.
    pub fn coeff_dim(&self) -> usize {
        self.gamma.ncols()
    }

    pub fn tol(&self) -> f64 {
        self.space.tol()
    }

    /// `Γ⁺ = Γ* J`.
    pub fn gamma_plus(&self) -> CMatrix {
        map_adjoint(&self.gamma, &self.space).expect("gamma rows match the space")
    }

    /// `(A - z)⁻¹`.
    pub fn resolvent(&self, z: C64) -> Result<CMatrix> {
        match &self.operator {
            Some(a) if self.is_bounded() => linalg::inverse_checked(&shifted(a, z), self.tol())
                .ok_or(Error::NotInResolventSet { z }),
            _ => self.op.resolvent(z),
        }
    }

    /// `Γ_z`: `(A - z)⁻¹Γ₀` in bounded form, `(I + (z - z₀)(A - z)⁻¹)Γ` in
    /// general form.
    pub fn gamma_at(&self, z: C64) -> Result<CMatrix> {
        let res = self.resolvent(z)?;
        Ok(match &self.form {
            Form::Bounded => res * &self.gamma,
            Form::General { ref_point, .. } => {
                let n = self.state_dim();
                (identity(n) + res * (z - ref_point)) * &self.gamma
            }
        })
    }

    /// `Q(z)`.
    pub fn evaluate(&self, z: C64) -> Result<CMatrix> {
        let res = self.resolvent(z)?;
        let gp = self.gamma_plus();
        let out = match &self.form {
            Form::Bounded => gp * res * &self.gamma,
            Form::General {
                ref_point,
                ref_value_adj,
            } => {
                let n = self.state_dim();
                let inner = identity(n) + res * (z - ref_point);
                ref_value_adj + (gp * inner * &self.gamma) * (z - ref_point.conj())
            }
        };
        if !linalg::is_finite(&out) {
            return Err(Error::NotInResolventSet { z });
        }
        Ok(out)
    }

    /// Same function in general form anchored at `z0`.
    ///
    /// For a bounded realization this uses `Γ := (A - z₀)⁻¹Γ₀`; for a general
    /// one it re-anchors with `Γ_{z₀}`.
    pub fn to_general(&self, z0: C64) -> Result<Realization> {
        if z0.im.is_nan() || z0.im <= 0.0 {
            return Err(Error::InvalidReferencePoint { z: z0 });
        }
        let gamma = self.gamma_at(z0)?;
        let ref_value_adj = self.evaluate(z0)?.adjoint();
        Realization::general(&self.space, self.op.clone(), gamma, z0, ref_value_adj)
    }

    /// Bounded form of a general realization whose relation is an operator.
    ///
    /// Returns the bounded realization with `Γ₀ = (A - z₀)Γ` together with the
    /// constant Hermitian offset `C` such that `Q(z) = C + Γ₀⁺(A - z)⁻¹Γ₀`.
    pub fn to_bounded(&self) -> Result<(Realization, CMatrix)> {
        match &self.form {
            Form::Bounded => Ok((
                self.clone(),
                linalg::zeros(self.coeff_dim(), self.coeff_dim()),
            )),
            Form::General {
                ref_point,
                ref_value_adj,
            } => {
                let a = self.operator.clone().ok_or(Error::RequiresBoundedForm)?;
                let gamma0 = shifted(&a, *ref_point) * &self.gamma;
                let bounded = Realization::bounded(&self.space, a, gamma0)?;
                let tail = bounded.evaluate(ref_point.conj())?;
                Ok((bounded, ref_value_adj - tail))
            }
        }
    }
}

fn check_gamma(space: &PontryaginSpace, gamma: &CMatrix) -> Result<()> {
    if gamma.nrows() != space.dim() {
        return Err(Error::DimensionMismatch {
            context: "Realization (gamma rows)",
            expected: space.dim(),
            found: gamma.nrows(),
        });
    }
    if !linalg::is_finite(gamma) {
        return Err(Error::NonFinite("gamma"));
    }
    Ok(())
}
