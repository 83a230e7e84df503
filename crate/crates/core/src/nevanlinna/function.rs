use crate::error::{Error, Result};
use crate::linalg::{self, block_diag, zeros, CMatrix, C64};
use crate::pontryagin::DEFAULT_TOL;

use super::Realization;

/// A pole term `Σ_j R_j (z - at)^{-(j+1)}`.
#[derive(Clone, Debug)]
pub struct PoleTerm {
    pub at: C64,
    pub coeffs: Vec<CMatrix>,
}

/// Matrix rational function `Σ_k C_k z^k + Σ_poles Σ_j R_j (z - a)^{-(j+1)}`.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    dim: usize,
    poly: Vec<CMatrix>,
    poles: Vec<PoleTerm>,
}

impl RationalFunction {
    pub fn new(dim: usize, poly: Vec<CMatrix>, poles: Vec<PoleTerm>) -> Result<Self> {
        let shapes = poly
            .iter()
            .chain(poles.iter().flat_map(|p| p.coeffs.iter()));
        for c in shapes {
            if c.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    context: "RationalFunction coefficient",
                    expected: dim,
                    found: c.nrows(),
                });
            }
        }
        Ok(RationalFunction { dim, poly, poles })
    }

    /// Matrix polynomial `Σ_k C_k z^k`.
    pub fn polynomial(coeffs: Vec<CMatrix>) -> Result<Self> {
        let dim = coeffs.first().map_or(0, |c| c.nrows());
        Self::new(dim, coeffs, Vec::new())
    }

    /// Scalar `residue / (z - at)`.
    pub fn scalar_pole(residue: f64, at: f64) -> Self {
        let r = CMatrix::from_element(1, 1, C64::new(residue, 0.0));
        RationalFunction {
            dim: 1,
            poly: Vec::new(),
            poles: vec![PoleTerm {
                at: C64::new(at, 0.0),
                coeffs: vec![r],
            }],
        }
    }

    /// Constant function.
    pub fn constant(c: CMatrix) -> Self {
        RationalFunction {
            dim: c.nrows(),
            poly: vec![c],
            poles: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polynomial_coeffs(&self) -> &[CMatrix] {
        &self.poly
    }

    pub fn pole_terms(&self) -> &[PoleTerm] {
        &self.poles
    }

    pub fn evaluate(&self, z: C64) -> Result<CMatrix> {
        let mut out = zeros(self.dim, self.dim);
        let mut power = C64::new(1.0, 0.0);
        for c in &self.poly {
            out += c * power;
            power *= z;
        }
        for pole in &self.poles {
            let d = z - pole.at;
            if d.norm() <= f64::EPSILON * (1.0 + pole.at.norm()) {
                return Err(Error::NotInResolventSet { z });
            }
            let inv = d.inv();
            let mut p = inv;
            for r in &pole.coeffs {
                out += r * p;
                p *= inv;
            }
        }
        Ok(out)
    }
}

/// An evaluable matrix-valued function built from realizations and simple
/// combinators.
#[derive(Clone, Debug)]
pub enum GnFunction {
    Realized(Box<Realization>),
    Sum(Vec<GnFunction>),
    BlockDiag(Vec<GnFunction>),
    /// `-f(z)⁻¹`.
    InverseOf(Box<GnFunction>),
    Rational(RationalFunction),
}

impl From<Realization> for GnFunction {
    fn from(r: Realization) -> Self {
        GnFunction::Realized(Box::new(r))
    }
}

impl From<RationalFunction> for GnFunction {
    fn from(r: RationalFunction) -> Self {
        GnFunction::Rational(r)
    }
}

impl GnFunction {
    /// Sum of functions with a common output dimension.
    pub fn sum(parts: Vec<GnFunction>) -> Result<Self> {
        if let Some(first) = parts.first() {
            let m = first.out_dim();
            if let Some(bad) = parts.iter().find(|p| p.out_dim() != m) {
                return Err(Error::DimensionMismatch {
                    context: "GnFunction::sum",
                    expected: m,
                    found: bad.out_dim(),
                });
            }
        }
        Ok(GnFunction::Sum(parts))
    }

    pub fn block_diag(parts: Vec<GnFunction>) -> Self {
        GnFunction::BlockDiag(parts)
    }

    /// `-f(z)⁻¹`.
    pub fn inverse_of(f: GnFunction) -> Self {
        GnFunction::InverseOf(Box::new(f))
    }

    pub fn out_dim(&self) -> usize {
        match self {
            GnFunction::Realized(r) => r.coeff_dim(),
            GnFunction::Sum(parts) => parts.first().map_or(0, |p| p.out_dim()),
            GnFunction::BlockDiag(parts) => parts.iter().map(|p| p.out_dim()).sum(),
            GnFunction::InverseOf(f) => f.out_dim(),
            GnFunction::Rational(r) => r.dim(),
        }
    }

    fn tol(&self) -> f64 {
        match self {
            GnFunction::Realized(r) => r.tol(),
            GnFunction::Sum(p) | GnFunction::BlockDiag(p) => {
                p.iter().map(|f| f.tol()).fold(DEFAULT_TOL, f64::max)
            }
            GnFunction::InverseOf(f) => f.tol(),
            GnFunction::Rational(_) => DEFAULT_TOL,
        }
    }

    pub fn evaluate(&self, z: C64) -> Result<CMatrix> {
        match self {
            GnFunction::Realized(r) => r.evaluate(z),
            GnFunction::Sum(parts) => {
                let m = self.out_dim();
                parts
                    .iter()
                    .try_fold(zeros(m, m), |acc, p| Ok(acc + p.evaluate(z)?))
            }
            GnFunction::BlockDiag(parts) => parts
                .iter()
                .try_fold(zeros(0, 0), |acc, p| Ok(block_diag(&acc, &p.evaluate(z)?))),
            GnFunction::InverseOf(f) => {
                let v = f.evaluate(z)?;
                let inv =
                    linalg::inverse_checked(&v, self.tol()).ok_or(Error::SingularValue { z })?;
                Ok(-inv)
            }
            GnFunction::Rational(r) => r.evaluate(z),
        }
    }

    /// Nevanlinna kernel `(Q(z) - Q(w)*) / (z - w̄)`. At `z = w̄` the limit
    /// `Q'(z)` is taken by a central difference.
    pub fn kernel(&self, z: C64, w: C64) -> Result<CMatrix> {
        let denom = z - w.conj();
        let scale = z.norm().max(1.0);
        if denom.norm() <= 1e-12 * scale {
            let h = 1e-6 * scale;
            let step = C64::new(h, 0.0);
            let fwd = self.evaluate(z + step)?;
            let bwd = self.evaluate(z - step)?;
            return Ok((fwd - bwd) / C64::new(2.0 * h, 0.0));
        }
        let qz = self.evaluate(z)?;
        let qw = self.evaluate(w)?;
        Ok((qz - qw.adjoint()) / denom)
    }
}
