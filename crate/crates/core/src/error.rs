use thiserror::Error;

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("Gram matrix is singular (smallest singular value {smallest:.3e})")]
    SingularGram { smallest: f64 },

    #[error("basis columns are linearly dependent (rank {rank} < {cols})")]
    RankDeficientBasis { rank: usize, cols: usize },

    #[error("subspace is degenerate (smallest Gram singular value {smallest:.3e})")]
    DegenerateSubspace { smallest: f64 },

    #[error("z = {z} is not in the resolvent set")]
    NotInResolventSet { z: C64 },

    #[error("function value is singular at z = {z}")]
    SingularValue { z: C64 },

    #[error("minimal subspace is degenerate (smallest Gram singular value {smallest:.3e}); use the sampled index")]
    DegenerateMinimalSubspace { smallest: f64 },

    #[error("Gamma0^+ Gamma0 is not boundedly invertible (singular values {smallest:.3e} .. {largest:.3e})")]
    GramProductSingular { smallest: f64, largest: f64 },

    #[error("inner Schur complement is singular at z = {z}")]
    SchurSingular { z: C64 },

    #[error("subspace is not invariant (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("representation is not minimal ({minimal_dim} < {dim})")]
    NotMinimal { minimal_dim: usize, dim: usize },

    #[error("{alpha} is not an eigenvalue")]
    NotEigenvalue { alpha: C64 },

    #[error("spectral projector is not J-symmetric (residual {residual:.3e})")]
    ProjectorNotJSymmetric { residual: f64 },

    #[error("no generator in the range of Gamma for the chain block")]
    NoGenerator,

    #[error("operator or relation is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("operation requires a bounded-form realization")]
    RequiresBoundedForm,

    #[error("reference point must lie in the open upper half-plane, got {z}")]
    InvalidReferencePoint { z: C64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
}
