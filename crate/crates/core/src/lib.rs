//! Finite-dimensional Pontryagin-space operator theory: realizations of
//! generalized Nevanlinna functions, their negative index, inversion, and
//! decompositions into sums with additive index.

pub mod decomposition;
pub mod error;
pub mod inversion;
pub mod jordan;
pub mod linalg;
pub mod models;
pub mod nevanlinna;
pub mod pontryagin;
pub mod random;
pub mod relations;

pub use error::{Error, Result};
pub use linalg::{c64, CMatrix, CVector, C64};
