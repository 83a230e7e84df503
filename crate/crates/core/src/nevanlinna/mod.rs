//! Realizations of generalized Nevanlinna functions, evaluation, kernels and
//! the negative index.

mod function;
mod kappa;
mod predicates;
mod realization;

pub use function::{GnFunction, PoleTerm, RationalFunction};
pub use kappa::{
    exact_negative_index, is_minimal, minimal_gram_condition, minimal_subspace, negative_index,
    negative_squares_sampled, KappaEstimate, KappaMethod, SamplerConfig,
};
pub use predicates::{check_symmetry, lemma3_predicates, separating, Lemma3Report, SymmetryReport};
pub use realization::{Form, Realization};
