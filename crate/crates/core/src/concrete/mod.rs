//! Exact numerical backend: honest polynomial functors on finite-dimensional
//! rational spaces, cross effects via splitting idempotents, truncated
//! linearization complexes, and homology-level validation of rewrite rules.

pub mod check;
pub mod complex;
pub mod functor;
pub mod matrix;

pub use check::{check_rule_concrete, term_complex, Assignment, EvalOutcome, RuleCheckReport};
pub use complex::{
    bicomplex_total, linearization_complex, linearization_complex_mf, multilinearization_complex,
    simultaneous_complex, ComplexRep, LinearizationMode,
};
pub use functor::{
    cross_effect_dim, cross_effect_idempotent, cross_effect_split, parse_functor, ConcreteError,
    ConcreteFunctor, MultiFunctor, SplitSummand,
};
pub use matrix::{rat, Mat, Rat};

/// Default truncation degree: homology is trusted in degrees 0 and 1.
pub const DEFAULT_TRUNCATION: usize = 2;
