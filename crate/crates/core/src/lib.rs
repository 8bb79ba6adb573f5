//! Symbolic engine and exact numerical backend for the directional-derivative
//! calculus of abelian functors.
//!
//! The crate has two halves that check each other:
//!
//! * a term language for applied functor expressions (cross effects,
//!   linearizations, formal composites, direct sums) together with a rewrite
//!   system that normalizes such expressions to a canonical multiset of
//!   atomic summands, and
//! * a concrete backend that evaluates honest polynomial functors on
//!   finite-dimensional rational vector spaces, splits cross effects with
//!   exact idempotents, builds truncated linearization complexes, and compares
//!   homology dimensions.
//!
//! On top of the rewrite system, [`calculus`] builds first- and second-order
//! directional derivatives and mechanically verifies their chain rules by
//! multiset-matching canonical summands.

pub mod calculus;
pub mod concrete;
pub mod grammar;
pub mod latex;
pub mod rewrite;
pub mod term;

pub use calculus::{delta, expand_sides, nabla, verify_chain_rule, VerificationReport};
pub use rewrite::{enumerate_covers, normalize, Cover, NormalForm, RewriteConfig, RuleId};
pub use term::{canonicalize, collapse_aliases, Func, FunctorAtom, ObjectExpr, Term};
