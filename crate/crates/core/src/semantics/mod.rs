//! Finite metric structures and their exact brute-force evaluator.
//!
//! `sup`/`inf` enumerate the universe, so evaluation costs
//! `|M|^(quantifier depth)` table lookups.

mod eval;
pub mod io;
pub mod models;
mod structure;

pub use eval::{
    check_condition, evaluate, evaluate_at, evaluate_closed, evaluate_term, Assignment, Condition, EvalError,
};
pub use models::{
    boolean_algebra, classical_to_structure, prime_field_ring, prime_field_vector_space, uniform_boolean_algebra,
    ClassicalTables,
};
pub use structure::{validate, Elem, FiniteStructure, StructureError, Violation};
