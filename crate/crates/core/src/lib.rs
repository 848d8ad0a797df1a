//! Predicate transformer workbench for a deterministic while-language over
//! finite state spaces.
//!
//! The crate computes weakest (liberal) preconditions and strongest
//! (liberal) postconditions three independent ways (a compositional
//! semantic engine over bitset lattices, a syntactic rewrite engine for
//! slp, and a brute-force operational oracle) and cross-validates them.
//! On top of the transformers it decides the four triple validity notions,
//! the two decomposition theorems, and the Park induction and variant
//! proof rules.

pub mod eval;
pub mod fuzz;
pub mod lexer;
pub mod oracle;
pub mod parser;
pub mod proofs;
pub mod report;
pub mod runner;
pub mod slp_rules;
pub mod statespace;
pub mod syntax;
pub mod transformers;
pub mod triples;
