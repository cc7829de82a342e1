//! Workbench for the untyped differential lambda calculus and the resource
//! calculus: terms and canonical forms, substitution operators, reduction
//! and theory equality, truncated Taylor expansion, the relational category
//! with its differential structure and axiom checkers, the extensional
//! relational model, and faithful translations between the two calculi.

pub mod combinators;
pub mod dmodel;
pub mod gen;
pub mod mrel;
pub mod res;
pub mod rewrite;
pub mod subst;
pub mod term;
pub mod translate;
