//! Command-line front end: concrete syntax and the user-facing commands for
//! reduction, equality checking, Taylor expansion, model interpretation,
//! translation and the categorical axiom report.

pub mod commands;
pub mod syntax;

pub use commands::{run, Cli};
pub use syntax::{expand_lets, parse_diff, parse_res, ParseError};
