//! Text formats: the expression grammar and problem files.

mod parser;
pub mod problem;

pub use parser::{factorize_bipoly, parse_expr, ParseError};
pub use problem::{load_problem, matrf_grid, operator_grids, parse_factor, parse_problem, BoundsDoc, Grid, Problem, ProblemDoc, ProblemError};
