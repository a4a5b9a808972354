//! Exact arithmetic tower: Gaussian rationals, bivariate polynomials,
//! rational functions with factored denominators, matrices of those, and
//! sparse exact linear algebra.

mod gaussian;
pub mod linalg;
mod matrix;
mod poly;
mod ratfun;

pub use gaussian::{GaussianRational, Gq};
pub use matrix::MatRF;
pub use poly::{BiPoly, Mono, UniPoly, Var};
pub use ratfun::{Den, Factor, FactorBasis, RatFun};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed number literal `{0}`")]
    BadLiteral(String),
    #[error("`{0}` is not a monic polynomial of positive degree")]
    BadFactor(String),
    #[error("factors `{0}` and `{1}` share a root")]
    NotCoprime(String, String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}
