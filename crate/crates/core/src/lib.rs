//! Exact verification of matrix bispectral triples `Lψ = ψF(z)`,
//! `ψB = θ(x)ψ` over the Gaussian rationals, truncated eigenvalue algebras,
//! presentations by generators and relations, tail wave functions of rational
//! Schrödinger operators, and a numerical prolate/sinc commutation check.
//!
//! The guide under `book/` walks through each module; its snippets run as
//! doctests of this crate.

pub mod exact;
pub mod expr;
pub mod matpoly;
pub mod operators;
pub mod solver;
pub mod theorems;
pub mod presentations;
pub mod kdv;
pub mod prolate;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/problem-files.md")]
    mod problem_files {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/eigenvalue-algebras.md")]
    mod eigenvalue_algebras {}
    #[doc = include_str!("../../../book/src/descriptions.md")]
    mod descriptions {}
    #[doc = include_str!("../../../book/src/presentations.md")]
    mod presentations {}
    #[doc = include_str!("../../../book/src/kdv.md")]
    mod kdv {}
    #[doc = include_str!("../../../book/src/prolate.md")]
    mod prolate {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
