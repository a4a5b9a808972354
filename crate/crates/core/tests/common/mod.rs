//! Random small instances and the property checks shared by the property
//! suite and the acceptance run.
#![allow(dead_code)]

use bispectral::exact::linalg::{exact_nullspace, rank};
use bispectral::exact::{BiPoly, Den, Factor, Gq, MatRF, RatFun, Var};
use bispectral::kdv::antiderivative;
use bispectral::matpoly::{ConstMat, MatPoly};
use bispectral::operators::{apply_left, apply_right, Convention, LeftOperator, RightOperator, WaveFunction};
use bispectral::presentations::generated_slice;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Check = Result<(), TestCaseError>;

pub fn gq() -> impl Strategy<Value = Gq> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| &Gq::from_ratio(a, b) + &(&Gq::i() * &Gq::from_ratio(c, d)))
}

pub fn small_int() -> impl Strategy<Value = Gq> {
    (-2i64..=2).prop_map(Gq::from_int)
}

/// At most `terms` monomials of degree ≤ 2 in each allowed variable.
pub fn bipoly(x: bool, z: bool, terms: usize) -> impl Strategy<Value = BiPoly> {
    let ex = 0u32..=if x { 2 } else { 0 };
    let ez = 0u32..=if z { 2 } else { 0 };
    prop::collection::vec((ex, ez, gq()), 0..=terms).prop_map(|ts| {
        let mut p = BiPoly::zero();
        for (a, b, c) in ts {
            p.add_term((a, b), c);
        }
        p
    })
}

/// Poles at `x ∈ {0, 1}` and `z ∈ {0, −1}`.
pub fn pole_factors(x: bool, z: bool) -> Vec<Factor> {
    let mut out = Vec::new();
    if x {
        out.extend([Factor::linear(Var::X, Gq::zero()), Factor::linear(Var::X, Gq::one())]);
    }
    if z {
        out.extend([Factor::linear(Var::Z, Gq::zero()), Factor::linear(Var::Z, Gq::from_int(-1))]);
    }
    out
}

pub fn ratfun(x: bool, z: bool) -> impl Strategy<Value = RatFun> {
    let factors = pole_factors(x, z);
    let k = factors.len();
    (bipoly(x, z, 3), prop::collection::vec(0u32..=2, k)).prop_map(move |(num, exps)| {
        let den: Den = factors.iter().cloned().zip(exps).filter(|(_, e)| *e > 0).collect();
        RatFun::new(num, den)
    })
}

pub fn matrf(n: usize, x: bool, z: bool) -> impl Strategy<Value = MatRF> {
    prop::collection::vec(ratfun(x, z), n * n)
        .prop_map(move |es| MatRF::from_rows(es.chunks(n).map(|r| r.to_vec()).collect()).expect("square"))
}

pub fn left_operator(n: usize, max_order: usize) -> impl Strategy<Value = LeftOperator> {
    prop::collection::vec(matrf(n, true, false), 1..=max_order + 1)
        .prop_map(move |cs| LeftOperator::new(n, cs.into_iter().enumerate().collect()).expect("x-only coefficients"))
}

pub fn right_operator(n: usize, max_order: usize) -> impl Strategy<Value = RightOperator> {
    prop::collection::vec(matrf(n, false, true), 1..=max_order + 1)
        .prop_map(move |cs| RightOperator::new(n, cs.into_iter().enumerate().collect()).expect("z-only coefficients"))
}

pub fn convention() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::One), Just(Convention::I)]
}

pub fn wave(n: usize) -> impl Strategy<Value = WaveFunction> {
    (matrf(n, true, true).prop_filter("nonzero", |m| !m.is_zero()), convention())
        .prop_map(|(m, c)| WaveFunction::new(m, c).expect("nonzero square"))
}

/// Matrix polynomial in `x` with small integer coefficients.
pub fn matpoly(n: usize, max_degree: usize) -> impl Strategy<Value = MatPoly> {
    prop::collection::vec(prop::collection::vec(small_int(), n * n), 1..=max_degree + 1).prop_map(move |cs| {
        let coeffs = cs.into_iter().map(|es| ConstMat::from_rows(es.chunks(n).map(|r| r.to_vec()).collect())).collect();
        MatPoly::new(Var::X, n, coeffs)
    })
}

/// Runs `check` on `cases` generated inputs with a fixed seed.
pub fn run<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn field_axioms((a, b, c): (Gq, Gq, Gq)) -> Check {
    prop_assert_eq!(&a + &b, &b + &a);
    prop_assert_eq!(&a * &b, &b * &a);
    prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    prop_assert_eq!(&a + &Gq::zero(), a.clone());
    prop_assert_eq!(&a * &Gq::one(), a.clone());
    prop_assert!((&a + &-a.clone()).is_zero());
    if !a.is_zero() {
        prop_assert_eq!(&a * &a.inv().unwrap(), Gq::one());
    }
    Ok(())
}

pub fn ratfun_ring_axioms((f, g, h): (RatFun, RatFun, RatFun)) -> Check {
    prop_assert_eq!(f.add(&g), g.add(&f));
    prop_assert_eq!(f.mul(&g), g.mul(&f));
    prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
    prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
    prop_assert!(f.sub(&f).is_zero());
    Ok(())
}

pub fn leibniz((f, g): (RatFun, RatFun)) -> Check {
    for v in [Var::X, Var::Z] {
        let lhs = f.mul(&g).diff(v);
        let rhs = f.diff(v).mul(&g).add(&f.mul(&g.diff(v)));
        prop_assert_eq!(lhs, rhs);
    }
    Ok(())
}

pub fn mixed_partials(f: RatFun) -> Check {
    prop_assert_eq!(f.diff(Var::X).diff(Var::Z), f.diff(Var::Z).diff(Var::X));
    Ok(())
}

/// Evaluation at a point away from every pole is a ring homomorphism.
pub fn eval_homomorphism((f, g): (RatFun, RatFun)) -> Check {
    let (x, z) = (Gq::from_ratio(5, 2), Gq::from_int(3));
    let (a, b) = (f.eval(&x, &z).unwrap(), g.eval(&x, &z).unwrap());
    prop_assert_eq!(f.mul(&g).eval(&x, &z).unwrap(), &a * &b);
    prop_assert_eq!(f.add(&g).eval(&x, &z).unwrap(), &a + &b);
    Ok(())
}

/// Left and right actions commute: `(Lψ)B = L(ψB)`.
pub fn bimodule((l, psi, b): (LeftOperator, WaveFunction, RightOperator)) -> Check {
    let lhs = apply_right(&apply_left(&l, &psi).unwrap(), &b).unwrap();
    let rhs = apply_left(&l, &apply_right(&psi, &b).unwrap()).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Composed coefficients agree with successive application.
pub fn composition((l1, l2, psi, b1, b2): (LeftOperator, LeftOperator, WaveFunction, RightOperator, RightOperator)) -> Check {
    let composed = apply_left(&l1.compose(&l2), &psi).unwrap();
    let successive = apply_left(&l1, &apply_left(&l2, &psi).unwrap()).unwrap();
    prop_assert_eq!(composed, successive);
    // (ψB1)B2 = ψ(B1·B2)
    let composed = apply_right(&psi, &b1.compose(&b2)).unwrap();
    let successive = apply_right(&apply_right(&psi, &b1).unwrap(), &b2).unwrap();
    prop_assert_eq!(composed, successive);
    Ok(())
}

/// The antiderivative of an exact derivative differentiates back.
pub fn antiderivative_inverts_derivative(g: RatFun) -> Check {
    let f = g.diff(Var::X);
    let big_f = antiderivative(&f).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(big_f.diff(Var::X), f);
    Ok(())
}

/// Raising the truncation degree never loses dimension, and truncating
/// back recovers the lower slice.
pub fn generated_monotone(gens: Vec<MatPoly>) -> Check {
    let lo = generated_slice(&gens, Var::X, 2, 2);
    let hi = generated_slice(&gens, Var::X, 2, 3);
    prop_assert!(lo.dim() <= hi.dim());
    prop_assert_eq!(hi.truncate(2), lo);
    Ok(())
}

/// Nullspace vectors are annihilated and rank plus nullity is the width.
pub fn rank_nullity(rows: Vec<Vec<Gq>>) -> Check {
    let ncols = 9;
    let null = exact_nullspace(&rows, ncols);
    for v in &null {
        for r in &rows {
            let dot = r.iter().zip(v).fold(Gq::zero(), |acc, (a, b)| &acc + &(a * b));
            prop_assert!(dot.is_zero());
        }
    }
    prop_assert_eq!(rank(&rows, ncols) + null.len(), ncols);
    Ok(())
}

pub fn matrix_6x9() -> impl Strategy<Value = Vec<Vec<Gq>>> {
    // low-rank rows appear through the small value range
    prop::collection::vec(prop::collection::vec((-1i64..=1).prop_map(Gq::from_int), 9), 6)
}

/// Property runs used by both suites: name, case count, outcome.
pub fn property_suite() -> Vec<(&'static str, u32, Result<(), String>)> {
    vec![
        ("field axioms on Gaussian rationals", 1000, run(1000, (gq(), gq(), gq()), field_axioms)),
        (
            "ring axioms on rational functions",
            1000,
            run(1000, (ratfun(true, true), ratfun(true, true), ratfun(true, true)), ratfun_ring_axioms),
        ),
        ("Leibniz rule in x and z", 1000, run(1000, (ratfun(true, true), ratfun(true, true)), leibniz)),
        ("mixed partials commute", 200, run(200, ratfun(true, true), mixed_partials)),
        ("evaluation is a homomorphism", 200, run(200, (ratfun(true, true), ratfun(true, true)), eval_homomorphism)),
        (
            "left and right actions commute",
            200,
            run(200, (left_operator(2, 2), wave(2), right_operator(2, 2)), bimodule),
        ),
        (
            "composition matches successive application",
            100,
            run(100, (left_operator(2, 1), left_operator(2, 1), wave(2), right_operator(2, 1), right_operator(2, 1)), composition),
        ),
        ("antiderivative inverts the derivative", 200, run(200, ratfun(true, false), antiderivative_inverts_derivative)),
        ("generated slices are monotone", 100, run(100, prop::collection::vec(matpoly(2, 1), 1..=2), generated_monotone)),
        ("rank plus nullity", 200, run(200, matrix_6x9(), rank_nullity)),
    ]
}
