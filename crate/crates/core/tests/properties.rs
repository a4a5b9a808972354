mod common;

use bispectral::exact::Var;
use bispectral::solver::{stabilize_default, AlgebraSlice, Side, SliceMode};
use bispectral::theorems::ExampleId;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gaussian_field_axioms(t in (gq(), gq(), gq())) {
        field_axioms(t)?;
    }

    #[test]
    fn rational_function_ring_axioms(t in (ratfun(true, true), ratfun(true, true), ratfun(true, true))) {
        ratfun_ring_axioms(t)?;
    }

    #[test]
    fn product_rule(t in (ratfun(true, true), ratfun(true, true))) {
        leibniz(t)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partial_derivatives_commute(f in ratfun(true, true)) {
        mixed_partials(f)?;
    }

    #[test]
    fn evaluation_respects_sum_and_product(t in (ratfun(true, true), ratfun(true, true))) {
        eval_homomorphism(t)?;
    }

    #[test]
    fn left_right_actions_commute(t in (left_operator(2, 2), wave(2), right_operator(2, 2))) {
        bimodule(t)?;
    }

    #[test]
    fn scalar_actions_commute(t in (left_operator(1, 3), wave(1), right_operator(1, 3))) {
        bimodule(t)?;
    }

    #[test]
    fn antiderivative_round_trip(g in ratfun(true, false)) {
        antiderivative_inverts_derivative(g)?;
    }

    #[test]
    fn nullspace_and_rank(rows in matrix_6x9()) {
        rank_nullity(rows)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_successive_application(
        t in (left_operator(2, 1), left_operator(2, 1), wave(2), right_operator(2, 1), right_operator(2, 1))
    ) {
        composition(t)?;
    }

    #[test]
    fn generated_slice_truncates_consistently(gens in prop::collection::vec(matpoly(2, 1), 1..=2)) {
        generated_monotone(gens)?;
    }

    #[test]
    fn slice_document_round_trip(gens in prop::collection::vec(matpoly(2, 1), 1..=2)) {
        let s = bispectral::presentations::generated_slice(&gens, Var::X, 2, 2);
        let back = AlgebraSlice::from_doc(&s.serialize()).unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn slice_serialization_is_byte_identical_across_runs() {
    let problem = ExampleId::Ex1.problem();
    let run = || {
        let (slice, _) = stabilize_default(&problem.psi, Side::Theta, 3, SliceMode::Truncations, &problem.basis).unwrap();
        serde_json::to_string(&slice.serialize()).unwrap()
    };
    assert_eq!(run(), run());
}
