mod common;

use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn normalize_is_idempotent(r in raw()) {
        normalize_idempotent(r)?;
    }

    #[test]
    fn normalize_agrees_with_arithmetic(a in expr(), b in expr()) {
        normalize_matches_arithmetic((a, b))?;
    }

    #[test]
    fn partial_derivatives_commute(e in expr(), v in var(), w in var()) {
        partials_commute((e, v, w))?;
    }

    #[test]
    fn total_derivatives_commute_on_low_jets(e in expr()) {
        total_derivatives_commute(e)?;
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr(), v in var()) {
        leibniz((a, b, v))?;
    }

    #[test]
    fn substitution_commutes_with_evaluation(e in point_poly(), p in point_poly(), vals in prop::array::uniform3(-5i64..6)) {
        substitution_then_eval((e, p, vals))?;
    }

    #[test]
    fn prolongation_is_linear(v in field(), w in field(), a in -4i64..5, b in 1i64..4, nx in 0u8..4, ny in 0u8..4) {
        prolongation_linear((v, w, a, b, nx, ny))?;
    }

    #[test]
    fn prolongation_follows_recursion(v in field(), nx in 0u8..3, ny in 0u8..3) {
        prolongation_recursion((v, nx, ny))?;
    }

    #[test]
    fn bracket_is_antisymmetric(v in field(), w in field()) {
        bracket_antisymmetric((v, w))?;
    }

    #[test]
    fn bracket_satisfies_jacobi(a in field(), b in field(), c in field()) {
        bracket_jacobi((a, b, c))?;
    }

    #[test]
    fn expressions_round_trip(e in expr()) {
        expr_round_trip(e)?;
    }

    #[test]
    fn fields_round_trip(v in field()) {
        field_round_trip(v)?;
    }

    #[test]
    fn systems_round_trip(f1 in point_poly(), f3 in point_poly(), g in point_poly()) {
        system_round_trip((f1, f3, g))?;
    }

    #[test]
    fn error_spans_point_into_the_input(e in expr(), cut in 0usize..64, j in junk()) {
        error_spans_in_bounds((e, cut, j))?;
    }
}
