mod common;

use proptest::prelude::*;

use cubicsing::linalg::FieldMatrix;
use cubicsing::multipoly::MultiPoly;
use cubicsing::numfield::{AlgebraicNumber, FieldRef, NumberField};

fn matrix(field: &FieldRef, seed: &[i64]) -> FieldMatrix {
    FieldMatrix::from_rows((0..5).map(|r| (0..5).map(|c| AlgebraicNumber::from_int(field, seed[r * 5 + c])).collect()).collect())
}

fn fields() -> Vec<FieldRef> {
    vec![NumberField::rational(), NumberField::cyclotomic(3).unwrap(), NumberField::quadratic(5).unwrap()]
}

proptest! {
    #[test]
    fn euler_identity(fi in 0usize..3, terms in common::poly_terms()) {
        let res = common::check_euler(&fields()[fi], &terms);
        prop_assert!(res.is_ok(), "{}", res.unwrap_err());
    }

    #[test]
    fn substitution_composes(
        terms in common::poly_terms(),
        a in proptest::collection::vec(-2i64..=2, 25),
        b in proptest::collection::vec(-2i64..=2, 25),
    ) {
        let q = NumberField::rational();
        let f = common::homogeneous(&q, &terms);
        let (a, b) = (matrix(&q, &a), matrix(&q, &b));
        let lhs = f.substitute(&a).unwrap().substitute(&b).unwrap();
        let rhs = f.substitute(&(&b * &a)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_preserves_degree(terms in common::poly_terms(), a in proptest::collection::vec(-2i64..=2, 25)) {
        let q = NumberField::rational();
        let f = common::homogeneous(&q, &terms);
        let g = f.substitute(&matrix(&q, &a)).unwrap();
        prop_assert!(g.is_zero() || (g.is_homogeneous() && g.total_degree() == Some(3)));
    }

    #[test]
    fn membership_matches_oracle((gens, mults, g, d) in common::membership_strategy()) {
        let res = common::check_membership(&gens, &mults, &g, d);
        prop_assert!(res.is_ok(), "{}", res.unwrap_err());
    }
}

#[test]
fn parse_and_display_round_trip() {
    let k = NumberField::cyclotomic(3).unwrap();
    let f = MultiPoly::parse(&k, 5, "x1^2*x2 + z*x3^3 - 2/3*x4*x5^2").unwrap();
    let g = MultiPoly::parse(&k, 5, &f.to_string()).unwrap();
    assert_eq!(f, g);
}

#[test]
fn parse_rejects_unknown_variable() {
    let q = NumberField::rational();
    assert!(MultiPoly::parse(&q, 5, "x6^3").is_err());
}
