use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use cubicsing::numfield::{reduce_mod, AlgebraicNumber, FieldRef, NumberField, PrimeField};

fn fields() -> Vec<(FieldRef, u64)> {
    // each paired with a prime at which the defining polynomial splits
    vec![
        (NumberField::cyclotomic(3).unwrap(), 7),
        (NumberField::cyclotomic(8).unwrap(), 17),
        (NumberField::cyclotomic(12).unwrap(), 13),
        (NumberField::quadratic(5).unwrap(), 11),
    ]
}

fn element(field: &FieldRef, c: &[(i64, i64)]) -> AlgebraicNumber {
    let coeffs = (0..field.degree())
        .map(|i| {
            let (n, d) = c[i % c.len()];
            BigRational::new(BigInt::from(n), BigInt::from(d))
        })
        .collect();
    AlgebraicNumber::from_coeffs(field, coeffs)
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-9i64..=9, 1i64..=4), 4)
}

proptest! {
    #[test]
    fn ring_axioms(fi in 0usize..4, a in coeffs(), b in coeffs(), c in coeffs()) {
        let (k, _) = &fields()[fi];
        let (a, b, c) = (element(k, &a), element(k, &b), element(k, &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &a), &AlgebraicNumber::zero(k));
    }

    #[test]
    fn inverse(fi in 0usize..4, a in coeffs()) {
        let (k, _) = &fields()[fi];
        let a = element(k, &a);
        match a.inv() {
            Some(i) => prop_assert!((&a * &i).is_one()),
            None => prop_assert!(a.is_zero()),
        }
    }

    #[test]
    fn reduction_is_a_homomorphism(fi in 0usize..4, a in coeffs(), b in coeffs()) {
        let (k, p) = &fields()[fi];
        for pf in PrimeField::roots(k, *p).unwrap().into_iter().map(|r| PrimeField::with_theta(k, *p, r).unwrap()) {
            let (a, b) = (element(k, &a), element(k, &b));
            let (ra, rb) = (reduce_mod(&a, &pf).unwrap(), reduce_mod(&b, &pf).unwrap());
            prop_assert_eq!(reduce_mod(&(&a + &b), &pf).unwrap(), (ra + rb) % p);
            prop_assert_eq!(reduce_mod(&(&a * &b), &pf).unwrap(), ra * rb % p);
        }
    }
}

#[test]
fn roots_of_unity_have_their_order() {
    for n in [3u32, 4, 6, 8, 12, 24] {
        let k = NumberField::cyclotomic(n).unwrap();
        let z = AlgebraicNumber::theta(&k);
        assert!(z.pow(n as i64).is_one(), "zeta_{n}^{n}");
        for d in 1..n {
            assert!(!z.pow(d as i64).is_one(), "zeta_{n}^{d}");
        }
    }
}

#[test]
fn square_root_squares_to_radicand() {
    let k = NumberField::quadratic(-3).unwrap();
    let r = AlgebraicNumber::theta(&k);
    assert_eq!(&r * &r, AlgebraicNumber::from_int(&k, -3));
}

#[test]
fn reduction_rejects_inert_prime() {
    // x^2 + x + 1 has no root mod 5
    let k = NumberField::cyclotomic(3).unwrap();
    assert!(PrimeField::new(&k, 5).is_err());
}
