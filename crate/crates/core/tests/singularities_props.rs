use proptest::prelude::*;

use cubicsing::autgroups::ProjMatrix;
use cubicsing::linalg::FieldMatrix;
use cubicsing::numfield::{AlgebraicNumber, FieldRef};
use cubicsing::scenarios::{bundled_names, bundled_scenario};
use cubicsing::singularities::{classify_ade, is_singular_at, modp_singular_scan, AdeType};

/// Unit upper-triangular times a permutation: always invertible over Q.
fn change(q: &FieldRef, seed: &[i64], perm: &[usize]) -> FieldMatrix {
    let rows = (0..5)
        .map(|r| {
            (0..5)
                .map(|c| {
                    let (rr, cc) = (perm[r], c);
                    let v = if rr == cc {
                        1
                    } else if rr < cc {
                        seed[rr * 5 + cc]
                    } else {
                        0
                    };
                    AlgebraicNumber::from_int(q, v)
                })
                .collect()
        })
        .collect();
    FieldMatrix::from_rows(rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn classification_is_invariant_under_coordinate_change(
        seed in proptest::collection::vec(-2i64..=2, 25),
        perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        for name in bundled_names() {
            let s = bundled_scenario(name).unwrap().unwrap();
            let m = change(&s.field, &seed, &perm);
            let g = s.cubic.substitute(&m).unwrap();
            let minv = ProjMatrix::new(m.inverse().unwrap()).unwrap();
            for p in &s.points {
                // g(x) = f(x*M) is singular at p*M^-1
                let moved = minv.apply(&p.point);
                prop_assert!(is_singular_at(&g, &moved).unwrap());
                let r = classify_ade(&g, &moved, 12).unwrap();
                prop_assert_eq!(r.ade_type, p.ade_type, "{} at {}", name, p.name);
            }
        }
    }
}

#[test]
fn declared_points_classify() {
    for name in bundled_names() {
        let s = bundled_scenario(name).unwrap().unwrap();
        for p in &s.points {
            let r = classify_ade(&s.cubic, &p.point, 12).unwrap();
            assert_eq!(r.ade_type, p.ade_type, "{name}/{}", p.name);
        }
    }
}

#[test]
fn smooth_point_is_rejected() {
    let s = bundled_scenario("3d4").unwrap().unwrap();
    let p = cubicsing::singularities::ProjPoint::new(vec![AlgebraicNumber::from_int(&s.field, 1); 5]).unwrap();
    if !is_singular_at(&s.cubic, &p).unwrap() {
        assert!(classify_ade(&s.cubic, &p, 12).is_err());
    }
}

#[test]
fn modp_scan_counts_declared_points() {
    let s = bundled_scenario("3a2").unwrap().unwrap();
    for &p in &s.scan_primes {
        assert_eq!(modp_singular_scan(&s.cubic, p).unwrap().len(), s.points.len(), "p = {p}");
    }
}

#[test]
fn ade_types_parse() {
    assert_eq!("D4".parse::<AdeType>().unwrap(), AdeType::D(4));
    assert_eq!("A5".parse::<AdeType>().unwrap().milnor(), 5);
    assert!("D3".parse::<AdeType>().is_err());
}
