mod common;

use proptest::prelude::*;

use cubicsing::autgroups::{group_closure, invariance_scalar, structure_invariants, table_invariants, ProjMatrix};
use cubicsing::scenarios::bundled_scenario;

proptest! {
    #[test]
    fn oracle_agrees_with_table_invariants((n, gens) in common::perm_group_strategy()) {
        let elems = common::perm_closure(&gens, n);
        prop_assert_eq!(table_invariants(&common::perm_table(&elems)), common::oracle_invariants(&gens, n));
    }

    #[test]
    fn permutation_matrices_match_oracle((n, gens) in common::perm_group_strategy()) {
        let mats: Vec<ProjMatrix> = gens.iter().map(common::perm_matrix).collect();
        let g = group_closure(&mats, 200).unwrap();
        prop_assert_eq!(structure_invariants(&g), common::oracle_invariants(&gens, n));
    }
}

#[test]
fn invariance_scalar_is_multiplicative() {
    for name in ["3d4", "5a2", "2a3_plane", "3a3"] {
        let s = bundled_scenario(name).unwrap().unwrap();
        for a in &s.generators {
            for b in &s.generators {
                let la = invariance_scalar(&a.matrix, &s.cubic).unwrap();
                let lb = invariance_scalar(&b.matrix, &s.cubic).unwrap();
                let lab = invariance_scalar(&(&a.matrix * &b.matrix), &s.cubic).unwrap();
                assert_eq!(lab, &la * &lb, "{name}: {} * {}", a.name, b.name);
            }
        }
    }
}

#[test]
fn named_models_have_the_recorded_invariants() {
    // every fully specified group in the catalog against its permutation model
    let mut checked = 0;
    for name in cubicsing::scenarios::bundled_names() {
        let s = bundled_scenario(name).unwrap().unwrap();
        for g in &s.groups {
            let Some((n, gens)) = common::group_model(&g.name) else { continue };
            let oracle = common::oracle_invariants(&gens, n);
            assert!(g.expected.mismatches(&oracle).is_empty(), "{name}/{}: {:?}", g.name, g.expected.mismatches(&oracle));
            checked += 1;
        }
    }
    assert!(checked >= 15, "only {checked} groups had a model");
}

#[test]
fn closures_match_their_models() {
    for name in cubicsing::scenarios::bundled_names() {
        let s = bundled_scenario(name).unwrap().unwrap();
        for g in &s.groups {
            let Some((n, gens)) = common::group_model(&g.name) else { continue };
            let mats: Vec<ProjMatrix> = g.generators.iter().map(|&i| ProjMatrix::new(s.generators[i].matrix.clone()).unwrap()).collect();
            let grp = group_closure(&mats, 5000).unwrap();
            assert_eq!(structure_invariants(&grp), common::oracle_invariants(&gens, n), "{name}/{}", g.name);
        }
    }
}
