mod common;

use std::collections::BTreeMap;

use common::{brute_hom_exists, brute_homs, brute_isomorphic, is_hom};
use fmtlab_core::enumerate::{for_each_structure, structures_up_to_iso};
use fmtlab_core::homsearch::{
    endomorphisms, exists_surjective_homomorphism, find_all_homomorphisms, find_homomorphism, find_retraction,
    hom_equivalent, HomOutcome, HomSearch, SearchBudget,
};
use fmtlab_core::structures::{check_homomorphism, check_isomorphism, fixtures, free_term_structure};
use fmtlab_core::{Error, Structure, Vocabulary};
use proptest::prelude::*;

const NONE: [&str; 0] = [];

fn names(m: &fmtlab_core::Morphism) -> Vec<(String, String)> {
    m.to_names().into_iter().collect()
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn finds_homomorphisms() {
    let (p3, k2, k3) = (fixtures::p3(), fixtures::k2(), fixtures::k3());
    let m = find_homomorphism(&p3, &k2, &[], SearchBudget::default()).unwrap().into_result().unwrap().unwrap();
    let folds = [pairs(&[("a", "x"), ("b", "y"), ("c", "x")]), pairs(&[("a", "y"), ("b", "x"), ("c", "y")])];
    assert!(folds.contains(&names(&m)));

    let outcome = find_homomorphism(&k3, &k2, &[], SearchBudget::default()).unwrap();
    assert!(matches!(outcome, HomOutcome::Absent));
    assert!(outcome.is_complete());

    let c4 = fixtures::c4();
    let pins: Vec<(usize, usize)> = (0..c4.size()).map(|x| (x, x)).collect();
    let m = find_homomorphism(&c4, &c4, &pins, SearchBudget::default()).unwrap().into_result().unwrap().unwrap();
    assert!(m.is_identity());
}

#[test]
fn budget_exhaustion_is_not_absence() {
    let big = fixtures::cycle(9);
    let outcome = find_homomorphism(&big, &fixtures::k2(), &[], SearchBudget::nodes(1)).unwrap();
    assert!(matches!(outcome, HomOutcome::Exhausted { .. }));
    assert!(matches!(outcome.into_result(), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn enumerates_homomorphisms() {
    let (k2, k3, pt1) = (fixtures::k2(), fixtures::k3(), fixtures::pt1());
    assert_eq!(find_all_homomorphisms(&k2, &k2, &[], 1000).unwrap().len(), 2);
    assert_eq!(find_all_homomorphisms(&pt1, &k3, &[], 1000).unwrap().len(), 3);
    let s2 = Vocabulary::graph_with_constants(2);
    let init = free_term_structure(&s2);
    for d in structures_up_to_iso(&s2, 2).unwrap() {
        assert_eq!(find_all_homomorphisms(&init, &d, &[], 1000).unwrap().len(), 1);
    }
    assert!(matches!(find_all_homomorphisms(&fixtures::cycle(40), &k3, &[], 1000), Err(Error::CapExceeded(_))));
}

#[test]
fn surjective_homomorphisms() {
    let b = SearchBudget::default();
    assert!(exists_surjective_homomorphism(&fixtures::p3(), &fixtures::k2(), b).unwrap());
    assert!(!exists_surjective_homomorphism(&fixtures::k2(), &fixtures::k3(), b).unwrap());
    assert!(exists_surjective_homomorphism(&fixtures::c4(), &fixtures::c4(), b).unwrap());
}

#[test]
fn retractions() {
    let p3 = fixtures::p3();
    let r = find_retraction(&p3, &[0, 1], SearchBudget::default()).unwrap().into_result().unwrap().unwrap();
    assert_eq!(names(&r), pairs(&[("a", "a"), ("b", "b"), ("c", "a")]));
    let k3 = fixtures::k3();
    assert!(matches!(find_retraction(&k3, &[0, 1], SearchBudget::default()).unwrap(), HomOutcome::Absent));
    let all: Vec<usize> = (0..p3.size()).collect();
    let id = find_retraction(&p3, &all, SearchBudget::default()).unwrap().into_result().unwrap().unwrap();
    assert!(id.is_identity());
}

#[test]
fn endomorphism_counts() {
    let k2 = endomorphisms(&fixtures::k2(), 100).unwrap();
    assert_eq!(k2.len(), 2);
    assert!(k2.iter().any(|m| m.is_identity()));
    assert_eq!(endomorphisms(&fixtures::loop1(), 100).unwrap().len(), 1);
    // Brute force over all 27 maps of the path: walks a-b-a, a-b-c, b-a-b,
    // b-c-b, c-b-a, c-b-c.
    let p3 = fixtures::p3();
    let oracle = brute_homs(&p3, &p3);
    assert_eq!(oracle.len(), 6);
    let found: Vec<Vec<usize>> = endomorphisms(&p3, 100).unwrap().iter().map(|m| m.map().to_vec()).collect();
    assert_eq!(found, oracle);
}

#[test]
fn homomorphic_equivalence() {
    let b = SearchBudget::default();
    assert!(hom_equivalent(&fixtures::p3(), &fixtures::k2(), &NONE, b).unwrap());
    assert!(!hom_equivalent(&fixtures::k3(), &fixtures::k2(), &NONE, b).unwrap());
    assert!(hom_equivalent(&fixtures::c4(), &fixtures::c4(), &NONE, b).unwrap());
}

#[test]
fn search_agrees_with_brute_force_on_small_structures() {
    for vocab in [Vocabulary::graph(), Vocabulary::graph_with_constants(1)] {
        let all = structures_up_to_iso(&vocab, 3).unwrap();
        for a in &all {
            for b in &all {
                let found = HomSearch::new(a, b).unwrap().all_maps().unwrap();
                assert_eq!(found, brute_homs(a, b), "{a:?} -> {b:?}");
                assert_eq!(find_homomorphism(a, b, &[], SearchBudget::default()).unwrap().is_found(), !found.is_empty());
            }
        }
    }
}

#[test]
fn existence_agrees_with_enumeration_up_to_four_elements() {
    let all = structures_up_to_iso(&Vocabulary::graph(), 4).unwrap();
    let small = structures_up_to_iso(&Vocabulary::graph(), 2).unwrap();
    // Every four-element structure against every structure with at most two
    // elements, in both directions.
    for a in &all {
        for b in &small {
            for (x, y) in [(a, b), (b, a)] {
                let found = find_homomorphism(x, y, &[], SearchBudget::default()).unwrap();
                assert!(found.is_complete());
                assert_eq!(found.is_found(), !find_all_homomorphisms(x, y, &[], 1 << 20).unwrap().is_empty());
            }
        }
    }
}

#[test]
fn mutual_surjections_imply_isomorphism() {
    // A surjection between equal-size structures is a bijection and cannot
    // decrease the tuple count, so mutual surjections only occur within
    // groups of equal size and equal tuple count.
    let b = SearchBudget::default();
    for size in 0..=4 {
        let mut groups: BTreeMap<usize, Vec<Structure>> = BTreeMap::new();
        for_each_structure(&Vocabulary::graph(), size, |s| groups.entry(s.tuple_count()).or_default().push(s)).unwrap();
        for group in groups.values() {
            for (i, x) in group.iter().enumerate() {
                for y in &group[i..] {
                    let both = exists_surjective_homomorphism(x, y, b).unwrap()
                        && exists_surjective_homomorphism(y, x, b).unwrap();
                    if both {
                        let iso = HomSearch::new(x, y)
                            .unwrap()
                            .injective()
                            .all_maps()
                            .unwrap()
                            .into_iter()
                            .any(|m| check_isomorphism(&m, x, y).unwrap());
                        assert!(iso);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn search_is_sound_and_complete(a in common::arb_graph(4), b in common::arb_graph(4)) {
        let maps = HomSearch::new(&a, &b).unwrap().all_maps().unwrap();
        for m in &maps {
            prop_assert!(check_homomorphism(m, &a, &b).unwrap());
        }
        prop_assert_eq!(maps, brute_homs(&a, &b));
        let first = find_homomorphism(&a, &b, &[], SearchBudget::default()).unwrap();
        prop_assert_eq!(first.is_found(), brute_hom_exists(&a, &b));
    }

    #[test]
    fn pinned_search_respects_pins(a in common::arb_pointed(4), b in common::arb_pointed(4), x in 0usize..4, y in 0usize..4) {
        let (x, y) = (x % a.size(), y % b.size());
        let found = HomSearch::new(&a, &b).unwrap().pin(x, y).all_maps().unwrap();
        let oracle: Vec<Vec<usize>> = brute_homs(&a, &b).into_iter().filter(|m| m[x] == y).collect();
        prop_assert_eq!(found, oracle);
    }

    #[test]
    fn injective_and_surjective_filters(a in common::arb_graph(3), b in common::arb_graph(3)) {
        let injective = HomSearch::new(&a, &b).unwrap().injective().all_maps().unwrap();
        let surjective = HomSearch::new(&a, &b).unwrap().surjective().all_maps().unwrap();
        let all = brute_homs(&a, &b);
        let inj: Vec<_> = all.iter().filter(|m| {
            let mut s = m.to_vec();
            s.sort();
            s.dedup();
            s.len() == m.len()
        }).cloned().collect();
        let sur: Vec<_> = all.iter().filter(|m| (0..b.size()).all(|y| m.contains(&y))).cloned().collect();
        prop_assert_eq!(injective, inj);
        prop_assert_eq!(surjective, sur);
    }

    #[test]
    fn isomorphism_search_matches_brute_force(a in common::arb_graph(4), b in common::arb_graph(4)) {
        prop_assert_eq!(fmtlab_core::homsearch::are_isomorphic(&a, &b).unwrap(), brute_isomorphic(&a, &b));
        let self_maps = brute_homs(&a, &a);
        prop_assert!(self_maps.iter().all(|m| is_hom(m, &a, &a)));
    }
}
