//! Shared strategies and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use fmtlab_core::structures::letter_names;
use fmtlab_core::{Structure, Vocabulary};
use proptest::prelude::*;

/// Graph on `n` letter-named elements with edge `(i, j)` iff bit `i*n + j`
/// of `mask` is set.
pub fn graph(n: usize, mask: u64) -> Structure {
    pointed(&Vocabulary::graph(), n, mask, &[])
}

/// As [`graph`], over `vocab` (whose only relation is binary) with the
/// given constant interpretations.
pub fn pointed(vocab: &Vocabulary, n: usize, mask: u64, constants: &[usize]) -> Structure {
    let mut tuples = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if mask >> (i * n + j) & 1 == 1 {
                tuples.push(vec![i, j]);
            }
        }
    }
    Structure::from_parts(vocab.clone(), letter_names(n), vec![tuples], constants.to_vec()).unwrap()
}

pub fn arb_graph(max: usize) -> impl Strategy<Value = Structure> {
    (0..=max).prop_flat_map(|n| (Just(n), 0..(1u64 << (n * n)))).prop_map(|(n, m)| graph(n, m))
}

/// Nonempty graphs with one constant `c1`.
pub fn arb_pointed(max: usize) -> impl Strategy<Value = Structure> {
    (1..=max)
        .prop_flat_map(|n| (Just(n), 0..(1u64 << (n * n)), 0..n))
        .prop_map(|(n, m, c)| pointed(&Vocabulary::graph_with_constants(1), n, m, &[c]))
}

/// Tuple-by-tuple homomorphism test, independent of the library's checker.
pub fn is_hom(map: &[usize], a: &Structure, b: &Structure) -> bool {
    if a.constants().iter().zip(b.constants()).any(|(&x, &y)| map[x] != y) {
        return false;
    }
    for (ra, rb) in a.relations().iter().zip(b.relations()) {
        let target: HashSet<Vec<usize>> = rb.to_vecs().into_iter().collect();
        for t in ra.to_vecs() {
            let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            if !target.contains(&image) {
                return false;
            }
        }
    }
    true
}

/// Every map `a -> b` in lexicographic order (first element most significant).
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut t = vec![0; n];
    loop {
        out.push(t.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < m {
                break;
            }
            t[i] = 0;
        }
    }
}

/// All homomorphisms by exhaustive enumeration of maps.
pub fn brute_homs(a: &Structure, b: &Structure) -> Vec<Vec<usize>> {
    all_maps(a.size(), b.size()).into_iter().filter(|m| is_hom(m, a, b)).collect()
}

pub fn brute_hom_exists(a: &Structure, b: &Structure) -> bool {
    all_maps(a.size(), b.size()).iter().any(|m| is_hom(m, a, b))
}

/// Isomorphism by trying every bijection.
pub fn brute_isomorphic(a: &Structure, b: &Structure) -> bool {
    a.size() == b.size()
        && all_maps(a.size(), b.size()).iter().any(|m| {
            let mut seen = vec![false; b.size()];
            m.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
                && is_hom(m, a, b)
                && a.tuple_count() == b.tuple_count()
        })
}
