mod common;

use common::{brute_homs, graph, is_hom, pointed};
use fmtlab_core::cores::is_core;
use fmtlab_core::enumerate::structures_up_to_iso;
use fmtlab_core::gaifman::gaifman_graph;
use fmtlab_core::homsearch::{are_isomorphic, find_all_homomorphisms};
use fmtlab_core::structures::{
    check_homomorphism, check_isomorphism, coequalizer, coproduct, equalizer, expand, fixtures,
    free_term_structure, initial_morphism, product, top, validate, StructureDoc,
};
use fmtlab_core::{Error, Morphism, Structure, Vocabulary};
use proptest::prelude::*;

fn sigma(n: usize) -> Vocabulary {
    Vocabulary::graph_with_constants(n)
}

fn fold() -> Morphism {
    Morphism::from_names(&fixtures::p3(), &fixtures::k2(), &[("a", "x"), ("b", "y"), ("c", "x")]).unwrap()
}

#[test]
fn validation_reports_the_first_violation() {
    validate(&fixtures::k2().to_doc()).unwrap();

    let ternary = r#"{"vocab":{"relations":{"E":2},"constants":[]},"universe":["a","b","c"],
        "relations":{"E":[["a","b","c"]]},"constants":{}}"#;
    let doc: StructureDoc = serde_json::from_str(ternary).unwrap();
    assert!(matches!(validate(&doc), Err(Error::Arity { expected: 2, found: 3, .. })));

    let missing = r#"{"vocab":{"relations":{"E":2},"constants":["c1"]},"universe":["a"],
        "relations":{"E":[]},"constants":{}}"#;
    let doc: StructureDoc = serde_json::from_str(missing).unwrap();
    assert!(matches!(validate(&doc), Err(Error::UninterpretedConstant(c)) if c == "c1"));

    let dangling = r#"{"vocab":{"relations":{"E":2}},"universe":["a"],"relations":{"E":[["a","z"]]}}"#;
    assert!(matches!(Structure::from_json(dangling), Err(Error::DanglingElement(_))));
    let empty_with_constant = r#"{"vocab":{"relations":{"E":2},"constants":["c1"]},"universe":[]}"#;
    assert!(Structure::from_json(empty_with_constant).is_err());
}

#[test]
fn documents_are_canonical() {
    for name in fixtures::NAMES {
        let s = fixtures::by_name(name).unwrap();
        let text = s.to_json();
        let back = Structure::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }
    // Tuple and element order in the input does not matter.
    let a = Structure::from_json(r#"{"vocab":{"relations":{"E":2}},"universe":["y","x"],"relations":{"E":[["y","x"],["x","y"]]}}"#)
        .unwrap();
    assert_eq!(a.to_json(), fixtures::k2().to_json());
}

#[test]
fn homomorphism_checks() {
    let (p3, k2, k3) = (fixtures::p3(), fixtures::k2(), fixtures::k3());
    assert!(check_homomorphism(fold().map(), &p3, &k2).unwrap());
    assert!(check_homomorphism(&[0, 1, 2], &k3, &k3).unwrap());
    let a = pointed(&sigma(1), 2, 0, &[0]);
    let b = pointed(&sigma(1), 2, 0, &[0]);
    assert!(!check_homomorphism(&[1, 1], &a, &b).unwrap());
    assert!(!check_homomorphism(&[0], &k2, &k3).unwrap());
    assert!(check_homomorphism(&[0, 1], &k2, &b).is_err());
    assert!(check_homomorphism(&[0, 1], &k2, &k3).unwrap());
}

#[test]
fn isomorphism_checks() {
    let k3 = fixtures::k3();
    assert!(check_isomorphism(&[0, 1, 2], &k3, &k3).unwrap());
    assert!(!check_isomorphism(fold().map(), &fixtures::p3(), &fixtures::k2()).unwrap());
    let k2 = fixtures::k2();
    let k2_loop = Structure::builder(Vocabulary::graph())
        .elements(["x", "y"])
        .edge("E", "x", "y")
        .tuple("E", ["x", "x"])
        .build()
        .unwrap();
    assert!(check_homomorphism(&[0, 1], &k2, &k2_loop).unwrap());
    assert!(!check_isomorphism(&[0, 1], &k2, &k2_loop).unwrap());
}

#[test]
fn products() {
    let k2 = fixtures::k2();
    let p = product(&k2, &k2).unwrap();
    assert_eq!(p.structure.size(), 4);
    assert_eq!(p.structure.tuple_count(), 4);
    // Two components, each a single symmetric edge.
    let g = gaifman_graph(&p.structure);
    assert_eq!(g.edges().len(), 2);
    assert!(p.structure.elements().contains(&"(x,y)".to_string()));

    for a in [fixtures::p3(), fixtures::c4(), fixtures::loop1()] {
        let t = product(&a, &top(a.vocab())).unwrap().structure;
        assert!(are_isomorphic(&t, &a).unwrap());
    }

    let a = pointed(&sigma(1), 2, 0b0001, &[0]);
    let b = pointed(&sigma(1), 2, 0b1000, &[1]);
    let p = product(&a, &b).unwrap().structure;
    assert_eq!(p.name(p.constant("c1").unwrap()), "(a,b)");
}

#[test]
fn coproducts() {
    let c = coproduct(&fixtures::k2(), &fixtures::k3()).unwrap();
    assert_eq!(c.structure.size(), 5);
    assert_eq!(c.structure.tuple_count(), 8);

    let looped = pointed(&sigma(1), 1, 1, &[0]);
    let glued = coproduct(&looped, &looped).unwrap().structure;
    assert_eq!(glued.size(), 1);
    assert_eq!(glued.tuple_count(), 1);

    for a in [fixtures::p3(), pointed(&sigma(1), 3, 0b000_100_010, &[2])] {
        let s = coproduct(&a, &free_term_structure(a.vocab())).unwrap().structure;
        assert!(are_isomorphic(&s, &a).unwrap());
    }
}

#[test]
fn equalizers() {
    let f = fold();
    let e = equalizer(&f, &f).unwrap();
    assert_eq!(e.structure, fixtures::p3());

    let p3 = fixtures::p3();
    let id = Morphism::identity(&p3);
    let fold_end = Morphism::from_names(&p3, &p3, &[("a", "a"), ("b", "b"), ("c", "a")]).unwrap();
    let e = equalizer(&id, &fold_end).unwrap();
    assert_eq!(e.structure.elements(), &["a", "b"]);
    assert_eq!(e.structure.tuple_count(), 2);

    // Constants always lie in the agreement set.
    let a = pointed(&sigma(1), 2, 0, &[0]);
    let b = pointed(&sigma(1), 2, 0, &[0]);
    let f = Morphism::new(a.clone(), b.clone(), vec![0, 0]).unwrap();
    let g = Morphism::new(a.clone(), b.clone(), vec![0, 1]).unwrap();
    let e = equalizer(&f, &g).unwrap();
    assert_eq!(e.structure.elements(), &["a"]);
    assert!(e.structure.constant("c1").is_some());

    assert!(matches!(equalizer(&fold(), &Morphism::identity(&p3)), Err(Error::NotParallel)));
}

#[test]
fn coequalizers() {
    let f = fold();
    assert_eq!(coequalizer(&f, &f).unwrap().structure, fixtures::k2());

    let (pt, k2) = (fixtures::pt1(), fixtures::k2());
    let to_x = Morphism::new(pt.clone(), k2.clone(), vec![0]).unwrap();
    let to_y = Morphism::new(pt.clone(), k2.clone(), vec![1]).unwrap();
    let q = coequalizer(&to_x, &to_y).unwrap().structure;
    assert_eq!(q.size(), 1);
    assert!(are_isomorphic(&q, &fixtures::loop1()).unwrap());

    let a = pointed(&sigma(1), 1, 0, &[0]);
    let b = pointed(&sigma(1), 3, 0, &[1]);
    let f = Morphism::new(a.clone(), b.clone(), vec![1]).unwrap();
    let q = coequalizer(&f, &f).unwrap();
    assert_eq!(q.quotient.apply(1), q.structure.constant("c1").unwrap());
}

#[test]
fn initial_and_terminal_objects() {
    assert!(free_term_structure(&Vocabulary::graph()).is_empty());
    let s2 = free_term_structure(&sigma(2));
    assert_eq!(s2.elements(), &["c1", "c2"]);
    assert_eq!(s2.tuple_count(), 0);
    let s1 = free_term_structure(&sigma(1));
    assert_eq!(s1.size(), 1);
    assert_eq!(s1.tuple_count(), 0);

    let a = pointed(&sigma(1), 2, 0b0110, &[0]);
    let init = initial_morphism(&sigma(1), &a).unwrap();
    assert_eq!(init.to_names().into_iter().collect::<Vec<_>>(), vec![("c1".to_string(), "a".to_string())]);
    assert!(initial_morphism(&Vocabulary::graph(), &fixtures::k3()).unwrap().map().is_empty());

    let t = top(&Vocabulary::graph());
    assert_eq!(t, fixtures::loop1().renamed(|_, _| "1".into()).unwrap());
    assert_eq!(find_all_homomorphisms(&fixtures::k3(), &t, &[], 1000).unwrap().len(), 1);
    assert!(is_core(&t, &[]).unwrap());
}

#[test]
fn initial_and_terminal_maps_are_unique() {
    for vocab in [Vocabulary::graph(), sigma(1), sigma(2)] {
        let init = free_term_structure(&vocab);
        let term = top(&vocab);
        for d in structures_up_to_iso(&vocab, 3).unwrap() {
            let from = brute_homs(&init, &d);
            assert_eq!(from.len(), 1);
            assert_eq!(from[0], initial_morphism(&vocab, &d).unwrap().map());
            assert_eq!(brute_homs(&d, &term).len(), 1);
        }
    }
}

#[test]
fn expansions() {
    let k2 = fixtures::k2();
    let e = expand(&k2, &[0]).unwrap();
    assert_eq!(e.vocab(), &sigma(1));
    assert_eq!(e.name(e.constant("c1").unwrap()), "x");
    assert_eq!(expand(&k2, &[]).unwrap(), k2);
    // Homomorphisms of expansions must send the tuple to the tuple.
    let ea = expand(&k2, &[0]).unwrap();
    let eb = expand(&k2, &[1]).unwrap();
    assert!(!check_homomorphism(&[0, 1], &ea, &eb).unwrap());
    assert!(check_homomorphism(&[1, 0], &ea, &eb).unwrap());
    assert!(matches!(expand(&k2, &[5]), Err(Error::DanglingElement(_))));
}

/// Codes of maps, for comparing sets of maps.
fn code(map: &[usize]) -> Vec<usize> {
    map.to_vec()
}

fn small_tests() -> Vec<Structure> {
    structures_up_to_iso(&Vocabulary::graph(), 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_mediates_uniquely(an in 0usize..=4, am in any::<u64>(), bn in 0usize..=4, bm in any::<u64>()) {
        let a = graph(an, am & ((1 << (an * an)) - 1));
        let b = graph(bn, bm & ((1 << (bn * bn)) - 1));
        let p = product(&a, &b).unwrap();
        prop_assert!(is_hom(p.left.map(), &p.structure, &a));
        prop_assert!(is_hom(p.right.map(), &p.structure, &b));
        for d in small_tests() {
            let into_p = brute_homs(&d, &p.structure);
            for h1 in brute_homs(&d, &a) {
                for h2 in brute_homs(&d, &b) {
                    let mediating = into_p
                        .iter()
                        .filter(|u| {
                            u.iter().enumerate().all(|(x, &y)| p.left.apply(y) == h1[x] && p.right.apply(y) == h2[x])
                        })
                        .count();
                    prop_assert_eq!(mediating, 1);
                }
            }
        }
    }

    #[test]
    fn coproduct_mediates_uniquely(an in 0usize..=3, am in any::<u64>(), bn in 0usize..=3, bm in any::<u64>()) {
        let a = graph(an, am & ((1 << (an * an)) - 1));
        let b = graph(bn, bm & ((1 << (bn * bn)) - 1));
        let c = coproduct(&a, &b).unwrap();
        prop_assert!(is_hom(c.left.map(), &a, &c.structure));
        prop_assert!(is_hom(c.right.map(), &b, &c.structure));
        for d in small_tests() {
            let out_of = brute_homs(&c.structure, &d);
            for h1 in brute_homs(&a, &d) {
                for h2 in brute_homs(&b, &d) {
                    let mediating = out_of
                        .iter()
                        .filter(|u| {
                            (0..a.size()).all(|x| u[c.left.apply(x)] == h1[x])
                                && (0..b.size()).all(|x| u[c.right.apply(x)] == h2[x])
                        })
                        .count();
                    prop_assert_eq!(mediating, 1);
                }
            }
        }
    }

    #[test]
    fn equalizer_and_coequalizer_mediate_uniquely(
        an in 1usize..=3, am in any::<u64>(), bn in 1usize..=3, bm in any::<u64>(), pick in any::<(usize, usize)>()
    ) {
        let a = graph(an, am & ((1 << (an * an)) - 1));
        let b = graph(bn, bm & ((1 << (bn * bn)) - 1));
        let homs = brute_homs(&a, &b);
        prop_assume!(!homs.is_empty());
        let f = Morphism::new(a.clone(), b.clone(), homs[pick.0 % homs.len()].clone()).unwrap();
        let g = Morphism::new(a.clone(), b.clone(), homs[pick.1 % homs.len()].clone()).unwrap();

        let e = equalizer(&f, &g).unwrap();
        prop_assert!(is_hom(e.inclusion.map(), &e.structure, &a));
        let q = coequalizer(&f, &g).unwrap();
        prop_assert!(is_hom(q.quotient.map(), &b, &q.structure));
        for d in small_tests() {
            let into_e = brute_homs(&d, &e.structure);
            for h in brute_homs(&d, &a) {
                if h.iter().all(|&x| f.apply(x) == g.apply(x)) {
                    let n = into_e.iter().filter(|u| u.iter().map(|&y| e.inclusion.apply(y)).eq(h.iter().copied())).count();
                    prop_assert_eq!(n, 1);
                }
            }
            let out_of_q = brute_homs(&q.structure, &d);
            for h in brute_homs(&b, &d) {
                if (0..a.size()).all(|x| h[f.apply(x)] == h[g.apply(x)]) {
                    let n = out_of_q.iter().filter(|u| (0..b.size()).map(|y| u[q.quotient.apply(y)]).eq(h.iter().copied())).count();
                    prop_assert_eq!(n, 1);
                }
            }
        }
    }

    #[test]
    fn isomorphisms_are_homomorphisms_both_ways(n in 0usize..=4, mask in any::<u64>(), perm in any::<u64>()) {
        let a = graph(n, mask & ((1u64 << (n * n)) - 1));
        // A random bijection applied to a random structure.
        let mut map: Vec<usize> = (0..n).collect();
        let mut seed = perm;
        for i in (1..n).rev() {
            map.swap(i, (seed % (i as u64 + 1)) as usize);
            seed /= i as u64 + 1;
        }
        let tuples: Vec<Vec<usize>> = a.relation(0).to_vecs().into_iter().map(|t| t.iter().map(|&x| map[x]).collect()).collect();
        let b = Structure::from_parts(Vocabulary::graph(), a.elements().to_vec(), vec![tuples], vec![]).unwrap();
        prop_assert!(check_isomorphism(&map, &a, &b).unwrap());
        let mut inverse = vec![0; n];
        for (x, &y) in map.iter().enumerate() {
            inverse[y] = x;
        }
        prop_assert!(check_homomorphism(&map, &a, &b).unwrap());
        prop_assert!(check_homomorphism(&inverse, &b, &a).unwrap());
        // Any map passing the isomorphism check passes both hom checks.
        for m in common::all_maps(n, n) {
            if check_isomorphism(&m, &a, &a).unwrap() {
                let mut inv = vec![0; n];
                for (x, &y) in m.iter().enumerate() {
                    inv[y] = x;
                }
                prop_assert!(check_homomorphism(&m, &a, &a).unwrap() && check_homomorphism(&inv, &a, &a).unwrap());
            }
        }
    }

    #[test]
    fn composition_of_homomorphisms_is_a_homomorphism(
        a in common::arb_graph(3), b in common::arb_graph(3), c in common::arb_graph(3), pick in any::<(usize, usize)>()
    ) {
        let ab = brute_homs(&a, &b);
        let bc = brute_homs(&b, &c);
        prop_assume!(!ab.is_empty() && !bc.is_empty());
        let f = Morphism::new(a.clone(), b.clone(), ab[pick.0 % ab.len()].clone()).unwrap();
        let g = Morphism::new(b.clone(), c.clone(), bc[pick.1 % bc.len()].clone()).unwrap();
        let h = f.then(&g).unwrap();
        prop_assert!(is_hom(h.map(), &a, &c));
        prop_assert_eq!(code(h.map()), f.map().iter().map(|&x| g.apply(x)).collect::<Vec<_>>());
    }
}
