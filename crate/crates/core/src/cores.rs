//! Cores over a fixed element set and the homomorphism-order quotient.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::canon;
use crate::error::{Error, Result};
use crate::homsearch::{self, HomSearch, SearchBudget};
use crate::structures::{Morphism, Structure};

fn fixed_set(a: &Structure, over: &[usize]) -> Result<Vec<bool>> {
    let mut fixed = vec![false; a.size()];
    for &x in over {
        if x >= a.size() {
            return Err(Error::DanglingElement(format!("#{x}")));
        }
        fixed[x] = true;
    }
    for &c in a.constants() {
        fixed[c] = true;
    }
    Ok(fixed)
}

/// An endomorphism fixing `over` whose image misses `v`.
fn avoiding_endomorphism(a: &Structure, over: &[usize], v: usize, reverse: bool) -> Result<Option<Vec<usize>>> {
    let pins: Vec<(usize, usize)> = over.iter().map(|&x| (x, x)).collect();
    let mut search = HomSearch::new(a, a)?.pins(&pins).avoid(v);
    if reverse {
        search = search.reversed();
    }
    search.first_map()
}

/// True iff every endomorphism of `a` fixing `over` pointwise is an
/// automorphism.
pub fn is_core(a: &Structure, over: &[usize]) -> Result<bool> {
    let fixed = fixed_set(a, over)?;
    for v in (0..a.size()).filter(|&v| !fixed[v]) {
        if avoiding_endomorphism(a, over, v, false)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A core together with a retraction onto it.
#[derive(Clone, Debug)]
pub struct Core {
    /// Induced substructure of the input containing the fixed set.
    pub structure: Structure,
    /// Retraction from the input onto `structure`, identity on it.
    pub retraction: Morphism,
}

/// The core of `a` over `over`, scanning elements in index order.
pub fn core(a: &Structure, over: &[usize]) -> Result<Core> {
    let order: Vec<usize> = (0..a.size()).collect();
    core_with_order(a, over, &order)
}

/// The core of `a` over `over`, trying to eliminate elements in `order`.
///
/// Each step finds an endomorphism that misses one element and replaces it
/// by its idempotent power, which is a retraction onto its image.
pub fn core_with_order(a: &Structure, over: &[usize], order: &[usize]) -> Result<Core> {
    let fixed = fixed_set(a, over)?;
    let reverse = order.first() > order.last();
    // retract[x] is the current image of x, always inside `keep`.
    let mut retract: Vec<usize> = (0..a.size()).collect();
    let mut keep: Vec<usize> = (0..a.size()).collect();
    'descend: loop {
        let current = a.induced(&keep)?;
        let local = |x: usize| keep.binary_search(&x).expect("kept element");
        let local_over: Vec<usize> = over.iter().map(|&x| local(x)).collect();
        for &v in order {
            if fixed[v] || keep.binary_search(&v).is_err() {
                continue;
            }
            let Some(h) = avoiding_endomorphism(&current, &local_over, local(v), reverse)? else {
                continue;
            };
            let r = idempotent_power(&h);
            let image: Vec<usize> = {
                let mut img: Vec<usize> = r.iter().map(|&y| keep[y]).collect();
                img.sort_unstable();
                img.dedup();
                img
            };
            for slot in retract.iter_mut() {
                *slot = keep[r[local(*slot)]];
            }
            keep = image;
            continue 'descend;
        }
        let map = retract.iter().map(|&x| local(x)).collect();
        let retraction = Morphism::new(a.clone(), current.clone(), map)?;
        return Ok(Core { structure: current, retraction });
    }
}

/// The power `h^p` with `h^p ∘ h^p = h^p`.
fn idempotent_power(h: &[usize]) -> Vec<usize> {
    let mut p = h.to_vec();
    loop {
        let pp: Vec<usize> = p.iter().map(|&y| p[y]).collect();
        if pp == p {
            return p;
        }
        p = p.iter().map(|&y| h[y]).collect();
    }
}

/// One class of the homomorphism-equivalence quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetClass {
    /// Positions in the input collection.
    pub members: Vec<usize>,
    /// Canonically relabelled core of the first member.
    pub representative: Structure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    pub classes: Vec<PosetClass>,
    /// `order[i][j]` iff class `i` maps to class `j`.
    pub order: Vec<Vec<bool>>,
}

impl Poset {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.order[i][j]
    }

    /// Covering pairs `(i, j)`: `i < j` with nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |i: usize, j: usize| i != j && self.order[i][j];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|m| lt(i, m) && lt(m, j)) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    pub fn to_value(&self, labels: &[String]) -> Value {
        let classes: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                let members: Vec<&str> = c.members.iter().map(|&m| labels[m].as_str()).collect();
                json!({
                    "members": members,
                    "representative": serde_json::to_value(c.representative.to_doc()).expect("document"),
                })
            })
            .collect();
        let hasse: Vec<[usize; 2]> = self.hasse_edges().into_iter().map(|(i, j)| [i, j]).collect();
        json!({ "classes": classes, "hasse": hasse })
    }
}

/// Quotients `collection` by homomorphic equivalence over the elements
/// named in `over` (which every member must contain), ordered by `→_X`.
pub fn quotient_poset<S: AsRef<str>>(collection: &[Structure], over: &[S]) -> Result<Poset> {
    let budget = SearchBudget::default();
    for pair in collection.windows(2) {
        pair[0].require_same_vocab(&pair[1])?;
    }
    let mut classes: Vec<PosetClass> = Vec::new();
    let mut cores: Vec<Structure> = Vec::new();
    'items: for (i, s) in collection.iter().enumerate() {
        for (class, rep) in classes.iter_mut().zip(&cores) {
            if homsearch::hom_equivalent(s, rep, over, budget)? {
                class.members.push(i);
                continue 'items;
            }
        }
        let fixed = s.indices_of(over)?;
        let c = core(s, &fixed)?.structure;
        let fixed_c = c.indices_of(over)?;
        let representative = canon::canonical_relabel(&c, &fixed_c)?;
        cores.push(c);
        classes.push(PosetClass { members: vec![i], representative });
    }
    let n = classes.len();
    let mut order = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            order[i][j] = i == j || homsearch::hom_over(&cores[i], &cores[j], over, budget)?;
        }
    }
    Ok(Poset { classes, order })
}

/// Cores of a collection grouped by isomorphism type, keyed by first
/// occurrence.
pub fn core_classes(collection: &[Structure]) -> Result<BTreeMap<usize, Vec<usize>>> {
    let mut keys: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in collection.iter().enumerate() {
        let key = canon::canonical_key(&core(s, &[])?.structure, &[])?;
        match keys.iter().find(|(k, _)| *k == key) {
            Some(&(_, first)) => out.get_mut(&first).expect("class").push(i),
            None => {
                keys.push((key, i));
                out.insert(i, vec![i]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;
    use crate::homsearch::{are_isomorphic, are_isomorphic_over, endomorphisms};
    use crate::structures::{fixtures, Vocabulary};

    /// Oracle: all endomorphisms fixing `over` are bijective.
    fn brute_is_core(a: &Structure, over: &[usize]) -> bool {
        endomorphisms(a, u64::MAX)
            .unwrap()
            .iter()
            .filter(|h| over.iter().all(|&x| h.apply(x) == x))
            .all(|h| h.is_injective())
    }

    #[test]
    fn small_graph_cores() {
        assert!(is_core(&fixtures::k3(), &[]).unwrap());
        assert!(!is_core(&fixtures::p3(), &[]).unwrap());
        let p3 = fixtures::p3();
        let all: Vec<usize> = (0..3).collect();
        assert!(is_core(&p3, &all).unwrap());
        assert!(are_isomorphic(&core(&p3, &[]).unwrap().structure, &fixtures::k2()).unwrap());
        assert!(are_isomorphic(&core(&fixtures::c4(), &[]).unwrap().structure, &fixtures::k2()).unwrap());
        assert_eq!(core(&p3, &[0, 2]).unwrap().structure, p3);
        assert_eq!(core(&fixtures::k3(), &[]).unwrap().structure, fixtures::k3());
    }

    #[test]
    fn six_cycle_has_no_single_vertex_retract_but_folds_to_an_edge() {
        let c6 = fixtures::cycle(6);
        for v in 0..6 {
            let keep: Vec<usize> = (0..6).filter(|&x| x != v).collect();
            let r = homsearch::find_retraction(&c6, &keep, SearchBudget::default()).unwrap();
            assert!(!r.is_found());
        }
        let c = core(&c6, &[]).unwrap();
        assert!(are_isomorphic(&c.structure, &fixtures::k2()).unwrap());
    }

    #[test]
    fn is_core_matches_brute_force_on_small_structures() {
        let g = Vocabulary::graph();
        for s in enumerate::structures_up_to_iso(&g, 3).unwrap() {
            assert_eq!(is_core(&s, &[]).unwrap(), brute_is_core(&s, &[]), "{s:?}");
            if s.size() > 1 {
                assert_eq!(is_core(&s, &[0]).unwrap(), brute_is_core(&s, &[0]), "{s:?}");
            }
        }
    }

    #[test]
    fn cores_are_retracts_and_minimal() {
        let g = Vocabulary::graph();
        for s in enumerate::structures_up_to_iso(&g, 4).unwrap() {
            let c = core(&s, &[]).unwrap();
            assert!(is_core(&c.structure, &[]).unwrap());
            let inclusion: Vec<usize> =
                c.structure.elements().iter().map(|e| s.index_of(e).unwrap()).collect();
            for (i, &x) in inclusion.iter().enumerate() {
                assert_eq!(c.retraction.apply(x), i);
            }
            // No smaller induced substructure is hom-equivalent.
            for mask in 0u32..(1 << s.size()) {
                let keep: Vec<usize> = (0..s.size()).filter(|&x| mask >> x & 1 == 1).collect();
                if keep.len() < c.structure.size() {
                    let sub = s.induced(&keep).unwrap();
                    assert!(!homsearch::hom_equivalent::<&str>(&s, &sub, &[], SearchBudget::default()).unwrap());
                }
            }
        }
    }

    #[test]
    fn core_embeddings_are_injective_and_split() {
        let g = Vocabulary::graph();
        for s in enumerate::structures_up_to_iso(&g, 3).unwrap() {
            let c = core(&s, &[]).unwrap().structure;
            for h in homsearch::find_all_homomorphisms(&c, &s, &[], u64::MAX).unwrap() {
                assert!(h.is_injective());
                let image: Vec<usize> = h.map().to_vec();
                let r = homsearch::find_retraction(&s, &image, SearchBudget::default()).unwrap();
                assert!(r.is_found());
            }
        }
    }

    #[test]
    fn order_reversal_gives_isomorphic_cores_over_fixed_elements() {
        let g = Vocabulary::graph();
        for s in enumerate::structures_up_to_iso(&g, 4).unwrap() {
            let rev: Vec<usize> = (0..s.size()).rev().collect();
            let over: Vec<usize> = if s.size() > 0 { vec![0] } else { vec![] };
            let names: Vec<&str> = over.iter().map(|&x| s.name(x)).collect();
            let a = core(&s, &over).unwrap().structure;
            let b = core_with_order(&s, &over, &rev).unwrap().structure;
            assert!(are_isomorphic_over(&a, &b, &names).unwrap());
        }
    }

    #[test]
    fn poset_of_small_graphs() {
        let items = vec![fixtures::pt1(), fixtures::k2(), fixtures::p3(), fixtures::c4(), fixtures::k3()];
        let p = quotient_poset::<&str>(&items, &[]).unwrap();
        let members: Vec<Vec<usize>> = p.classes.iter().map(|c| c.members.clone()).collect();
        assert_eq!(members, vec![vec![0], vec![1, 2, 3], vec![4]]);
        assert!(p.leq(0, 1) && p.leq(1, 2) && p.leq(0, 2));
        assert!(!p.leq(1, 0) && !p.leq(2, 1));
        assert_eq!(p.hasse_edges(), vec![(0, 1), (1, 2)]);
        for c in &p.classes {
            assert!(is_core(&c.representative, &[]).unwrap());
        }
        let one = quotient_poset::<&str>(&[fixtures::p3()], &[]).unwrap();
        assert_eq!(one.len(), 1);
        let c = core(&fixtures::c4(), &[]).unwrap().structure;
        assert_eq!(quotient_poset::<&str>(&[fixtures::c4(), c], &[]).unwrap().len(), 1);
    }

    #[test]
    fn core_classes_group_by_core_type() {
        let items = vec![fixtures::k2(), fixtures::k3(), fixtures::p3(), fixtures::c4()];
        let classes = core_classes(&items).unwrap();
        assert_eq!(classes[&0], vec![0, 2, 3]);
        assert_eq!(classes[&1], vec![1]);
    }
}
