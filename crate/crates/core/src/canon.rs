//! Canonical forms under relabelling.
//!
//! The canonical key of a structure is the least encoding over all
//! permutations of its (non-fixed) elements; the encoding lists constant
//! images followed by each relation's sorted tuple list. Feasible for up to
//! [`CANON_LIMIT`] free elements.

use crate::error::{Error, Result};
use crate::homsearch;
use crate::structures::Structure;

pub const CANON_LIMIT: usize = 8;

/// Calls `f` with every permutation of `items` (Heap's algorithm).
pub(crate) fn for_each_permutation(items: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn encode(s: &Structure, perm: &[usize], buf: &mut Vec<usize>, tuples: &mut Vec<Vec<usize>>) {
    buf.clear();
    buf.push(s.size());
    buf.extend(s.constants().iter().map(|&c| perm[c]));
    for r in s.relations() {
        tuples.clear();
        tuples.extend(r.tuples().map(|t| t.iter().map(|&x| perm[x]).collect::<Vec<_>>()));
        tuples.sort_unstable();
        buf.push(usize::MAX);
        for t in tuples.iter() {
            buf.extend_from_slice(t);
        }
    }
}

/// Least encoding and the permutation (old index → new index) attaining it.
/// Elements listed in `fixed` keep their position.
pub fn canonical_permutation(s: &Structure, fixed: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let free: Vec<usize> = (0..s.size()).filter(|x| !fixed.contains(x)).collect();
    if free.len() > CANON_LIMIT {
        return Err(Error::CapExceeded(format!(
            "canonical form of {} free elements exceeds the limit {CANON_LIMIT}",
            free.len()
        )));
    }
    let mut best_key: Option<Vec<usize>> = None;
    let mut best_perm = Vec::new();
    let mut perm: Vec<usize> = (0..s.size()).collect();
    let mut slots = free.clone();
    let mut buf = Vec::new();
    let mut tuples = Vec::new();
    for_each_permutation(&mut slots, &mut |targets| {
        for (&x, &y) in free.iter().zip(targets) {
            perm[x] = y;
        }
        encode(s, &perm, &mut buf, &mut tuples);
        if best_key.as_ref().is_none_or(|k| buf < *k) {
            best_key = Some(buf.clone());
            best_perm = perm.clone();
        }
    });
    Ok((best_key.expect("at least one permutation"), best_perm))
}

/// Isomorphism-invariant key; equal keys ⇔ isomorphic (over `fixed`).
pub fn canonical_key(s: &Structure, fixed: &[usize]) -> Result<Vec<usize>> {
    canonical_permutation(s, fixed).map(|(k, _)| k)
}

/// The relabelling of `s` (same name set, `fixed` kept in place) whose
/// encoding is least.
pub fn canonical_relabel(s: &Structure, fixed: &[usize]) -> Result<Structure> {
    let (_, perm) = canonical_permutation(s, fixed)?;
    let names = s.elements().to_vec();
    s.renamed(|i, _| names[perm[i]].clone())
}

/// Keeps the first member of every isomorphism class, preserving order.
pub fn dedup_isomorphic(items: Vec<Structure>) -> Result<Vec<Structure>> {
    let mut keys: Vec<Option<Vec<usize>>> = Vec::new();
    let mut out: Vec<Structure> = Vec::new();
    'next: for s in items {
        let key = if s.size() <= CANON_LIMIT { Some(canonical_key(&s, &[])?) } else { None };
        for (t, k) in out.iter().zip(&keys) {
            let same = match (&key, k) {
                (Some(a), Some(b)) => a == b,
                (None, None) => homsearch::are_isomorphic(&s, t)?,
                _ => false,
            };
            if same {
                continue 'next;
            }
        }
        keys.push(key);
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures;

    #[test]
    fn heap_visits_all_permutations() {
        let mut items = vec![0, 1, 2, 3];
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(&mut items, &mut |p| {
            seen.insert(p.to_vec());
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn keys_separate_isomorphism_classes() {
        let p3 = fixtures::p3();
        let relabelled = p3.renamed(|_, n| format!("{n}'")).unwrap();
        let shuffled = p3.renamed(|i, _| ["q", "a", "z"][i].to_string()).unwrap();
        assert_eq!(canonical_key(&p3, &[]).unwrap(), canonical_key(&relabelled, &[]).unwrap());
        assert_eq!(canonical_key(&p3, &[]).unwrap(), canonical_key(&shuffled, &[]).unwrap());
        assert_ne!(canonical_key(&p3, &[]).unwrap(), canonical_key(&fixtures::k3(), &[]).unwrap());
        // Pinning position 1 at the middle versus at an endpoint.
        let star = p3.renamed(|i, _| ["b", "a", "c"][i].to_string()).unwrap();
        assert_ne!(canonical_key(&p3, &[1]).unwrap(), canonical_key(&star, &[1]).unwrap());
        let dedup = dedup_isomorphic(vec![p3.clone(), fixtures::k3(), relabelled, shuffled]).unwrap();
        assert_eq!(dedup, vec![p3, fixtures::k3()]);
    }
}
