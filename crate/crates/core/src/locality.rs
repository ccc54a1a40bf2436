//! Instance checks for Hanf, Gaifman and weak locality.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::canon::{self, CANON_LIMIT};
use crate::error::{Error, Result};
use crate::gaifman::{ball, neighborhood};
use crate::games::{ef_equivalent, k_hom_equivalent};
use crate::homsearch::are_isomorphic;
use crate::matching::perfect_matching;
use crate::structures::Structure;

/// Equivalence used to compare neighborhoods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Equiv {
    Iso,
    /// `≡_ℓ`.
    Ef(usize),
    /// `⇄^ℓ`.
    Khom(usize),
}

impl fmt::Display for Equiv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equiv::Iso => f.write_str("iso"),
            Equiv::Ef(l) => write!(f, "ef:{l}"),
            Equiv::Khom(l) => write!(f, "khom:{l}"),
        }
    }
}

impl FromStr for Equiv {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("unknown equivalence {s:?} (expected iso, ef:L or khom:L)"));
        if s == "iso" {
            return Ok(Equiv::Iso);
        }
        let (kind, level) = s.split_once(':').ok_or_else(bad)?;
        let level: usize = level.parse().map_err(|_| bad())?;
        match kind {
            "ef" => Ok(Equiv::Ef(level)),
            "khom" => Ok(Equiv::Khom(level)),
            _ => Err(bad()),
        }
    }
}

impl Equiv {
    pub fn holds(&self, a: &Structure, b: &Structure) -> Result<bool> {
        if !a.same_vocab(b) {
            return Ok(false);
        }
        match *self {
            Equiv::Iso => are_isomorphic(a, b),
            Equiv::Ef(l) => ef_equivalent(a, &[], b, &[], l),
            Equiv::Khom(l) => k_hom_equivalent::<&str>(a, b, l, &[]),
        }
    }
}

/// Interns structures by a canonical key and caches pairwise verdicts.
struct EquivCache {
    equiv: Equiv,
    keys: HashMap<String, usize>,
    reps: Vec<Structure>,
    verdicts: HashMap<(usize, usize), bool>,
}

impl EquivCache {
    fn new(equiv: Equiv) -> Self {
        EquivCache { equiv, keys: HashMap::new(), reps: Vec::new(), verdicts: HashMap::new() }
    }

    fn intern(&mut self, s: Structure) -> Result<usize> {
        let key = if s.size() <= CANON_LIMIT {
            let k = canon::canonical_key(&s, &[])?;
            format!("{:?}|{:?}", s.vocab(), k)
        } else {
            s.to_json()
        };
        let next = self.reps.len();
        let id = *self.keys.entry(key).or_insert(next);
        if id == next {
            self.reps.push(s);
        }
        Ok(id)
    }

    fn equivalent(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Ok(true);
        }
        let key = (i.min(j), i.max(j));
        if let Some(&v) = self.verdicts.get(&key) {
            return Ok(v);
        }
        let v = self.equiv.holds(&self.reps[i], &self.reps[j])?;
        self.verdicts.insert(key, v);
        Ok(v)
    }
}

/// A bijection `f: A -> B` such that the radius-`d` neighborhoods of `āc`
/// and `b̄f(c)` are equivalent for every `c`, or `None` if none exists.
pub fn hanf_check(
    a: &Structure,
    at: &[usize],
    b: &Structure,
    bt: &[usize],
    d: usize,
    equiv: Equiv,
) -> Result<Option<Vec<usize>>> {
    a.require_same_vocab(b)?;
    if at.len() != bt.len() {
        return Err(Error::Malformed(format!("tuples of lengths {} and {}", at.len(), bt.len())));
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    let mut cache = EquivCache::new(equiv);
    let mut ids_a = Vec::with_capacity(a.size());
    for c in 0..a.size() {
        let mut t = at.to_vec();
        t.push(c);
        ids_a.push(cache.intern(neighborhood(a, &t, d)?)?);
    }
    let mut ids_b = Vec::with_capacity(b.size());
    for e in 0..b.size() {
        let mut t = bt.to_vec();
        t.push(e);
        ids_b.push(cache.intern(neighborhood(b, &t, d)?)?);
    }
    let mut adj = vec![Vec::new(); a.size()];
    for (c, &ia) in ids_a.iter().enumerate() {
        for (e, &ib) in ids_b.iter().enumerate() {
            if cache.equivalent(ia, ib)? {
                adj[c].push(e);
            }
        }
    }
    Ok(perfect_matching(&adj, b.size()))
}

/// Premise of the Gaifman-locality implication: the whole structures are
/// equivalent and so are the radius-`d` neighborhoods of the tuples.
pub fn gaifman_check(a: &Structure, at: &[usize], b: &Structure, bt: &[usize], d: usize, equiv: Equiv) -> Result<bool> {
    a.require_same_vocab(b)?;
    if at.len() != bt.len() {
        return Err(Error::Malformed(format!("tuples of lengths {} and {}", at.len(), bt.len())));
    }
    Ok(equiv.holds(a, b)? && equiv.holds(&neighborhood(a, at, d)?, &neighborhood(b, bt, d)?)?)
}

/// Premise of weak locality: the neighborhoods of `at` and `bt` in `a` are
/// equivalent and the two balls are disjoint.
pub fn weakly_local_premise(a: &Structure, at: &[usize], bt: &[usize], d: usize, equiv: Equiv) -> Result<bool> {
    if at.len() != bt.len() {
        return Err(Error::Malformed(format!("tuples of lengths {} and {}", at.len(), bt.len())));
    }
    let (ba, bb) = (ball(a, at, d)?, ball(a, bt, d)?);
    if ba.iter().any(|x| bb.contains(x)) {
        return Ok(false);
    }
    equiv.holds(&neighborhood(a, at, d)?, &neighborhood(a, bt, d)?)
}
