//! Ehrenfeucht–Fraïssé games, the existential homomorphism game, k-cores
//! and k-extendability.

use std::collections::HashMap;

use crate::cores;
use crate::error::{Error, Result};
use crate::homsearch::{HomSearch, SearchBudget};
use crate::logic::expand_over;
use crate::structures::{coproduct_all, expand, Structure};

/// A pebbled position: `a[i]` is paired with `b[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GamePosition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub rounds_left: usize,
}

fn check_tuple(s: &Structure, t: &[usize]) -> Result<()> {
    match t.iter().find(|&&x| x >= s.size()) {
        Some(&bad) => Err(Error::DanglingElement(format!("#{bad}"))),
        None => Ok(()),
    }
}

/// Sorted, deduplicated pairs plus the constants.
fn initial_pairs(a: &Structure, at: &[usize], b: &Structure, bt: &[usize]) -> Result<Vec<(usize, usize)>> {
    a.require_same_vocab(b)?;
    if at.len() != bt.len() {
        return Err(Error::Malformed(format!("tuples of lengths {} and {}", at.len(), bt.len())));
    }
    check_tuple(a, at)?;
    check_tuple(b, bt)?;
    let mut pairs: Vec<(usize, usize)> =
        a.constants().iter().copied().zip(b.constants().iter().copied()).collect();
    pairs.extend(at.iter().copied().zip(bt.iter().copied()));
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs)
}

fn insert_pair(pairs: &[(usize, usize)], p: (usize, usize)) -> Vec<(usize, usize)> {
    let mut out = pairs.to_vec();
    if let Err(i) = out.binary_search(&p) {
        out.insert(i, p);
    }
    out
}

/// Partial map given by `pairs` is well defined and preserves every tuple of
/// `a` inside its domain.
fn is_partial_hom(a: &Structure, b: &Structure, pairs: &[(usize, usize)]) -> bool {
    let mut image = vec![usize::MAX; a.size()];
    for &(x, y) in pairs {
        if image[x] != usize::MAX && image[x] != y {
            return false;
        }
        image[x] = y;
    }
    let mut buf = Vec::new();
    for (ra, rb) in a.relations().iter().zip(b.relations()) {
        for t in ra.tuples() {
            if t.iter().all(|&x| image[x] != usize::MAX) {
                buf.clear();
                buf.extend(t.iter().map(|&x| image[x]));
                if !rb.contains(&buf) {
                    return false;
                }
            }
        }
    }
    true
}

fn is_partial_iso(a: &Structure, b: &Structure, pairs: &[(usize, usize)]) -> bool {
    let swapped: Vec<(usize, usize)> = pairs.iter().map(|&(x, y)| (y, x)).collect();
    is_partial_hom(a, b, pairs) && is_partial_hom(b, a, &swapped)
}

struct Counter {
    nodes: u64,
    limit: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::BudgetExceeded { nodes: self.nodes });
        }
        Ok(())
    }
}

/// The k-round Ehrenfeucht–Fraïssé game between two structures.
pub struct EfGame<'s> {
    a: &'s Structure,
    b: &'s Structure,
    memo: HashMap<(usize, Vec<(usize, usize)>), bool>,
    counter: Counter,
}

impl<'s> EfGame<'s> {
    pub fn new(a: &'s Structure, b: &'s Structure, budget: SearchBudget) -> Result<Self> {
        a.require_same_vocab(b)?;
        Ok(EfGame { a, b, memo: HashMap::new(), counter: Counter { nodes: 0, limit: budget.node_limit } })
    }

    /// Whether duplicator wins `rounds` more rounds from the pebbled tuples.
    pub fn duplicator_wins(&mut self, at: &[usize], bt: &[usize], rounds: usize) -> Result<bool> {
        let pairs = initial_pairs(self.a, at, self.b, bt)?;
        self.solve(rounds, pairs)
    }

    fn solve(&mut self, rounds: usize, pairs: Vec<(usize, usize)>) -> Result<bool> {
        if !is_partial_iso(self.a, self.b, &pairs) {
            return Ok(false);
        }
        if rounds == 0 {
            return Ok(true);
        }
        let key = (rounds, pairs);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.counter.tick()?;
        let pairs = &key.1;
        let mut wins = true;
        'spoiler: for x in 0..self.a.size() {
            for y in 0..self.b.size() {
                if self.solve(rounds - 1, insert_pair(pairs, (x, y)))? {
                    continue 'spoiler;
                }
            }
            wins = false;
            break;
        }
        if wins {
            'spoiler_b: for y in 0..self.b.size() {
                for x in 0..self.a.size() {
                    if self.solve(rounds - 1, insert_pair(pairs, (x, y)))? {
                        continue 'spoiler_b;
                    }
                }
                wins = false;
                break;
            }
        }
        self.memo.insert(key, wins);
        Ok(wins)
    }
}

/// `(a, at) ≡_k (b, bt)`.
pub fn ef_equivalent(a: &Structure, at: &[usize], b: &Structure, bt: &[usize], k: usize) -> Result<bool> {
    EfGame::new(a, b, SearchBudget::default())?.duplicator_wins(at, bt, k)
}

/// The existential k-round game: spoiler pebbles `a`, duplicator answers in
/// `b`, and duplicator must keep a partial homomorphism.
pub struct ExistentialGame<'s> {
    a: &'s Structure,
    b: &'s Structure,
    memo: HashMap<(usize, Vec<(usize, usize)>), bool>,
    counter: Counter,
}

impl<'s> ExistentialGame<'s> {
    pub fn new(a: &'s Structure, b: &'s Structure, budget: SearchBudget) -> Result<Self> {
        a.require_same_vocab(b)?;
        Ok(ExistentialGame { a, b, memo: HashMap::new(), counter: Counter { nodes: 0, limit: budget.node_limit } })
    }

    pub fn duplicator_wins(&mut self, at: &[usize], bt: &[usize], rounds: usize) -> Result<bool> {
        let pairs = initial_pairs(self.a, at, self.b, bt)?;
        self.solve(rounds, pairs)
    }

    fn solve(&mut self, rounds: usize, pairs: Vec<(usize, usize)>) -> Result<bool> {
        if !is_partial_hom(self.a, self.b, &pairs) {
            return Ok(false);
        }
        if rounds == 0 {
            return Ok(true);
        }
        let key = (rounds, pairs);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.counter.tick()?;
        let pairs = &key.1;
        let mut wins = true;
        'spoiler: for x in 0..self.a.size() {
            // Pebbling an element already in play changes nothing.
            if pairs.iter().any(|&(p, _)| p == x) {
                continue;
            }
            for y in 0..self.b.size() {
                if self.solve(rounds - 1, insert_pair(pairs, (x, y)))? {
                    continue 'spoiler;
                }
            }
            wins = false;
            break;
        }
        self.memo.insert(key, wins);
        Ok(wins)
    }
}

/// `a →^k b` over the elements named in `over` (present in both).
pub fn k_hom<S: AsRef<str>>(a: &Structure, b: &Structure, k: usize, over: &[S]) -> Result<bool> {
    let (a, b) = expand_over(a, b, over)?;
    ExistentialGame::new(&a, &b, SearchBudget::default())?.duplicator_wins(&[], &[], k)
}

/// `(a, at) →^k (b, bt)` with pinned tuples.
pub fn k_hom_pinned(a: &Structure, at: &[usize], b: &Structure, bt: &[usize], k: usize) -> Result<bool> {
    ExistentialGame::new(a, b, SearchBudget::default())?.duplicator_wins(at, bt, k)
}

pub fn k_hom_equivalent<S: AsRef<str>>(a: &Structure, b: &Structure, k: usize, over: &[S]) -> Result<bool> {
    Ok(k_hom(a, b, k, over)? && k_hom(b, a, k, over)?)
}

/// The k-core of `a` relative to a finite pool of tests: the core of the
/// coproduct of all pool members mapping into `a` over `over`. The pool is
/// over the vocabulary of `a` expanded by `over` (sorted by name).
pub fn k_core<S: AsRef<str>>(a: &Structure, over: &[S], pool: &[Structure]) -> Result<Structure> {
    let (ax, _) = expand_over(a, a, over)?;
    for p in pool {
        if p.vocab() != ax.vocab() {
            return Err(Error::VocabularyMismatch);
        }
    }
    let mut members: Vec<&Structure> = Vec::new();
    for p in pool {
        if HomSearch::new(p, &ax)?.exists()? {
            members.push(p);
        }
    }
    // Members mapping into another kept member add nothing to the coproduct
    // up to homomorphic equivalence.
    let mut maximal: Vec<Structure> = Vec::new();
    for (i, &m) in members.iter().enumerate() {
        let mut dominated = false;
        for (j, &other) in members.iter().enumerate() {
            if i == j || !HomSearch::new(m, other)?.exists()? {
                continue;
            }
            let back = HomSearch::new(other, m)?.exists()?;
            if !back || j < i {
                dominated = true;
                break;
            }
        }
        if !dominated {
            maximal.push(m.clone());
        }
    }
    let (sum, _) = coproduct_all(ax.vocab(), &maximal)?;
    Ok(cores::core(&sum, &[])?.structure)
}

/// [`k_core`] with the pool of tree-depth-`k` cores of at most `size_cap`
/// elements.
pub fn k_core_bounded<S: AsRef<str>>(a: &Structure, k: usize, over: &[S], size_cap: usize) -> Result<Structure> {
    let (ax, _) = expand_over(a, a, over)?;
    let pool = crate::logic::enumerate_pp_tests(ax.vocab(), k, size_cap)?;
    k_core(a, over, &pool)
}

/// A failed extension step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionFailure {
    /// Pinned distinct elements of the structure under test.
    pub x: Vec<usize>,
    /// Index of the pool member.
    pub pool_index: usize,
    /// Tuple of the pool member paired with `x`.
    pub copy: Vec<usize>,
    /// Element of the pool member with no matching extension.
    pub b: usize,
}

/// Whether `a` is k-extendable relative to `pool`.
///
/// For every tuple `x` of distinct elements of `a` with `|x| = j < k`,
/// every pool member `b` and tuple `y` with `(a,x) ⇄^{k-j} (b,y)`, each
/// element `e` of `b` has some `d` in `a` with `(a,xd) ⇄^{k-j-1} (b,ye)`.
/// With `strict`, the literal variant is used instead, where `d` and `e`
/// do not enter the final equivalence.
pub fn k_extendable(a: &Structure, k: usize, pool: &[Structure], strict: bool) -> Result<Option<ExtensionFailure>> {
    let budget = SearchBudget::default();
    for (pi, b) in pool.iter().enumerate() {
        a.require_same_vocab(b)?;
        let mut fwd = ExistentialGame::new(a, b, budget)?;
        let mut back = ExistentialGame::new(b, a, budget)?;
        for j in 0..k.min(a.size() + 1) {
            let rounds = k - j;
            let mut failure = None;
            for_each_tuple(a.size(), j, true, &mut |x| {
                if failure.is_some() {
                    return Ok(());
                }
                for_each_tuple(b.size(), j, false, &mut |y| {
                    if failure.is_some() {
                        return Ok(());
                    }
                    let premise = fwd.duplicator_wins(x, y, rounds)? && back.duplicator_wins(y, x, rounds)?;
                    if !premise {
                        return Ok(());
                    }
                    for e in 0..b.size() {
                        let ok = if strict {
                            a.size() > 0
                                && fwd.duplicator_wins(x, y, rounds - 1)?
                                && back.duplicator_wins(y, x, rounds - 1)?
                        } else {
                            let mut found = false;
                            for d in 0..a.size() {
                                let (xd, ye) = (push(x, d), push(y, e));
                                if fwd.duplicator_wins(&xd, &ye, rounds - 1)?
                                    && back.duplicator_wins(&ye, &xd, rounds - 1)?
                                {
                                    found = true;
                                    break;
                                }
                            }
                            found
                        };
                        if !ok {
                            failure = Some(ExtensionFailure { x: x.to_vec(), pool_index: pi, copy: y.to_vec(), b: e });
                            break;
                        }
                    }
                    Ok(())
                })
            })?;
            if failure.is_some() {
                return Ok(failure);
            }
        }
    }
    Ok(None)
}

fn push(t: &[usize], x: usize) -> Vec<usize> {
    let mut out = t.to_vec();
    out.push(x);
    out
}

/// Calls `f` on every tuple of length `len` over `0..n`, optionally only
/// those with distinct entries, in lexicographic order.
fn for_each_tuple(n: usize, len: usize, distinct: bool, f: &mut dyn FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn go(
        n: usize,
        len: usize,
        distinct: bool,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if cur.len() == len {
            return f(cur);
        }
        for x in 0..n {
            if distinct && cur.contains(&x) {
                continue;
            }
            cur.push(x);
            go(n, len, distinct, cur, f)?;
            cur.pop();
        }
        Ok(())
    }
    go(n, len, distinct, &mut Vec::with_capacity(len), f)
}

/// Outcome of checking one instance of the extendability transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma29Report {
    pub a_extendable: bool,
    pub b_extendable: bool,
    pub k_hom_equivalent: bool,
    pub ef_equivalent: bool,
}

impl Lemma29Report {
    pub fn premise(&self) -> bool {
        self.a_extendable && self.b_extendable && self.k_hom_equivalent
    }

    /// Premise holds but the conclusion fails.
    pub fn is_counterexample(&self) -> bool {
        self.premise() && !self.ef_equivalent
    }
}

/// If both structures are k-extendable (relative to `pool`) and
/// k-homomorphically equivalent, they should be `≡_k`.
pub fn lemma29_check(a: &Structure, b: &Structure, k: usize, pool: &[Structure]) -> Result<Lemma29Report> {
    Ok(Lemma29Report {
        a_extendable: k_extendable(a, k, pool, false)?.is_none(),
        b_extendable: k_extendable(b, k, pool, false)?.is_none(),
        k_hom_equivalent: k_hom_equivalent::<&str>(a, b, k, &[])?,
        ef_equivalent: ef_equivalent(a, &[], b, &[], k)?,
    })
}

/// Expands `a` by the tuple and evaluates the k-round existential game
/// against `b` expanded by its tuple.
pub fn k_hom_tuples(a: &Structure, at: &[usize], b: &Structure, bt: &[usize], k: usize) -> Result<bool> {
    let (ax, bx) = (expand(a, at)?, expand(b, bt)?);
    ExistentialGame::new(&ax, &bx, SearchBudget::default())?.duplicator_wins(&[], &[], k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::structures_up_to_iso;
    use crate::homsearch::hom_exists;
    use crate::logic::{enumerate_pp_tests, PpTestFamily};
    use crate::structures::{fixtures, Vocabulary};
    use crate::homsearch::are_isomorphic;

    const NONE: [&str; 0] = [];

    #[test]
    fn ef_on_edge_and_path() {
        assert!(ef_equivalent(&fixtures::k2(), &[], &fixtures::p3(), &[], 1).unwrap());
        assert!(!ef_equivalent(&fixtures::k2(), &[], &fixtures::p3(), &[], 2).unwrap());
        for k in 0..=3 {
            assert!(ef_equivalent(&fixtures::c4(), &[], &fixtures::c4(), &[], k).unwrap());
        }
    }

    #[test]
    fn ef_respects_pebbles_and_constants() {
        let p3 = fixtures::p3();
        assert!(ef_equivalent(&p3, &[0], &p3, &[2], 3).unwrap());
        assert!(!ef_equivalent(&p3, &[0], &p3, &[1], 2).unwrap());
        assert!(ef_equivalent(&p3, &[0], &p3, &[1], 0).unwrap());
        assert!(!ef_equivalent(&p3, &[0, 1], &p3, &[0, 2], 0).unwrap());
    }

    #[test]
    fn existential_game_examples() {
        assert!(k_hom(&fixtures::k2(), &fixtures::pt1(), 1, &NONE).unwrap());
        assert!(k_hom(&fixtures::pt1(), &fixtures::k2(), 1, &NONE).unwrap());
        assert!(!hom_exists(&fixtures::k2(), &fixtures::pt1()).unwrap());
        assert!(!k_hom(&fixtures::loop1(), &fixtures::k2(), 1, &NONE).unwrap());
        assert!(k_hom_equivalent(&fixtures::k2(), &fixtures::pt1(), 1, &NONE).unwrap());
        assert!(!k_hom_equivalent(&fixtures::k2(), &fixtures::pt1(), 2, &NONE).unwrap());
        assert!(k_hom_equivalent(&fixtures::p3(), &fixtures::p3(), 3, &NONE).unwrap());
    }

    #[test]
    fn homomorphisms_imply_k_homomorphisms() {
        let all = structures_up_to_iso(&Vocabulary::graph(), 3).unwrap();
        for a in &all {
            for b in &all {
                let h = hom_exists(a, b).unwrap();
                let mut prev = true;
                for k in 0..=3 {
                    let kh = k_hom(a, b, k, &NONE).unwrap();
                    assert!(!h || kh);
                    assert!(prev || !kh, "→^k must refine with k");
                    prev = kh;
                }
            }
        }
    }

    #[test]
    fn k_cores_of_small_graphs() {
        let pool = enumerate_pp_tests(&Vocabulary::graph(), 1, 2).unwrap();
        let c = k_core(&fixtures::k3(), &NONE, &pool).unwrap();
        assert!(are_isomorphic(&c, &fixtures::pt1()).unwrap());
        let c = k_core(&fixtures::loop1(), &NONE, &pool).unwrap();
        assert!(are_isomorphic(&c, &fixtures::loop1()).unwrap());
        let fam = PpTestFamily::new(&Vocabulary::graph(), 2, 3).unwrap();
        for a in structures_up_to_iso(&Vocabulary::graph(), 3).unwrap() {
            let c = k_core(&a, &NONE, &fam.tests).unwrap();
            assert_eq!(fam.profile(&a).unwrap(), fam.profile(&c).unwrap());
            assert!(hom_exists(&c, &a).unwrap());
        }
    }

    #[test]
    fn extendability_examples() {
        let pool = vec![fixtures::pt1(), fixtures::k2(), fixtures::loop1()];
        assert!(k_extendable(&fixtures::pt1(), 0, &pool, false).unwrap().is_none());
        assert!(k_extendable(&fixtures::k3(), 2, &[], false).unwrap().is_none());
        assert!(k_extendable(&fixtures::pt1(), 1, &pool, false).unwrap().is_none());
        // (P3,b) ⇄^1 (P3,a), but the far endpoint c of a has no counterpart
        // at distance two from b.
        let fail = k_extendable(&fixtures::p3(), 2, &[fixtures::p3(), fixtures::k2()], false).unwrap();
        assert_eq!(fail, Some(ExtensionFailure { x: vec![1], pool_index: 0, copy: vec![0], b: 2 }));
        assert!(k_extendable(&fixtures::p3(), 2, &[fixtures::p3()], true).unwrap().is_none());
    }

    #[test]
    fn lemma29_on_identical_structures() {
        let pool = structures_up_to_iso(&Vocabulary::graph(), 2).unwrap();
        let r = lemma29_check(&fixtures::p3(), &fixtures::p3(), 2, &pool).unwrap();
        assert!(r.k_hom_equivalent && r.ef_equivalent && !r.is_counterexample());
        let r = lemma29_check(&fixtures::loop1(), &fixtures::k2(), 1, &pool).unwrap();
        assert!(!r.premise());
    }

    #[test]
    fn pinned_games_match_expansions() {
        let p3 = fixtures::p3();
        for x in 0..3 {
            for y in 0..3 {
                for k in 0..3 {
                    assert_eq!(
                        k_hom_pinned(&p3, &[x], &p3, &[y], k).unwrap(),
                        k_hom_tuples(&p3, &[x], &p3, &[y], k).unwrap()
                    );
                }
            }
        }
    }
}
