//! Backtracking search for homomorphisms.
//!
//! Candidate sets start from constant and pin seeding, are pruned to
//! generalized arc consistency over the relation tuples, and elements are then
//! assigned in a connected, degree-descending order. Every tuple is checked
//! at the step where its last element is assigned.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structures::{Morphism, Structure};

/// Limits on a single search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Maximum number of search-tree nodes.
    pub node_limit: u64,
    /// Wall-clock limit in milliseconds; 0 means unlimited.
    pub time_limit_ms: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { node_limit: 10_000_000, time_limit_ms: 0 }
    }
}

impl SearchBudget {
    pub fn nodes(node_limit: u64) -> Self {
        SearchBudget { node_limit, time_limit_ms: 0 }
    }
}

/// Result of a single-witness search.
#[derive(Debug, Clone)]
pub enum HomOutcome {
    Found(Morphism),
    /// No homomorphism exists; the search was complete.
    Absent,
    /// The budget ran out before the search could decide.
    Exhausted { nodes: u64 },
}

impl HomOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, HomOutcome::Found(_))
    }

    pub fn is_complete(&self) -> bool {
        !matches!(self, HomOutcome::Exhausted { .. })
    }

    /// Converts an exhausted search into [`Error::BudgetExceeded`].
    pub fn into_result(self) -> Result<Option<Morphism>> {
        match self {
            HomOutcome::Found(m) => Ok(Some(m)),
            HomOutcome::Absent => Ok(None),
            HomOutcome::Exhausted { nodes } => Err(Error::BudgetExceeded { nodes }),
        }
    }
}

/// A configurable homomorphism search from `a` to `b`.
#[derive(Clone)]
pub struct HomSearch<'a> {
    a: &'a Structure,
    b: &'a Structure,
    allowed: Vec<bool>,
    injective: bool,
    surjective: bool,
    reverse: bool,
    budget: SearchBudget,
}

enum Stop {
    Done,
    Budget,
}

struct Engine<'s> {
    m: usize,
    order: Vec<usize>,
    domains: Vec<Vec<usize>>,
    checks: Vec<Vec<(usize, &'s [usize])>>,
    b: &'s Structure,
    map: Vec<usize>,
    used: Vec<u32>,
    hit: usize,
    injective: bool,
    surjective: bool,
    nodes: u64,
    budget: SearchBudget,
    deadline: Option<Instant>,
    image: Vec<usize>,
}

impl<'s> Engine<'s> {
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<Stop> {
        if depth == self.order.len() {
            return match visit(&self.map) {
                ControlFlow::Continue(()) => ControlFlow::Continue(()),
                ControlFlow::Break(()) => ControlFlow::Break(Stop::Done),
            };
        }
        let x = self.order[depth];
        let remaining = self.order.len() - depth;
        for vi in 0..self.domains[depth].len() {
            let y = self.domains[depth][vi];
            self.nodes += 1;
            if self.nodes > self.budget.node_limit {
                return ControlFlow::Break(Stop::Budget);
            }
            if self.nodes & 0x3ff == 0 {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return ControlFlow::Break(Stop::Budget);
                    }
                }
            }
            if self.injective && self.used[y] > 0 {
                continue;
            }
            let fresh = self.used[y] == 0;
            if self.surjective {
                let missing = self.m - self.hit - usize::from(fresh);
                if missing > remaining - 1 {
                    continue;
                }
            }
            self.map[x] = y;
            if !self.consistent(depth) {
                continue;
            }
            self.used[y] += 1;
            if fresh {
                self.hit += 1;
            }
            let flow = self.run(depth + 1, visit);
            self.used[y] -= 1;
            if fresh {
                self.hit -= 1;
            }
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn consistent(&mut self, depth: usize) -> bool {
        for &(r, t) in &self.checks[depth] {
            self.image.clear();
            self.image.extend(t.iter().map(|&e| self.map[e]));
            if !self.b.relation(r).contains(&self.image) {
                return false;
            }
        }
        true
    }
}

impl<'a> HomSearch<'a> {
    pub fn new(a: &'a Structure, b: &'a Structure) -> Result<Self> {
        a.require_same_vocab(b)?;
        let (n, m) = (a.size(), b.size());
        let mut allowed = vec![true; n * m];
        for (&ca, &cb) in a.constants().iter().zip(b.constants()) {
            for y in 0..m {
                if y != cb {
                    allowed[ca * m + y] = false;
                }
            }
        }
        Ok(HomSearch {
            a,
            b,
            allowed,
            injective: false,
            surjective: false,
            reverse: false,
            budget: SearchBudget::default(),
        })
    }

    /// Forces `x ↦ y`.
    pub fn pin(mut self, x: usize, y: usize) -> Self {
        let m = self.b.size();
        for z in 0..m {
            if z != y {
                self.allowed[x * m + z] = false;
            }
        }
        if y >= m {
            // Out-of-range pin: nothing can satisfy it.
            for z in 0..m {
                self.allowed[x * m + z] = false;
            }
        }
        self
    }

    pub fn pins(self, pins: &[(usize, usize)]) -> Self {
        pins.iter().fold(self, |s, &(x, y)| s.pin(x, y))
    }

    /// Restricts the image of `x` to `targets`.
    pub fn restrict(mut self, x: usize, targets: &[usize]) -> Self {
        let m = self.b.size();
        let mut keep = vec![false; m];
        for &y in targets {
            if y < m {
                keep[y] = true;
            }
        }
        for (y, k) in keep.into_iter().enumerate() {
            if !k {
                self.allowed[x * m + y] = false;
            }
        }
        self
    }

    /// Restricts every image to `targets`.
    pub fn restrict_image(self, targets: &[usize]) -> Self {
        (0..self.a.size()).fold(self, |s, x| s.restrict(x, targets))
    }

    /// Excludes `y` from the image.
    pub fn avoid(mut self, y: usize) -> Self {
        let m = self.b.size();
        for x in 0..self.a.size() {
            self.allowed[x * m + y] = false;
        }
        self
    }

    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    pub fn surjective(mut self) -> Self {
        self.surjective = true;
        self
    }

    /// Reverses every tie-break of the search order.
    pub fn reversed(mut self) -> Self {
        self.reverse = true;
        self
    }

    pub fn budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    /// Prunes candidate sets to generalized arc consistency. Returns false if
    /// some candidate set becomes empty.
    fn propagate(&self, allowed: &mut [bool]) -> bool {
        let (n, m) = (self.a.size(), self.b.size());
        let mut support = Vec::new();
        loop {
            let mut changed = false;
            for (ra, rb) in self.a.relations().iter().zip(self.b.relations()) {
                let k = ra.arity();
                for t in ra.tuples() {
                    support.clear();
                    support.resize(k * m, false);
                    'outer: for s in rb.tuples() {
                        for j in 0..k {
                            if !allowed[t[j] * m + s[j]] {
                                continue 'outer;
                            }
                            for i in 0..j {
                                if t[i] == t[j] && s[i] != s[j] {
                                    continue 'outer;
                                }
                            }
                        }
                        for j in 0..k {
                            support[j * m + s[j]] = true;
                        }
                    }
                    for j in 0..k {
                        for y in 0..m {
                            let cell = &mut allowed[t[j] * m + y];
                            if *cell && !support[j * m + y] {
                                *cell = false;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).all(|x| allowed[x * m..(x + 1) * m].iter().any(|&v| v))
    }

    fn ordering(&self) -> Vec<usize> {
        let n = self.a.size();
        let mut adj = vec![vec![false; n]; n];
        for r in self.a.relations() {
            for t in r.tuples() {
                for &x in t {
                    for &y in t {
                        if x != y {
                            adj[x][y] = true;
                        }
                    }
                }
            }
        }
        let degree: Vec<usize> = adj.iter().map(|row| row.iter().filter(|&&v| v).count()).collect();
        let m = self.b.size();
        let dom_size: Vec<usize> =
            (0..n).map(|x| self.allowed[x * m..(x + 1) * m].iter().filter(|&&v| v).count()).collect();
        let mut placed = vec![false; n];
        let mut links = vec![0usize; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let key = |x: usize| {
                let tie = if self.reverse { x } else { n - x };
                (dom_size[x] <= 1, links[x], degree[x], tie)
            };
            let next = (0..n).filter(|&x| !placed[x]).max_by_key(|&x| key(x)).expect("unplaced element");
            placed[next] = true;
            order.push(next);
            for y in 0..n {
                if adj[next][y] {
                    links[y] += 1;
                }
            }
        }
        order
    }

    /// Visits every homomorphism until the visitor breaks. Fails with
    /// [`Error::BudgetExceeded`] if the budget runs out first.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) -> Result<()> {
        let (n, m) = (self.a.size(), self.b.size());
        if self.injective && n > m || self.surjective && m > n {
            return Ok(());
        }
        let mut allowed = self.allowed.clone();
        if !self.propagate(&mut allowed) {
            return Ok(());
        }
        let order = self.ordering();
        let mut step_of = vec![0; n];
        for (i, &x) in order.iter().enumerate() {
            step_of[x] = i;
        }
        let mut checks: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); n];
        for (r, rel) in self.a.relations().iter().enumerate() {
            for t in rel.tuples() {
                let step = t.iter().map(|&x| step_of[x]).max().expect("non-empty tuple");
                checks[step].push((r, t));
            }
        }
        let domains = order
            .iter()
            .map(|&x| {
                let mut d: Vec<usize> = (0..m).filter(|&y| allowed[x * m + y]).collect();
                if self.reverse {
                    d.reverse();
                }
                d
            })
            .collect();
        let mut engine = Engine {
            m,
            order,
            domains,
            checks,
            b: self.b,
            map: vec![0; n],
            used: vec![0; m],
            hit: 0,
            injective: self.injective,
            surjective: self.surjective,
            nodes: 0,
            budget: self.budget,
            deadline: (self.budget.time_limit_ms > 0)
                .then(|| Instant::now() + Duration::from_millis(self.budget.time_limit_ms)),
            image: Vec::new(),
        };
        match engine.run(0, &mut visit) {
            ControlFlow::Continue(()) | ControlFlow::Break(Stop::Done) => Ok(()),
            ControlFlow::Break(Stop::Budget) => Err(Error::BudgetExceeded { nodes: engine.nodes }),
        }
    }

    /// First homomorphism in search order, as a raw map.
    pub fn first_map(&self) -> Result<Option<Vec<usize>>> {
        let mut found = None;
        self.for_each(|map| {
            found = Some(map.to_vec());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    pub fn exists(&self) -> Result<bool> {
        Ok(self.first_map()?.is_some())
    }

    pub fn first(&self) -> HomOutcome {
        match self.first_map() {
            Ok(Some(map)) => {
                HomOutcome::Found(Morphism::new_unchecked(self.a.clone(), self.b.clone(), map))
            }
            Ok(None) => HomOutcome::Absent,
            Err(Error::BudgetExceeded { nodes }) => HomOutcome::Exhausted { nodes },
            Err(e) => unreachable!("search only fails on budget: {e}"),
        }
    }

    /// All homomorphisms as raw maps, sorted lexicographically.
    pub fn all_maps(&self) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.for_each(|map| {
            out.push(map.to_vec());
            ControlFlow::Continue(())
        })?;
        out.sort();
        Ok(out)
    }

    pub fn count(&self) -> Result<u64> {
        let mut count = 0;
        self.for_each(|_| {
            count += 1;
            ControlFlow::Continue(())
        })?;
        Ok(count)
    }
}

fn map_space(a: &Structure, b: &Structure) -> Option<u64> {
    (b.size() as u64).checked_pow(a.size() as u32)
}

/// Default cap on `|B|^|A|` for exhaustive enumeration.
pub const ENUMERATION_CAP: u64 = 1 << 32;

/// Finds a homomorphism `a -> b` extending `pins`.
pub fn find_homomorphism(
    a: &Structure,
    b: &Structure,
    pins: &[(usize, usize)],
    budget: SearchBudget,
) -> Result<HomOutcome> {
    Ok(HomSearch::new(a, b)?.pins(pins).budget(budget).first())
}

/// Decides `a -> b` with the default budget.
pub fn hom_exists(a: &Structure, b: &Structure) -> Result<bool> {
    HomSearch::new(a, b)?.exists()
}

/// Every homomorphism `a -> b` extending `pins`, in lexicographic order.
pub fn find_all_homomorphisms(
    a: &Structure,
    b: &Structure,
    pins: &[(usize, usize)],
    cap: u64,
) -> Result<Vec<Morphism>> {
    a.require_same_vocab(b)?;
    match map_space(a, b) {
        Some(space) if space <= cap => {}
        _ => {
            return Err(Error::CapExceeded(format!(
                "{}^{} candidate maps exceed the cap {cap}",
                b.size(),
                a.size()
            )))
        }
    }
    let maps = HomSearch::new(a, b)?.pins(pins).budget(SearchBudget::nodes(u64::MAX)).all_maps()?;
    Ok(maps.into_iter().map(|m| Morphism::new_unchecked(a.clone(), b.clone(), m)).collect())
}

pub fn exists_surjective_homomorphism(a: &Structure, b: &Structure, budget: SearchBudget) -> Result<bool> {
    HomSearch::new(a, b)?.surjective().budget(budget).exists()
}

/// A homomorphism `a -> a` whose image lies in `onto` and which fixes `onto`
/// pointwise.
pub fn find_retraction(a: &Structure, onto: &[usize], budget: SearchBudget) -> Result<HomOutcome> {
    if let Some(&bad) = onto.iter().find(|&&x| x >= a.size()) {
        return Err(Error::DanglingElement(format!("#{bad}")));
    }
    for (name, c) in a.vocab().constants().iter().zip(a.constants()) {
        if !onto.contains(c) {
            return Err(Error::Malformed(format!(
                "retract target must contain the interpretation of constant {name}"
            )));
        }
    }
    let pins: Vec<(usize, usize)> = onto.iter().map(|&x| (x, x)).collect();
    Ok(HomSearch::new(a, a)?.restrict_image(onto).pins(&pins).budget(budget).first())
}

pub fn endomorphisms(a: &Structure, cap: u64) -> Result<Vec<Morphism>> {
    find_all_homomorphisms(a, a, &[], cap)
}

/// Pins `x ↦ x` for every name in `over`, which must occur in both structures.
pub(crate) fn identity_pins<S: AsRef<str>>(a: &Structure, b: &Structure, over: &[S]) -> Result<Vec<(usize, usize)>> {
    over.iter()
        .map(|n| Ok((a.require_index(n.as_ref())?, b.require_index(n.as_ref())?)))
        .collect()
}

/// `a →_X b` for the common elements named in `over`.
pub fn hom_over<S: AsRef<str>>(a: &Structure, b: &Structure, over: &[S], budget: SearchBudget) -> Result<bool> {
    let pins = identity_pins(a, b, over)?;
    HomSearch::new(a, b)?.pins(&pins).budget(budget).exists()
}

/// Homomorphic equivalence over the common elements named in `over`.
pub fn hom_equivalent<S: AsRef<str>>(
    a: &Structure,
    b: &Structure,
    over: &[S],
    budget: SearchBudget,
) -> Result<bool> {
    Ok(hom_over(a, b, over, budget)? && hom_over(b, a, over, budget)?)
}

/// An isomorphism `a -> b` extending `pins`.
pub fn find_isomorphism(
    a: &Structure,
    b: &Structure,
    pins: &[(usize, usize)],
    budget: SearchBudget,
) -> Result<HomOutcome> {
    a.require_same_vocab(b)?;
    let same_shape = a.size() == b.size()
        && a.relations().iter().zip(b.relations()).all(|(x, y)| x.len() == y.len());
    if !same_shape {
        return Ok(HomOutcome::Absent);
    }
    // A bijective homomorphism between structures with equal tuple counts
    // maps every relation onto its counterpart.
    Ok(HomSearch::new(a, b)?.pins(pins).injective().budget(budget).first())
}

pub fn are_isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    if !a.same_vocab(b) {
        return Ok(false);
    }
    find_isomorphism(a, b, &[], SearchBudget::default())?.into_result().map(|m| m.is_some())
}

/// Isomorphism fixing the common elements named in `over`.
pub fn are_isomorphic_over<S: AsRef<str>>(a: &Structure, b: &Structure, over: &[S]) -> Result<bool> {
    let pins = identity_pins(a, b, over)?;
    find_isomorphism(a, b, &pins, SearchBudget::default())?.into_result().map(|m| m.is_some())
}
