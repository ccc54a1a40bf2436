//! Primitive-positive sentences as structures and back.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::{Formula, Term};
use crate::canon;
use crate::cores;
use crate::enumerate;
use crate::error::{Error, Result};
use crate::gaifman::{self, elimination_forest, gaifman_graph};
use crate::homsearch::{HomSearch, SearchBudget};
use crate::structures::{expand, free_term_structure, is_identifier, Structure, Vocabulary, KEYWORDS};

struct Collector {
    /// Unique names of the quantified variables, in binding order.
    vars: Vec<String>,
    atoms: Vec<(usize, Vec<usize>)>,
    equalities: Vec<(usize, usize)>,
}

/// Node ids: constants first (vocabulary order), then bound variables.
fn collect(f: &Formula, vocab: &Vocabulary, scope: &mut Vec<(String, usize)>, out: &mut Collector) -> Result<()> {
    let nconst = vocab.constants().len();
    let node = |t: &Term, scope: &Vec<(String, usize)>| -> Result<usize> {
        match t {
            Term::Var(v) => scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, id)| id)
                .ok_or_else(|| Error::NotASentence(v.clone())),
            Term::Const(c) => vocab.constant_index(c).ok_or_else(|| Error::UnknownSymbol(c.clone())),
        }
    };
    match f {
        Formula::True => Ok(()),
        Formula::Atom { relation, args } => {
            let r = vocab.relation_index(relation).ok_or_else(|| Error::UnknownSymbol(relation.clone()))?;
            let ids = args.iter().map(|t| node(t, scope)).collect::<Result<Vec<_>>>()?;
            out.atoms.push((r, ids));
            Ok(())
        }
        Formula::Eq(s, t) => {
            let pair = (node(s, scope)?, node(t, scope)?);
            out.equalities.push(pair);
            Ok(())
        }
        Formula::And(p, q) => {
            collect(p, vocab, scope, out)?;
            collect(q, vocab, scope, out)
        }
        Formula::Exists(v, p) => {
            let id = nconst + out.vars.len();
            out.vars.push(v.clone());
            scope.push((v.clone(), id));
            let r = collect(p, vocab, scope, out);
            scope.pop();
            r
        }
        _ => Err(Error::NotPrimitivePositive),
    }
}

/// The canonical structure of a primitive-positive sentence: variables and
/// constants modulo the equalities, with one tuple per atom. A structure
/// satisfies the sentence iff the canonical structure maps into it.
pub fn canonical_structure(theta: &Formula, vocab: &Vocabulary) -> Result<Structure> {
    if !theta.is_primitive_positive() {
        return Err(Error::NotPrimitivePositive);
    }
    theta.check_vocabulary(vocab)?;
    if let Some(v) = theta.free_variables().into_iter().next() {
        return Err(Error::NotASentence(v));
    }
    let mut c = Collector { vars: Vec::new(), atoms: Vec::new(), equalities: Vec::new() };
    collect(theta, vocab, &mut Vec::new(), &mut c)?;
    let nconst = vocab.constants().len();
    let total = nconst + c.vars.len();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(x, y) in &c.equalities {
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        // The smaller id becomes the root, so constants win over variables.
        parent[rx.max(ry)] = rx.min(ry);
    }
    // Variable names renamed apart from each other and from constants.
    let mut taken: HashSet<String> = vocab.constants().iter().cloned().collect();
    let mut node_names: Vec<String> = vocab.constants().to_vec();
    for v in &c.vars {
        let mut name = v.clone();
        let mut i = 1;
        while taken.contains(&name) {
            i += 1;
            name = format!("{v}_{i}");
        }
        taken.insert(name.clone());
        node_names.push(name);
    }
    let mut class_name: BTreeMap<usize, String> = BTreeMap::new();
    for id in 0..total {
        let root = find(&mut parent, id);
        let entry = class_name.entry(root).or_insert_with(|| node_names[id].clone());
        // Constant names take precedence; otherwise the least name.
        if (id < nconst) == (root < nconst) && node_names[id] < *entry {
            *entry = node_names[id].clone();
        }
    }
    let mut names: Vec<String> = class_name.values().cloned().collect();
    names.sort();
    let index: HashMap<usize, usize> =
        class_name.iter().map(|(&root, n)| (root, names.binary_search(n).expect("class name"))).collect();
    let mut rels = vec![Vec::new(); vocab.relations().len()];
    for (r, ids) in &c.atoms {
        rels[*r].push(ids.iter().map(|&id| index[&find(&mut parent, id)]).collect());
    }
    let consts = (0..nconst).map(|id| index[&find(&mut parent, id)]).collect();
    Structure::from_parts(vocab.clone(), names, rels, consts)
}

/// A primitive-positive formula describing `c` over `over`.
///
/// Quantifiers follow an optimal elimination forest of the Gaifman graph
/// with `over` and the constants removed, so the quantifier rank equals the
/// tree-depth over that set. Elements of `over` that interpret constants are
/// written with the constant symbol; the others stay free, named after the
/// element. `b` satisfies the result under the identity assignment iff
/// `c` maps to `b` fixing `over`.
pub fn canonical_sentence(c: &Structure, over: &[usize]) -> Result<Formula> {
    let n = c.size();
    if let Some(&bad) = over.iter().find(|&&x| x >= n) {
        return Err(Error::DanglingElement(format!("#{bad}")));
    }
    let mut pinned = vec![false; n];
    for &x in over.iter().chain(c.constants()) {
        pinned[x] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&x| !pinned[x]).collect();
    let graph = gaifman_graph(c).induced(&free);
    let forest = elimination_forest(&graph)?;

    let mut const_name: Vec<Option<&str>> = vec![None; n];
    let mut equalities = Vec::new();
    for (name, &e) in c.vocab().constants().iter().zip(c.constants()) {
        match const_name[e] {
            None => const_name[e] = Some(name),
            Some(first) => equalities.push(Formula::Eq(Term::Const(first.into()), Term::Const(name.clone()))),
        }
    }
    let mut taken: HashSet<String> = c.vocab().constants().iter().cloned().collect();
    let mut term: Vec<Term> = Vec::with_capacity(n);
    for x in 0..n {
        if let Some(cn) = const_name[x] {
            term.push(Term::Const(cn.to_string()));
            continue;
        }
        let name = c.name(x);
        let mut candidate = if is_identifier(name) && !KEYWORDS.contains(&name) {
            name.to_string()
        } else {
            format!("x{x}")
        };
        while taken.contains(&candidate) {
            candidate.push('_');
        }
        taken.insert(candidate.clone());
        term.push(Term::Var(candidate));
    }

    // Attach every tuple at its deepest unpinned element.
    let local: HashMap<usize, usize> = free.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut attached: Vec<Vec<Formula>> = vec![Vec::new(); free.len()];
    let mut top = equalities;
    for (r, (rname, _)) in c.relations().iter().zip(c.vocab().relations()) {
        for t in r.tuples() {
            let atom = Formula::Atom { relation: rname.clone(), args: t.iter().map(|&x| term[x].clone()).collect() };
            let deepest = t.iter().filter_map(|x| local.get(x)).max_by_key(|&&v| forest.level(v));
            match deepest {
                Some(&v) => attached[v].push(atom),
                None => top.push(atom),
            }
        }
    }
    fn build(v: usize, forest: &gaifman::EliminationForest, attached: &mut [Vec<Formula>], var: &dyn Fn(usize) -> String) -> Formula {
        let mut parts = std::mem::take(&mut attached[v]);
        for child in forest.children(v) {
            parts.push(build(child, forest, attached, var));
        }
        let name = var(v);
        let body = if parts.is_empty() {
            Formula::Eq(Term::Var(name.clone()), Term::Var(name.clone()))
        } else {
            Formula::conjunction(parts)
        };
        Formula::exists(name, body)
    }
    let var = |v: usize| term[free[v]].name().to_string();
    for root in forest.roots() {
        top.push(build(root, &forest, &mut attached, &var));
    }
    Ok(Formula::conjunction(top))
}

/// The finite family of pp-tests of quantifier rank at most `k` with at
/// most `size_cap` elements: cores of tree-depth at most `k` over the
/// constants, one per isomorphism type.
#[derive(Clone, Debug)]
pub struct PpTestFamily {
    pub vocab: Vocabulary,
    pub k: usize,
    pub size_cap: usize,
    pub tests: Vec<Structure>,
}

impl PpTestFamily {
    pub fn new(vocab: &Vocabulary, k: usize, size_cap: usize) -> Result<Self> {
        let mut keys: HashSet<Vec<usize>> = HashSet::new();
        let mut tests = Vec::new();
        let trivial = free_term_structure(vocab);
        let mut saw_trivial = false;
        for size in 0..=size_cap {
            let mut failure = None;
            enumerate::for_each_structure(vocab, size, |s| {
                if failure.is_some() {
                    return;
                }
                let mut step = || -> Result<()> {
                    if gaifman::tree_depth_over(&s, &s.constant_elements())? > k {
                        return Ok(());
                    }
                    let core = cores::core(&s, &[])?.structure;
                    let key = canon::canonical_key(&core, &[])?;
                    if keys.insert(key) {
                        if core == trivial {
                            saw_trivial = true;
                        } else {
                            tests.push(core);
                        }
                    }
                    Ok(())
                };
                if let Err(e) = step() {
                    failure = Some(e);
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
        }
        if tests.is_empty() && saw_trivial {
            tests.push(trivial);
        }
        Ok(PpTestFamily { vocab: vocab.clone(), k, size_cap, tests })
    }

    /// Which tests map into `a`.
    pub fn profile(&self, a: &Structure) -> Result<Vec<bool>> {
        if a.vocab() != &self.vocab {
            return Err(Error::VocabularyMismatch);
        }
        self.tests
            .iter()
            .map(|t| HomSearch::new(t, a)?.budget(SearchBudget::default()).exists())
            .collect()
    }

    /// Every test satisfied by `a` is satisfied by `b`.
    pub fn preserves(&self, a: &Structure, b: &Structure) -> Result<bool> {
        Ok(self.separating(a, b)?.is_none())
    }

    /// The first test satisfied by `a` but not by `b`.
    pub fn separating(&self, a: &Structure, b: &Structure) -> Result<Option<&Structure>> {
        for t in &self.tests {
            if HomSearch::new(t, a)?.exists()? && !HomSearch::new(t, b)?.exists()? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }
}

/// The pp-test family for `vocab`, rank `k` and size cap.
pub fn enumerate_pp_tests(vocab: &Vocabulary, k: usize, size_cap: usize) -> Result<Vec<Structure>> {
    Ok(PpTestFamily::new(vocab, k, size_cap)?.tests)
}

/// Expands both structures by the elements named in `over`, in sorted
/// name order, as fresh constants.
pub(crate) fn expand_over<S: AsRef<str>>(a: &Structure, b: &Structure, over: &[S]) -> Result<(Structure, Structure)> {
    a.require_same_vocab(b)?;
    let mut names: Vec<&str> = over.iter().map(|s| s.as_ref()).collect();
    names.sort_unstable();
    names.dedup();
    Ok((expand(a, &a.indices_of(&names)?)?, expand(b, &b.indices_of(&names)?)?))
}

/// Whether every pp-test of rank at most `k` (up to `size_cap` elements)
/// that maps into `a` over `over` also maps into `b` over `over`.
pub fn preserves_pp<S: AsRef<str>>(a: &Structure, b: &Structure, k: usize, over: &[S], size_cap: usize) -> Result<bool> {
    let (a, b) = expand_over(a, b, over)?;
    PpTestFamily::new(a.vocab(), k, size_cap)?.preserves(&a, &b)
}

/// A pp-test of rank at most `k` true in `a` and false in `b`, as a formula.
pub fn separating_test<S: AsRef<str>>(
    a: &Structure,
    b: &Structure,
    k: usize,
    over: &[S],
    size_cap: usize,
) -> Result<Option<Formula>> {
    let (a, b) = expand_over(a, b, over)?;
    let family = PpTestFamily::new(a.vocab(), k, size_cap)?;
    match family.separating(&a, &b)? {
        Some(t) => canonical_sentence(t, &[]).map(Some),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homsearch::{are_isomorphic, hom_equivalent, hom_exists};
    use crate::logic::{evaluate, parse, parse_with, Assignment};
    use crate::structures::fixtures;

    fn g() -> Vocabulary {
        Vocabulary::graph()
    }

    #[test]
    fn canonical_structures_of_small_sentences() {
        let s = canonical_structure(&parse("exists x. E(x,x)").unwrap(), &g()).unwrap();
        assert_eq!(s, fixtures::loop1());
        let s = canonical_structure(&parse("exists x. exists y. E(x,y) & E(y,x)").unwrap(), &g()).unwrap();
        assert!(hom_equivalent::<&str>(&s, &fixtures::k2(), &[], SearchBudget::default()).unwrap());
        assert_eq!(s.size(), 2);
        let s = canonical_structure(&parse("exists x. exists y. x=y & E(x,y)").unwrap(), &g()).unwrap();
        assert_eq!(s, fixtures::loop1());
        assert_eq!(
            canonical_structure(&parse("exists x. !E(x,x)").unwrap(), &g()).unwrap_err(),
            Error::NotPrimitivePositive
        );
        assert_eq!(
            canonical_structure(&parse("E(x,x)").unwrap(), &g()).unwrap_err(),
            Error::NotASentence("x".into())
        );
    }

    #[test]
    fn canonical_structure_renames_reused_binders() {
        let s = canonical_structure(&parse("(exists x. E(x,x)) & (exists x. x = x)").unwrap(), &g()).unwrap();
        assert_eq!(s.elements(), ["x", "x_2"]);
    }

    #[test]
    fn constants_merge_through_equalities() {
        let v = Vocabulary::graph_with_constants(2);
        let s = canonical_structure(&parse_with("exists x. c1 = c2 & E(c1,x)", &v).unwrap(), &v).unwrap();
        assert_eq!(s.elements(), ["c1", "x"]);
        assert_eq!(s.constants(), [0, 0]);
    }

    #[test]
    fn canonical_sentences_of_small_graphs() {
        let f = canonical_sentence(&fixtures::loop1(), &[]).unwrap();
        assert_eq!(f.to_string(), "exists x. E(x,x)");
        assert_eq!(canonical_sentence(&fixtures::k2(), &[]).unwrap().quantifier_rank(), 2);
        let f = canonical_sentence(&fixtures::p3(), &[]).unwrap();
        assert_eq!(f.to_string(), "exists b. (exists a. E(a,b) & E(b,a)) & (exists c. E(b,c) & E(c,b))");
        assert_eq!(canonical_sentence(&Structure::empty(g()).unwrap(), &[]).unwrap(), Formula::True);
        assert_eq!(canonical_sentence(&fixtures::pt1(), &[]).unwrap().to_string(), "exists x. x = x");
    }

    #[test]
    fn canonical_sentence_keeps_pinned_elements_free() {
        let p3 = fixtures::p3();
        let f = canonical_sentence(&p3, &[1]).unwrap();
        assert_eq!(f.free_variables(), vec!["b"]);
        assert_eq!(f.quantifier_rank(), 1);
        let mut env = Assignment::new();
        env.insert("b".into(), 1);
        assert!(evaluate(&p3, &f, &env).unwrap());
    }

    #[test]
    fn pp_test_families() {
        let fam = enumerate_pp_tests(&g(), 1, 2).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(are_isomorphic(&fam[0], &fixtures::pt1()).unwrap());
        assert!(are_isomorphic(&fam[1], &fixtures::loop1()).unwrap());
        let zero = enumerate_pp_tests(&g(), 0, 3).unwrap();
        assert_eq!(zero, vec![Structure::empty(g()).unwrap()]);
        let mut last = 0;
        for k in 0..=3 {
            let n = enumerate_pp_tests(&g(), k, 3).unwrap().len();
            assert!(n >= last);
            last = n;
        }
        for cap in 0..=3 {
            assert!(enumerate_pp_tests(&g(), 2, cap).unwrap().len() <= enumerate_pp_tests(&g(), 2, cap + 1).unwrap().len());
        }
    }

    #[test]
    fn pp_preservation() {
        let none: [&str; 0] = [];
        assert!(preserves_pp(&fixtures::k2(), &fixtures::pt1(), 1, &none, 3).unwrap());
        assert!(!preserves_pp(&fixtures::loop1(), &fixtures::k2(), 1, &none, 3).unwrap());
        assert!(preserves_pp(&fixtures::p3(), &fixtures::p3(), 2, &none, 3).unwrap());
        let sep = separating_test(&fixtures::loop1(), &fixtures::k2(), 1, &none, 3).unwrap().unwrap();
        assert_eq!(sep.to_string(), "exists a. E(a,a)");
    }

    #[test]
    fn over_pins_become_constants() {
        // Fixing both endpoints of P3, the edge a-c is absent.
        let p3 = fixtures::p3();
        let tri = fixtures::k3().renamed(|i, _| ["a", "b", "c"][i].to_string()).unwrap();
        assert!(preserves_pp(&p3, &tri, 2, &["a", "c"], 3).unwrap());
        assert!(!preserves_pp(&tri, &p3, 1, &["a", "c"], 3).unwrap());
        assert!(hom_exists(&p3, &tri).unwrap());
    }
}
