//! Finite limits and colimits, initial and terminal objects.
//!
//! With constants present, coproducts are amalgams that glue the constant
//! interpretations together (the pushout over the free term structure).

use std::sync::Arc;

use super::{Morphism, Structure, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Product {
    pub structure: Structure,
    pub left: Morphism,
    pub right: Morphism,
}

#[derive(Debug, Clone)]
pub struct Coproduct {
    pub structure: Structure,
    pub left: Morphism,
    pub right: Morphism,
}

#[derive(Debug, Clone)]
pub struct Equalizer {
    pub structure: Structure,
    pub inclusion: Morphism,
}

#[derive(Debug, Clone)]
pub struct Coequalizer {
    pub structure: Structure,
    pub quotient: Morphism,
}

/// Categorical product; elements are named `(a,b)`.
pub fn product(a: &Structure, b: &Structure) -> Result<Product> {
    a.require_same_vocab(b)?;
    let m = b.size();
    let pair = |i: usize, j: usize| i * m + j;
    let mut names = Vec::with_capacity(a.size() * m);
    for i in 0..a.size() {
        for j in 0..m {
            names.push(format!("({},{})", a.name(i), b.name(j)));
        }
    }
    let mut rels = Vec::with_capacity(a.relations().len());
    for (ra, rb) in a.relations().iter().zip(b.relations()) {
        let mut tuples = Vec::with_capacity(ra.len() * rb.len());
        for s in ra.tuples() {
            for t in rb.tuples() {
                tuples.push(s.iter().zip(t).map(|(&x, &y)| pair(x, y)).collect());
            }
        }
        rels.push(tuples);
    }
    let consts = a.constants().iter().zip(b.constants()).map(|(&x, &y)| pair(x, y)).collect();
    let structure = Structure::from_parts(a.vocab_arc().clone(), names, rels, consts)?;
    let mut left = Vec::with_capacity(structure.size());
    let mut right = Vec::with_capacity(structure.size());
    // Names were sorted, so recover the pair through the name index.
    let mut by_index = vec![(0, 0); structure.size()];
    for i in 0..a.size() {
        for j in 0..m {
            let name = format!("({},{})", a.name(i), b.name(j));
            by_index[structure.index_of(&name).expect("product element")] = (i, j);
        }
    }
    for &(i, j) in &by_index {
        left.push(i);
        right.push(j);
    }
    Ok(Product {
        left: Morphism::new(structure.clone(), a.clone(), left)?,
        right: Morphism::new(structure.clone(), b.clone(), right)?,
        structure,
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Unions two classes, keeping the smaller index as root.
    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx < ry {
            self.0[ry] = rx;
        } else if ry < rx {
            self.0[rx] = ry;
        }
    }
}

/// Collapses `names` along a union-find whose root of each class has the
/// least name; returns the quotient's names, the class index of every
/// original element.
fn quotient_names(names: &[String], uf: &mut UnionFind) -> (Vec<String>, Vec<usize>) {
    let n = names.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| names[x].cmp(&names[y]));
    // Least name per class.
    let mut best: Vec<usize> = vec![usize::MAX; n];
    for &x in &order {
        let r = uf.find(x);
        if best[r] == usize::MAX {
            best[r] = x;
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut out = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for &x in &order {
        let r = uf.find(x);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(names[best[r]].clone());
        }
        class_of[x] = slot[r];
    }
    (out, class_of)
}

/// Coproduct of a family (amalgamated over the constants). The empty family
/// yields the free term structure.
pub fn coproduct_all(vocab: &Vocabulary, parts: &[Structure]) -> Result<(Structure, Vec<Morphism>)> {
    if parts.is_empty() {
        return Ok((free_term_structure(vocab), Vec::new()));
    }
    for p in parts {
        if p.vocab() != vocab {
            return Err(Error::VocabularyMismatch);
        }
    }
    let mut offsets = Vec::with_capacity(parts.len());
    let mut names = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        offsets.push(names.len());
        names.extend(p.elements().iter().map(|e| format!("{i}:{e}")));
    }
    let mut uf = UnionFind::new(names.len());
    for c in 0..vocab.constants().len() {
        let first = offsets[0] + parts[0].constants()[c];
        for (p, &off) in parts.iter().zip(&offsets).skip(1) {
            uf.union(first, off + p.constants()[c]);
        }
    }
    let (qnames, class_of) = quotient_names(&names, &mut uf);
    let mut rels = vec![Vec::new(); vocab.relations().len()];
    for (p, &off) in parts.iter().zip(&offsets) {
        for (ri, r) in p.relations().iter().enumerate() {
            for t in r.tuples() {
                rels[ri].push(t.iter().map(|&x| class_of[off + x]).collect());
            }
        }
    }
    let consts = parts[0].constants().iter().map(|&x| class_of[offsets[0] + x]).collect();
    let structure = Structure::from_parts(parts[0].vocab_arc().clone(), qnames.clone(), rels, consts)?;
    let mut injections = Vec::with_capacity(parts.len());
    for (p, &off) in parts.iter().zip(&offsets) {
        let map = (0..p.size())
            .map(|x| structure.index_of(&qnames[class_of[off + x]]).expect("class element"))
            .collect();
        injections.push(Morphism::new(p.clone(), structure.clone(), map)?);
    }
    Ok((structure, injections))
}

/// Binary coproduct; elements are tagged `0:a` and `1:b`.
pub fn coproduct(a: &Structure, b: &Structure) -> Result<Coproduct> {
    a.require_same_vocab(b)?;
    let (structure, mut inj) = coproduct_all(a.vocab(), &[a.clone(), b.clone()])?;
    let right = inj.pop().expect("two injections");
    let left = inj.pop().expect("two injections");
    Ok(Coproduct { structure, left, right })
}

/// Induced substructure on the agreement set of two parallel morphisms.
pub fn equalizer(f: &Morphism, g: &Morphism) -> Result<Equalizer> {
    if !f.is_parallel(g) {
        return Err(Error::NotParallel);
    }
    let src = f.source();
    let keep: Vec<usize> = (0..src.size()).filter(|&x| f.apply(x) == g.apply(x)).collect();
    for (name, &c) in src.vocab().constants().iter().zip(src.constants()) {
        if f.apply(c) != g.apply(c) {
            return Err(Error::NoEqualizer(name.clone()));
        }
    }
    let structure = src.induced(&keep)?;
    let map = structure.elements().iter().map(|e| src.index_of(e).expect("kept element")).collect();
    let inclusion = Morphism::new(structure.clone(), src.clone(), map)?;
    Ok(Equalizer { structure, inclusion })
}

/// Quotient of the common target by the equivalence generated by `f(x) ~ g(x)`.
/// Each class is named by its least element.
pub fn coequalizer(f: &Morphism, g: &Morphism) -> Result<Coequalizer> {
    if !f.is_parallel(g) {
        return Err(Error::NotParallel);
    }
    let tgt = f.target();
    let mut uf = UnionFind::new(tgt.size());
    for x in 0..f.source().size() {
        uf.union(f.apply(x), g.apply(x));
    }
    let (names, class_of) = quotient_names(tgt.elements(), &mut uf);
    let rels = tgt
        .relations()
        .iter()
        .map(|r| r.tuples().map(|t| t.iter().map(|&x| class_of[x]).collect()).collect())
        .collect();
    let consts = tgt.constants().iter().map(|&x| class_of[x]).collect();
    let structure = Structure::from_parts(tgt.vocab_arc().clone(), names.clone(), rels, consts)?;
    let map = (0..tgt.size()).map(|x| structure.index_of(&names[class_of[x]]).expect("class")).collect();
    let quotient = Morphism::new(tgt.clone(), structure.clone(), map)?;
    Ok(Coequalizer { structure, quotient })
}

/// The initial object: closed terms of a function-free vocabulary are the
/// constant symbols themselves, and every relation is empty.
pub fn free_term_structure(vocab: &Vocabulary) -> Structure {
    let mut names: Vec<String> = vocab.constants().to_vec();
    names.sort();
    names.dedup();
    let consts = vocab
        .constants()
        .iter()
        .map(|c| names.binary_search(c).expect("constant name"))
        .collect();
    Structure::from_parts(vocab.clone(), names, vec![Vec::new(); vocab.relations().len()], consts)
        .expect("free term structure is well formed")
}

/// The unique homomorphism from the free term structure into `a`.
pub fn initial_morphism(vocab: &Vocabulary, a: &Structure) -> Result<Morphism> {
    if a.vocab() != vocab {
        return Err(Error::VocabularyMismatch);
    }
    let init = free_term_structure(vocab);
    let map = init.elements().iter().map(|c| a.constant(c).expect("constant")).collect();
    Morphism::new(init, a.clone(), map)
}

/// The terminal object: one element `1`, every relation full.
pub fn top(vocab: &Vocabulary) -> Structure {
    let rels = vocab.relations().iter().map(|(_, arity)| vec![vec![0; *arity]]).collect();
    Structure::from_parts(vocab.clone(), vec!["1".into()], rels, vec![0; vocab.constants().len()])
        .expect("top is well formed")
}

/// Expands `a` by fresh constants interpreted as `tuple`.
pub fn expand(a: &Structure, tuple: &[usize]) -> Result<Structure> {
    if let Some(&bad) = tuple.iter().find(|&&x| x >= a.size()) {
        return Err(Error::DanglingElement(format!("#{bad}")));
    }
    if tuple.is_empty() {
        return Ok(a.clone());
    }
    let (vocab, _) = a.vocab().with_constants(tuple.len());
    let mut consts = a.constants().to_vec();
    consts.extend_from_slice(tuple);
    a.with_vocab(Arc::new(vocab), consts)
}
