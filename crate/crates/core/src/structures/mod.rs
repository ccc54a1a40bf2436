//! Vocabularies, finite structures and homomorphisms.
//!
//! A [`Structure`] is immutable once built. Elements are opaque strings kept in
//! sorted order; every algorithm in the crate addresses them by their index in
//! that order, so index order and name order coincide.

mod constructions;
mod io;
mod morphism;

pub mod fixtures;

pub use constructions::{
    coequalizer, coproduct, coproduct_all, equalizer, expand, free_term_structure,
    initial_morphism, product, top, Coequalizer, Coproduct, Equalizer, Product,
};
pub use io::{validate, StructureDoc, VocabDoc};
pub use morphism::{check_homomorphism, check_isomorphism, Morphism};

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Keywords of the formula language; not usable as symbol names.
pub(crate) const KEYWORDS: [&str; 4] = ["exists", "forall", "true", "false"];

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Relation symbols with arities plus an ordered list of constant symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Vocabulary {
    pub fn new<R, C, S, T>(relations: R, constants: C) -> Result<Self>
    where
        R: IntoIterator<Item = (S, usize)>,
        C: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut rels: Vec<(String, usize)> =
            relations.into_iter().map(|(n, a)| (n.into(), a)).collect();
        let consts: Vec<String> = constants.into_iter().map(Into::into).collect();
        rels.sort();
        let mut seen = HashSet::new();
        for (name, arity) in &rels {
            if *arity == 0 {
                return Err(Error::InvalidVocabulary(format!("relation {name} has arity 0")));
            }
            check_symbol(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidVocabulary(format!("duplicate symbol {name}")));
            }
        }
        for name in &consts {
            check_symbol(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidVocabulary(format!("duplicate symbol {name}")));
            }
        }
        Ok(Vocabulary { relations: rels, constants: consts })
    }

    /// The vocabulary `{E/2}` of directed graphs.
    pub fn graph() -> Self {
        Vocabulary { relations: vec![("E".into(), 2)], constants: Vec::new() }
    }

    /// `{E/2}` expanded with `n` constants `c1..cn`.
    pub fn graph_with_constants(n: usize) -> Self {
        Self::graph().with_constants(n).0
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relation_index(name).map(|i| self.relations[i].1)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    /// Appends `n` fresh constants named `c1, c2, ...` (skipping names in use).
    /// Returns the expanded vocabulary and the new names.
    pub fn with_constants(&self, n: usize) -> (Vocabulary, Vec<String>) {
        let mut out = self.clone();
        let mut fresh = Vec::with_capacity(n);
        let mut i = 1;
        while fresh.len() < n {
            let name = format!("c{i}");
            i += 1;
            if self.relation_index(&name).is_none() && self.constant_index(&name).is_none() {
                fresh.push(name.clone());
                out.constants.push(name);
            }
        }
        (out, fresh)
    }
}

fn check_symbol(name: &str) -> Result<()> {
    if !is_identifier(name) || KEYWORDS.contains(&name) {
        return Err(Error::InvalidVocabulary(format!("{name:?} is not a valid symbol name")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Lookup {
    Dense(Vec<u64>),
    Sparse(HashSet<Vec<usize>>),
}

const DENSE_LIMIT: usize = 1 << 22;

/// The interpretation of one relation symbol: sorted, duplicate-free tuples
/// stored contiguously.
#[derive(Debug, Clone)]
pub struct Relation {
    arity: usize,
    data: Vec<usize>,
    universe: usize,
    lookup: Lookup,
}

impl Relation {
    fn new(arity: usize, universe: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort();
        tuples.dedup();
        let lookup = match universe.checked_pow(arity as u32) {
            Some(cells) if cells <= DENSE_LIMIT => {
                let mut bits = vec![0u64; cells.div_ceil(64).max(1)];
                for t in &tuples {
                    let code = encode(t, universe);
                    bits[code / 64] |= 1 << (code % 64);
                }
                Lookup::Dense(bits)
            }
            _ => Lookup::Sparse(tuples.iter().cloned().collect()),
        };
        Relation { arity, data: tuples.concat(), universe, lookup }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> std::slice::ChunksExact<'_, usize> {
        self.data.chunks_exact(self.arity)
    }

    pub fn tuple(&self, i: usize) -> &[usize] {
        &self.data[i * self.arity..(i + 1) * self.arity]
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.tuples().map(<[usize]>::to_vec).collect()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn contains(&self, tuple: &[usize]) -> bool {
        match &self.lookup {
            Lookup::Dense(bits) => {
                let code = encode(tuple, self.universe);
                bits[code / 64] >> (code % 64) & 1 == 1
            }
            Lookup::Sparse(set) => set.contains(tuple),
        }
    }
}

#[inline]
fn encode(tuple: &[usize], universe: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * universe + x)
}

struct Inner {
    vocab: Arc<Vocabulary>,
    elements: Vec<String>,
    relations: Vec<Relation>,
    constants: Vec<usize>,
}

/// A finite structure over a [`Vocabulary`]. Cloning is cheap.
#[derive(Clone)]
pub struct Structure(Arc<Inner>);

impl Structure {
    /// Builds a structure from element names and index-based interpretations.
    ///
    /// Indices in `relations` and `constants` refer to positions in `names`;
    /// names are sorted internally and tuples are deduplicated.
    pub fn from_parts(
        vocab: impl Into<Arc<Vocabulary>>,
        names: Vec<String>,
        relations: Vec<Vec<Vec<usize>>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        let vocab = vocab.into();
        let n = names.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut rank = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let mut elements = Vec::with_capacity(n);
        for &old in &order {
            if elements.last() == Some(&names[old]) {
                return Err(Error::Malformed(format!("duplicate element {:?}", names[old])));
            }
            elements.push(names[old].clone());
        }
        if relations.len() != vocab.relations.len() {
            return Err(Error::Malformed(format!(
                "expected {} relation interpretations, got {}",
                vocab.relations.len(),
                relations.len()
            )));
        }
        let mut rels = Vec::with_capacity(relations.len());
        for ((name, arity), tuples) in vocab.relations.iter().zip(relations) {
            let mut mapped = Vec::with_capacity(tuples.len());
            for t in tuples {
                if t.len() != *arity {
                    return Err(Error::Arity {
                        relation: name.clone(),
                        expected: *arity,
                        found: t.len(),
                        tuple: format!("{t:?}"),
                    });
                }
                if let Some(&bad) = t.iter().find(|&&x| x >= n) {
                    return Err(Error::DanglingElement(format!("#{bad}")));
                }
                mapped.push(t.iter().map(|&x| rank[x]).collect());
            }
            rels.push(Relation::new(*arity, n, mapped));
        }
        if constants.len() != vocab.constants.len() {
            let missing = &vocab.constants[constants.len().min(vocab.constants.len())];
            return Err(Error::UninterpretedConstant(missing.clone()));
        }
        let mut consts = Vec::with_capacity(constants.len());
        for &c in &constants {
            if c >= n {
                return Err(Error::DanglingElement(format!("#{c}")));
            }
            consts.push(rank[c]);
        }
        Ok(Structure(Arc::new(Inner { vocab, elements, relations: rels, constants: consts })))
    }

    pub fn builder(vocab: Vocabulary) -> StructureBuilder {
        StructureBuilder { vocab, elements: Vec::new(), tuples: Vec::new(), constants: Vec::new() }
    }

    /// The structure with no elements; only exists for constant-free vocabularies.
    pub fn empty(vocab: Vocabulary) -> Result<Self> {
        let r = vocab.relations.len();
        Structure::from_parts(vocab, Vec::new(), vec![Vec::new(); r], Vec::new())
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.0.vocab
    }

    pub(crate) fn vocab_arc(&self) -> &Arc<Vocabulary> {
        &self.0.vocab
    }

    pub fn same_vocab(&self, other: &Structure) -> bool {
        Arc::ptr_eq(&self.0.vocab, &other.0.vocab) || self.0.vocab == other.0.vocab
    }

    pub(crate) fn require_same_vocab(&self, other: &Structure) -> Result<()> {
        if self.same_vocab(other) {
            Ok(())
        } else {
            Err(Error::VocabularyMismatch)
        }
    }

    pub fn size(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.0.elements
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0.elements[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.elements.binary_search_by(|e| e.as_str().cmp(name)).ok()
    }

    pub fn require_index(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::DanglingElement(name.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.require_index(n.as_ref())).collect()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.0.relations
    }

    pub fn relation(&self, index: usize) -> &Relation {
        &self.0.relations[index]
    }

    pub fn relation_named(&self, name: &str) -> Option<&Relation> {
        self.vocab().relation_index(name).map(|i| self.relation(i))
    }

    /// Constant interpretations, in vocabulary order.
    pub fn constants(&self) -> &[usize] {
        &self.0.constants
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.vocab().constant_index(name).map(|i| self.0.constants[i])
    }

    /// Sorted, deduplicated set of elements interpreting some constant.
    pub fn constant_elements(&self) -> Vec<usize> {
        let mut v = self.0.constants.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Total number of tuples over all relations.
    pub fn tuple_count(&self) -> usize {
        self.0.relations.iter().map(Relation::len).sum()
    }

    /// Relation tuples as index vectors, one list per relation.
    pub fn relation_tuples(&self) -> Vec<Vec<Vec<usize>>> {
        self.0.relations.iter().map(Relation::to_vecs).collect()
    }

    /// The substructure induced on `keep` (indices into this structure).
    pub fn induced(&self, keep: &[usize]) -> Result<Structure> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&x| x >= self.size()) {
            return Err(Error::DanglingElement(format!("#{bad}")));
        }
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &x) in keep.iter().enumerate() {
            pos[x] = i;
        }
        let names = keep.iter().map(|&x| self.name(x).to_string()).collect();
        let rels = self
            .relations()
            .iter()
            .map(|r| {
                r.tuples()
                    .filter(|t| t.iter().all(|&x| pos[x] != usize::MAX))
                    .map(|t| t.iter().map(|&x| pos[x]).collect())
                    .collect()
            })
            .collect();
        let mut consts = Vec::with_capacity(self.constants().len());
        for (ci, &c) in self.constants().iter().enumerate() {
            if pos[c] == usize::MAX {
                return Err(Error::UninterpretedConstant(self.vocab().constants[ci].clone()));
            }
            consts.push(pos[c]);
        }
        Structure::from_parts(self.vocab_arc().clone(), names, rels, consts)
    }

    /// Whether `other` is an induced substructure of `self` (same names).
    pub fn has_induced_substructure(&self, other: &Structure) -> bool {
        if !self.same_vocab(other) {
            return false;
        }
        let Ok(keep) = self.indices_of(other.elements()) else {
            return false;
        };
        match self.induced(&keep) {
            Ok(sub) => sub == *other,
            Err(_) => false,
        }
    }

    /// Same structure with elements renamed by `rename` (must stay injective).
    pub fn renamed(&self, rename: impl Fn(usize, &str) -> String) -> Result<Structure> {
        let names = (0..self.size()).map(|i| rename(i, self.name(i))).collect();
        Structure::from_parts(
            self.vocab_arc().clone(),
            names,
            self.relation_tuples(),
            self.constants().to_vec(),
        )
    }

    /// Same relational content over a different (compatible) vocabulary object.
    pub(crate) fn with_vocab(&self, vocab: Arc<Vocabulary>, constants: Vec<usize>) -> Result<Structure> {
        Structure::from_parts(vocab, self.elements().to_vec(), self.relation_tuples(), constants)
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.same_vocab(other)
            && self.0.elements == other.0.elements
            && self.0.constants == other.0.constants
            && self
                .0
                .relations
                .iter()
                .zip(&other.0.relations)
                .all(|(a, b)| a.data == b.data)
    }
}

impl Eq for Structure {}

impl Hash for Structure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.elements.hash(state);
        self.0.constants.hash(state);
        for r in &self.0.relations {
            r.data.hash(state);
        }
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure{{")?;
        write!(f, "{:?}", self.elements())?;
        for ((name, _), rel) in self.vocab().relations.iter().zip(self.relations()) {
            write!(f, " {name}:")?;
            let shown: Vec<String> = rel
                .tuples()
                .map(|t| {
                    let names: Vec<&str> = t.iter().map(|&x| self.name(x)).collect();
                    format!("({})", names.join(","))
                })
                .collect();
            write!(f, "[{}]", shown.join(" "))?;
        }
        for (name, &c) in self.vocab().constants.iter().zip(self.constants()) {
            write!(f, " {name}={}", self.name(c))?;
        }
        write!(f, "}}")
    }
}

/// Incremental construction of a [`Structure`] by element names.
pub struct StructureBuilder {
    vocab: Vocabulary,
    elements: Vec<String>,
    tuples: Vec<(String, Vec<String>)>,
    constants: Vec<(String, String)>,
}

impl StructureBuilder {
    pub fn element(mut self, name: impl Into<String>) -> Self {
        self.elements.push(name.into());
        self
    }

    pub fn elements<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.elements.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn tuple<I, S>(mut self, relation: &str, tuple: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tuples.push((relation.to_string(), tuple.into_iter().map(Into::into).collect()));
        self
    }

    /// Adds both `(a,b)` and `(b,a)` to a binary relation.
    pub fn edge(self, relation: &str, a: &str, b: &str) -> Self {
        self.tuple(relation, [a, b]).tuple(relation, [b, a])
    }

    pub fn constant(mut self, name: &str, element: &str) -> Self {
        self.constants.push((name.to_string(), element.to_string()));
        self
    }

    pub fn build(self) -> Result<Structure> {
        let doc = StructureDoc::from_builder(self.vocab, self.elements, self.tuples, self.constants);
        doc.to_structure()
    }
}

/// Short element names: `a`..`z`, then `e26`, `e27`, ...
pub fn letter_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("e{i}")
            }
        })
        .collect()
}
