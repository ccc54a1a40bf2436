//! Canonical textual form of structures.
//!
//! The document is JSON with sorted keys and sorted lists, so two documents are
//! byte-equal exactly when the structures are equal.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Structure, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabDoc {
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    pub universe: Vec<String>,
    pub vocab: VocabDoc,
}

/// Checks every structure invariant, reporting the first violation.
pub fn validate(doc: &StructureDoc) -> Result<()> {
    doc.to_structure().map(|_| ())
}

impl VocabDoc {
    pub fn to_vocabulary(&self) -> Result<Vocabulary> {
        Vocabulary::new(
            self.relations.iter().map(|(n, &a)| (n.clone(), a)),
            self.constants.iter().cloned(),
        )
    }

    pub fn from_vocabulary(v: &Vocabulary) -> Self {
        VocabDoc {
            constants: v.constants().to_vec(),
            relations: v.relations().iter().cloned().collect(),
        }
    }
}

impl StructureDoc {
    pub(super) fn from_builder(
        vocab: Vocabulary,
        elements: Vec<String>,
        tuples: Vec<(String, Vec<String>)>,
        constants: Vec<(String, String)>,
    ) -> Self {
        let mut relations: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
        for (r, t) in tuples {
            relations.entry(r).or_default().push(t);
        }
        StructureDoc {
            constants: constants.into_iter().collect(),
            relations,
            universe: elements,
            vocab: VocabDoc::from_vocabulary(&vocab),
        }
    }

    pub fn to_structure(&self) -> Result<Structure> {
        let vocab = self.vocab.to_vocabulary()?;
        let mut index = HashMap::with_capacity(self.universe.len());
        for (i, e) in self.universe.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate element {e:?}")));
            }
        }
        if let Some(name) = self.relations.keys().find(|r| vocab.relation_index(r).is_none()) {
            return Err(Error::UnknownSymbol(name.clone()));
        }
        let mut rels = Vec::with_capacity(vocab.relations().len());
        for (name, arity) in vocab.relations() {
            let tuples = self.relations.get(name).map(Vec::as_slice).unwrap_or(&[]);
            let mut out = Vec::with_capacity(tuples.len());
            for t in tuples {
                if t.len() != *arity {
                    return Err(Error::Arity {
                        relation: name.clone(),
                        expected: *arity,
                        found: t.len(),
                        tuple: format!("({})", t.join(",")),
                    });
                }
                let mut idx = Vec::with_capacity(t.len());
                for e in t {
                    idx.push(*index.get(e.as_str()).ok_or_else(|| Error::DanglingElement(e.clone()))?);
                }
                out.push(idx);
            }
            rels.push(out);
        }
        if let Some(name) = self.constants.keys().find(|c| vocab.constant_index(c).is_none()) {
            return Err(Error::UnknownSymbol(name.clone()));
        }
        let mut consts = Vec::with_capacity(vocab.constants().len());
        for c in vocab.constants() {
            let e = self.constants.get(c).ok_or_else(|| Error::UninterpretedConstant(c.clone()))?;
            consts.push(*index.get(e.as_str()).ok_or_else(|| Error::DanglingElement(e.clone()))?);
        }
        Structure::from_parts(vocab, self.universe.clone(), rels, consts)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Malformed(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

impl Structure {
    pub fn to_doc(&self) -> StructureDoc {
        let name = |t: &[usize]| t.iter().map(|&x| self.name(x).to_string()).collect();
        StructureDoc {
            constants: self
                .vocab()
                .constants()
                .iter()
                .zip(self.constants())
                .map(|(c, &e)| (c.clone(), self.name(e).to_string()))
                .collect(),
            relations: self
                .vocab()
                .relations()
                .iter()
                .zip(self.relations())
                .map(|((n, _), r)| (n.clone(), r.tuples().map(name).collect()))
                .collect(),
            universe: self.elements().to_vec(),
            vocab: VocabDoc::from_vocabulary(self.vocab()),
        }
    }

    /// Canonical document text; byte equality coincides with structural equality.
    pub fn to_json(&self) -> String {
        self.to_doc().to_json()
    }

    pub fn from_json(text: &str) -> Result<Structure> {
        StructureDoc::from_json(text)?.to_structure()
    }
}
