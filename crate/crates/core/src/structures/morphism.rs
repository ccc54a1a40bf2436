use std::collections::BTreeMap;
use std::fmt;

use super::Structure;
use crate::error::{Error, Result};

/// Whether `map` (indexed by source element) is a homomorphism `a -> b`.
pub fn check_homomorphism(map: &[usize], a: &Structure, b: &Structure) -> Result<bool> {
    a.require_same_vocab(b)?;
    Ok(is_hom(map, a, b))
}

pub(crate) fn is_hom(map: &[usize], a: &Structure, b: &Structure) -> bool {
    if map.len() != a.size() || map.iter().any(|&x| x >= b.size()) {
        return false;
    }
    if a.constants().iter().zip(b.constants()).any(|(&ca, &cb)| map[ca] != cb) {
        return false;
    }
    let mut image = Vec::new();
    a.relations().iter().zip(b.relations()).all(|(ra, rb)| {
        ra.tuples().all(|t| {
            image.clear();
            image.extend(t.iter().map(|&x| map[x]));
            rb.contains(&image)
        })
    })
}

/// Whether `map` is a bijective homomorphism whose inverse is a homomorphism.
pub fn check_isomorphism(map: &[usize], a: &Structure, b: &Structure) -> Result<bool> {
    a.require_same_vocab(b)?;
    if a.size() != b.size() || map.len() != a.size() {
        return Ok(false);
    }
    let Some(inverse) = invert(map, b.size()) else {
        return Ok(false);
    };
    Ok(is_hom(map, a, b) && is_hom(&inverse, b, a))
}

pub(crate) fn invert(map: &[usize], target_size: usize) -> Option<Vec<usize>> {
    let mut inv = vec![usize::MAX; target_size];
    for (i, &x) in map.iter().enumerate() {
        if x >= target_size || inv[x] != usize::MAX {
            return None;
        }
        inv[x] = i;
    }
    inv.iter().all(|&x| x != usize::MAX).then_some(inv)
}

/// A verified homomorphism between two structures.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    source: Structure,
    target: Structure,
    map: Vec<usize>,
}

impl Morphism {
    pub fn new(source: Structure, target: Structure, map: Vec<usize>) -> Result<Self> {
        if !check_homomorphism(&map, &source, &target)? {
            return Err(Error::NotHomomorphism(describe(&map, &source, &target)));
        }
        Ok(Morphism { source, target, map })
    }

    pub(crate) fn new_unchecked(source: Structure, target: Structure, map: Vec<usize>) -> Self {
        debug_assert!(is_hom(&map, &source, &target));
        Morphism { source, target, map }
    }

    /// Builds a morphism from `source-name -> target-name` pairs.
    pub fn from_names<S: AsRef<str>>(
        source: &Structure,
        target: &Structure,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut map = vec![usize::MAX; source.size()];
        for (a, b) in pairs {
            map[source.require_index(a.as_ref())?] = target.require_index(b.as_ref())?;
        }
        if let Some(i) = map.iter().position(|&x| x == usize::MAX) {
            return Err(Error::Malformed(format!("map is undefined on {:?}", source.name(i))));
        }
        Morphism::new(source.clone(), target.clone(), map)
    }

    pub fn identity(s: &Structure) -> Self {
        Morphism { source: s.clone(), target: s.clone(), map: (0..s.size()).collect() }
    }

    pub fn source(&self) -> &Structure {
        &self.source
    }

    pub fn target(&self) -> &Structure {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Morphism) -> Result<Morphism> {
        if self.target != then.source {
            return Err(Error::Malformed("morphisms are not composable".into()));
        }
        let map = self.map.iter().map(|&x| then.map[x]).collect();
        Morphism::new(self.source.clone(), then.target.clone(), map)
    }

    pub fn is_parallel(&self, other: &Morphism) -> bool {
        self.source == other.source && self.target == other.target
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        self.map.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        for &x in &self.map {
            seen[x] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// The map as `source-name -> target-name`.
    pub fn to_names(&self) -> BTreeMap<String, String> {
        self.map
            .iter()
            .enumerate()
            .map(|(i, &x)| (self.source.name(i).to_string(), self.target.name(x).to_string()))
            .collect()
    }
}

fn describe(map: &[usize], a: &Structure, b: &Structure) -> String {
    let parts: Vec<String> = map
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let src = a.elements().get(i).map(String::as_str).unwrap_or("?");
            let dst = b.elements().get(x).map(String::as_str).unwrap_or("?");
            format!("{src}->{dst}")
        })
        .collect();
    parts.join(",")
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism[{}]", describe(&self.map, &self.source, &self.target))
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&describe(&self.map, &self.source, &self.target))
    }
}
