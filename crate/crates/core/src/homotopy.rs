//! Lifting problems and the classes of the core model structure.

use crate::cores::{quotient_poset, Poset};
use crate::error::{Error, Result};
use crate::games::k_hom_equivalent;
use crate::homsearch::{self, HomSearch, SearchBudget};
use crate::logic::{canonical_sentence, Formula, PpTestFamily};
use crate::structures::{coproduct, initial_morphism, Morphism, Structure};

/// A commutative square `p ∘ f = g ∘ i` with `i: A -> B`, `p: X -> Y`,
/// `f: A -> X` and `g: B -> Y`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub i: Morphism,
    pub p: Morphism,
    pub f: Morphism,
    pub g: Morphism,
}

impl LiftingProblem {
    pub fn new(i: Morphism, p: Morphism, f: Morphism, g: Morphism) -> Result<Self> {
        let shapes = f.source() == i.source()
            && f.target() == p.source()
            && g.source() == i.target()
            && g.target() == p.target();
        if !shapes {
            return Err(Error::Malformed("lifting square: objects do not match".into()));
        }
        let commutes = (0..i.source().size()).all(|a| p.apply(f.apply(a)) == g.apply(i.apply(a)));
        if !commutes {
            return Err(Error::Malformed("lifting square does not commute".into()));
        }
        Ok(LiftingProblem { i, p, f, g })
    }
}

/// A homomorphism `h: B -> X` with `h ∘ i = f` and `p ∘ h = g`.
pub fn find_lift(lp: &LiftingProblem) -> Result<Option<Morphism>> {
    lift_through(&lp.p, &lp.g, Some((&lp.i, &lp.f)))
}

/// Solves `p ∘ h = g`, optionally with `h ∘ i = f`.
fn lift_through(p: &Morphism, g: &Morphism, along: Option<(&Morphism, &Morphism)>) -> Result<Option<Morphism>> {
    let (b, x) = (g.source(), p.source());
    let mut fibres = vec![Vec::new(); p.target().size()];
    for e in 0..x.size() {
        fibres[p.apply(e)].push(e);
    }
    let mut search = HomSearch::new(b, x)?;
    for y in 0..b.size() {
        search = search.restrict(y, &fibres[g.apply(y)]);
    }
    if let Some((i, f)) = along {
        let mut forced = vec![None; b.size()];
        for a in 0..i.source().size() {
            let (y, v) = (i.apply(a), f.apply(a));
            match forced[y] {
                Some(w) if w != v => return Ok(None),
                _ => forced[y] = Some(v),
            }
        }
        for (y, v) in forced.into_iter().enumerate() {
            if let Some(v) = v {
                search = search.pin(y, v);
            }
        }
    }
    let map = search.budget(SearchBudget::default()).first().into_result()?;
    Ok(map.map(|m| Morphism::new(b.clone(), x.clone(), m.map().to_vec()).expect("search returns homomorphisms")))
}

/// Weak equivalences are the maps between homomorphically equivalent objects.
pub fn is_weak_equivalence(f: &Morphism) -> Result<bool> {
    homsearch::hom_equivalent::<&str>(f.source(), f.target(), &[], SearchBudget::default())
}

/// A section `s` with `f ∘ s = id`, if `f` is a retraction.
pub fn find_section(f: &Morphism) -> Result<Option<Morphism>> {
    lift_through(f, &Morphism::identity(f.target()), None)
}

/// Acyclic fibrations are exactly the retractions.
pub fn is_acyclic_fibration(f: &Morphism) -> Result<bool> {
    Ok(find_section(f)?.is_some())
}

/// Right lifting property of `f` against every initial inclusion `∅ -> A`
/// for `A` in `tests`. Returns the first failing square `(A, g)`.
pub fn rlp_against_initial(f: &Morphism, tests: &[Structure]) -> Result<Option<(Structure, Morphism)>> {
    let y = f.target();
    for a in tests {
        a.require_same_vocab(y)?;
        let init = initial_morphism(a.vocab(), a)?;
        let into_x = initial_morphism(a.vocab(), f.source())?;
        let mut failure = None;
        HomSearch::new(a, y)?.budget(SearchBudget::nodes(u64::MAX)).for_each(|g| {
            let g = Morphism::new(a.clone(), y.clone(), g.to_vec()).expect("search returns homomorphisms");
            match lift_through(f, &g, Some((&init, &into_x))) {
                Ok(Some(_)) => std::ops::ControlFlow::Continue(()),
                Ok(None) => {
                    failure = Some(Ok(g));
                    std::ops::ControlFlow::Break(())
                }
                Err(e) => {
                    failure = Some(Err(e));
                    std::ops::ControlFlow::Break(())
                }
            }
        })?;
        if let Some(r) = failure {
            return Ok(Some((a.clone(), r?)));
        }
    }
    Ok(None)
}

/// A retraction `r` with `r ∘ f = id`, if `f` is a section.
pub fn find_retraction_of(f: &Morphism) -> Result<Option<Morphism>> {
    let (a, b) = (f.source(), f.target());
    let mut forced = vec![None; b.size()];
    for x in 0..a.size() {
        match forced[f.apply(x)] {
            Some(w) if w != x => return Ok(None),
            _ => forced[f.apply(x)] = Some(x),
        }
    }
    let pins: Vec<(usize, usize)> = forced.iter().enumerate().filter_map(|(y, v)| v.map(|v| (y, v))).collect();
    let found = HomSearch::new(b, a)?.pins(&pins).first().into_result()?;
    Ok(found.map(|m| Morphism::new(b.clone(), a.clone(), m.map().to_vec()).expect("search returns homomorphisms")))
}

pub fn is_section(f: &Morphism) -> Result<bool> {
    Ok(find_retraction_of(f)?.is_some())
}

/// Classification of one morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismClass {
    pub weak_equivalence: bool,
    pub acyclic_fibration: bool,
    pub section: bool,
}

pub fn classify_morphism(f: &Morphism) -> Result<MorphismClass> {
    Ok(MorphismClass {
        weak_equivalence: is_weak_equivalence(f)?,
        acyclic_fibration: is_acyclic_fibration(f)?,
        section: is_section(f)?,
    })
}

/// Left homotopy between parallel maps through the cylinder `A ⊔ A`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub cylinder: Structure,
    /// `H: A ⊔ A -> X` restricting to `f` and `g` on the two copies.
    pub witness: Morphism,
}

/// Any two parallel maps are homotopic; returns the copairing witness.
pub fn homotopic(f: &Morphism, g: &Morphism) -> Result<Homotopy> {
    if !f.is_parallel(g) {
        return Err(Error::NotParallel);
    }
    let cyl = coproduct(f.source(), f.source())?;
    let mut map = vec![usize::MAX; cyl.structure.size()];
    for x in 0..f.source().size() {
        map[cyl.left.apply(x)] = f.apply(x);
        map[cyl.right.apply(x)] = g.apply(x);
    }
    let witness = Morphism::new(cyl.structure.clone(), f.target().clone(), map)?;
    Ok(Homotopy { cylinder: cyl.structure, witness })
}

/// A weak equivalence whose endpoints are also k-homomorphically equivalent.
pub fn is_weak_k_equivalence(f: &Morphism, k: usize) -> Result<bool> {
    Ok(is_weak_equivalence(f)? && k_hom_equivalent::<&str>(f.source(), f.target(), k, &[])?)
}

/// The homotopy category of a finite collection: its hom-equivalence quotient.
pub fn homotopy_category<S: AsRef<str>>(collection: &[Structure], over: &[S]) -> Result<Poset> {
    quotient_poset(collection, over)
}

/// Both sides of the pp-characterization of k-homotopic equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem3Report {
    /// `N1 ⇄^k N2`, decided by the existential game.
    pub lhs: bool,
    /// Agreement on every pp-test of the bounded family.
    pub rhs: bool,
    /// A test true in one structure and false in the other: `(true in
    /// first?, sentence)`.
    pub separating: Option<(bool, Formula)>,
    pub family_size: usize,
}

impl Theorem3Report {
    pub fn agrees(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn theorem3_verify(n1: &Structure, n2: &Structure, k: usize, size_cap: usize) -> Result<Theorem3Report> {
    n1.require_same_vocab(n2)?;
    let family = PpTestFamily::new(n1.vocab(), k, size_cap)?;
    theorem3_with_family(n1, n2, &family)
}

/// As [`theorem3_verify`] with a prepared test family.
pub fn theorem3_with_family(n1: &Structure, n2: &Structure, family: &PpTestFamily) -> Result<Theorem3Report> {
    let lhs = k_hom_equivalent::<&str>(n1, n2, family.k, &[])?;
    let separating = match family.separating(n1, n2)? {
        Some(t) => Some((true, canonical_sentence(t, &[])?)),
        None => match family.separating(n2, n1)? {
            Some(t) => Some((false, canonical_sentence(t, &[])?)),
            None => None,
        },
    };
    Ok(Theorem3Report { lhs, rhs: separating.is_none(), separating, family_size: family.tests.len() })
}
