//! First-order formulas over relational vocabularies.
//!
//! Formulas are parsed from a small text syntax, evaluated over finite
//! structures, and classified. Primitive-positive sentences correspond to
//! structures through [`canonical_structure`] and [`canonical_sentence`].

mod canonical;
mod eval;
mod parser;

pub use canonical::{
    canonical_sentence, canonical_structure, enumerate_pp_tests, preserves_pp, separating_test,
    PpTestFamily,
};
pub(crate) use canonical::expand_over;
pub use eval::{evaluate, evaluate_named, Assignment};
pub use parser::{parse, parse_with};

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::structures::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom { relation: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaClass {
    PrimitivePositive,
    ExistentialPositive,
    General,
}

impl fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormulaClass::PrimitivePositive => "primitive-positive",
            FormulaClass::ExistentialPositive => "existential-positive",
            FormulaClass::General => "general",
        })
    }
}

impl Formula {
    pub fn atom<S: Into<String>>(relation: &str, args: impl IntoIterator<Item = S>) -> Formula {
        Formula::Atom {
            relation: relation.to_string(),
            args: args.into_iter().map(|a| Term::Var(a.into())).collect(),
        }
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    /// Conjunction of `parts`, left-nested; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Maximal nesting depth of quantifiers.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::Not(p) => p.quantifier_rank(),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                p.quantifier_rank().max(q.quantifier_rank())
            }
            Formula::Exists(_, p) | Formula::Forall(_, p) => 1 + p.quantifier_rank(),
        }
    }

    pub fn classify(&self) -> FormulaClass {
        fn positive(f: &Formula, disjunction: &mut bool) -> bool {
            match f {
                Formula::True | Formula::Atom { .. } | Formula::Eq(..) => true,
                Formula::And(p, q) => positive(p, disjunction) && positive(q, disjunction),
                Formula::Or(p, q) => {
                    *disjunction = true;
                    positive(p, disjunction) && positive(q, disjunction)
                }
                Formula::Exists(_, p) => positive(p, disjunction),
                _ => false,
            }
        }
        let mut disjunction = false;
        match (positive(self, &mut disjunction), disjunction) {
            (true, false) => FormulaClass::PrimitivePositive,
            (true, true) => FormulaClass::ExistentialPositive,
            _ => FormulaClass::General,
        }
    }

    pub fn is_primitive_positive(&self) -> bool {
        self.classify() == FormulaClass::PrimitivePositive
    }

    /// Free variables in sorted order.
    pub fn free_variables(&self) -> Vec<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let mut term = |t: &Term, bound: &Vec<String>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            };
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, bound)),
                Formula::Eq(s, t) => {
                    term(s, bound);
                    term(t, bound);
                }
                Formula::Not(p) => walk(p, bound, out),
                Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                    walk(p, bound, out);
                    walk(q, bound, out);
                }
                Formula::Exists(v, p) | Formula::Forall(v, p) => {
                    bound.push(v.clone());
                    walk(p, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out.into_iter().collect()
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Checks relation symbols, arities and constants against `vocab`.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        let check_term = |t: &Term| match t {
            Term::Const(c) if vocab.constant_index(c).is_none() => Err(Error::UnknownSymbol(c.clone())),
            _ => Ok(()),
        };
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom { relation, args } => {
                let arity = vocab.arity(relation).ok_or_else(|| Error::UnknownSymbol(relation.clone()))?;
                if arity != args.len() {
                    return Err(Error::Arity {
                        relation: relation.clone(),
                        expected: arity,
                        found: args.len(),
                        tuple: render_args(args),
                    });
                }
                args.iter().try_for_each(check_term)
            }
            Formula::Eq(s, t) => check_term(s).and_then(|_| check_term(t)),
            Formula::Not(p) | Formula::Exists(_, p) | Formula::Forall(_, p) => p.check_vocabulary(vocab),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                p.check_vocabulary(vocab)?;
                q.check_vocabulary(vocab)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) | Formula::Implies(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom { relation, args } => write!(f, "{relation}({})", render_args(args)),
            Formula::Eq(s, t) => write!(f, "{} = {}", s.name(), t.name()),
            Formula::Not(p) => {
                f.write_str("!")?;
                p.write_at(f, 3)
            }
            Formula::And(p, q) => {
                p.write_at(f, 2)?;
                f.write_str(" & ")?;
                q.write_at(f, 3)
            }
            Formula::Or(p, q) => {
                p.write_at(f, 1)?;
                f.write_str(" | ")?;
                q.write_at(f, 2)
            }
            Formula::Implies(p, q) => {
                p.write_at(f, 1)?;
                f.write_str(" -> ")?;
                q.write_at(f, 0)
            }
            Formula::Exists(v, p) => {
                write!(f, "exists {v}. ")?;
                p.write_at(f, 0)
            }
            Formula::Forall(v, p) => {
                write!(f, "forall {v}. ")?;
                p.write_at(f, 0)
            }
        }
    }
}

fn render_args(args: &[Term]) -> String {
    args.iter().map(Term::name).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

pub fn quantifier_rank(f: &Formula) -> usize {
    f.quantifier_rank()
}

pub fn classify(f: &Formula) -> FormulaClass {
    f.classify()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Formula {
        parse(text).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(p("E(x,y)").quantifier_rank(), 0);
        assert_eq!(p("exists x. exists y. E(x,y)").quantifier_rank(), 2);
        assert_eq!(p("(exists x. E(x,x)) & (exists y. E(y,y))").quantifier_rank(), 1);
    }

    #[test]
    fn classes() {
        assert_eq!(p("exists x. E(x,x)").classify(), FormulaClass::PrimitivePositive);
        assert_eq!(p("exists x. E(x,x) | E(x,x)").classify(), FormulaClass::ExistentialPositive);
        assert_eq!(p("forall x. E(x,x)").classify(), FormulaClass::General);
        assert_eq!(p("exists x. !E(x,x)").classify(), FormulaClass::General);
        assert_eq!(p("exists x. exists y. x = y & E(x,y)").classify(), FormulaClass::PrimitivePositive);
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "exists x. E(x,x)",
            "exists b. (exists a. E(a,b) & E(b,a)) & (exists c. E(b,c) & E(c,b))",
            "E(x,y) & (E(y,z) | x = z)",
            "!(E(x,y) -> E(y,x)) -> forall z. z = z",
            "E(x,y) & E(y,z) & E(z,x)",
            "E(x,y) & (E(y,z) & E(z,x))",
            "true & !false",
        ] {
            let f = p(text);
            assert_eq!(f.to_string(), text);
            assert_eq!(p(&f.to_string()), f);
        }
        assert_eq!(p("(E(x,y) & E(y,z)) & E(z,x)").to_string(), "E(x,y) & E(y,z) & E(z,x)");
    }

    #[test]
    fn free_variables_respect_binders() {
        assert_eq!(p("exists x. E(x,y) & E(z,x)").free_variables(), vec!["y", "z"]);
        assert!(p("exists x. E(x,x)").is_sentence());
    }
}
