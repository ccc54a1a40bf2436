//! Tarskian satisfaction over finite structures.

use std::collections::{BTreeMap, HashMap};

use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::structures::Structure;

/// Values of free variables, as element indices.
pub type Assignment = BTreeMap<String, usize>;

struct Eval<'a> {
    a: &'a Structure,
    env: HashMap<String, usize>,
    tuple: Vec<usize>,
}

impl Eval<'_> {
    fn term(&self, t: &Term) -> Result<usize> {
        match t {
            Term::Var(v) => self.env.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.clone())),
            Term::Const(c) => self.a.constant(c).ok_or_else(|| Error::UnknownSymbol(c.clone())),
        }
    }

    fn holds(&mut self, f: &Formula) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { relation, args } => {
                let rel = self.a.relation_named(relation).ok_or_else(|| Error::UnknownSymbol(relation.clone()))?;
                let mut tuple = std::mem::take(&mut self.tuple);
                tuple.clear();
                for t in args {
                    tuple.push(self.term(t)?);
                }
                let result = rel.contains(&tuple);
                self.tuple = tuple;
                result
            }
            Formula::Eq(s, t) => self.term(s)? == self.term(t)?,
            Formula::Not(p) => !self.holds(p)?,
            Formula::And(p, q) => self.holds(p)? && self.holds(q)?,
            Formula::Or(p, q) => self.holds(p)? || self.holds(q)?,
            Formula::Implies(p, q) => !self.holds(p)? || self.holds(q)?,
            Formula::Exists(v, p) => self.quantify(v, p, true)?,
            Formula::Forall(v, p) => self.quantify(v, p, false)?,
        })
    }

    /// Existential (`want = true`) or universal quantification.
    fn quantify(&mut self, v: &str, body: &Formula, want: bool) -> Result<bool> {
        let saved = self.env.get(v).copied();
        let mut result = !want;
        for x in 0..self.a.size() {
            self.env.insert(v.to_string(), x);
            if self.holds(body)? == want {
                result = want;
                break;
            }
        }
        match saved {
            Some(x) => self.env.insert(v.to_string(), x),
            None => self.env.remove(v),
        };
        Ok(result)
    }
}

/// Whether `a` satisfies `f` under `assignment`.
pub fn evaluate(a: &Structure, f: &Formula, assignment: &Assignment) -> Result<bool> {
    f.check_vocabulary(a.vocab())?;
    for v in f.free_variables() {
        match assignment.get(&v) {
            None => return Err(Error::UnboundVariable(v)),
            Some(&x) if x >= a.size() => return Err(Error::DanglingElement(format!("#{x}"))),
            Some(_) => {}
        }
    }
    let env = assignment.iter().map(|(k, &v)| (k.clone(), v)).collect();
    Eval { a, env, tuple: Vec::new() }.holds(f)
}

/// [`evaluate`] with the assignment given by element names.
pub fn evaluate_named<S: AsRef<str>>(a: &Structure, f: &Formula, assignment: &[(S, S)]) -> Result<bool> {
    let mut env = Assignment::new();
    for (var, elem) in assignment {
        env.insert(var.as_ref().to_string(), a.require_index(elem.as_ref())?);
    }
    evaluate(a, f, &env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;
    use crate::structures::fixtures;

    fn sat(a: &Structure, text: &str) -> bool {
        evaluate(a, &parse(text).unwrap(), &Assignment::new()).unwrap()
    }

    #[test]
    fn small_sentences() {
        assert!(sat(&fixtures::loop1(), "exists x. E(x,x)"));
        assert!(!sat(&fixtures::k2(), "exists x. E(x,x)"));
        let s = "exists x. exists y. !(x=y) & !E(x,y)";
        assert!(sat(&fixtures::p3(), s));
        assert!(!sat(&fixtures::k2(), s));
        assert!(sat(&fixtures::k3(), "forall x. exists y. E(x,y)"));
        assert!(sat(&fixtures::pt1(), "forall x. forall y. x = y"));
    }

    #[test]
    fn free_variables_need_values() {
        let f = parse("E(x,y)").unwrap();
        assert_eq!(evaluate(&fixtures::k2(), &f, &Assignment::new()).unwrap_err(), Error::UnboundVariable("x".into()));
        assert!(evaluate_named(&fixtures::k2(), &f, &[("x", "x"), ("y", "y")]).unwrap());
        assert!(!evaluate_named(&fixtures::k2(), &f, &[("x", "x"), ("y", "x")]).unwrap());
    }

    #[test]
    fn vocabulary_is_checked() {
        let f = parse("exists x. R(x)").unwrap();
        assert_eq!(evaluate(&fixtures::k2(), &f, &Assignment::new()).unwrap_err(), Error::UnknownSymbol("R".into()));
    }
}
