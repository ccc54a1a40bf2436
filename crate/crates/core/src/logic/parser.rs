//! Recursive-descent parser for the formula syntax.
//!
//! ```text
//! formula := ('exists' | 'forall') var '.' formula | imp
//! imp     := disj ('->' imp)?
//! disj    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | '(' formula ')' | 'true' | 'false'
//!          | ('exists' | 'forall') var '.' formula | atom
//! atom    := NAME '(' term (',' term)* ')' | term '=' term
//! ```

use std::collections::HashMap;

use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::structures::{Vocabulary, KEYWORDS};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Amp,
    Bar,
    Bang,
    Eq,
    Arrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("{n:?}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Eq => "'='".into(),
            Tok::Arrow => "'->'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'!' => Tok::Bang,
            b'=' => Tok::Eq,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, i));
                i += 2;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Name(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().expect("non-empty");
                return Err(Error::Syntax { offset: i, message: format!("unexpected character {ch:?}") });
            }
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: Option<&'v Vocabulary>,
    arities: HashMap<String, usize>,
    bound: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Name(n) if n == "exists" || n == "forall" => self.quantified(),
            _ => self.implication(),
        }
    }

    fn quantified(&mut self) -> Result<Formula> {
        let Tok::Name(q) = self.bump() else { unreachable!("quantifier keyword") };
        let offset = self.offset();
        let var = match self.bump() {
            Tok::Name(v) if !KEYWORDS.contains(&v.as_str()) => v,
            t => {
                self.pos -= usize::from(t != Tok::End);
                return self.error(format!("expected a variable, found {}", t.describe()));
            }
        };
        let is_constant = self.vocab.is_some_and(|v| v.constant_index(&var).is_some());
        if self.bound.contains(&var) || is_constant {
            return Err(Error::Shadowing { name: var, offset });
        }
        self.expect(Tok::Dot)?;
        self.bound.push(var.clone());
        let body = self.formula();
        self.bound.pop();
        let body = Box::new(body?);
        Ok(if q == "exists" { Formula::Exists(var, body) } else { Formula::Forall(var, body) })
    }

    fn implication(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Name(n) if n == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Name(n) if n == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Name(n) if n == "exists" || n == "forall" => self.quantified(),
            Tok::Name(_) => self.atom(),
            t => self.error(format!("expected a formula, found {}", t.describe())),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let Tok::Name(name) = self.bump() else { unreachable!("name token") };
        if *self.peek() == Tok::LParen {
            self.bump();
            let mut args = vec![self.term()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            self.check_relation(&name, &args)?;
            return Ok(Formula::Atom { relation: name, args });
        }
        let left = self.resolve(name);
        if *self.peek() != Tok::Eq {
            return self.error(format!("expected '(' or '=', found {}", self.peek().describe()));
        }
        self.bump();
        let right = self.term()?;
        Ok(Formula::Eq(left, right))
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Name(n) if !KEYWORDS.contains(&n.as_str()) => {
                self.bump();
                Ok(self.resolve(n))
            }
            t => self.error(format!("expected a term, found {}", t.describe())),
        }
    }

    fn resolve(&self, name: String) -> Term {
        let is_constant = !self.bound.contains(&name)
            && self.vocab.is_some_and(|v| v.constant_index(&name).is_some());
        if is_constant {
            Term::Const(name)
        } else {
            Term::Var(name)
        }
    }

    fn check_relation(&mut self, name: &str, args: &[Term]) -> Result<()> {
        let expected = match self.vocab {
            Some(v) => v.arity(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?,
            None => *self.arities.entry(name.to_string()).or_insert(args.len()),
        };
        if expected != args.len() {
            return Err(Error::Arity {
                relation: name.to_string(),
                expected,
                found: args.len(),
                tuple: super::render_args(args),
            });
        }
        Ok(())
    }
}

fn run(text: &str, vocab: Option<&Vocabulary>) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0, vocab, arities: HashMap::new(), bound: Vec::new() };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

/// Parses a formula, inferring relation arities from first use. Every
/// unbound name is a variable.
pub fn parse(text: &str) -> Result<Formula> {
    run(text, None)
}

/// Parses a formula over `vocab`: relation symbols and arities are checked,
/// and unbound names that are constant symbols become constants.
pub fn parse_with(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    run(text, Some(vocab))
}
