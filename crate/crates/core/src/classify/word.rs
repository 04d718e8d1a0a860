//! Words in the basis elements and the chain-membership conditions built from them.

use std::fmt;

use crate::error::{Error, Result};
use crate::filtration::ChainReport;
use crate::linalg::FpVector;
use crate::prelie::PreLieAlgebra;

/// Linear combination of non-associative products of basis elements.
/// `a*b*c` parses as `(a*b)*c`; integer factors scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Basis(usize),
    Int(i64),
    Mul(Box<Word>, Box<Word>),
    Add(Box<Word>, Box<Word>),
    Neg(Box<Word>),
}

enum Val {
    Int(i64),
    Vec(FpVector),
}

impl Word {
    pub fn parse(text: &str, names: &[String]) -> Result<Word> {
        let mut p = WordParser {
            s: text.as_bytes(),
            pos: 0,
            names,
            text,
        };
        let w = p.expr()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(w)
    }

    pub fn eval(&self, a: &PreLieAlgebra) -> FpVector {
        match self.eval_val(a) {
            Val::Vec(v) => v,
            Val::Int(n) => {
                assert_eq!(n, 0, "a bare nonzero integer is not an algebra element");
                a.zero_vector()
            }
        }
    }

    fn eval_val(&self, a: &PreLieAlgebra) -> Val {
        let f = a.field();
        match self {
            Word::Basis(i) => Val::Vec(a.unit(*i)),
            Word::Int(n) => Val::Int(*n),
            Word::Neg(w) => match w.eval_val(a) {
                Val::Int(n) => Val::Int(-n),
                Val::Vec(v) => Val::Vec(v.neg()),
            },
            Word::Mul(x, y) => match (x.eval_val(a), y.eval_val(a)) {
                (Val::Int(m), Val::Int(n)) => Val::Int(m * n),
                (Val::Int(m), Val::Vec(v)) | (Val::Vec(v), Val::Int(m)) => Val::Vec(v.scale(f.reduce(m))),
                (Val::Vec(u), Val::Vec(v)) => Val::Vec(a.mul(&u, &v)),
            },
            Word::Add(x, y) => match (x.eval_val(a), y.eval_val(a)) {
                (Val::Int(m), Val::Int(n)) => Val::Int(m + n),
                (Val::Vec(u), Val::Vec(v)) => Val::Vec(u.add(&v)),
                (Val::Int(0), v) | (v, Val::Int(0)) => v,
                _ => panic!("sum of an integer and an algebra element"),
            },
        }
    }

    /// `Some((i, j))` when the word is a single product of two basis elements.
    pub fn as_basis_product(&self) -> Option<(usize, usize)> {
        match self {
            Word::Mul(x, y) => match (&**x, &**y) {
                (Word::Basis(i), Word::Basis(j)) => Some((*i, *j)),
                _ => None,
            },
            _ => None,
        }
    }
}

struct WordParser<'a> {
    s: &'a [u8],
    pos: usize,
    names: &'a [String],
    text: &'a str,
}

impl WordParser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Usage(format!("{what} at offset {} in '{}'", self.pos, self.text))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Word> {
        let mut acc = if self.eat(b'-') {
            Word::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = Word::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Word::Add(Box::new(acc), Box::new(Word::Neg(Box::new(self.term()?))));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Word> {
        let mut acc = self.atom()?;
        while self.eat(b'*') {
            acc = Word::Mul(Box::new(acc), Box::new(self.atom()?));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Word> {
        self.ws();
        if self.eat(b'(') {
            let w = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(w);
        }
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        let tok = &self.text[start..self.pos];
        if tok.is_empty() {
            return Err(self.err("expected a basis name or integer"));
        }
        if let Ok(n) = tok.parse::<i64>() {
            return Ok(Word::Int(n));
        }
        self.names
            .iter()
            .position(|n| n == tok)
            .map(Word::Basis)
            .ok_or_else(|| self.err(&format!("unknown basis name {tok}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    Zero(Word),
    /// Word lies in the strong chain term with this index.
    Member(Word, usize),
    Equal(Word, Word),
}

/// A structural condition together with its source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub text: String,
    pub kind: ConditionKind,
}

impl Condition {
    /// Parses `w = 0`, `w in A^[n]` or `w1 = w2`.
    pub fn parse(text: &str, names: &[String]) -> Result<Condition> {
        let kind = if let Some((w, n)) = text.split_once(" in A^[") {
            let n = n
                .strip_suffix(']')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| Error::Usage(format!("bad chain index in '{text}'")))?;
            ConditionKind::Member(Word::parse(w, names)?, n)
        } else if let Some((l, r)) = text.split_once('=') {
            let l = Word::parse(l, names)?;
            if r.trim() == "0" {
                ConditionKind::Zero(l)
            } else {
                ConditionKind::Equal(l, Word::parse(r, names)?)
            }
        } else {
            return Err(Error::Usage(format!("condition needs '=' or 'in A^[n]': {text}")));
        };
        Ok(Condition {
            text: text.to_string(),
            kind,
        })
    }

    pub fn holds(&self, a: &PreLieAlgebra, strong: &ChainReport) -> bool {
        match &self.kind {
            ConditionKind::Zero(w) => w.eval(a).is_zero(),
            ConditionKind::Equal(l, r) => l.eval(a) == r.eval(a),
            ConditionKind::Member(w, n) => {
                let v = w.eval(a);
                match strong.term(*n) {
                    Some(t) => t.contains(&v).expect("same ambient"),
                    None => false,
                }
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
