//! Sparse multivariate polynomials with integer coefficients, evaluated mod p.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// A monomial is a sorted list of variable indices, repeated for powers.
pub type Monomial = Vec<u16>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, i64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: usize) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![v as u16], 1);
        p
    }

    pub fn add_term(&mut self, mut mono: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        mono.sort_unstable();
        let sum = self.terms.get(&mono).copied().unwrap_or(0) + c;
        if sum == 0 {
            self.terms.remove(&mono);
        } else {
            self.terms.insert(mono, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flatten().map(|&x| x as usize).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, s: i64) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Value at `point` in F_p.
    pub fn eval(&self, field: PrimeField, point: &[u32]) -> u32 {
        let mut acc = 0u32;
        for (m, c) in self.terms() {
            let mut t = field.reduce(c);
            for &v in m {
                t = field.mul(t, point[v as usize]);
            }
            acc = field.add(acc, t);
        }
        acc
    }

    /// Same polynomial with every coefficient reduced mod p and zero terms dropped.
    pub fn reduce(&self, field: PrimeField) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), field.reduce(c) as i64);
        }
        out
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, names }
    }
}

struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.poly.terms().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if n == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let mut parts: Vec<String> = Vec::new();
            if a != 1 || m.is_empty() {
                parts.push(a.to_string());
            }
            parts.extend(m.iter().map(|&v| self.names[v as usize].clone()));
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

/// Parses `lhs = rhs` into `lhs - rhs`, resolving identifiers with `lookup`.
///
/// Grammar: sums and differences of products of integers, identifiers,
/// `ident^n` powers and parenthesised subexpressions.
pub fn parse_equation(text: &str, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<Poly> {
    let (lhs, rhs) = text
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("equation without '=': {text}")))?;
    Ok(parse_poly(lhs, lookup)?.sub(&parse_poly(rhs, lookup)?))
}

pub fn parse_poly(text: &str, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<Poly> {
    let tokens = tokenize(text)?;
    let mut p = PolyParser {
        tokens,
        pos: 0,
        lookup,
        text,
    };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(
                s.parse().map_err(|_| Error::Usage(format!("bad number {s}")))?,
            ));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Usage(format!("unexpected character '{c}' in {text}")));
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    lookup: &'a dyn Fn(&str) -> Option<usize>,
    text: &'a str,
}

impl PolyParser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Usage(format!("{what} at token {} in '{}'", self.pos, self.text.trim()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = if self.eat('-') {
            self.term()?.scale(-1)
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n >= 0 => {
                    self.pos += 1;
                    let mut acc = Poly::constant(1);
                    for _ in 0..n {
                        acc = acc.mul(&base);
                    }
                    Ok(acc)
                }
                _ => Err(self.err("expected exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::constant(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let v = (self.lookup)(&name).ok_or_else(|| self.err(&format!("unknown symbol {name}")))?;
                Ok(Poly::var(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(self.atom()?.scale(-1))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &str) -> Option<usize> {
        ["a", "b", "c"].iter().position(|n| *n == s)
    }

    #[test]
    fn parse_and_eval() {
        let f = PrimeField::new(7).unwrap();
        let p = parse_equation("a^2*b - 3*c = b*a*a - (c + 1)", &names).unwrap();
        // a^2 b - 3c - a^2 b + c + 1 = 1 - 2c
        assert_eq!(p, Poly::constant(1).sub(&Poly::var(2).scale(2)));
        assert_eq!(p.eval(f, &[0, 0, 4]), f.reduce(1 - 8));
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = Poly::var(0).sub(&Poly::var(0));
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        assert!(parse_poly("a*d", &names).is_err());
        assert!(parse_poly("a*", &names).is_err());
        assert!(parse_equation("a + b", &names).is_err());
    }

    #[test]
    fn display_round_trips_through_parser() {
        let p = parse_poly("2*a*b - c^2 + 5", &names).unwrap();
        let n: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let text = p.display_with(&n).to_string();
        assert_eq!(parse_poly(&text, &names).unwrap(), p);
    }
}
