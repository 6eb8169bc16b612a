//! Recursive-descent readers for the textual forms of trees, forests,
//! elements, tensors and time polynomials. Whitespace is insignificant and
//! every error carries the byte offset where parsing stopped.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::trees::RawTree;
use crate::Rational;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    // `(x)` is a tensor separator rather than a one-child branch list
    tensor: bool,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor {
            src,
            pos: 0,
            tensor: false,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.rest().chars().next() {
            self.pos += c.len_utf8();
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.error(format!("unexpected `{c}`")),
        }
    }

    fn label(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        match self.rest().chars().next() {
            Some(c) if c.is_ascii_lowercase() => {}
            Some(c) => return self.error(format!("expected a label, found `{c}`")),
            None => return self.error("expected a label, found end of input"),
        }
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit()))
            .unwrap_or(self.rest().len());
        self.pos += len;
        Ok((self.src[start..self.pos].to_string(), start))
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return None;
        }
        let s = &self.rest()[..len];
        self.pos += len;
        Some(s)
    }

    /// Unsigned rational `p` or `p/q`, if one starts here.
    fn rational(&mut self) -> Result<Option<(Rational, &'a str)>> {
        let Some(num) = self.digits() else {
            return Ok(None);
        };
        let num_start = self.pos - num.len();
        let mut den = BigInt::one();
        if self.peek() == Some('/') {
            self.bump();
            match self.digits() {
                Some(d) => den = d.parse().expect("digits"),
                None => return self.error("expected a denominator"),
            }
            if den.is_zero() {
                return self.error("zero denominator");
            }
        }
        let n: BigInt = num.parse().expect("digits");
        Ok(Some((Rational::new(n, den), &self.src[num_start..self.pos])))
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(false)
            }
            Some('-') => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn raw_tree(&mut self) -> Result<RawTree> {
        let (label, offset) = self.label()?;
        let mut children = Vec::new();
        if self.peek() == Some('(') && !(self.tensor && self.rest().starts_with("(x)")) {
            self.bump();
            children.push(self.raw_tree()?);
            loop {
                match self.peek() {
                    Some(',') => {
                        self.bump();
                        children.push(self.raw_tree()?);
                    }
                    Some(')') => {
                        self.bump();
                        break;
                    }
                    Some(c) => return self.error(format!("expected `,` or `)`, found `{c}`")),
                    None => return self.error("expected `,` or `)`, found end of input"),
                }
            }
        }
        Ok(RawTree {
            label,
            children,
            offset,
        })
    }

    /// A forest starting here: `1`, or trees joined by `.`.
    fn raw_forest(&mut self) -> Result<Option<Vec<RawTree>>> {
        match self.peek() {
            Some('1') => {
                // `1` only denotes the unit when not followed by more digits
                let save = self.pos;
                let d = self.digits().unwrap_or("");
                if d == "1" && self.peek() != Some('/') {
                    Ok(Some(Vec::new()))
                } else {
                    self.pos = save;
                    Ok(None)
                }
            }
            Some(c) if c.is_ascii_lowercase() => {
                let mut trees = vec![self.raw_tree()?];
                while self.peek() == Some('.') {
                    self.bump();
                    trees.push(self.raw_tree()?);
                }
                Ok(Some(trees))
            }
            _ => Ok(None),
        }
    }

    /// `[sign] [coefficient] [*] forest ("(x)" forest)*`, with the forest
    /// defaulting to the unit when only a coefficient is given.
    fn term(&mut self, first: bool, arity_hint: Option<usize>) -> Result<(Rational, Vec<Vec<RawTree>>)> {
        let negative = match self.sign() {
            Some(neg) => neg,
            None if first => false,
            None => return self.error("expected `+` or `-`"),
        };
        let coeff_pos = self.pos;
        let coeff = self.rational()?;
        if coeff.is_some() {
            self.eat("*");
        }
        let mut slots = Vec::new();
        match self.raw_forest()? {
            Some(f) => slots.push(f),
            None => match &coeff {
                Some(_) => slots.push(Vec::new()),
                None => return self.error("expected a coefficient or a forest"),
            },
        }
        while self.tensor && self.eat("(x)") {
            match self.raw_forest()? {
                Some(f) => slots.push(f),
                None => return self.error("expected a forest after `(x)`"),
            }
        }
        if let Some(n) = arity_hint {
            if slots.len() != n {
                self.pos = coeff_pos;
                return self.error(format!("expected {n} tensor slots, found {}", slots.len()));
            }
        }
        let mut c = coeff.map(|(c, _)| c).unwrap_or_else(Rational::one);
        if negative {
            c = -c;
        }
        Ok((c, slots))
    }
}

pub(crate) fn parse_raw_tree(input: &str) -> Result<RawTree> {
    let mut cur = Cursor::new(input);
    let t = cur.raw_tree()?;
    cur.finish()?;
    Ok(t)
}

pub(crate) fn parse_raw_forest(input: &str) -> Result<Vec<RawTree>> {
    let mut cur = Cursor::new(input);
    let f = match cur.raw_forest()? {
        Some(f) => f,
        None => return cur.error("expected a forest"),
    };
    cur.finish()?;
    Ok(f)
}

/// Linear combination of tensor words. Single-slot words are elements.
pub(crate) type RawTerms = Vec<(Rational, Vec<Vec<RawTree>>)>;

pub(crate) fn parse_raw_terms(input: &str, arity: Option<usize>) -> Result<RawTerms> {
    let mut cur = Cursor::new(input);
    cur.tensor = arity != Some(1);
    if cur.at_end() {
        return cur.error("empty input");
    }
    let mut out = Vec::new();
    let mut first = true;
    while !cur.at_end() {
        out.push(cur.term(first, arity)?);
        first = false;
    }
    Ok(out)
}

/// Parses `c0 + c1 t + c2 t^2 ...` (terms in any order, repeated powers add up)
/// into a coefficient list indexed by power.
pub(crate) fn parse_poly(input: &str) -> Result<Vec<Rational>> {
    let mut cur = Cursor::new(input);
    if cur.at_end() {
        return cur.error("empty polynomial");
    }
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut first = true;
    while !cur.at_end() {
        let negative = match cur.sign() {
            Some(neg) => neg,
            None if first => false,
            None => return cur.error("expected `+` or `-`"),
        };
        first = false;
        let coeff = cur.rational()?.map(|(c, _)| c);
        if coeff.is_some() {
            cur.eat("*");
        }
        let mut power = 0usize;
        if cur.peek() == Some('t') {
            let (name, _) = cur.label()?;
            if name != "t" {
                return cur.error(format!("unknown variable `{name}`"));
            }
            power = 1;
            if cur.eat("^") {
                match cur.digits() {
                    Some(d) => {
                        power = d
                            .parse()
                            .map_err(|_| Error::Syntax { offset: cur.pos, message: "exponent too large".into() })?
                    }
                    None => return cur.error("expected an exponent"),
                }
            }
        } else if coeff.is_none() {
            return match cur.peek() {
                Some(c) => cur.error(format!("unexpected `{c}`")),
                None => cur.error("unexpected end of input"),
            };
        }
        let mut c = coeff.unwrap_or_else(Rational::one);
        if negative {
            c = -c;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Rational::zero());
        }
        coeffs[power] += c;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_tree_shapes() {
        let t = parse_raw_tree("a(b,c(d))").unwrap();
        assert_eq!(t.label, "a");
        assert_eq!(t.children.len(), 2);
        assert_eq!(t.children[1].children[0].label, "d");
        assert_eq!(t.children[1].children[0].offset, 6);
        assert!(matches!(parse_raw_tree("a()"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_raw_tree("a(a))"), Err(Error::Syntax { offset: 4, .. })));
    }

    #[test]
    fn terms() {
        let t = parse_raw_terms("-1/2 a(a) + 1/12 a(a,a) - a.a + 3", Some(1)).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0].0, Rational::new((-1).into(), 2.into()));
        assert_eq!(t[2].0, Rational::from_integer((-1).into()));
        assert_eq!(t[2].1[0].len(), 2);
        assert!(t[3].1[0].is_empty());
        let t = parse_raw_terms("a (x) 1 + 1 (x) a + 2 a(x)a", Some(2)).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t[0].1[1].is_empty());
        assert!(t[1].1[0].is_empty());
        assert!(parse_raw_terms("a (x) 1 + a", Some(2)).is_err());
        assert!(parse_raw_terms("a a", Some(1)).is_err());
        assert!(parse_raw_terms("1/0 a", Some(1)).is_err());
        let t = parse_raw_terms("1", Some(1)).unwrap();
        assert!(t[0].1[0].is_empty());
        assert_eq!(t[0].0, Rational::one());
        let t = parse_raw_terms("12 a", Some(1)).unwrap();
        assert_eq!(t[0].0, Rational::from_integer(12.into()));
    }

    #[test]
    fn polynomials() {
        let p = parse_poly("1/2 + 3 t - t^3").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], Rational::new(1.into(), 2.into()));
        assert_eq!(p[1], Rational::from_integer(3.into()));
        assert!(p[2].is_zero());
        assert_eq!(p[3], Rational::from_integer((-1).into()));
        assert_eq!(parse_poly("t + t").unwrap()[1], Rational::from_integer(2.into()));
        assert!(parse_poly("x").is_err());
        assert!(parse_poly("").is_err());
    }
}
