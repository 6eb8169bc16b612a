//! Finite linear combinations of forests with exact rational coefficients.
//!
//! One type serves the polynomial algebra S(L), its ∗-deformation S^∗(L)
//! and the pre-Lie algebra L itself (combinations of one-tree forests); which
//! product applies is the caller's choice of operation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;
use crate::trees::{canonicalize, Alphabet, Forest, Tree};
use crate::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    terms: BTreeMap<Forest, Rational>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    /// The unit: the empty forest with coefficient one.
    pub fn one() -> Self {
        Element::from_forest(Forest::empty())
    }

    pub fn scalar(c: Rational) -> Self {
        let mut e = Element::zero();
        e.add_term(Forest::empty(), c);
        e
    }

    pub fn from_forest(f: Forest) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(f, Rational::one());
        Element { terms }
    }

    pub fn from_tree(t: Tree) -> Self {
        Element::from_forest(Forest::single(t))
    }

    pub fn from_terms<I: IntoIterator<Item = (Forest, Rational)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (f, c) in terms {
            e.add_term(f, c);
        }
        e
    }

    /// Adds `c · f`, dropping the entry if it cancels.
    pub fn add_term(&mut self, f: Forest, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(f) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add_count(&mut self, f: Forest, n: u64) {
        self.add_term(f, Rational::from_integer(BigInt::from(n)));
    }

    /// Adds `c · other` in place.
    pub fn add_scaled(&mut self, other: &Element, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (f, d) in &other.terms {
            self.add_term(f.clone(), d * c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Forest, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, f: &Forest) -> Rational {
        self.terms.get(f).cloned().unwrap_or_else(Rational::zero)
    }

    /// Number of terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest vertex count among the terms; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Forest::degree).max()
    }

    /// Lowest vertex count among the terms; `None` for zero.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Forest::degree).min()
    }

    /// Coefficient of the empty forest.
    pub fn counit(&self) -> Rational {
        self.coefficient(&Forest::empty())
    }

    /// Terms of vertex count exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> Element {
        self.filter(|f| f.degree() == d)
    }

    /// Terms with exactly `k` trees.
    pub fn length_part(&self, k: usize) -> Element {
        self.filter(|f| f.len() == k)
    }

    /// Drops every term of vertex count above `order`.
    pub fn truncate(&self, order: usize) -> Element {
        self.filter(|f| f.degree() <= order)
    }

    pub fn filter(&self, keep: impl Fn(&Forest) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| keep(f))
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(f, d)| (f.clone(), d * c)).collect(),
        }
    }

    /// Whether every term is a single tree, i.e. the element lies in L.
    pub fn is_in_prelie(&self) -> bool {
        self.terms.keys().all(|f| f.as_single_tree().is_some())
    }

    pub(crate) fn require_prelie(&self) -> Result<()> {
        if self.is_in_prelie() {
            Ok(())
        } else {
            Err(Error::NotPrimitive(self.to_string()))
        }
    }

    /// Pairs `(tree, coefficient)` for an element of L.
    pub fn tree_terms(&self) -> Result<Vec<(&Tree, &Rational)>> {
        self.terms
            .iter()
            .map(|(f, c)| {
                f.as_single_tree()
                    .map(|t| (t, c))
                    .ok_or_else(|| Error::NotPrimitive(self.to_string()))
            })
            .collect()
    }

    /// Extends a forest-level map linearly.
    pub fn map_linear(&self, mut f: impl FnMut(&Forest) -> Element) -> Element {
        let mut out = Element::zero();
        for (forest, c) in &self.terms {
            out.add_scaled(&f(forest), c);
        }
        out
    }

    pub fn parse(input: &str, alphabet: &Alphabet) -> Result<Element> {
        let raw = text::parse_raw_terms(input, Some(1))?;
        let mut out = Element::zero();
        for (c, mut slots) in raw {
            let trees = slots
                .pop()
                .expect("one slot")
                .iter()
                .map(|r| canonicalize(r, alphabet))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(Forest::from_trees(trees), c);
        }
        Ok(out)
    }

    /// One line per term (`coeff forest`, coefficient omitted when it is 1),
    /// in canonical order: by degree, then tree order.
    pub fn term_lines(&self) -> Vec<String> {
        self.terms.iter().map(|(f, c)| format_term(c, &f.to_string())).collect()
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            terms: self
                .terms
                .iter()
                .map(|(f, c)| TermJson {
                    coeff: c.to_string(),
                    forest: f.iter_trees().map(|t| t.to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ElementJson, alphabet: &Alphabet) -> Result<Element> {
        let mut out = Element::zero();
        for term in &json.terms {
            let c: Rational = parse_rational(&term.coeff)?;
            let trees = term
                .forest
                .iter()
                .map(|t| crate::trees::parse_tree(t, alphabet))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(Forest::from_trees(trees), c);
        }
        Ok(out)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Json(format!("bad rational `{s}`: {e}")))
}

/// `c body` with `c` omitted when it is exactly one.
pub(crate) fn format_term(c: &Rational, body: &str) -> String {
    if c.is_one() {
        body.to_string()
    } else {
        format!("{c} {body}")
    }
}

/// Writes `terms` as `t1 + c t2 - c t3`, or `0` when empty.
pub(crate) fn write_sum<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: IntoIterator<Item = (&'a Rational, String)>,
{
    let mut first = true;
    for (c, body) in terms {
        if first {
            f.write_str(&format_term(c, &body))?;
        } else if c.is_negative() {
            write!(f, " - {}", format_term(&-c, &body))?;
        } else {
            write!(f, " + {}", format_term(c, &body))?;
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.terms.iter().map(|(forest, c)| (c, forest.to_string())))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub forest: Vec<String>,
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        for (f, c) in &rhs.terms {
            self.add_term(f.clone(), c.clone());
        }
    }
}

impl SubAssign<&Element> for Element {
    fn sub_assign(&mut self, rhs: &Element) {
        for (f, c) in &rhs.terms {
            self.add_term(f.clone(), -c);
        }
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(mut self, rhs: Element) -> Element {
        self += &rhs;
        self
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(mut self, rhs: Element) -> Element {
        self -= &rhs;
        self
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Rational::one())
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Mul<&Element> for &Rational {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}
