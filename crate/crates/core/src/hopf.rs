//! Hopf structure on S(L): the commutative product, the unshuffle
//! coproduct, the ∗-product making S(L) the enveloping algebra of L, series
//! in ∗ and convolution powers of `J = id - unit∘counit`.
//!
//! Every map here preserves the total vertex count, so truncation only
//! matters for series, where it bounds the retained degree.

use std::cell::RefCell;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::{inv_factorial, multinomial, sign};
use crate::element::{parse_rational, write_sum, Element};
use crate::error::{Error, Result};
use crate::text;
use crate::trees::{canonicalize, Alphabet, Forest, Tree};
use crate::Rational;

/// Maximum total degree retained by series operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationOrder(usize);

impl TruncationOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("truncation order must be at least 1".into()));
        }
        Ok(TruncationOrder(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for TruncationOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Linear combination of `n`-tuples of forests, all of the same arity.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    arity: usize,
    terms: BTreeMap<Vec<Forest>, Rational>,
}

impl TensorElement {
    pub fn zero(arity: usize) -> Self {
        assert!(arity >= 1, "tensor arity must be positive");
        TensorElement {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn add_term(&mut self, slots: Vec<Forest>, c: Rational) {
        assert_eq!(slots.len(), self.arity, "tensor arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(slots) {
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

    pub fn iter(&self) -> impl Iterator<Item = (&[Forest], &Rational)> + '_ {
        self.terms.iter().map(|(k, c)| (k.as_slice(), c))
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, slots: &[Forest]) -> Rational {
        self.terms.get(slots).cloned().unwrap_or_else(Rational::zero)
    }

    /// Arity-one tensor of an element.
    pub fn from_element(u: &Element) -> Self {
        let mut out = TensorElement::zero(1);
        for (f, c) in u.iter() {
            out.add_term(vec![f.clone()], c.clone());
        }
        out
    }

    /// The element of an arity-one tensor.
    pub fn to_element(&self) -> Element {
        assert_eq!(self.arity, 1);
        Element::from_terms(self.terms.iter().map(|(k, c)| (k[0].clone(), c.clone())))
    }

    /// Applies the coproduct to slot `k`, raising the arity by one.
    pub fn coproduct_slot(&self, k: usize) -> TensorElement {
        assert!(k < self.arity);
        let mut out = TensorElement::zero(self.arity + 1);
        for (slots, c) in &self.terms {
            for (parts, w) in distribute(&slots[k], 2, false) {
                let mut key = Vec::with_capacity(self.arity + 1);
                key.extend_from_slice(&slots[..k]);
                key.extend(parts);
                key.extend_from_slice(&slots[k + 1..]);
                out.add_term(key, c * Rational::from_integer(w));
            }
        }
        out
    }

    /// Applies the counit to slot `k`, lowering the arity by one.
    pub fn counit_slot(&self, k: usize) -> TensorElement {
        assert!(k < self.arity && self.arity >= 2);
        let mut out = TensorElement::zero(self.arity - 1);
        for (slots, c) in &self.terms {
            if slots[k].is_empty() {
                let mut key = slots.clone();
                key.remove(k);
                out.add_term(key, c.clone());
            }
        }
        out
    }

    /// Reorders slots: slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> TensorElement {
        assert_eq!(perm.len(), self.arity);
        let mut out = TensorElement::zero(self.arity);
        for (slots, c) in &self.terms {
            out.add_term(perm.iter().map(|&p| slots[p].clone()).collect(), c.clone());
        }
        out
    }

    /// Slotwise ∗-product `(x_1 ⊗ … ) ∗ (y_1 ⊗ …) = (x_1 ∗ y_1) ⊗ …`.
    pub fn star(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.arity, other.arity, "tensor arity mismatch");
        let mut out = TensorElement::zero(self.arity);
        for (xs, c) in &self.terms {
            for (ys, d) in &other.terms {
                let mut partial: Vec<(Vec<Forest>, Rational)> = vec![(Vec::new(), c * d)];
                for (x, y) in xs.iter().zip(ys) {
                    let prod = star_monomials(x, y);
                    let mut next = Vec::with_capacity(partial.len() * prod.len());
                    for (key, w) in &partial {
                        for (f, e) in prod.iter() {
                            let mut k = key.clone();
                            k.push(f.clone());
                            next.push((k, w * e));
                        }
                    }
                    partial = next;
                }
                for (k, w) in partial {
                    out.add_term(k, w);
                }
            }
        }
        out
    }

    pub fn parse(input: &str, arity: usize, alphabet: &Alphabet) -> Result<TensorElement> {
        let raw = text::parse_raw_terms(input, Some(arity))?;
        let mut out = TensorElement::zero(arity);
        for (c, slots) in raw {
            let key = slots
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|r| canonicalize(r, alphabet))
                        .collect::<Result<Vec<Tree>>>()
                        .map(Forest::from_trees)
                })
                .collect::<Result<Vec<_>>>()?;
            out.add_term(key, c);
        }
        Ok(out)
    }

    fn slot_text(slots: &[Forest]) -> String {
        slots
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(" (x) ")
    }

    /// One line per term, canonical order.
    pub fn term_lines(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(k, c)| crate::element::format_term(c, &Self::slot_text(k)))
            .collect()
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TensorTermJson {
                    coeff: c.to_string(),
                    slots: k
                        .iter()
                        .map(|f| f.iter_trees().map(|t| t.to_string()).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &TensorJson, alphabet: &Alphabet) -> Result<TensorElement> {
        if json.arity == 0 {
            return Err(Error::Json("tensor arity must be positive".into()));
        }
        let mut out = TensorElement::zero(json.arity);
        for term in &json.terms {
            if term.slots.len() != json.arity {
                return Err(Error::Json(format!(
                    "expected {} slots, found {}",
                    json.arity,
                    term.slots.len()
                )));
            }
            let key = term
                .slots
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|t| crate::trees::parse_tree(t, alphabet))
                        .collect::<Result<Vec<_>>>()
                        .map(Forest::from_trees)
                })
                .collect::<Result<Vec<_>>>()?;
            out.add_term(key, parse_rational(&term.coeff)?);
        }
        Ok(out)
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.terms.iter().map(|(k, c)| (c, Self::slot_text(k))))
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub arity: usize,
    pub terms: Vec<TensorTermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTermJson {
    pub coeff: String,
    pub slots: Vec<Vec<String>>,
}

/// Every way of splitting a forest into `n` ordered sub-multisets, with the
/// multiplicity of each split (a product of multinomials over the distinct
/// trees). With `nonempty`, splits leaving a slot empty are skipped.
pub fn distribute(f: &Forest, n: usize, nonempty: bool) -> Vec<(Vec<Forest>, BigInt)> {
    assert!(n >= 1);
    if nonempty && f.len() < n {
        return Vec::new();
    }
    // per slot, the (tree, multiplicity) pairs placed there so far
    type Partial = Vec<Vec<(Tree, usize)>>;
    let mut acc: Vec<(Partial, BigInt)> = vec![(vec![Vec::new(); n], BigInt::one())];
    for (tree, m) in f.distinct() {
        let comps = compositions(*m, n);
        let mut next = Vec::with_capacity(acc.len() * comps.len());
        for (slots, w) in &acc {
            for comp in &comps {
                let mut s = slots.clone();
                for (slot, &k) in s.iter_mut().zip(comp) {
                    if k > 0 {
                        slot.push((tree.clone(), k));
                    }
                }
                next.push((s, w * multinomial(comp)));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .filter(|(slots, _)| !nonempty || slots.iter().all(|s| !s.is_empty()))
        .map(|(slots, w)| {
            (
                slots.into_iter().map(Forest::from_multiplicities).collect(),
                w,
            )
        })
        .collect()
}

/// Weak compositions of `m` into `n` parts.
fn compositions(m: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in compositions(m - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Commutative (polynomial) product: bilinear multiset union.
pub fn commutative_product(u: &Element, v: &Element) -> Element {
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (g, d) in v.iter() {
            out.add_term(f.union(g), c * d);
        }
    }
    out
}

pub fn counit(u: &Element) -> Rational {
    u.counit()
}

/// `Δ(u)`; trees are primitive and Δ is multiplicative for the commutative
/// product, so a forest splits into every ordered pair of sub-multisets.
pub fn coproduct(u: &Element) -> TensorElement {
    iterated_coproduct(u, 2)
}

/// `Δ^[n](u)`, the n-fold iterated coproduct (`Δ^[1]` is the identity).
pub fn iterated_coproduct(u: &Element, n: usize) -> TensorElement {
    assert!(n >= 1, "iterated coproduct arity must be positive");
    let mut out = TensorElement::zero(n);
    for (f, c) in u.iter() {
        for (slots, w) in distribute(f, n, false) {
            out.add_term(slots, c * Rational::from_integer(w));
        }
    }
    out
}

const STAR_CACHE_LIMIT: usize = 1 << 18;

thread_local! {
    static STAR_CACHE: RefCell<HashMap<(Forest, Forest), Element>> = RefCell::new(HashMap::new());
}

/// `(a_1 … a_l) ∗ (b_1 … b_m) = Σ_f B_0 (a_1 ↶ B_1) … (a_l ↶ B_l)`, the sum
/// running over all maps `f: {1..m} → {0..l}` with `B_i = f^{-1}(i)`.
pub fn star_monomials(u: &Forest, v: &Forest) -> Element {
    if v.is_empty() {
        return Element::from_forest(u.clone());
    }
    if u.is_empty() {
        return Element::from_forest(v.clone());
    }
    let key = (u.clone(), v.clone());
    if let Some(hit) = STAR_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let result = star_monomials_uncached(u, v);
    STAR_CACHE.with(|c| {
        let mut cache = c.borrow_mut();
        if cache.len() >= STAR_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, result.clone());
    });
    result
}

fn star_monomials_uncached(u: &Forest, v: &Forest) -> Element {
    let a = u.to_vec();
    let b = v.to_vec();
    let (l, m) = (a.len(), b.len());
    assert!(m < 64, "too many trees in a monomial");
    let mut attach_cache: HashMap<(usize, u64), Vec<Tree>> = HashMap::new();
    let mut counts: HashMap<Forest, u64> = HashMap::new();
    let mut f = vec![0usize; m];
    loop {
        let mut base = Vec::new();
        let mut masks = vec![0u64; l];
        for (j, &target) in f.iter().enumerate() {
            if target == 0 {
                base.push(b[j].clone());
            } else {
                masks[target - 1] |= 1 << j;
            }
        }
        let mut partial: Vec<Forest> = vec![Forest::from_trees(base)];
        for (i, &mask) in masks.iter().enumerate() {
            let options = attach_cache.entry((i, mask)).or_insert_with(|| {
                let items: Vec<Tree> = (0..m)
                    .filter(|j| mask & (1 << j) != 0)
                    .map(|j| b[j].clone())
                    .collect();
                a[i].attach_all(&items)
            });
            let mut next = Vec::with_capacity(partial.len() * options.len());
            for p in &partial {
                for o in options.iter() {
                    next.push(p.union(&Forest::single(o.clone())));
                }
            }
            partial = next;
        }
        for p in partial {
            *counts.entry(p).or_insert(0) += 1;
        }
        // odometer over maps {0..m-1} -> {0..l}
        let mut k = 0;
        loop {
            if k == m {
                let mut out = Element::zero();
                for (forest, n) in counts {
                    out.add_count(forest, n);
                }
                return out;
            }
            f[k] += 1;
            if f[k] <= l {
                break;
            }
            f[k] = 0;
            k += 1;
        }
    }
}

/// Exact ∗-product of two elements (no truncation).
pub fn star(u: &Element, v: &Element) -> Element {
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (g, d) in v.iter() {
            out.add_scaled(&star_monomials(f, g), &(c * d));
        }
    }
    out
}

/// ∗-product keeping only terms of total degree at most `trunc`.
pub fn star_product(u: &Element, v: &Element, trunc: TruncationOrder) -> Element {
    let n = trunc.get();
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (g, d) in v.iter() {
            if f.degree() + g.degree() <= n {
                out.add_scaled(&star_monomials(f, g), &(c * d));
            }
        }
    }
    out
}

/// ∗-product of a sequence of elements, left to right, truncated.
pub fn star_all(factors: &[Element], trunc: TruncationOrder) -> Element {
    factors
        .iter()
        .fold(Element::one(), |acc, x| star_product(&acc, x, trunc))
}

fn require_counit(u: &Element, expected: i64) -> Result<()> {
    let c = u.counit();
    if c != Rational::from_integer(expected.into()) {
        return Err(Error::Counit {
            expected: expected.to_string(),
            found: c.to_string(),
        });
    }
    Ok(())
}

/// `exp(x) = Σ x^n / n!` with commutative powers, truncated.
pub fn sym_exp(x: &Element, trunc: TruncationOrder) -> Result<Element> {
    require_counit(x, 0)?;
    let n = trunc.get();
    let x = x.truncate(n);
    let mut out = Element::one();
    let mut power = Element::one();
    for k in 1..=n {
        power = commutative_product(&power, &x).truncate(n);
        if power.is_zero() {
            break;
        }
        out.add_scaled(&power, &inv_factorial(k));
    }
    Ok(out)
}

/// `log^∗(u) = Σ_{n≥1} (-1)^{n-1} (u - 1)^{∗n} / n`, truncated.
pub fn star_log(u: &Element, trunc: TruncationOrder) -> Result<Element> {
    require_counit(u, 1)?;
    let n = trunc.get();
    let y = &u.truncate(n) - &Element::one();
    let mut out = Element::zero();
    let mut power = Element::one();
    for k in 1..=n {
        power = star_product(&power, &y, trunc);
        if power.is_zero() {
            break;
        }
        out.add_scaled(&power, &(sign(k - 1) / Rational::from_integer(k.into())));
    }
    Ok(out)
}

/// `exp^∗(x) = Σ x^{∗n} / n!`, truncated.
pub fn star_exp(x: &Element, trunc: TruncationOrder) -> Result<Element> {
    require_counit(x, 0)?;
    let n = trunc.get();
    let x = x.truncate(n);
    let mut out = Element::one();
    let mut power = Element::one();
    for k in 1..=n {
        power = star_product(&power, &x, trunc);
        if power.is_zero() {
            break;
        }
        out.add_scaled(&power, &inv_factorial(k));
    }
    Ok(out)
}

/// `J^{⋆n}(u)` with `J = id - unit∘counit`: split each forest into `n`
/// nonempty ordered parts and ∗-multiply the parts left to right.
/// `J^{⋆0}(u) = counit(u)·1`.
pub fn conv_power_apply(n: usize, u: &Element, trunc: TruncationOrder) -> Element {
    let u = u.truncate(trunc.get());
    if n == 0 {
        return Element::scalar(u.counit());
    }
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (parts, w) in distribute(f, n, true) {
            let prod = parts
                .iter()
                .skip(1)
                .fold(Element::from_forest(parts[0].clone()), |acc, p| {
                    star(&acc, &Element::from_forest(p.clone()))
                });
            out.add_scaled(&prod, &(c * Rational::from_integer(w)));
        }
    }
    out
}

/// Convolution product of linear maps applied to `u`:
/// `(f_1 ⋆ … ⋆ f_k)(u) = ∗-product of f_i applied to the slots of Δ^[k](u)`.
/// Maps are given on forests and extended linearly.
pub fn convolve(maps: &[&dyn Fn(&Forest) -> Element], u: &Element) -> Element {
    if maps.is_empty() {
        return Element::scalar(u.counit());
    }
    let k = maps.len();
    let mut caches: Vec<HashMap<Forest, Element>> = vec![HashMap::new(); k];
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (parts, w) in distribute(f, k, false) {
            let mut prod = Element::one();
            for (i, p) in parts.iter().enumerate() {
                let image = caches[i].entry(p.clone()).or_insert_with(|| maps[i](p)).clone();
                prod = star(&prod, &image);
                if prod.is_zero() {
                    break;
                }
            }
            out.add_scaled(&prod, &(c * Rational::from_integer(w)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Alphabet;

    fn el(s: &str) -> Element {
        Element::parse(s, &Alphabet::default()).unwrap()
    }

    fn tensor(s: &str, n: usize) -> TensorElement {
        TensorElement::parse(s, n, &Alphabet::default()).unwrap()
    }

    fn order(n: usize) -> TruncationOrder {
        TruncationOrder::new(n).unwrap()
    }

    #[test]
    fn commutative_product_examples() {
        assert_eq!(commutative_product(&el("a"), &el("a")), el("a.a"));
        assert_eq!(commutative_product(&el("a + a(a)"), &el("a")), el("a.a + a.a(a)"));
        let u = el("2 a(a) - a.a");
        assert_eq!(commutative_product(&u, &Element::one()), u);
    }

    #[test]
    fn coproduct_examples() {
        assert_eq!(coproduct(&el("a")), tensor("a (x) 1 + 1 (x) a", 2));
        assert_eq!(coproduct(&el("a.a")), tensor("a.a (x) 1 + 2 a (x) a + 1 (x) a.a", 2));
        assert_eq!(coproduct(&el("a(a)")), tensor("a(a) (x) 1 + 1 (x) a(a)", 2));
        assert_eq!(coproduct(&Element::one()), tensor("1 (x) 1", 2));
    }

    #[test]
    fn iterated_coproduct_examples() {
        assert_eq!(iterated_coproduct(&el("a"), 2), tensor("a (x) 1 + 1 (x) a", 2));
        let u = el("a.a - 3 a(a)");
        assert_eq!(iterated_coproduct(&u, 1).to_element(), u);
        // counit collapse: replacing every forest a^k by 1 sums to 3^2
        let d = iterated_coproduct(&el("a.a"), 3);
        let mass: Rational = d.iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(mass, Rational::from_integer(9.into()));
        assert_eq!(d.len(), 6);
    }

    #[test]
    fn counit_examples() {
        assert_eq!(counit(&Element::one()), Rational::one());
        assert!(counit(&el("a")).is_zero());
        assert_eq!(counit(&el("3/2 + a(a)")), Rational::new(3.into(), 2.into()));
    }

    #[test]
    fn star_examples() {
        let n = order(8);
        assert_eq!(star_product(&el("a"), &el("a"), n), el("a.a + a(a)"));
        assert_eq!(star_product(&el("a"), &el("a.a"), n), el("a.a.a + 2 a.a(a) + a(a,a)"));
        let u = el("a(a) - 2 a.a + 1/3");
        assert_eq!(star_product(&u, &Element::one(), n), u);
        assert_eq!(star_product(&Element::one(), &u, n), u);
        // truncation drops the whole degree-2 product
        assert!(star_product(&el("a"), &el("a"), order(1)).is_zero());
    }

    #[test]
    fn star_of_two_letters_matches_hand_expansion() {
        let ab = Alphabet::parse("a,b").unwrap();
        let e = |s: &str| Element::parse(s, &ab).unwrap();
        assert_eq!(star(&e("a.b"), &e("a")), e("a.a.b + a(a).b + a.b(a)"));
        assert_eq!(star(&e("a"), &e("a.b")), e("a.a.b + a(a).b + a(b).a + a(a,b)"));
    }

    #[test]
    fn sym_exp_examples() {
        assert_eq!(sym_exp(&el("a"), order(2)).unwrap(), el("1 + a + 1/2 a.a"));
        assert_eq!(sym_exp(&Element::zero(), order(3)).unwrap(), Element::one());
        assert!(sym_exp(&el("1 + a"), order(2)).is_err());
        let e = sym_exp(&el("a"), order(3)).unwrap();
        let lhs = coproduct(&e);
        let mut rhs = TensorElement::zero(2);
        for (f, c) in e.iter() {
            for (g, d) in e.iter() {
                if f.degree() + g.degree() <= 3 {
                    rhs.add_term(vec![f.clone(), g.clone()], c * d);
                }
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_log_examples() {
        assert!(star_log(&Element::one(), order(4)).unwrap().is_zero());
        let ea = sym_exp(&el("a"), order(2)).unwrap();
        let l = star_log(&ea, order(2)).unwrap();
        assert_eq!(l.homogeneous_part(2), el("-1/2 a(a)"));
        assert!(star_log(&el("a"), order(2)).is_err());
    }

    #[test]
    fn star_exp_examples() {
        assert_eq!(star_exp(&Element::zero(), order(3)).unwrap(), Element::one());
        let e = star_exp(&el("-1/2 a(a)"), order(3)).unwrap();
        assert_eq!(e.homogeneous_part(2), el("-1/2 a(a)"));
        let ea = sym_exp(&el("a + a(a)"), order(5)).unwrap();
        let back = star_exp(&star_log(&ea, order(5)).unwrap(), order(5)).unwrap();
        assert_eq!(back, ea);
        assert!(star_exp(&el("1"), order(3)).is_err());
    }

    #[test]
    fn conv_power_examples() {
        let n = order(6);
        assert_eq!(conv_power_apply(1, &el("a.a"), n), el("a.a"));
        assert_eq!(conv_power_apply(2, &el("a.a"), n), el("2 a.a + 2 a(a)"));
        assert!(conv_power_apply(3, &el("a.a"), n).is_zero());
        assert_eq!(conv_power_apply(0, &el("2 + a"), n), el("2"));
        assert!(conv_power_apply(1, &Element::one(), n).is_zero());
    }

    #[test]
    fn tensor_text_and_json() {
        let t = tensor("a.a (x) 1 + 2 a (x) a - 1/2 1 (x) a(a)", 2);
        assert_eq!(t.to_string(), "-1/2 1 (x) a(a) + 2 a (x) a + a.a (x) 1");
        assert_eq!(tensor(&t.to_string(), 2), t);
        let json = serde_json::to_string(&t.to_json()).unwrap();
        let back: TensorJson = serde_json::from_str(&json).unwrap();
        assert_eq!(TensorElement::from_json(&back, &Alphabet::default()).unwrap(), t);
    }

    #[test]
    fn distribute_counts() {
        let f = Element::parse("a.a.a(a)", &Alphabet::default()).unwrap();
        let forest = f.iter().next().unwrap().0.clone();
        let total: BigInt = distribute(&forest, 3, false).into_iter().map(|(_, w)| w).sum();
        assert_eq!(total, BigInt::from(27));
        let surj: BigInt = distribute(&forest, 3, true).into_iter().map(|(_, w)| w).sum();
        assert_eq!(surj, BigInt::from(6));
    }
}
