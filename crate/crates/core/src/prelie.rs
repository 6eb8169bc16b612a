//! The free pre-Lie product on trees, its Lie bracket, and the extension of
//! the product to a right action of forests (monomials of S(L)) on L.
//!
//! The action comes in two forms: a closed grafting formula specific to the
//! free algebra, and a recursion that works over any [`PreLieCarrier`].

use num_traits::One;

use crate::element::Element;
use crate::error::Result;
use crate::trees::{Forest, Tree};
use crate::Rational;

/// `x ↶ y`: the bilinear extension of grafting.
pub fn prelie_product(x: &Element, y: &Element) -> Result<Element> {
    let xs = x.tree_terms()?;
    let ys = y.tree_terms()?;
    let mut out = Element::zero();
    for (s, c) in &xs {
        for (t, d) in &ys {
            let coeff = *c * *d;
            for g in s.graft_each_vertex(t) {
                out.add_term(Forest::single(g), coeff.clone());
            }
        }
    }
    Ok(out)
}

/// `[x, y] = x ↶ y - y ↶ x`.
pub fn lie_bracket(x: &Element, y: &Element) -> Result<Element> {
    Ok(prelie_product(x, y)? - prelie_product(y, x)?)
}

/// `x ↶ B` for a forest `B = t_1 … t_m`: every way of attaching the roots of
/// the `t_j` to vertices of the trees of `x`. The empty forest acts as the
/// identity.
pub fn extended_action_closed(x: &Element, b: &Forest) -> Result<Element> {
    let items = b.to_vec();
    let mut out = Element::zero();
    for (s, c) in x.tree_terms()? {
        for g in s.attach_all(&items) {
            out.add_term(Forest::single(g), c.clone());
        }
    }
    Ok(out)
}

/// The action extended linearly in the second argument: `x ↶ u` for any
/// `u` in S(L).
pub fn act(x: &Element, u: &Element) -> Result<Element> {
    let xs = x.tree_terms()?;
    let mut out = Element::zero();
    for (forest, d) in u.iter() {
        let items = forest.to_vec();
        for (s, c) in &xs {
            let coeff = *c * d;
            for g in s.attach_all(&items) {
                out.add_term(Forest::single(g), coeff.clone());
            }
        }
    }
    Ok(out)
}

/// A concrete pre-Lie algebra: a value type with a bilinear product `↶`.
pub trait PreLieCarrier {
    type Value: Clone;

    /// The pre-Lie product `x ↶ y`.
    fn curly(&self, x: &Self::Value, y: &Self::Value) -> Self::Value;
    fn add(&self, x: &Self::Value, y: &Self::Value) -> Self::Value;
    fn scale(&self, c: &Rational, x: &Self::Value) -> Self::Value;
    fn zero(&self) -> Self::Value;

    fn sub(&self, x: &Self::Value, y: &Self::Value) -> Self::Value {
        self.add(x, &self.scale(&-Rational::one(), y))
    }
}

/// The free pre-Lie algebra on trees, values being elements of L.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreePreLie;

impl PreLieCarrier for FreePreLie {
    type Value = Element;

    fn curly(&self, x: &Element, y: &Element) -> Element {
        prelie_product(x, y).expect("carrier values lie in L")
    }

    fn add(&self, x: &Element, y: &Element) -> Element {
        x + y
    }

    fn scale(&self, c: &Rational, x: &Element) -> Element {
        x.scale(c)
    }

    fn zero(&self) -> Element {
        Element::zero()
    }
}

/// `x ↶ (b_1, …, b_k)` over an arbitrary pre-Lie algebra, by the recursion
///
/// `x ↶ (U, b) = (x ↶ U) ↶ b - x ↶ (U ↶ b)`,
///
/// where `U ↶ b` acts on the sequence `U` as a derivation (each entry in turn
/// replaced by `e ↶ b`, results summed). The result does not depend on the
/// order of the sequence.
pub fn extended_action_recursive<C: PreLieCarrier>(
    alg: &C,
    x: &C::Value,
    seq: &[C::Value],
) -> C::Value {
    let Some((last, init)) = seq.split_last() else {
        return x.clone();
    };
    let mut result = alg.curly(&extended_action_recursive(alg, x, init), last);
    for i in 0..init.len() {
        let mut moved = init.to_vec();
        moved[i] = alg.curly(&init[i], last);
        result = alg.sub(&result, &extended_action_recursive(alg, x, &moved));
    }
    result
}

/// Convenience: the recursive action on the free algebra with trees as
/// arguments.
pub fn extended_action_recursive_free(x: &Element, b: &Forest) -> Element {
    let seq: Vec<Element> = b.iter_trees().map(|t| Element::from_tree(t.clone())).collect();
    extended_action_recursive(&FreePreLie, x, &seq)
}

/// Element of L given by a single tree; small helper for callers.
pub fn tree_element(t: &Tree) -> Element {
    Element::from_tree(t.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{enumerate_forests, enumerate_trees, parse_forest, Alphabet};

    fn el(s: &str) -> Element {
        Element::parse(s, &Alphabet::default()).unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(prelie_product(&el("a"), &el("a")).unwrap(), el("a(a)"));
        assert_eq!(
            prelie_product(&el("a(a) + 2 a"), &el("a")).unwrap(),
            el("a(a,a) + a(a(a)) + 2 a(a)")
        );
        assert_eq!(prelie_product(&el("a"), &Element::zero()).unwrap(), Element::zero());
        assert!(prelie_product(&el("a.a"), &el("a")).is_err());
        assert!(prelie_product(&el("a"), &el("1")).is_err());
    }

    #[test]
    fn bracket_examples() {
        assert!(lie_bracket(&el("a"), &el("a")).unwrap().is_zero());
        assert_eq!(lie_bracket(&el("a"), &el("a(a)")).unwrap(), el("-a(a,a)"));
    }

    #[test]
    fn closed_action_examples() {
        let alpha = Alphabet::default();
        let f = |s: &str| parse_forest(s, &alpha).unwrap();
        assert_eq!(extended_action_closed(&el("a"), &f("a.a")).unwrap(), el("a(a,a)"));
        assert_eq!(extended_action_closed(&el("a(a)"), &f("a")).unwrap(), el("a(a,a) + a(a(a))"));
        assert_eq!(extended_action_closed(&el("a"), &Forest::empty()).unwrap(), el("a"));
        assert_eq!(
            extended_action_closed(&el("a(a)"), &f("a.a")).unwrap(),
            el("a(a,a,a) + 2 a(a,a(a)) + a(a(a,a))")
        );
    }

    #[test]
    fn recursive_action_base_cases() {
        let x = el("a(a) - a");
        let b = el("a(a)");
        assert_eq!(extended_action_recursive(&FreePreLie, &x, &[]), x);
        assert_eq!(
            extended_action_recursive(&FreePreLie, &x, std::slice::from_ref(&b)),
            prelie_product(&x, &b).unwrap()
        );
    }

    #[test]
    fn recursive_matches_closed_small() {
        let ab = Alphabet::parse("a,b").unwrap();
        for tdeg in 1..=2 {
            for s in enumerate_trees(tdeg, &ab) {
                let x = Element::from_tree(s);
                for fdeg in 0..=3 {
                    for b in enumerate_forests(fdeg, &ab) {
                        assert_eq!(
                            extended_action_recursive_free(&x, &b),
                            extended_action_closed(&x, &b).unwrap(),
                            "x={x} B={b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn act_is_linear_extension() {
        let u = el("2 + a.a - 1/3 a(a)");
        let x = el("a + a(a)");
        let alpha = Alphabet::default();
        let mut expected = extended_action_closed(&x, &Forest::empty()).unwrap().scale(&Rational::from_integer(2.into()));
        expected += &extended_action_closed(&x, &parse_forest("a.a", &alpha).unwrap()).unwrap();
        expected -= &extended_action_closed(&x, &parse_forest("a(a)", &alpha).unwrap())
            .unwrap()
            .scale(&Rational::new(1.into(), 3.into()));
        assert_eq!(act(&x, &u).unwrap(), expected);
    }
}
