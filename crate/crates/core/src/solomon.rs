//! Solomon (eulerian) idempotents of S^∗(L) and the explicit PBW
//! decomposition.
//!
//! `sol_1 = log^⋆(id)` is evaluated as `Σ (-1)^{n-1}/n J^{⋆n}`, and
//! `sol_i = sol_1^{⋆i} / i!`. The closed ordered-partition formulas with
//! Stirling weights are kept as separate routines so that the two can be
//! compared.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;

use crate::combinat::{binomial, factorial, inv_factorial, ordered_partitions, sign, stirling_first};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::{commutative_product, conv_power_apply, distribute, star, TruncationOrder};
use crate::trees::{Forest, Tree};
use crate::Rational;

thread_local! {
    static SOL1_CACHE: RefCell<HashMap<Forest, Element>> = RefCell::new(HashMap::new());
}

/// `sol_1` on a single forest; exact, since every term keeps the degree.
pub fn sol1_forest(f: &Forest) -> Element {
    if f.is_empty() {
        return Element::zero();
    }
    if let Some(hit) = SOL1_CACHE.with(|c| c.borrow().get(f).cloned()) {
        return hit;
    }
    let order = TruncationOrder::new(f.degree()).expect("nonempty forest");
    let single = Element::from_forest(f.clone());
    let mut out = Element::zero();
    for n in 1..=f.len() {
        let term = conv_power_apply(n, &single, order);
        out.add_scaled(&term, &(sign(n - 1) / Rational::from_integer(n.into())));
    }
    SOL1_CACHE.with(|c| {
        let mut cache = c.borrow_mut();
        if cache.len() > 1 << 16 {
            cache.clear();
        }
        cache.insert(f.clone(), out.clone());
    });
    out
}

/// First Solomon idempotent, the projection of S^∗(L) onto L along the
/// images of the higher symmetric powers. The counit part is discarded.
pub fn sol1(u: &Element, trunc: TruncationOrder) -> Element {
    u.truncate(trunc.get()).map_linear(sol1_forest)
}

/// `sol_i(u) = (1/i!) Σ sol_1(u_(1)) ∗ … ∗ sol_1(u_(i))` over the slots of
/// `Δ^[i](u)`. Zero for `i > N`; `sol_0 = unit∘counit`.
pub fn soln(i: usize, u: &Element, trunc: TruncationOrder) -> Element {
    let n = trunc.get();
    if i == 0 {
        return Element::scalar(u.counit());
    }
    if i > n {
        return Element::zero();
    }
    if i == 1 {
        return sol1(u, trunc);
    }
    let u = u.truncate(n);
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (parts, w) in distribute(f, i, true) {
            let mut prod = Element::one();
            for p in &parts {
                prod = star(&prod, &sol1_forest(p));
                if prod.is_zero() {
                    break;
                }
            }
            out.add_scaled(&prod, &(c * Rational::from_integer(w)));
        }
    }
    out.scale(&inv_factorial(i))
}

/// The family `sol_1, …, sol_N` at a fixed truncation order.
#[derive(Debug, Clone, Copy)]
pub struct GradedProjectionFamily {
    order: TruncationOrder,
}

impl GradedProjectionFamily {
    pub fn new(order: TruncationOrder) -> Self {
        GradedProjectionFamily { order }
    }

    pub fn order(&self) -> TruncationOrder {
        self.order
    }

    pub fn component(&self, i: usize, u: &Element) -> Element {
        soln(i, u, self.order)
    }

    /// `[sol_1(u), …, sol_N(u)]`.
    pub fn components(&self, u: &Element) -> Vec<Element> {
        (1..=self.order.get()).map(|i| self.component(i, u)).collect()
    }
}

fn letters_forest(letters: &[Tree], block: &[usize]) -> Forest {
    Forest::from_trees(block.iter().map(|&k| letters[k].clone()))
}

/// `Σ l_{I_1} ∗ … ∗ l_{I_j}` over ordered partitions into `j` blocks, with
/// `l_I` the commutative product of the letters indexed by `I`.
pub fn ordered_partition_sum(letters: &[Tree], j: usize) -> Element {
    let mut out = Element::zero();
    for p in ordered_partitions(letters.len(), j) {
        let mut prod = Element::one();
        for block in p.blocks() {
            prod = star(&prod, &Element::from_forest(letters_forest(letters, block)));
        }
        out += &prod;
    }
    out
}

/// Closed formula
/// `sol_i(l_1 … l_n) = Σ_{j=i}^{n} s(j,i)/j! Σ l_{I_1} ∗ … ∗ l_{I_j}`.
pub fn sol_stirling(i: usize, letters: &[Tree]) -> Result<Element> {
    let n = letters.len();
    if i < 1 || i > n {
        return Err(Error::InvalidArgument(format!(
            "sol_stirling needs 1 <= i <= n, got i={i}, n={n}"
        )));
    }
    let mut out = Element::zero();
    for j in i..=n {
        let weight = Rational::new(stirling_first(j, i)?, factorial(j));
        out.add_scaled(&ordered_partition_sum(letters, j), &weight);
    }
    Ok(out)
}

/// First-idempotent formula with alternating weights
/// `sol_1(l_1 … l_n) = Σ_{i=1}^{n} (-1)^{i-1}/i Σ l_{I_1} ∗ … ∗ l_{I_i}`.
pub fn sol1_alternating(letters: &[Tree]) -> Element {
    let mut out = Element::zero();
    for i in 1..=letters.len() {
        let weight = sign(i - 1) / Rational::from_integer(i.into());
        out.add_scaled(&ordered_partition_sum(letters, i), &weight);
    }
    out
}

/// Adams operation `Ψ^k = id^{⋆k}`: ∗-multiply the `k` slots of
/// `Δ^[k](u)`. `Ψ^0 = unit∘counit`.
pub fn psi(k: usize, u: &Element, trunc: TruncationOrder) -> Element {
    let u = u.truncate(trunc.get());
    if k == 0 {
        return Element::scalar(u.counit());
    }
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        for (parts, w) in distribute(f, k, false) {
            let prod = parts
                .iter()
                .fold(Element::one(), |acc, p| star(&acc, &Element::from_forest(p.clone())));
            out.add_scaled(&prod, &(c * Rational::from_integer(w)));
        }
    }
    out
}

/// Closed form `Ψ^k(l_1 … l_n) = Σ_j C(k, j) Σ l_{I_1} ∗ … ∗ l_{I_j}`.
pub fn psi_closed(k: usize, letters: &[Tree]) -> Element {
    if letters.is_empty() {
        return Element::one();
    }
    let mut out = Element::zero();
    for j in 1..=letters.len().min(k) {
        let weight = Rational::from_integer(binomial(k, j));
        out.add_scaled(&ordered_partition_sum(letters, j), &weight);
    }
    out
}

/// Distinct arrangements of a multiset given as counts per symbol.
fn arrangements(counts: &mut [usize], current: &mut Vec<usize>, total: usize, out: &mut Vec<Vec<usize>>) {
    if current.len() == total {
        out.push(current.clone());
        return;
    }
    for s in 0..counts.len() {
        if counts[s] > 0 {
            counts[s] -= 1;
            current.push(s);
            arrangements(counts, current, total, out);
            current.pop();
            counts[s] += 1;
        }
    }
}

/// The PBW map `e(l_1 … l_n) = (1/n!) Σ_σ l_σ(1) ∗ … ∗ l_σ(n)` from S(L)
/// onto S^∗(L).
pub fn pbw_map(u: &Element, trunc: TruncationOrder) -> Element {
    let u = u.truncate(trunc.get());
    let mut out = Element::zero();
    for (f, c) in u.iter() {
        let distinct: Vec<&Tree> = f.distinct().iter().map(|(t, _)| t).collect();
        let mut counts: Vec<usize> = f.distinct().iter().map(|(_, m)| *m).collect();
        // each distinct arrangement stands for Π m_i! permutations
        let repeat: BigInt = counts.iter().map(|&m| factorial(m)).product();
        let weight = c * Rational::new(repeat, factorial(f.len()));
        let mut words = Vec::new();
        arrangements(&mut counts, &mut Vec::new(), f.len(), &mut words);
        let mut sum = Element::zero();
        for word in words {
            let prod = word
                .iter()
                .fold(Element::one(), |acc, &s| star(&acc, &Element::from_tree(distinct[s].clone())));
            sum += &prod;
        }
        out.add_scaled(&sum, &weight);
    }
    out
}

/// Inverse of the PBW map:
/// `inv(u) = Σ_n (1/n!) · sol_1(u_(1)) ⋯ sol_1(u_(n))` (commutative product
/// of the slots of `Δ^[n](u)`), the `n = 0` term being `counit(u)·1`.
pub fn pbw_inverse(u: &Element, trunc: TruncationOrder) -> Element {
    let u = u.truncate(trunc.get());
    let mut out = Element::scalar(u.counit());
    for (f, c) in u.iter() {
        for n in 1..=f.len() {
            let mut level = Element::zero();
            for (parts, w) in distribute(f, n, true) {
                let mut prod = Element::one();
                for p in &parts {
                    prod = commutative_product(&prod, &sol1_forest(p));
                    if prod.is_zero() {
                        break;
                    }
                }
                level.add_scaled(&prod, &Rational::from_integer(w));
            }
            out.add_scaled(&level, &(c * inv_factorial(n)));
        }
    }
    out
}

/// `(f ⋆ g)(u)` for two Solomon idempotents: Δ, `sol_i ⊗ sol_j`, then `∗`.
pub fn sol_convolution(i: usize, j: usize, u: &Element, trunc: TruncationOrder) -> Element {
    let fi = |f: &Forest| soln(i, &Element::from_forest(f.clone()), trunc);
    let fj = |f: &Forest| soln(j, &Element::from_forest(f.clone()), trunc);
    crate::hopf::convolve(&[&fi, &fj], &u.truncate(trunc.get()))
}

/// Checks `Σ_i sol_i(u) = u - counit(u)·1`; returns the discrepancy.
pub fn completeness_defect(u: &Element, trunc: TruncationOrder) -> Element {
    let family = GradedProjectionFamily::new(trunc);
    let mut sum = Element::zero();
    for c in family.components(u) {
        sum += &c;
    }
    let u = u.truncate(trunc.get());
    let expected = &u - &Element::scalar(u.counit());
    &sum - &expected
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{parse_tree, Alphabet};

    fn el(s: &str) -> Element {
        Element::parse(s, &Alphabet::default()).unwrap()
    }

    fn order(n: usize) -> TruncationOrder {
        TruncationOrder::new(n).unwrap()
    }

    #[test]
    fn sol1_examples() {
        assert_eq!(sol1(&el("a"), order(3)), el("a"));
        assert_eq!(sol1(&el("a.a"), order(3)), el("-a(a)"));
        assert_eq!(sol1(&el("1/6 a.a.a"), order(3)), el("1/12 a(a,a) + 1/3 a(a(a))"));
        assert!(sol1(&el("1"), order(3)).is_zero());
    }

    #[test]
    fn soln_examples() {
        assert_eq!(soln(2, &el("a.a"), order(3)), el("a.a + a(a)"));
        assert!(soln(2, &el("a"), order(3)).is_zero());
        let u = el("a.a.a - 2 a(a).a + a(a(a))");
        assert_eq!(soln(1, &u, order(3)), sol1(&u, order(3)));
        assert!(soln(4, &u, order(3)).is_zero());
    }

    #[test]
    fn sol_stirling_examples() {
        let ab = Alphabet::parse("a,b").unwrap();
        let l: Vec<Tree> = ["a", "b"].iter().map(|s| parse_tree(s, &ab).unwrap()).collect();
        let e = |s: &str| Element::parse(s, &ab).unwrap();
        assert_eq!(sol_stirling(1, &l[..1]).unwrap(), e("a"));
        assert_eq!(sol_stirling(1, &l).unwrap(), e("-1/2 a(b) - 1/2 b(a)"));
        assert_eq!(sol_stirling(2, &l).unwrap(), e("a.b + 1/2 a(b) + 1/2 b(a)"));
        assert!(sol_stirling(3, &l).is_err());
        assert!(sol_stirling(0, &l).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1, &el("a.a + a(a)"), order(4)), el("a.a + a(a)"));
        assert_eq!(psi(2, &el("a"), order(4)), el("2 a"));
        assert_eq!(psi(2, &el("a.a"), order(4)), el("4 a.a + 2 a(a)"));
        assert_eq!(psi(0, &el("3 + a"), order(4)), el("3"));
    }

    #[test]
    fn psi_closed_examples() {
        let ab = Alphabet::parse("a,b").unwrap();
        let l: Vec<Tree> = ["a", "b"].iter().map(|s| parse_tree(s, &ab).unwrap()).collect();
        assert_eq!(psi_closed(1, &l), Element::parse("a.b", &ab).unwrap());
        assert!(psi_closed(0, &l).is_zero());
        let a = parse_tree("a", &Alphabet::default()).unwrap();
        // multilinear in the letters, so l_1 = l_2 = a specialises to Ψ^2(a.a)
        assert_eq!(psi_closed(2, &[a.clone(), a]), el("4 a.a + 2 a(a)"));
    }

    #[test]
    fn pbw_examples() {
        let n = order(5);
        assert_eq!(pbw_map(&el("a"), n), el("a"));
        assert_eq!(pbw_map(&el("a.a"), n), el("a.a + a(a)"));
        assert_eq!(pbw_map(&el("a.a.a"), n), el("a.a.a + 3 a.a(a) + a(a,a) + a(a(a))"));
        assert_eq!(pbw_inverse(&el("a"), n), el("a"));
        assert_eq!(pbw_inverse(&el("a.a + a(a)"), n), el("a.a"));
        assert_eq!(pbw_inverse(&el("2"), n), el("2"));
    }

    #[test]
    fn family_and_completeness() {
        let n = order(4);
        let u = el("a.a.a.a - a(a).a + 1/2 a(a,a) + 3");
        assert!(completeness_defect(&u, n).is_zero());
        let family = GradedProjectionFamily::new(n);
        assert_eq!(family.components(&u).len(), 4);
    }
}
