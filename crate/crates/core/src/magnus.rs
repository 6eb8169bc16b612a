//! The pre-Lie Magnus element Ω in the completed free pre-Lie algebra on a
//! single generator `a`, built two ways:
//!
//! * as the fixed point of `Ω = a ↶ (Ω / (exp(Ω) - 1))`, the fraction being
//!   the Bernoulli series `Σ B_n/n! Ω^{∗n}` in S^∗(L);
//! * as `sol_1(exp(a)) = log^∗(exp(a))`.

use std::fmt;

use crate::combinat::{bernoulli, inv_factorial};
use crate::element::Element;
use crate::error::Result;
use crate::hopf::{star_product, sym_exp, TruncationOrder};
use crate::prelie::act;
use crate::solomon::sol1;
use crate::trees::{Label, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    FixedPoint,
    LogStar,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::FixedPoint => "fixed_point",
            Route::LogStar => "log_star",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusResult {
    pub omega: Element,
    pub order: TruncationOrder,
    pub route: Route,
}

/// The single generator `a`.
pub fn generator() -> Tree {
    Tree::leaf(Label::new("a").expect("valid label"))
}

/// `Ω / (exp(Ω) - 1) = Σ_{n=0}^{N} B_n/n! Ω^{∗n}`, truncated at `N`.
pub fn bernoulli_series(omega: &Element, trunc: TruncationOrder) -> Result<Element> {
    omega.require_prelie()?;
    let n = trunc.get();
    let mut out = Element::one();
    let mut power = Element::one();
    for k in 1..=n {
        power = star_product(&power, omega, trunc);
        if power.is_zero() {
            break;
        }
        out.add_scaled(&power, &(bernoulli(k) * inv_factorial(k)));
    }
    Ok(out)
}

/// `a ↶ (Ω / (exp(Ω) - 1)) - Ω` through degree `N`; zero exactly when Ω
/// solves the defining equation to that order.
pub fn residual(omega: &Element, trunc: TruncationOrder) -> Result<Element> {
    let a = Element::from_tree(generator());
    let series = bernoulli_series(omega, trunc)?;
    let image = act(&a, &series)?.truncate(trunc.get());
    Ok(&image - &omega.truncate(trunc.get()))
}

/// Picard iteration `Ω ← a ↶ B(Ω)` from `Ω = a`. Each pass fixes at least
/// one more degree, so it settles after at most `N` passes.
pub fn magnus_fixed_point(trunc: TruncationOrder) -> MagnusResult {
    let a = Element::from_tree(generator());
    let n = trunc.get();
    let mut omega = a.clone();
    for _ in 0..=n {
        let series = bernoulli_series(&omega, trunc).expect("iterates lie in L");
        let next = act(&a, &series).expect("generator lies in L").truncate(n);
        if next == omega {
            break;
        }
        omega = next;
    }
    MagnusResult {
        omega,
        order: trunc,
        route: Route::FixedPoint,
    }
}

/// `Ω = sol_1(exp(a))`, truncated at `N`.
pub fn magnus_via_log(trunc: TruncationOrder) -> MagnusResult {
    let a = Element::from_tree(generator());
    let exp_a = sym_exp(&a, trunc).expect("generator has zero counit");
    MagnusResult {
        omega: sol1(&exp_a, trunc),
        order: trunc,
        route: Route::LogStar,
    }
}
