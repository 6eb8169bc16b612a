//! Invariant suites over enumerated and randomly sampled inputs.
//!
//! Each check is also exposed as a function on a single input returning
//! `Err(description)` on violation, so callers can drive their own case sets.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinat::binomial;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::{commutative_product, coproduct, counit, star, TruncationOrder};
use crate::magnus::{magnus_fixed_point, magnus_via_log, residual};
use crate::odemagnus::{error_report, PolyMatrix};
use crate::prelie::{act, extended_action_closed, extended_action_recursive_free, lie_bracket, prelie_product};
use crate::solomon::{completeness_defect, pbw_inverse, pbw_map, sol1, sol_convolution, soln};
use crate::trees::{enumerate_forests, enumerate_trees, Alphabet, Forest, Tree};
use crate::Rational;

pub type CheckResult = std::result::Result<(), String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Prelie,
    Hopf,
    Idempotents,
    Magnus,
    Ode,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Prelie, Suite::Hopf, Suite::Idempotents, Suite::Magnus, Suite::Ode];

    /// `"all"` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prelie" => Ok(Suite::Prelie),
            "hopf" => Ok(Suite::Hopf),
            "idempotents" => Ok(Suite::Idempotents),
            "magnus" => Ok(Suite::Magnus),
            "ode" => Ok(Suite::Ode),
            other => Err(Error::InvalidArgument(format!("unknown suite `{other}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Prelie => "prelie",
            Suite::Hopf => "hopf",
            Suite::Idempotents => "idempotents",
            Suite::Magnus => "magnus",
            Suite::Ode => "ode",
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub max_degree: usize,
    pub alphabet: Alphabet,
    /// Random cases per sampled check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_degree: 4,
            alphabet: Alphabet::default(),
            samples: 20,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed: 0,
            failed: 0,
            first_failure: None,
        }
    }

    pub fn record(&mut self, r: CheckResult) {
        match r {
            Ok(()) => self.passed += 1,
            Err(e) => {
                self.failed += 1;
                self.first_failure.get_or_insert(e);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().map(|c| c.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}/{}: {} passed, {} failed", self.suite, c.name, c.passed, c.failed)?;
            if let Some(e) = &c.first_failure {
                write!(f, " (first failure: {e})")?;
            }
            writeln!(f)?;
        }
        write!(f, "{}: {} passed, {} failed", self.suite, self.passed(), self.failed())
    }
}

fn expect_eq(what: &str, lhs: &Element, rhs: &Element) -> CheckResult {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{what}: {lhs} != {rhs}"))
    }
}

fn order_for(u: &Element) -> TruncationOrder {
    TruncationOrder::new(u.degree().unwrap_or(1).max(1)).expect("positive")
}

// ---- sampling ----

/// Seeded generator of random elements with small rational coefficients.
pub struct Sampler {
    rng: ChaCha8Rng,
    alphabet: Alphabet,
}

impl Sampler {
    pub fn new(seed: u64, alphabet: Alphabet) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            alphabet,
        }
    }

    pub fn coefficient(&mut self) -> Rational {
        let mut n: i64 = self.rng.gen_range(1..=5);
        if self.rng.gen_bool(0.5) {
            n = -n;
        }
        let d: i64 = self.rng.gen_range(1..=3);
        Rational::new(n.into(), d.into())
    }

    pub fn tree(&mut self, degree: usize) -> Tree {
        let trees = enumerate_trees(degree, &self.alphabet);
        trees.choose(&mut self.rng).expect("trees exist in every degree").clone()
    }

    pub fn forest(&mut self, degree: usize) -> Forest {
        let forests = enumerate_forests(degree, &self.alphabet);
        forests.choose(&mut self.rng).expect("forests exist in every degree").clone()
    }

    /// Combination of `1..=terms` trees of degree in `1..=max_degree`.
    pub fn prelie_element(&mut self, max_degree: usize, terms: usize) -> Element {
        let k = self.rng.gen_range(1..=terms.max(1));
        let mut out = Element::zero();
        for _ in 0..k {
            let d = self.rng.gen_range(1..=max_degree.max(1));
            let t = self.tree(d);
            let c = self.coefficient();
            out.add_term(Forest::single(t), c);
        }
        out
    }

    /// Combination of `1..=terms` forests of degree in `0..=max_degree`.
    pub fn element(&mut self, max_degree: usize, terms: usize) -> Element {
        let k = self.rng.gen_range(1..=terms.max(1));
        let mut out = Element::zero();
        for _ in 0..k {
            let d = self.rng.gen_range(0..=max_degree);
            let f = self.forest(d);
            let c = self.coefficient();
            out.add_term(f, c);
        }
        out
    }

    /// Combination of `1..=terms` forests of degree exactly `degree`.
    pub fn homogeneous(&mut self, degree: usize, terms: usize) -> Element {
        let k = self.rng.gen_range(1..=terms.max(1));
        let mut out = Element::zero();
        for _ in 0..k {
            let f = self.forest(degree);
            let c = self.coefficient();
            out.add_term(f, c);
        }
        out
    }
}

// ---- pre-Lie checks ----

fn associator(x: &Element, y: &Element, z: &Element) -> Result<Element> {
    Ok(prelie_product(&prelie_product(x, y)?, z)? - prelie_product(x, &prelie_product(y, z)?)?)
}

/// `(x↶y)↶z - x↶(y↶z)` is symmetric in `y, z`.
pub fn check_prelie_identity(x: &Element, y: &Element, z: &Element) -> CheckResult {
    let l = associator(x, y, z).map_err(|e| e.to_string())?;
    let r = associator(x, z, y).map_err(|e| e.to_string())?;
    expect_eq("pre-Lie identity", &l, &r)
}

/// `x ↶ (u ∗ v) = (x ↶ u) ↶ v`.
pub fn check_module_property(x: &Element, u: &Element, v: &Element) -> CheckResult {
    let l = act(x, &star(u, v)).map_err(|e| e.to_string())?;
    let r = act(&act(x, u).map_err(|e| e.to_string())?, v).map_err(|e| e.to_string())?;
    expect_eq("module property", &l, &r)
}

/// Closed grafting formula agrees with the recursive definition.
pub fn check_action_forms(x: &Element, b: &Forest) -> CheckResult {
    let closed = extended_action_closed(x, b).map_err(|e| e.to_string())?;
    expect_eq("closed vs recursive action", &closed, &extended_action_recursive_free(x, b))
}

/// Jacobi identity of the commutator bracket.
pub fn check_jacobi(x: &Element, y: &Element, z: &Element) -> CheckResult {
    let br = |p: &Element, q: &Element| lie_bracket(p, q).map_err(|e| e.to_string());
    let sum = br(x, &br(y, z)?)? + br(y, &br(z, x)?)? + br(z, &br(x, y)?)?;
    expect_eq("Jacobi", &sum, &Element::zero())
}

pub fn run_prelie(cfg: &VerifyConfig) -> SuiteReport {
    let n = cfg.max_degree;
    let trees: Vec<Vec<Element>> = (0..=n)
        .map(|d| enumerate_trees(d, &cfg.alphabet).into_iter().map(Element::from_tree).collect())
        .collect();
    let mut identity = CheckOutcome::new("prelie_identity");
    for dx in 1..=n {
        for dy in 1..=n.saturating_sub(dx) {
            for dz in dy..=n.saturating_sub(dx + dy) {
                for x in &trees[dx] {
                    for y in &trees[dy] {
                        for z in &trees[dz] {
                            identity.record(check_prelie_identity(x, y, z));
                        }
                    }
                }
            }
        }
    }
    let mut module = CheckOutcome::new("module_property");
    let mut forms = CheckOutcome::new("closed_vs_recursive_action");
    for (dx, level) in trees.iter().enumerate().skip(1) {
        for x in level {
            for du in 0..=n - dx {
                for u in enumerate_forests(du, &cfg.alphabet) {
                    forms.record(check_action_forms(x, &u));
                    let ue = Element::from_forest(u);
                    for dv in 0..=n - dx - du {
                        for v in enumerate_forests(dv, &cfg.alphabet) {
                            module.record(check_module_property(x, &ue, &Element::from_forest(v)));
                        }
                    }
                }
            }
        }
    }
    let mut sampler = Sampler::new(cfg.seed, cfg.alphabet.clone());
    let mut random = CheckOutcome::new("random_combinations");
    let mut jacobi = CheckOutcome::new("jacobi");
    let per = (n / 3).max(1);
    for _ in 0..cfg.samples {
        let x = sampler.prelie_element(per, 3);
        let y = sampler.prelie_element(per, 3);
        let z = sampler.prelie_element(per, 3);
        random.record(check_prelie_identity(&x, &y, &z));
        jacobi.record(check_jacobi(&x, &y, &z));
        let u = sampler.element(per, 2);
        let v = sampler.element(per, 2);
        random.record(check_module_property(&x, &u, &v));
    }
    SuiteReport {
        suite: Suite::Prelie,
        checks: vec![identity, module, forms, random, jacobi],
    }
}

// ---- Hopf checks ----

pub fn check_star_associative(u: &Element, v: &Element, w: &Element) -> CheckResult {
    expect_eq("∗-associativity", &star(&star(u, v), w), &star(u, &star(v, w)))
}

pub fn check_coassociative(u: &Element) -> CheckResult {
    let d = coproduct(u);
    if d.coproduct_slot(0) == d.coproduct_slot(1) {
        Ok(())
    } else {
        Err(format!("coassociativity fails on {u}"))
    }
}

pub fn check_cocommutative(u: &Element) -> CheckResult {
    let d = coproduct(u);
    if d.permute(&[1, 0]) == d {
        Ok(())
    } else {
        Err(format!("cocommutativity fails on {u}"))
    }
}

/// `Δ(u ∗ v) = Δ(u) ∗ Δ(v)` and `ε(u ∗ v) = ε(u) ε(v)`.
pub fn check_bialgebra(u: &Element, v: &Element) -> CheckResult {
    let uv = star(u, v);
    if coproduct(&uv) != coproduct(u).star(&coproduct(v)) {
        return Err(format!("Δ(u∗v) != Δu∗Δv for u = {u}, v = {v}"));
    }
    if counit(&uv) != counit(u) * counit(v) {
        return Err(format!("counit not multiplicative for u = {u}, v = {v}"));
    }
    Ok(())
}

fn max_length(u: &Element) -> usize {
    u.iter().map(|(f, _)| f.len()).max().unwrap_or(0)
}

/// The top tensor-length part of `u ∗ v` is the commutative product of the
/// top parts of `u` and `v`, and nothing longer appears.
pub fn check_filtration(u: &Element, v: &Element) -> CheckResult {
    if u.is_zero() || v.is_zero() {
        return Ok(());
    }
    let (p, q) = (max_length(u), max_length(v));
    let uv = star(u, v);
    if max_length(&uv) > p + q {
        return Err(format!("u∗v longer than expected for u = {u}, v = {v}"));
    }
    let top = commutative_product(&u.length_part(p), &v.length_part(q));
    expect_eq("filtration top term", &uv.length_part(p + q), &top)
}

pub fn run_hopf(cfg: &VerifyConfig) -> SuiteReport {
    let n = cfg.max_degree;
    let mut sampler = Sampler::new(cfg.seed, cfg.alphabet.clone());
    let mut assoc = CheckOutcome::new("star_associativity");
    let mut coassoc = CheckOutcome::new("coassociativity");
    let mut cocomm = CheckOutcome::new("cocommutativity");
    let mut bialg = CheckOutcome::new("coproduct_multiplicative");
    let mut filt = CheckOutcome::new("filtration_top_term");
    let elements: Vec<Element> = (0..cfg.samples).map(|_| sampler.element(n, 3)).collect();
    for (k, u) in elements.iter().enumerate() {
        let v = &elements[(k + 1) % elements.len()];
        let w = &elements[(k + 2) % elements.len()];
        assoc.record(check_star_associative(u, v, w));
        coassoc.record(check_coassociative(u));
        cocomm.record(check_cocommutative(u));
        bialg.record(check_bialgebra(u, v));
        filt.record(check_filtration(u, v));
    }
    SuiteReport {
        suite: Suite::Hopf,
        checks: vec![assoc, coassoc, cocomm, bialg, filt],
    }
}

// ---- idempotent checks ----

/// `Σ_i sol_i(u) = u - ε(u)·1`.
pub fn check_completeness(u: &Element) -> CheckResult {
    expect_eq("completeness", &completeness_defect(u, order_for(u)), &Element::zero())
}

/// `sol_i ∘ sol_j = δ_ij sol_j` for all `i, j ≤ deg u`.
pub fn check_orthogonality(u: &Element) -> CheckResult {
    let trunc = order_for(u);
    let n = trunc.get();
    for j in 1..=n {
        let sj = soln(j, u, trunc);
        for i in 1..=n {
            let lhs = soln(i, &sj, trunc);
            let rhs = if i == j { sj.clone() } else { Element::zero() };
            expect_eq(&format!("sol_{i}∘sol_{j} on {u}"), &lhs, &rhs)?;
        }
    }
    Ok(())
}

/// `sol_i ⋆ sol_j = C(i+j, i) sol_{i+j}` for `i, j ≤ deg u`.
pub fn check_convolution_law(u: &Element) -> CheckResult {
    let trunc = order_for(u);
    let n = trunc.get();
    for i in 1..=n {
        for j in 1..=n - i {
            let lhs = sol_convolution(i, j, u, trunc);
            let rhs = soln(i + j, u, trunc).scale(&Rational::from_integer(binomial(i + j, i)));
            expect_eq(&format!("sol_{i}⋆sol_{j} on {u}"), &lhs, &rhs)?;
        }
    }
    Ok(())
}

/// Literal reading `sol_i ⋆ sol_j = δ_ij sol_i`; does not hold in general
/// and is exposed for reporting only.
pub fn check_convolution_delta(u: &Element) -> CheckResult {
    let trunc = order_for(u);
    let n = trunc.get();
    for i in 1..=n {
        for j in 1..=n {
            let lhs = sol_convolution(i, j, u, trunc);
            let rhs = if i == j { soln(i, u, trunc) } else { Element::zero() };
            expect_eq(&format!("sol_{i}⋆sol_{j} on {u}"), &lhs, &rhs)?;
        }
    }
    Ok(())
}

pub fn check_sol1_primitive(u: &Element) -> CheckResult {
    let s = sol1(u, order_for(u));
    if s.is_in_prelie() && coproduct(&s).len() == 2 * s.len() {
        Ok(())
    } else {
        Err(format!("sol_1({u}) = {s} is not primitive"))
    }
}

/// `pbw_inverse(sol_i(u))` lies in `S^i(L)`.
pub fn check_image_grading(u: &Element) -> CheckResult {
    let trunc = order_for(u);
    for i in 1..=trunc.get() {
        let img = pbw_inverse(&soln(i, u, trunc), trunc);
        let stray = img.iter().find(|(f, _)| f.len() != i).map(|(f, _)| f.clone());
        if let Some(f) = stray {
            return Err(format!("pbw_inverse(sol_{i}({u})) has a term {f} of length {}", f.len()));
        }
    }
    Ok(())
}

/// `pbw_map ∘ pbw_inverse = id = pbw_inverse ∘ pbw_map`.
pub fn check_pbw_bijective(u: &Element) -> CheckResult {
    let trunc = order_for(u);
    expect_eq("pbw_map∘pbw_inverse", &pbw_map(&pbw_inverse(u, trunc), trunc), u)?;
    expect_eq("pbw_inverse∘pbw_map", &pbw_inverse(&pbw_map(u, trunc), trunc), u)
}

pub fn run_idempotents(cfg: &VerifyConfig) -> SuiteReport {
    let mut cases: Vec<Element> = (1..=cfg.max_degree)
        .flat_map(|d| enumerate_forests(d, &cfg.alphabet))
        .map(Element::from_forest)
        .collect();
    let mut sampler = Sampler::new(cfg.seed, cfg.alphabet.clone());
    for _ in 0..cfg.samples {
        cases.push(sampler.element(cfg.max_degree, 3));
    }
    let mut complete = CheckOutcome::new("completeness");
    let mut ortho = CheckOutcome::new("orthogonality");
    let mut conv = CheckOutcome::new("convolution_law");
    let mut prim = CheckOutcome::new("sol1_primitive");
    let mut grading = CheckOutcome::new("image_grading");
    let mut pbw = CheckOutcome::new("pbw_bijective");
    for u in &cases {
        complete.record(check_completeness(u));
        ortho.record(check_orthogonality(u));
        conv.record(check_convolution_law(u));
        prim.record(check_sol1_primitive(u));
        grading.record(check_image_grading(u));
        pbw.record(check_pbw_bijective(u));
    }
    SuiteReport {
        suite: Suite::Idempotents,
        checks: vec![complete, ortho, conv, prim, grading, pbw],
    }
}

// ---- Magnus checks ----

/// Both constructions agree and satisfy the defining equation through `N`.
pub fn check_magnus(order: TruncationOrder) -> CheckResult {
    let fp = magnus_fixed_point(order).omega;
    let lg = magnus_via_log(order).omega;
    expect_eq("fixed point vs log", &fp, &lg)?;
    let r = residual(&fp, order).map_err(|e| e.to_string())?;
    expect_eq("residual", &r, &Element::zero())
}

/// Coefficients of Ω in degrees 1 to 3.
pub fn check_magnus_low_coefficients() -> CheckResult {
    let omega = magnus_via_log(TruncationOrder::new(3).expect("positive")).omega;
    let alpha = Alphabet::default();
    let expected = Element::parse("a - 1/2 a(a) + 1/12 a(a,a) + 1/3 a(a(a))", &alpha).expect("valid");
    expect_eq("low-degree Magnus coefficients", &omega, &expected)
}

pub fn run_magnus(cfg: &VerifyConfig) -> SuiteReport {
    let mut routes = CheckOutcome::new("routes_agree_and_residual");
    for n in 1..=cfg.max_degree.clamp(1, 6) {
        routes.record(check_magnus(TruncationOrder::new(n).expect("positive")));
    }
    let mut coeffs = CheckOutcome::new("low_coefficients");
    coeffs.record(check_magnus_low_coefficients());
    SuiteReport {
        suite: Suite::Magnus,
        checks: vec![routes, coeffs],
    }
}

// ---- ODE checks ----

fn matrix(rows: &[[&str; 2]]) -> PolyMatrix {
    PolyMatrix::parse_rows(&rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect::<Vec<_>>())
        .expect("valid matrix")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Order-4 Magnus for `[[0,1],[t,0]]` at `t = 1/10`: deviation below `1e-6`
/// and halving `t` shrinks it at least as fast as `t^5`.
pub fn check_ode_noncommuting() -> CheckResult {
    let a = matrix(&[["0", "1"], ["t", "0"]]);
    let rep = error_report(&a, TruncationOrder::new(4).expect("positive"), &[q(1, 10)], &q(1, 2000))
        .map_err(|e| e.to_string())?;
    if rep.max_deviation >= 1e-6 {
        return Err(format!("deviation {:.3e} at t = 1/10", rep.max_deviation));
    }
    let ratio = rep.halving_ratios[0];
    if ratio < 32.0 {
        return Err(format!("halving ratio {ratio:.3}"));
    }
    Ok(())
}

/// For commuting coefficient matrices Ω truncates to `∫A` exactly.
pub fn check_ode_commuting() -> CheckResult {
    let cases = [
        matrix(&[["t", "0"], ["0", "1 - t^2"]]),
        matrix(&[["1 + t", "2 + 2 t"], ["0", "3 + 3 t"]]),
        matrix(&[["0", "1"], ["-1", "0"]]),
    ];
    for a in &cases {
        let rep = error_report(
            a,
            TruncationOrder::new(4).expect("positive"),
            &[q(1, 4), q(1, 2), q(1, 1)],
            &q(1, 10000),
        )
        .map_err(|e| e.to_string())?;
        if rep.max_deviation >= 1e-9 {
            return Err(format!("deviation {:.3e} for commuting {a:?}", rep.max_deviation));
        }
    }
    Ok(())
}

pub fn run_ode(_cfg: &VerifyConfig) -> SuiteReport {
    let mut nc = CheckOutcome::new("noncommuting_order4");
    nc.record(check_ode_noncommuting());
    let mut c = CheckOutcome::new("commuting_exact");
    c.record(check_ode_commuting());
    SuiteReport {
        suite: Suite::Ode,
        checks: vec![nc, c],
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    match suite {
        Suite::Prelie => run_prelie(cfg),
        Suite::Hopf => run_hopf(cfg),
        Suite::Idempotents => run_idempotents(cfg),
        Suite::Magnus => run_magnus(cfg),
        Suite::Ode => run_ode(cfg),
    }
}
