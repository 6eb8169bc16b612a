//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use prelie_core::magnus::{magnus_fixed_point, magnus_via_log, residual};
use prelie_core::odemagnus::{error_report, PolyMatrix};
use prelie_core::solomon::{psi, psi_closed, sol1_alternating, sol_stirling, soln};
use prelie_core::trees::{enumerate_forests, enumerate_trees, parse_tree};
use prelie_core::verify::{
    check_bialgebra, check_coassociative, check_cocommutative, check_completeness, check_convolution_delta,
    check_convolution_law, check_filtration, check_image_grading, check_module_property, check_orthogonality,
    check_pbw_bijective, check_prelie_identity, check_sol1_primitive, check_star_associative, CheckResult, Sampler,
};
use prelie_core::{Alphabet, Element, Forest, Rational, Tree, TruncationOrder};

struct Outcome {
    cases: usize,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, r: CheckResult) {
        self.cases += 1;
        if let Err(e) = r {
            self.failures.push(e);
        }
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.record(if ok { Ok(()) } else { Err(msg()) });
    }
}

fn order(n: usize) -> TruncationOrder {
    TruncationOrder::new(n).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn report(id: usize, name: &str, o: &Outcome, elapsed: Duration, limit: Option<Duration>) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let ok = o.failures.is_empty() && in_time && o.cases > 0;
    let limit_txt = limit.map(|l| format!(" / limit {}s", l.as_secs())).unwrap_or_default();
    println!(
        "criterion {id} [{name}]: {} ({} cases, {} failed, {:.2}s{limit_txt})",
        if ok { "PASS" } else { "FAIL" },
        o.cases,
        o.failures.len(),
        elapsed.as_secs_f64(),
    );
    if !in_time {
        println!("    runtime limit exceeded");
    }
    for f in o.failures.iter().take(3) {
        println!("    {f}");
    }
    ok
}

fn trees_by_degree(max: usize, alpha: &Alphabet) -> Vec<Vec<Element>> {
    (0..=max)
        .map(|d| enumerate_trees(d, alpha).into_iter().map(Element::from_tree).collect())
        .collect()
}

fn prelie_foundation() -> Outcome {
    let mut o = Outcome::new();
    for gens in ["a", "a,b"] {
        let trees = trees_by_degree(7, &Alphabet::parse(gens).unwrap());
        for dx in 1..=5 {
            for dy in 1..=6 - dx {
                for dz in 1..=7 - dx - dy {
                    for x in &trees[dx] {
                        for y in &trees[dy] {
                            for z in &trees[dz] {
                                o.record(check_prelie_identity(x, y, z));
                                o.record(check_module_property(x, y, z));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut s = Sampler::new(11, Alphabet::parse("a,b").unwrap());
    for _ in 0..200 {
        let x = s.prelie_element(3, 3);
        let y = s.prelie_element(2, 3);
        let z = s.prelie_element(2, 3);
        o.record(check_prelie_identity(&x, &y, &z));
        let u = s.element(2, 2);
        let v = s.element(2, 2);
        o.record(check_module_property(&x, &u, &v));
    }
    o
}

fn hopf_suite() -> Outcome {
    let mut o = Outcome::new();
    let mut s = Sampler::new(22, Alphabet::parse("a,b").unwrap());
    let elements: Vec<Element> = (0..100).map(|_| s.element(5, 3)).collect();
    let m = elements.len();
    for (k, u) in elements.iter().enumerate() {
        let v = &elements[(k + 1) % m];
        let w = &elements[(k + 2) % m];
        o.record(check_star_associative(u, v, w));
        o.record(check_coassociative(u));
        o.record(check_cocommutative(u));
        o.record(check_bialgebra(u, v));
        o.record(check_filtration(u, v));
    }
    o
}

fn idempotent_suite() -> (Outcome, Option<String>) {
    let mut o = Outcome::new();
    let ab = Alphabet::parse("a,b").unwrap();
    let mut cases: Vec<Element> = (1..=4).flat_map(|d| enumerate_forests(d, &ab)).map(Element::from_forest).collect();
    let mut s = Sampler::new(33, ab.clone());
    for _ in 0..12 {
        cases.push(s.homogeneous(5, 2));
    }
    for u in &cases {
        o.record(check_completeness(u));
        o.record(check_orthogonality(u));
        o.record(check_convolution_law(u));
        o.record(check_sol1_primitive(u));
        o.record(check_image_grading(u));
    }
    let literal = check_convolution_delta(&Element::parse("a.a", &ab).unwrap()).err();
    (o, literal)
}

fn closed_forms() -> Outcome {
    let mut o = Outcome::new();
    let alpha = Alphabet::parse("a,b,c,d,e").unwrap();
    let all: Vec<Tree> = ["a", "b", "c", "d", "e"].iter().map(|s| parse_tree(s, &alpha).unwrap()).collect();
    for n in 1..=5 {
        let ls = &all[..n];
        let u = Element::from_forest(Forest::from_trees(ls.iter().cloned()));
        for i in 1..=n {
            let closed = sol_stirling(i, ls).unwrap();
            let conv = soln(i, &u, order(n));
            o.require(closed == conv, || format!("sol_stirling({i}) != soln on n = {n}"));
        }
        if n <= 4 {
            for k in 0..=3 {
                o.require(psi_closed(k, ls) == psi(k, &u, order(n)), || format!("psi_closed({k}) on n = {n}"));
            }
        }
    }
    o
}

fn pbw_bijectivity() -> Outcome {
    let mut o = Outcome::new();
    let ab = Alphabet::parse("a,b").unwrap();
    for d in 0..=5 {
        for f in enumerate_forests(d, &ab) {
            o.record(check_pbw_bijective(&Element::from_forest(f)));
        }
    }
    o
}

fn magnus_theorem() -> Outcome {
    let mut o = Outcome::new();
    let n = order(6);
    let lg = magnus_via_log(n).omega;
    let fp = magnus_fixed_point(n).omega;
    o.require(lg == fp, || "log route differs from fixed point at N = 6".into());
    o.require(residual(&fp, n).unwrap().is_zero(), || "residual nonzero through degree 6".into());
    // oracle: Σ_k sol_1(a^k)/k! from the ordered-partition formula, without
    // convolution powers
    let alpha = Alphabet::default();
    let a = parse_tree("a", &alpha).unwrap();
    let mut oracle = Element::zero();
    for k in 1..=3 {
        let letters = vec![a.clone(); k];
        oracle.add_scaled(&sol1_alternating(&letters), &prelie_core::combinat::inv_factorial(k));
    }
    let coeff = |s: &str| lg.coefficient(&Forest::single(parse_tree(s, &alpha).unwrap()));
    for (tree, want) in [("a(a)", q(-1, 2)), ("a(a,a)", q(1, 12)), ("a(a(a))", q(1, 3))] {
        let got = coeff(tree);
        let ora = oracle.coefficient(&Forest::single(parse_tree(tree, &alpha).unwrap()));
        o.require(got == want && ora == want, || format!("{tree}: got {got}, oracle {ora}, want {want}"));
    }
    o
}

fn matrix(rows: &[[&str; 2]]) -> PolyMatrix {
    PolyMatrix::parse_rows(&rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect::<Vec<_>>())
        .unwrap()
}

fn numerical_magnus() -> Outcome {
    let mut o = Outcome::new();
    let a = matrix(&[["0", "1"], ["t", "0"]]);
    let rep = error_report(&a, order(4), &[q(1, 10)], &q(1, 2000)).unwrap();
    let dev = rep.deviations[0];
    o.require(dev < 1e-6, || format!("deviation {dev:.3e} at t = 1/10"));
    let ratio = rep.halving_ratios[0];
    o.require((16.0..=64.0).contains(&ratio), || {
        format!("halving ratio {ratio:.2} (deviation {dev:.3e} at t = 1/10) outside [16, 64]")
    });
    for c in [
        matrix(&[["t", "0"], ["0", "1 - t^2"]]),
        matrix(&[["1 + t", "2 + 2 t"], ["0", "3 + 3 t"]]),
        matrix(&[["0", "1"], ["-1", "0"]]),
    ] {
        let rep = error_report(&c, order(4), &[q(1, 4), q(1, 2), q(3, 4), q(1, 1)], &q(1, 10000)).unwrap();
        o.require(rep.max_deviation < 1e-9, || format!("commuting {c:?}: deviation {:.3e}", rep.max_deviation));
    }
    o
}

fn ahu(v: usize, children: &[Vec<usize>]) -> String {
    let mut subs: Vec<String> = children[v].iter().map(|&c| ahu(c, children)).collect();
    subs.sort();
    format!("({})", subs.concat())
}

fn brute_force_count(n: usize) -> usize {
    fn rec(p: &mut Vec<usize>, n: usize, seen: &mut BTreeSet<String>) {
        if p.len() == n {
            let mut children = vec![Vec::new(); n];
            for (i, &q) in p.iter().enumerate().skip(1) {
                children[q].push(i);
            }
            seen.insert(ahu(0, &children));
            return;
        }
        for q in 0..p.len() {
            p.push(q);
            rec(p, n, seen);
            p.pop();
        }
    }
    let mut seen = BTreeSet::new();
    rec(&mut vec![0], n, &mut seen);
    seen.len()
}

fn enumeration() -> Outcome {
    let mut o = Outcome::new();
    let alpha = Alphabet::default();
    for (n, want) in (1..=7).zip([1usize, 1, 2, 4, 9, 20, 48]) {
        let ours = enumerate_trees(n, &alpha).len();
        let oracle = brute_force_count(n);
        o.require(ours == want && oracle == want, || format!("n = {n}: ours {ours}, oracle {oracle}, want {want}"));
    }
    o
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;

    let (o, t) = timed(prelie_foundation);
    all &= report(1, "pre-Lie identity and module property", &o, t, Some(secs(30)));

    let (o, t) = timed(hopf_suite);
    all &= report(2, "Hopf suite", &o, t, Some(secs(60)));

    let ((o, literal), t) = timed(idempotent_suite);
    all &= report(3, "idempotent suite", &o, t, None);
    if let Some(e) = literal {
        println!("    note: orthogonality checked as sol_i∘sol_j = δ_ij sol_i and sol_i⋆sol_j = C(i+j,i) sol_(i+j);");
        println!("    the reading sol_i⋆sol_j = δ_ij sol_i does not hold: {e}");
    }

    let (o, t) = timed(closed_forms);
    all &= report(4, "closed-form equivalence", &o, t, None);

    let (o, t) = timed(pbw_bijectivity);
    all &= report(5, "PBW bijectivity", &o, t, None);

    let (o, t) = timed(magnus_theorem);
    all &= report(6, "Magnus element", &o, t, Some(secs(120)));

    let (o, t) = timed(numerical_magnus);
    let ok7 = report(7, "numerical Magnus", &o, t, Some(secs(30)));
    if !ok7 {
        println!("    note: A(0) commutes with itself, so the omitted degree-5 term starts at a higher power of t;");
        println!("    for this A the deviation of the order-N truncation scales like t^(N+3)");
    }
    all &= ok7;

    let (o, t) = timed(enumeration);
    all &= report(8, "tree enumeration", &o, t, None);

    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria fail");
        ExitCode::FAILURE
    }
}
