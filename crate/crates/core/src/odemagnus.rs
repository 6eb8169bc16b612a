//! Magnus integration of `X'(t) = A(t) X(t), X(0) = 1` for polynomial
//! coefficient matrices.
//!
//! Time-dependent matrices form a pre-Lie algebra under
//! `M ↶ N = ∫_0^t [N(u), M'(u)] du`. The universal Magnus element is mapped
//! into it by sending the generator to `Ã(t) = ∫_0^t A`, then exponentiated
//! numerically and compared with a fourth-order Runge-Kutta reference.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::hopf::TruncationOrder;
use crate::magnus::magnus_via_log;
use crate::prelie::{extended_action_recursive, PreLieCarrier};
use crate::text;
use crate::trees::Tree;
use crate::Rational;

/// Univariate polynomial in `t` with exact coefficients, lowest power first.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `c t^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn parse(input: &str) -> Result<Self> {
        Ok(Poly::new(text::parse_poly(input)?))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    /// `∫_0^t p(u) du`.
    pub fn integral(&self) -> Poly {
        let mut out = vec![Rational::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / Rational::from_integer((k + 1).into())),
        );
        Poly::new(out)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(&Rational, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let body = match k {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{k}"),
                };
                (c, body)
            })
            .collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, body)) in terms.iter().enumerate() {
            let neg = c.numer() < &0.into();
            let abs = if neg { -(*c).clone() } else { (*c).clone() };
            let mag = if body.is_empty() {
                abs.to_string()
            } else if abs.is_one() {
                body.clone()
            } else {
                format!("{abs} {body}")
            };
            match (i, neg) {
                (0, true) => write!(f, "-{mag}")?,
                (0, false) => write!(f, "{mag}")?,
                (_, true) => write!(f, " - {mag}")?,
                (_, false) => write!(f, " + {mag}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Square matrix of polynomials in `t`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(dim: usize) -> Self {
        PolyMatrix {
            dim,
            entries: vec![Poly::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = PolyMatrix::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Poly::constant(Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            entries.extend(row);
        }
        Ok(PolyMatrix { dim, entries })
    }

    /// Parses rows of polynomial strings, e.g. `[["0", "1"], ["t", "0"]]`.
    pub fn parse_rows(rows: &[Vec<String>]) -> Result<Self> {
        PolyMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| Poly::parse(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.dim + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    fn check_dim(&self, other: &PolyMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, Poly::add))
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, Poly::sub))
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = PolyMatrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Poly::zero();
                for k in 0..d {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `[self, other] = self·other - other·self`.
    pub fn commutator(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn derivative(&self) -> PolyMatrix {
        self.map(Poly::derivative)
    }

    /// Entrywise `∫_0^t`.
    pub fn integral(&self) -> PolyMatrix {
        self.map(Poly::integral)
    }

    pub fn eval(&self, t: &Rational) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            self.get(i, j).eval(t).to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn eval_f64(&self, t: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).eval_f64(t))
    }

    pub fn to_json(&self) -> MatrixFile {
        MatrixFile {
            dim: self.dim,
            entries: (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
                .collect(),
        }
    }

    pub fn from_json(file: &MatrixFile) -> Result<PolyMatrix> {
        let m = PolyMatrix::parse_rows(&file.entries)?;
        if m.dim != file.dim {
            return Err(Error::DimensionMismatch(file.dim, m.dim));
        }
        Ok(m)
    }

    pub fn from_json_str(s: &str) -> Result<PolyMatrix> {
        let file: MatrixFile = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        PolyMatrix::from_json(&file)
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// On-disk form of a coefficient matrix: `{"dim": d, "entries": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<String>>,
}

/// `M ↶ N = ∫_0^t [N(u), M'(u)] du`.
pub fn prelie_matrix(m: &PolyMatrix, n: &PolyMatrix) -> Result<PolyMatrix> {
    Ok(n.commutator(&m.derivative())?.integral())
}

/// Polynomial matrices of a fixed dimension as a pre-Lie algebra.
#[derive(Debug, Clone, Copy)]
pub struct MatrixPreLie {
    pub dim: usize,
}

impl PreLieCarrier for MatrixPreLie {
    type Value = PolyMatrix;

    fn curly(&self, x: &PolyMatrix, y: &PolyMatrix) -> PolyMatrix {
        prelie_matrix(x, y).expect("carrier values share one dimension")
    }

    fn add(&self, x: &PolyMatrix, y: &PolyMatrix) -> PolyMatrix {
        x.add(y).expect("carrier values share one dimension")
    }

    fn scale(&self, c: &Rational, x: &PolyMatrix) -> PolyMatrix {
        x.scale(c)
    }

    fn zero(&self) -> PolyMatrix {
        PolyMatrix::zero(self.dim)
    }
}

/// Image of a tree under the pre-Lie morphism sending the generator to
/// `∫_0^t A`. A root with branches `t_1 … t_k` maps to
/// `Ã ↶ (eval t_1, …, eval t_k)`.
pub fn evaluate_tree(tree: &Tree, a: &PolyMatrix) -> Result<PolyMatrix> {
    let mut cache = HashMap::new();
    evaluate_tree_cached(tree, tree, &a.integral(), a.dim(), &mut cache)
}

fn evaluate_tree_cached(
    root: &Tree,
    tree: &Tree,
    a_int: &PolyMatrix,
    dim: usize,
    cache: &mut HashMap<Tree, PolyMatrix>,
) -> Result<PolyMatrix> {
    if !tree.is_monochrome(root.label()) {
        return Err(Error::InvalidArgument(format!(
            "tree `{root}` uses more than one generator"
        )));
    }
    if let Some(hit) = cache.get(tree) {
        return Ok(hit.clone());
    }
    let branches = tree
        .children()
        .iter()
        .map(|c| evaluate_tree_cached(root, c, a_int, dim, cache))
        .collect::<Result<Vec<_>>>()?;
    let value = extended_action_recursive(&MatrixPreLie { dim }, a_int, &branches);
    cache.insert(tree.clone(), value.clone());
    Ok(value)
}

/// Linear extension of [`evaluate_tree`] to an element of L.
pub fn evaluate_element(x: &Element, a: &PolyMatrix) -> Result<PolyMatrix> {
    let a_int = a.integral();
    let mut cache = HashMap::new();
    let mut out = PolyMatrix::zero(a.dim());
    for (tree, c) in x.tree_terms()? {
        let v = evaluate_tree_cached(tree, tree, &a_int, a.dim(), &mut cache)?;
        out = out.add(&v.scale(c))?;
    }
    Ok(out)
}

/// `exp(M)` by scaling and squaring around a Taylor series summed to
/// machine precision.
pub fn expm(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let n = m.nrows();
    let norm = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * scale;
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &a / k as f64;
        sum += &term;
        let tn = term.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let sn = sum.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if tn <= 1e-17 * sn.max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential"));
    }
    Ok(sum)
}

fn check_order(order: TruncationOrder) -> Result<()> {
    if order.get() > 6 {
        return Err(Error::InvalidArgument(format!(
            "Magnus matrix evaluation supports orders up to 6, got {order}"
        )));
    }
    Ok(())
}

/// `Ω_N(t)` as an exact polynomial matrix.
pub fn magnus_omega_matrix(a: &PolyMatrix, order: TruncationOrder) -> Result<PolyMatrix> {
    check_order(order)?;
    evaluate_element(&magnus_via_log(order).omega, a)
}

/// `exp(Ω_N(t_eval))` for the coefficient matrix `A`.
pub fn magnus_matrix(a: &PolyMatrix, order: TruncationOrder, t_eval: &Rational) -> Result<DMatrix<f64>> {
    let omega = magnus_omega_matrix(a, order)?;
    let value = omega.eval(t_eval);
    if value.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("Magnus exponent"));
    }
    expm(&value)
}

/// Classical fourth-order Runge-Kutta for `X' = A(t) X` from `X(0) = 1`,
/// with the largest uniform step not exceeding `step`.
pub fn rk_reference(a: &PolyMatrix, t_eval: &Rational, step: &Rational) -> Result<DMatrix<f64>> {
    if step <= &Rational::zero() {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let t_end = t_eval.to_f64().ok_or(Error::NonFinite("time"))?;
    let h_max = step.to_f64().ok_or(Error::NonFinite("step"))?;
    let d = a.dim();
    let mut x = DMatrix::<f64>::identity(d, d);
    if t_end == 0.0 {
        return Ok(x);
    }
    let steps = (t_end.abs() / h_max).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    for k in 0..steps {
        let t = k as f64 * h;
        let a0 = a.eval_f64(t);
        let am = a.eval_f64(t + 0.5 * h);
        let a1 = a.eval_f64(t + h);
        let k1 = &a0 * &x;
        let k2 = &am * (&x + &k1 * (0.5 * h));
        let k3 = &am * (&x + &k2 * (0.5 * h));
        let k4 = &a1 * (&x + &k3 * h);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Runge-Kutta integration"));
        }
    }
    Ok(x)
}

/// Max-abs entry distance.
pub fn max_abs_diff(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (x - y).iter().map(|v| v.abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeReport {
    pub order: usize,
    pub times: Vec<String>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// Estimated convergence order in `t`, from the deviations at `T`, `T/2`,
    /// `T/4` with `T` the largest requested time. Pairs at the round-off
    /// floor are skipped; `None` when none remain.
    pub estimated_order: Option<f64>,
    pub halving_ratios: Vec<f64>,
}

impl fmt::Display for OdeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order {}", self.order)?;
        for (t, d) in self.times.iter().zip(&self.deviations) {
            writeln!(f, "t = {t}: deviation {d:.3e}")?;
        }
        writeln!(f, "max deviation {:.3e}", self.max_deviation)?;
        let ratios: Vec<String> = self.halving_ratios.iter().map(|r| format!("{r:.2}")).collect();
        writeln!(f, "halving ratios {}", ratios.join(", "))?;
        match self.estimated_order {
            Some(p) => write!(f, "estimated order {p:.3}"),
            None => write!(f, "estimated order n/a"),
        }
    }
}

/// Deviation of the order-`N` Magnus solution from the Runge-Kutta
/// reference at each time, plus a convergence-order estimate.
pub fn error_report(
    a: &PolyMatrix,
    order: TruncationOrder,
    times: &[Rational],
    step: &Rational,
) -> Result<OdeReport> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no evaluation times".into()));
    }
    if times.iter().any(|t| t <= &Rational::zero()) {
        return Err(Error::InvalidArgument("evaluation times must be positive".into()));
    }
    let omega = magnus_omega_matrix(a, order)?;
    let deviation = |t: &Rational| -> Result<f64> {
        let magnus = expm(&omega.eval(t))?;
        let reference = rk_reference(a, t, step)?;
        Ok(max_abs_diff(&magnus, &reference))
    };
    let deviations = times.iter().map(&deviation).collect::<Result<Vec<_>>>()?;
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);

    let t_max = times.iter().max().expect("nonempty").clone();
    let two = Rational::from_integer(2.into());
    let ladder = [t_max.clone(), &t_max / &two, &t_max / (&two * &two)];
    let ladder_devs = ladder.iter().map(&deviation).collect::<Result<Vec<_>>>()?;
    let halving_ratios: Vec<f64> = ladder_devs.windows(2).map(|w| w[0] / w[1]).collect();
    // below this the deviation is round-off
    let floor = 64.0 * f64::EPSILON;
    let logs: Vec<f64> = ladder_devs
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    let estimated_order = (!logs.is_empty()).then(|| logs.iter().sum::<f64>() / logs.len() as f64);
    Ok(OdeReport {
        order: order.get(),
        times: times.iter().map(|t| t.to_string()).collect(),
        deviations,
        max_deviation,
        estimated_order,
        halving_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{parse_tree, Alphabet};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn airy() -> PolyMatrix {
        PolyMatrix::parse_rows(&[
            vec!["0".into(), "1".into()],
            vec!["t".into(), "0".into()],
        ])
        .unwrap()
    }

    #[test]
    fn poly_arithmetic() {
        let p = Poly::parse("1 + 2 t").unwrap();
        let r = Poly::parse("t^2 - 1/2").unwrap();
        assert_eq!(p.mul(&r), Poly::parse("-1/2 - t + t^2 + 2 t^3").unwrap());
        assert_eq!(p.integral(), Poly::parse("t + t^2").unwrap());
        assert_eq!(p.integral().derivative(), p);
        assert_eq!(r.eval(&q(1, 2)), q(-1, 4));
        assert_eq!(Poly::parse("-1/2 - t + 3 t^2").unwrap().to_string(), "-1/2 - t + 3 t^2");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(p.sub(&p), Poly::zero());
    }

    #[test]
    fn prelie_matrix_examples() {
        let mut m = PolyMatrix::zero(2);
        m.set(0, 1, Poly::parse("t").unwrap());
        let mut n = PolyMatrix::zero(2);
        n.set(0, 0, Poly::parse("t").unwrap());
        n.set(1, 1, Poly::parse("-t").unwrap());
        let r = prelie_matrix(&m, &n).unwrap();
        let mut expected = PolyMatrix::zero(2);
        expected.set(0, 1, Poly::parse("t^2").unwrap());
        assert_eq!(r, expected);
        // N commuting with M' gives zero
        assert!(prelie_matrix(&m, &PolyMatrix::identity(2).scale(&q(3, 1))).unwrap().is_zero());
        assert!(prelie_matrix(&m, &PolyMatrix::zero(3)).is_err());
    }

    #[test]
    fn derivative_of_product_is_bracket() {
        let m = PolyMatrix::parse_rows(&[
            vec!["t^2".into(), "1 - t".into()],
            vec!["3 t".into(), "t^3".into()],
        ])
        .unwrap();
        let n = airy().integral();
        let lhs = prelie_matrix(&m, &n).unwrap().derivative();
        let rhs = n.commutator(&m.derivative()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tree_evaluation() {
        let alpha = Alphabet::default();
        let a = airy();
        let a_int = a.integral();
        assert_eq!(evaluate_tree(&parse_tree("a", &alpha).unwrap(), &a).unwrap(), a_int);
        let aa = evaluate_tree(&parse_tree("a(a)", &alpha).unwrap(), &a).unwrap();
        assert_eq!(aa, a_int.commutator(&a).unwrap().integral());
        // scalar multiples of one matrix commute with everything relevant
        let c = PolyMatrix::parse_rows(&[
            vec!["1 + t".into(), "2 + 2 t".into()],
            vec!["0".into(), "3 + 3 t".into()],
        ])
        .unwrap();
        for s in ["a(a)", "a(a,a)", "a(a(a))"] {
            assert!(evaluate_tree(&parse_tree(s, &alpha).unwrap(), &c).unwrap().is_zero());
        }
        let ab = Alphabet::parse("a,b").unwrap();
        assert!(evaluate_tree(&parse_tree("a(b)", &ab).unwrap(), &a).is_err());
    }

    #[test]
    fn expm_matches_nalgebra() {
        let m = DMatrix::from_row_slice(3, 3, &[0.1, 2.0, -1.0, 0.3, -0.4, 0.5, 1.5, 0.0, 0.7]);
        let ours = expm(&m).unwrap();
        let theirs = m.clone().exp();
        assert!(max_abs_diff(&ours, &theirs) < 1e-12 * theirs.amax().max(1.0));
        assert_eq!(expm(&DMatrix::zeros(2, 2)).unwrap(), DMatrix::identity(2, 2));
        let bad = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(expm(&bad).is_err());
    }

    #[test]
    fn magnus_at_zero_is_identity() {
        let x = magnus_matrix(&airy(), TruncationOrder::new(3).unwrap(), &Rational::zero()).unwrap();
        assert_eq!(x, DMatrix::identity(2, 2));
        assert!(magnus_matrix(&airy(), TruncationOrder::new(7).unwrap(), &q(1, 10)).is_err());
    }

    #[test]
    fn rk_reference_behaviour() {
        let zero = Rational::zero();
        assert_eq!(rk_reference(&airy(), &zero, &q(1, 100)).unwrap(), DMatrix::identity(2, 2));
        assert!(rk_reference(&airy(), &q(1, 2), &zero).is_err());
        // commuting case against the closed form exp(∫A)
        let c = PolyMatrix::parse_rows(&[
            vec!["t".into(), "0".into()],
            vec!["0".into(), "1 - t^2".into()],
        ])
        .unwrap();
        let t = q(1, 1);
        let exact = expm(&c.integral().eval(&t)).unwrap();
        let rk = rk_reference(&c, &t, &q(1, 1000)).unwrap();
        assert!(max_abs_diff(&exact, &rk) < 1e-10);
        // fourth order: halving the step divides the error by about 16
        let e1 = max_abs_diff(&exact, &rk_reference(&c, &t, &q(1, 10)).unwrap());
        let e2 = max_abs_diff(&exact, &rk_reference(&c, &t, &q(1, 20)).unwrap());
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn error_report_shapes() {
        let n4 = TruncationOrder::new(4).unwrap();
        let rep = error_report(&airy(), n4, &[q(1, 2), q(1, 4)], &q(1, 2000)).unwrap();
        assert_eq!(rep.deviations.len(), 2);
        assert_eq!(rep.halving_ratios.len(), 2);
        assert!(rep.deviations[1] < rep.deviations[0]);
        // degree-5 remainder: the constant part of A commutes with itself,
        // so the deviation falls off faster than t^5
        let p = rep.estimated_order.unwrap();
        assert!(p > 5.0, "order {p}");
        assert!(error_report(&airy(), n4, &[], &q(1, 10)).is_err());
        assert!(error_report(&airy(), n4, &[q(-1, 2)], &q(1, 10)).is_err());
        assert!(rep.to_string().contains("estimated order"));
    }

    #[test]
    fn higher_order_is_closer() {
        let times = [q(1, 5), q(1, 10)];
        let r2 = error_report(&airy(), TruncationOrder::new(2).unwrap(), &times, &q(1, 2000)).unwrap();
        let r4 = error_report(&airy(), TruncationOrder::new(4).unwrap(), &times, &q(1, 2000)).unwrap();
        for (d2, d4) in r2.deviations.iter().zip(&r4.deviations) {
            assert!(d4 < d2);
        }
        let p2 = r2.estimated_order.unwrap();
        assert!((p2 - 5.0).abs() < 0.5, "order {p2}");
    }

    #[test]
    fn omega_two_is_classical_double_integral() {
        // Ω_2(t) = 1/2 ∫_0^t ∫_0^{t1} [A(t1), A(t2)] dt2 dt1
        let a = airy();
        let omega = magnus_omega_matrix(&a, TruncationOrder::new(2).unwrap()).unwrap();
        let inner = a.integral();
        let classical = a.commutator(&inner).unwrap().integral().scale(&q(1, 2));
        assert_eq!(omega, a.integral().add(&classical).unwrap());
    }

    #[test]
    fn matrix_file_round_trip() {
        let json = r#"{"dim": 2, "entries": [["0", "1"], ["t", "0"]]}"#;
        let m = PolyMatrix::from_json_str(json).unwrap();
        assert_eq!(m, airy());
        let back = PolyMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(PolyMatrix::from_json_str(r#"{"dim": 3, "entries": [["0", "1"], ["t", "0"]]}"#).is_err());
        assert!(PolyMatrix::from_json_str(r#"{"dim": 2, "entries": [["0"], ["t", "0"]]}"#).is_err());
    }
}
