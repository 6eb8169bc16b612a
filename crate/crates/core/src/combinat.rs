//! Exact combinatorial numbers: Bernoulli, signed Stirling numbers of the
//! first kind, binomials and ordered set partitions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Bernoulli number `B_n` of the generating function `x / (e^x - 1)`,
/// so that `B_1 = -1/2`.
///
/// Computed with the Akiyama-Tanigawa transform, which yields the `B_1 = +1/2`
/// convention; the sign of `B_1` is flipped afterwards.
pub fn bernoulli(n: usize) -> Rational {
    let mut row: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(Rational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * Rational::from_integer(BigInt::from(j));
        }
    }
    let b = row.swap_remove(0);
    if n == 1 {
        -b
    } else {
        b
    }
}

/// Signed Stirling number of the first kind `s(j, i)`: the coefficient of
/// `x^i` in the falling factorial `x (x - 1) ... (x - j + 1)`.
pub fn stirling_first(j: usize, i: usize) -> Result<BigInt> {
    if i < 1 || i > j {
        return Err(Error::InvalidArgument(format!(
            "stirling_first requires 1 <= i <= j, got j={j}, i={i}"
        )));
    }
    // coefficients of the falling factorial, lowest degree first
    let mut poly = vec![BigInt::one()];
    for r in 0..j {
        let r = BigInt::from(r);
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (d, c) in poly.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= c * &r;
        }
        poly = next;
    }
    Ok(poly.swap_remove(i))
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient with a signed upper argument, used by the Ψ^k
/// closed form where `k` may be any integer.
pub fn binomial_signed(n: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= i + 1;
    }
    num / den
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `n! / (k_1! k_2! ...)` for a composition `parts` of `n`.
pub fn multinomial(parts: &[usize]) -> BigInt {
    let n: usize = parts.iter().sum();
    parts
        .iter()
        .fold(factorial(n), |acc, &p| acc / factorial(p))
}

/// Reciprocal of `n!` as an exact rational.
pub fn inv_factorial(n: usize) -> Rational {
    Rational::new(BigInt::one(), factorial(n))
}

/// An ordered partition of `{0, .., n-1}` into nonempty blocks.
///
/// Blocks keep their elements in increasing order; the order of the blocks
/// themselves is significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    blocks: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Streams every ordered partition of `{0, .., n-1}` into exactly `j`
/// nonempty blocks, each exactly once. Empty when `j > n` or `j == 0`.
///
/// Unordered set partitions are walked as restricted growth strings, and each
/// one is emitted under every ordering of its blocks.
pub fn ordered_partitions(n: usize, j: usize) -> OrderedPartitions {
    let exhausted = j == 0 || j > n;
    // smallest restricted growth string with exactly j blocks: 0..0,1,2,..,j-1
    let mut rgs = vec![0usize; n];
    if !exhausted {
        for (k, slot) in rgs.iter_mut().enumerate().skip(n - j + 1) {
            *slot = k - (n - j);
        }
    }
    OrderedPartitions {
        n,
        j,
        rgs,
        perm: (0..j).collect(),
        exhausted,
    }
}

/// Iterator returned by [`ordered_partitions`].
#[derive(Debug, Clone)]
pub struct OrderedPartitions {
    n: usize,
    j: usize,
    rgs: Vec<usize>,
    perm: Vec<usize>,
    exhausted: bool,
}

impl OrderedPartitions {
    fn current(&self) -> OrderedPartition {
        let mut blocks = vec![Vec::new(); self.j];
        for (elem, &b) in self.rgs.iter().enumerate() {
            blocks[self.perm[b]].push(elem);
        }
        OrderedPartition { blocks }
    }

    fn advance_rgs(&mut self) -> bool {
        // next restricted growth string with values below j, skipping those
        // that use fewer than j blocks
        let n = self.n;
        loop {
            let mut pos = n;
            let mut advanced = false;
            while pos > 1 {
                pos -= 1;
                let prefix_max = self.rgs[..pos].iter().copied().max().unwrap_or(0);
                if self.rgs[pos] <= prefix_max && self.rgs[pos] + 1 < self.j {
                    self.rgs[pos] += 1;
                    self.rgs[pos + 1..].iter_mut().for_each(|x| *x = 0);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return false;
            }
            if self.rgs.iter().copied().max().unwrap_or(0) + 1 == self.j {
                return true;
            }
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut k = p.len() - 1;
    while p[k] <= p[i - 1] {
        k -= 1;
    }
    p.swap(i - 1, k);
    p[i..].reverse();
    true
}

impl Iterator for OrderedPartitions {
    type Item = OrderedPartition;

    fn next(&mut self) -> Option<OrderedPartition> {
        if self.exhausted {
            return None;
        }
        let out = self.current();
        if !next_permutation(&mut self.perm) {
            self.perm = (0..self.j).collect();
            if !self.advance_rgs() {
                self.exhausted = true;
            }
        }
        Some(out)
    }
}

/// Sign `(-1)^k` as a rational.
pub(crate) fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}
