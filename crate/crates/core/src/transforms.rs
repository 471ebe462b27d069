//! Binomial transform and its inverse, plus truncated generating-series
//! identities linking `f_a(x) = sum a_n x^n` and `f_b(x) = sum b_n x^n`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A finite prefix `a_offset, ..., a_{offset+N}` of an integer sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntSequence {
    offset: u64,
    terms: Vec<BigInt>,
}

impl IntSequence {
    pub fn new(terms: Vec<BigInt>) -> Self {
        IntSequence { offset: 0, terms }
    }

    pub fn with_offset(offset: u64, terms: Vec<BigInt>) -> Self {
        IntSequence { offset, terms }
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Sequence `f(0), ..., f(n)`.
    pub fn tabulate(n: usize, f: impl FnMut(usize) -> BigInt) -> Self {
        Self::new((0..=n).map(f).collect())
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<BigInt> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the last term (`N` for a prefix of length `N + 1`).
    pub fn last_index(&self) -> Option<usize> {
        self.terms.len().checked_sub(1)
    }

    /// Treat the first term as index 0.
    pub fn reindexed(&self) -> Self {
        Self::new(self.terms.clone())
    }

    /// The first `len` terms.
    pub fn truncated(&self, len: usize) -> Self {
        IntSequence {
            offset: self.offset,
            terms: self.terms[..len.min(self.terms.len())].to_vec(),
        }
    }

    pub(crate) fn require_origin(&self) -> Result<&[BigInt]> {
        if self.offset != 0 {
            return Err(Error::NonZeroOffset(self.offset));
        }
        if self.terms.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(&self.terms)
    }
}

impl std::ops::Index<usize> for IntSequence {
    type Output = BigInt;

    fn index(&self, i: usize) -> &BigInt {
        &self.terms[i]
    }
}

impl FromIterator<BigInt> for IntSequence {
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// `b_n = sum_k (-1)^(n-k) C(n,k) a_k`, computed as the leading edge of the
/// forward-difference triangle.
pub fn binomial_transform(a: &IntSequence) -> Result<IntSequence> {
    let mut v = a.require_origin()?.to_vec();
    let n = v.len();
    for i in 0..n {
        for j in (i + 1..n).rev() {
            let prev = v[j - 1].clone();
            v[j] -= prev;
        }
    }
    Ok(IntSequence::new(v))
}

/// `a_n = sum_k C(n,k) b_k`; exactly undoes [`binomial_transform`].
pub fn inverse_binomial_transform(b: &IntSequence) -> Result<IntSequence> {
    let mut v = b.require_origin()?.to_vec();
    let n = v.len();
    for i in (0..n).rev() {
        for j in i + 1..n {
            let prev = v[j - 1].clone();
            v[j] += prev;
        }
    }
    Ok(IntSequence::new(v))
}

/// Truncated power series `c_0 + c_1 x + ... + c_N x^N` over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl RationalSeries {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        RationalSeries { coeffs }
    }

    pub fn from_integers(values: &[BigInt]) -> Self {
        Self::new(
            values
                .iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect(),
        )
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![BigRational::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// `1/(1 - sign*x)` truncated, i.e. `sum (sign x)^n`.
    pub fn geometric(order: usize, sign: i32) -> Self {
        let mut c = BigRational::one();
        let step = BigRational::from_integer(BigInt::from(sign));
        let mut coeffs = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            coeffs.push(c.clone());
            c *= &step;
        }
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Truncated Cauchy product; the result has the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::new((0..=order).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self(g(x))` truncated, for `g` with zero constant term.
    pub fn compose(&self, g: &Self) -> Self {
        assert!(g.coeffs[0].is_zero(), "inner series must vanish at 0");
        let order = self.order().min(g.order());
        let mut acc = Self::zero(order);
        let mut power = Self::one(order);
        for (k, c) in self.coeffs.iter().enumerate().take(order + 1) {
            if k > 0 {
                power = power.mul(g);
            }
            if !c.is_zero() {
                acc = acc.add(&power.scale(c));
            }
        }
        acc
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            match (n, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                _ => write!(f, "{mag}*")?,
            }
            match n {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{n}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

/// The ordinary generating series of a prefix, truncated at its last index.
pub fn ogf_of(s: &IntSequence) -> Result<RationalSeries> {
    if s.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(RationalSeries::from_integers(s.terms()))
}

// x/(1 + sign*x) truncated at the given order
fn mobius_inner(order: usize, sign: i32) -> RationalSeries {
    let mut x = RationalSeries::zero(order);
    if order >= 1 {
        x.coeffs[1] = BigRational::one();
    }
    x.mul(&RationalSeries::geometric(order, -sign))
}

/// `(1/(1 + sign*x)) * f(x/(1 + sign*x))` truncated at `order`.
fn mobius_substitute(f: &RationalSeries, order: usize, sign: i32) -> RationalSeries {
    let f = RationalSeries::new(f.coeffs[..=order].to_vec());
    let inner = mobius_inner(order, sign);
    RationalSeries::geometric(order, -sign).mul(&f.compose(&inner))
}

/// Checks `f_b(x) = f_a(x/(1+x))/(1+x)` and `f_a(x) = f_b(x/(1-x))/(1-x)`
/// modulo `x^(N+1)`.
pub fn substitute_check(a: &IntSequence, b: &IntSequence, order: usize) -> Result<bool> {
    let needed = order + 1;
    for s in [a, b] {
        if s.len() < needed {
            return Err(Error::PrefixTooShort { needed, got: s.len() });
        }
    }
    let fa = ogf_of(&a.truncated(needed))?;
    let fb = ogf_of(&b.truncated(needed))?;
    let forward = mobius_substitute(&fa, order, 1) == fb;
    let backward = mobius_substitute(&fb, order, -1) == fa;
    Ok(forward && backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::binomial;

    fn seq(v: &[i64]) -> IntSequence {
        IntSequence::from_i64s(v)
    }

    // direct summation oracle
    fn transform_direct(a: &[BigInt]) -> Vec<BigInt> {
        (0..a.len())
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        let t = binomial(n as u64, k as u64) * &a[k];
                        if (n - k) % 2 == 0 {
                            t
                        } else {
                            -t
                        }
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn transform_examples() {
        assert_eq!(
            binomial_transform(&seq(&[1, 1, 1, 1])).unwrap(),
            seq(&[1, 0, 0, 0])
        );
        assert_eq!(
            binomial_transform(&seq(&[0, 1, 3, 6, 10])).unwrap(),
            seq(&[0, 1, 1, 0, 0])
        );
        assert_eq!(
            binomial_transform(&seq(&[1, 2, 5, 16, 65])).unwrap(),
            seq(&[1, 1, 2, 6, 24])
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            inverse_binomial_transform(&seq(&[1, 0, 0, 0])).unwrap(),
            seq(&[1, 1, 1, 1])
        );
        assert_eq!(
            inverse_binomial_transform(&seq(&[1, 1, 2, 6, 6, 30])).unwrap(),
            seq(&[1, 2, 5, 16, 47, 146])
        );
    }

    #[test]
    fn triangle_matches_direct_formula() {
        let a: Vec<BigInt> = (0..30i64).map(|n| BigInt::from(n * n * n - 7 * n + 3)).collect();
        let b = binomial_transform(&IntSequence::new(a.clone())).unwrap();
        assert_eq!(b.terms(), transform_direct(&a).as_slice());
    }

    #[test]
    fn offset_rejected() {
        let s = IntSequence::with_offset(1, vec![BigInt::from(1)]);
        assert_eq!(binomial_transform(&s), Err(Error::NonZeroOffset(1)));
        assert_eq!(inverse_binomial_transform(&s), Err(Error::NonZeroOffset(1)));
        assert_eq!(binomial_transform(&s.reindexed()).unwrap(), seq(&[1]));
    }

    #[test]
    fn ogf_examples() {
        assert_eq!(
            ogf_of(&seq(&[1, 1, 1])).unwrap().to_string(),
            "1 + x + x^2 + O(x^3)"
        );
        assert_eq!(
            ogf_of(&seq(&[0, 1, 3])).unwrap().to_string(),
            "x + 3*x^2 + O(x^3)"
        );
        assert_eq!(
            ogf_of(&seq(&[2, 5, 16])).unwrap().to_string(),
            "2 + 5*x + 16*x^2 + O(x^3)"
        );
    }

    #[test]
    fn substitute_examples() {
        let ones = seq(&[1; 9]);
        let delta = seq(&[1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert!(substitute_check(&ones, &delta, 8).unwrap());
        assert!(substitute_check(&seq(&[0, 1, 3, 6, 10]), &seq(&[0, 1, 1, 0, 0]), 4).unwrap());
        assert!(!substitute_check(&seq(&[0, 1, 3, 6, 10]), &seq(&[0, 1, 1, 1, 0]), 4).unwrap());
        assert!(matches!(
            substitute_check(&ones, &seq(&[1, 0]), 3),
            Err(Error::PrefixTooShort { .. })
        ));
    }

    #[test]
    fn composition_oracle_for_triangular() {
        // f_a = x/(1-x)^3 so f_a(x/(1+x))/(1+x) = x(1+x) exactly.
        let a = seq(&[0, 1, 3, 6, 10, 15, 21]);
        let fa = ogf_of(&a).unwrap();
        let got = mobius_substitute(&fa, 6, 1);
        assert_eq!(got, ogf_of(&seq(&[0, 1, 1, 0, 0, 0, 0])).unwrap());
    }
}
