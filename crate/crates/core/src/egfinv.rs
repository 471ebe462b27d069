//! EGF-reciprocal construction.
//!
//! From a primary pseudo-polynomial `a` with `a_0 = 1`, take its binomial
//! transform `b`, the coefficients `c` of `1 / sum b_n x^n / n!` (as an
//! exponential generating series) and `u`, the inverse binomial transform of
//! `c`. Each `c_n` is an integer divisible by every prime `p <= n`, so `u` is
//! again a primary pseudo-polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::arith::pascal_rows;
use crate::error::{Error, Result};
use crate::transforms::{binomial_transform, inverse_binomial_transform, IntSequence};

/// The sequences `b`, `c`, `u` of the construction, all of the same length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfTriple {
    pub b: IntSequence,
    pub c: IntSequence,
    pub u: IntSequence,
}

fn seq_json(s: &IntSequence) -> Value {
    Value::Array(s.terms().iter().map(|t| Value::String(t.to_string())).collect())
}

impl EgfTriple {
    pub fn to_json(&self) -> Value {
        json!({
            "b": seq_json(&self.b),
            "c": seq_json(&self.c),
            "u": seq_json(&self.u),
        })
    }
}

/// `c_0 = 1`, `c_n = -sum_{k=1}^n C(n,k) b_k c_{n-k}`.
pub fn egf_reciprocal(b: &IntSequence) -> Result<IntSequence> {
    let terms = b.require_origin()?;
    if !terms[0].is_one() {
        return Err(Error::LeadingTermNotOne(terms[0].to_string()));
    }
    let rows = pascal_rows(terms.len() - 1);
    let mut c: Vec<BigInt> = Vec::with_capacity(terms.len());
    c.push(BigInt::one());
    for n in 1..terms.len() {
        let mut acc = BigInt::zero();
        for k in 1..=n {
            if terms[k].is_zero() || c[n - k].is_zero() {
                continue;
            }
            acc += &rows[n][k] * &terms[k] * &c[n - k];
        }
        c.push(-acc);
    }
    Ok(IntSequence::new(c))
}

/// Runs the full construction from `a`.
pub fn egf_triple(a: &IntSequence) -> Result<EgfTriple> {
    let terms = a.require_origin()?;
    if !terms[0].is_one() {
        return Err(Error::LeadingTermNotOne(terms[0].to_string()));
    }
    let b = binomial_transform(a)?;
    let c = egf_reciprocal(&b)?;
    let u = inverse_binomial_transform(&c)?;
    Ok(EgfTriple { b, c, u })
}

/// `u_n / n!` for each term, rounded to `digits` decimals (half away from zero).
pub fn u_over_factorial(u: &IntSequence, digits: usize) -> Vec<String> {
    let mut fact = BigInt::one();
    let scale = num_traits::pow(BigInt::from(10), digits);
    u.terms()
        .iter()
        .enumerate()
        .map(|(n, un)| {
            if n > 0 {
                fact *= n;
            }
            let ratio = BigRational::new(un * &scale, fact.clone());
            format_fixed(&ratio.round().to_integer(), digits)
        })
        .collect()
}

// Renders `v / 10^digits` in fixed-point notation.
fn format_fixed(v: &BigInt, digits: usize) -> String {
    let sign = if v.is_negative() { "-" } else { "" };
    let s = v.abs().to_string();
    if digits == 0 {
        return format!("{sign}{s}");
    }
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{sign}{int}.{frac}")
}

/// Integer quotient check used in tests and diagnostics: every prime `p <= n`
/// divides `c_n`.
pub fn primes_divide_c(c: &IntSequence, primes: &[u64]) -> Option<(usize, u64)> {
    for (n, cn) in c.terms().iter().enumerate() {
        for &p in primes.iter().take_while(|&&p| p as usize <= n) {
            if !cn.is_multiple_of(&BigInt::from(p)) {
                return Some((n, p));
            }
        }
    }
    None
}
