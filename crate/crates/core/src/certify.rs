//! Prefix certifiers for (primary) pseudo-polynomials.
//!
//! A prefix `a_0..=a_N` is checked either directly against the congruences
//! `a_{n+p} = a_n (mod p)`, or through its binomial transform: `P_n | b_n`
//! for primary pseudo-polynomials and `d_n | b_n` (Hall's criterion) for
//! pseudo-polynomials. On a finite prefix the direct and transform checks
//! consume exactly the same indices, so their verdicts coincide.
//!
//! A verdict is only ever "certified up to N": no finite prefix proves the
//! property for all n.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{mod_floor_u64, primes_up_to, ArithTables};
use crate::error::{Error, Result};
use crate::real::{ln_bigint, Interval, Round};
use crate::transforms::{binomial_transform, IntSequence};

/// Maximum number of counterexamples kept in a report.
pub const MAX_COUNTEREXAMPLES: usize = 100;

/// Which property a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    PrimaryDirect,
    PrimaryHall,
    PseudoHall,
    /// Exact check of a polynomial-coefficient recurrence.
    Recurrence,
}

impl CertKind {
    pub fn name(self) -> &'static str {
        match self {
            CertKind::PrimaryDirect => "primary-direct",
            CertKind::PrimaryHall => "primary-hall",
            CertKind::PseudoHall => "pseudo-hall",
            CertKind::Recurrence => "recurrence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Consistent with the property for every index the prefix reaches.
    CertifiedUpTo(usize),
    Refuted,
}

/// A failed congruence (`modulus = p`, `witness = a_{n+p} - a_n`) or a failed
/// divisibility (`modulus = P_n` or `d_n`, `witness = b_n`). Recurrence
/// failures use `modulus = 0` and the nonzero residual as witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub n: usize,
    pub modulus: BigInt,
    pub witness: BigInt,
}

impl Counterexample {
    /// Independent re-check: the modulus must not divide the witness.
    pub fn recheck(&self) -> bool {
        if self.modulus.is_zero() {
            return !self.witness.is_zero();
        }
        !self.witness.is_multiple_of(&self.modulus)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertReport {
    pub kind: CertKind,
    pub verdict: Verdict,
    /// Last index of the prefix.
    pub n_max: usize,
    /// Sorted by `(n, modulus)`, at most [`MAX_COUNTEREXAMPLES`] entries.
    pub counterexamples: Vec<Counterexample>,
    pub truncated: bool,
}

impl CertReport {
    pub(crate) fn from_failures(kind: CertKind, n_max: usize, mut failures: Vec<Counterexample>) -> Self {
        failures.sort_by(|x, y| (x.n, &x.modulus).cmp(&(y.n, &y.modulus)));
        let truncated = failures.len() > MAX_COUNTEREXAMPLES;
        failures.truncate(MAX_COUNTEREXAMPLES);
        let verdict = if failures.is_empty() {
            Verdict::CertifiedUpTo(n_max)
        } else {
            Verdict::Refuted
        };
        CertReport {
            kind,
            verdict,
            n_max,
            counterexamples: failures,
            truncated,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, Verdict::CertifiedUpTo(_))
    }

    pub fn verdict_label(&self) -> String {
        match self.verdict {
            Verdict::CertifiedUpTo(n) => format!("certified-up-to-{n}"),
            Verdict::Refuted => "refuted".to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        let cex: Vec<Value> = self
            .counterexamples
            .iter()
            .map(|c| {
                json!({
                    "modulus": c.modulus.to_string(),
                    "n": c.n,
                    "witness": c.witness.to_string(),
                })
            })
            .collect();
        json!({
            "counterexamples": cex,
            "mode": self.kind.name(),
            "n_max": self.n_max,
            "note": format!("finite-prefix check over indices 0..={}; not a proof for all n", self.n_max),
            "truncated": self.truncated,
            "verdict": self.verdict_label(),
        })
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::CertifiedUpTo(n) => write!(
                f,
                "{}: certified up to n = {n} (finite prefix only)",
                self.kind.name()
            )?,
            Verdict::Refuted => {
                write!(f, "{}: refuted", self.kind.name())?;
                for c in &self.counterexamples {
                    write!(f, "\n  n = {}, modulus {}, witness {}", c.n, c.modulus, c.witness)?;
                }
                if self.truncated {
                    write!(f, "\n  (truncated at {MAX_COUNTEREXAMPLES} counterexamples)")?;
                }
            }
        }
        Ok(())
    }
}

/// Checks `a_{n+p} = a_n (mod p)` for every prime `p` and every `n + p <= N`,
/// one residue table per prime.
pub fn certify_primary_direct(a: &IntSequence) -> Result<CertReport> {
    let terms = a.require_origin()?;
    let n_max = terms.len() - 1;
    let primes = primes_up_to(n_max as u64)?;
    let mut failing: Vec<(usize, u64)> = Vec::new();
    for &p in primes.primes() {
        let residues: Vec<u64> = terms.iter().map(|t| mod_floor_u64(t, p)).collect();
        let step = p as usize;
        for n in 0..=n_max - step {
            if residues[n] != residues[n + step] {
                failing.push((n, p));
            }
        }
    }
    let total = failing.len();
    failing.sort_unstable();
    failing.truncate(MAX_COUNTEREXAMPLES);
    let failures: Vec<Counterexample> = failing
        .into_iter()
        .map(|(n, p)| Counterexample {
            n,
            modulus: BigInt::from(p),
            witness: &terms[n + p as usize] - &terms[n],
        })
        .collect();
    let mut report = CertReport::from_failures(CertKind::PrimaryDirect, n_max, failures);
    report.truncated = total > MAX_COUNTEREXAMPLES;
    Ok(report)
}

fn divisibility_report(kind: CertKind, b: &IntSequence, moduli: &[BigInt]) -> CertReport {
    let n_max = b.len() - 1;
    let failures = b
        .terms()
        .iter()
        .zip(moduli)
        .enumerate()
        .filter(|(_, (bn, m))| !bn.is_multiple_of(m))
        .map(|(n, (bn, m))| Counterexample {
            n,
            modulus: m.clone(),
            witness: bn.clone(),
        })
        .collect();
    CertReport::from_failures(kind, n_max, failures)
}

/// Checks `P_n | b_n` for the binomial transform `b` of the prefix.
pub fn certify_primary_hall(a: &IntSequence) -> Result<CertReport> {
    let b = binomial_transform(a)?;
    let tables = ArithTables::new((b.len() - 1) as u64)?;
    Ok(divisibility_report(
        CertKind::PrimaryHall,
        &b,
        tables.primorials(),
    ))
}

/// Hall's criterion: checks `d_n | b_n`.
pub fn certify_pseudo_hall(a: &IntSequence) -> Result<CertReport> {
    let b = binomial_transform(a)?;
    let tables = ArithTables::new((b.len() - 1) as u64)?;
    Ok(divisibility_report(CertKind::PseudoHall, &b, tables.lcms()))
}

/// Eventual-polynomial structure read off the binomial transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDetect {
    pub is_eventually_polynomial: bool,
    /// Last index with `b_M != 0` (0 when the transform vanishes entirely).
    pub m: usize,
    /// Nonzero `(k, b_k)`: the polynomial is `Q(X) = sum b_k C(X, k)`.
    pub poly: Vec<(usize, BigInt)>,
}

impl PolyDetect {
    /// `Q(n)` for the detected polynomial.
    pub fn eval(&self, n: u64) -> BigInt {
        self.poly
            .iter()
            .map(|(k, bk)| crate::arith::binomial(n, *k as u64) * bk)
            .sum()
    }
}

/// Reports a polynomial when the last `tail` transform terms all vanish.
pub fn detect_polynomial(a: &IntSequence, tail: usize) -> Result<PolyDetect> {
    let b = binomial_transform(a)?;
    if tail >= b.len() {
        return Err(Error::PrefixTooShort {
            needed: tail + 1,
            got: b.len(),
        });
    }
    let terms = b.terms();
    let detected = terms[terms.len() - tail..].iter().all(Zero::is_zero);
    if !detected {
        return Ok(PolyDetect {
            is_eventually_polynomial: false,
            m: 0,
            poly: Vec::new(),
        });
    }
    let m = terms.iter().rposition(|t| !t.is_zero()).unwrap_or(0);
    let poly = terms[..=m]
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_zero())
        .map(|(k, t)| (k, t.clone()))
        .collect();
    Ok(PolyDetect {
        is_eventually_polynomial: true,
        m,
        poly,
    })
}

/// Empirical growth exponents `log|a_n| / n`.
#[derive(Debug, Clone)]
pub struct GrowthEstimate {
    /// `log|a_N| / N`, absent when `a_N = 0`.
    pub at_last: Option<Interval>,
    /// Maximum of `log|a_n| / n` over the nonzero terms in the last quarter.
    pub last_quarter_max: Option<Interval>,
}

impl GrowthEstimate {
    pub fn at_last_f64(&self) -> Option<f64> {
        self.at_last.as_ref().map(Interval::mid_f64)
    }

    pub fn decimal(iv: &Interval, digits: u32) -> String {
        iv.mid().to_decimal(digits, Round::Down)
    }
}

const GROWTH_PREC: u32 = 128;

fn log_ratio(t: &BigInt, n: usize) -> Interval {
    ln_bigint(&t.abs(), GROWTH_PREC).div(&Interval::from_int(n as i64), GROWTH_PREC)
}

/// `log|a_N|/N` and the maximum of `log|a_n|/n` over the last quarter.
pub fn growth_exponent(a: &IntSequence) -> Result<GrowthEstimate> {
    let terms = a.require_origin()?;
    if terms.len() < 8 {
        return Err(Error::PrefixTooShort {
            needed: 8,
            got: terms.len(),
        });
    }
    if terms.iter().all(Zero::is_zero) {
        return Err(Error::AllZero);
    }
    let n_max = terms.len() - 1;
    let at_last = (!terms[n_max].is_zero()).then(|| log_ratio(&terms[n_max], n_max));
    let start = (n_max - n_max / 4).max(1);
    let last_quarter_max = (start..=n_max)
        .filter(|&n| !terms[n].is_zero())
        .map(|n| log_ratio(&terms[n], n))
        .reduce(|x, y| x.max(&y));
    Ok(GrowthEstimate {
        at_last,
        last_quarter_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[i64]) -> IntSequence {
        IntSequence::from_i64s(v)
    }

    fn triangular(n: i64) -> IntSequence {
        IntSequence::from_i64s(&(0..=n).map(|k| k * (k + 1) / 2).collect::<Vec<_>>())
    }

    fn cex(n: usize, m: i64, w: i64) -> Counterexample {
        Counterexample {
            n,
            modulus: m.into(),
            witness: w.into(),
        }
    }

    #[test]
    fn direct_examples() {
        let r = certify_primary_direct(&triangular(5)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.counterexamples[0], cex(0, 2, 3));
        assert!(r.counterexamples.iter().all(Counterexample::recheck));

        let r = certify_primary_direct(&seq(&[1, 2, 5, 16, 47, 146])).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedUpTo(5));
        assert!(certify_primary_direct(&seq(&[4; 12])).unwrap().is_certified());
    }

    #[test]
    fn hall_examples() {
        let r = certify_primary_hall(&triangular(4)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.counterexamples, vec![cex(2, 2, 1)]);
        assert!(certify_primary_hall(&seq(&[1, 2, 5, 16, 47, 146]))
            .unwrap()
            .is_certified());
        assert!(certify_primary_hall(&seq(&[1; 10])).unwrap().is_certified());
    }

    #[test]
    fn pseudo_hall_examples() {
        let r = certify_pseudo_hall(&seq(&[1, 2, 5, 16, 47, 146])).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.counterexamples[0], cex(4, 12, 6));
        // a_n = floor(n! e) with a_0 = 1 has b_n = n!
        let floor_e = seq(&[1, 2, 5, 16, 65, 326, 1957, 13700, 109601]);
        let b = binomial_transform(&floor_e).unwrap();
        assert_eq!(b, seq(&[1, 1, 2, 6, 24, 120, 720, 5040, 40320]));
        assert!(certify_pseudo_hall(&floor_e).unwrap().is_certified());
        assert!(!certify_pseudo_hall(&triangular(6)).unwrap().is_certified());
    }

    #[test]
    fn counterexamples_are_capped_and_sorted() {
        let noisy: Vec<i64> = (0..80).map(|n| (n * n * 7 + n * 3 + 1) % 11 + n % 3).collect();
        let r = certify_primary_direct(&seq(&noisy)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert!(r.truncated);
        assert_eq!(r.counterexamples.len(), MAX_COUNTEREXAMPLES);
        assert!(r
            .counterexamples
            .windows(2)
            .all(|w| (w[0].n, &w[0].modulus) <= (w[1].n, &w[1].modulus)));
    }

    #[test]
    fn json_shape() {
        let r = certify_primary_hall(&triangular(4)).unwrap();
        let s = serde_json::to_string(&r.to_json()).unwrap();
        assert!(s.starts_with("{\"counterexamples\":[{\"modulus\":\"2\",\"n\":2,\"witness\":\"1\"}]"));
        assert!(s.contains("\"verdict\":\"refuted\""));
    }

    #[test]
    fn detect_examples() {
        let d = detect_polynomial(&triangular(9), 5).unwrap();
        assert!(d.is_eventually_polynomial);
        assert_eq!(d.m, 2);
        assert_eq!(d.poly, vec![(1, BigInt::from(1)), (2, BigInt::from(1))]);
        for n in 0..=9u64 {
            assert_eq!(d.eval(n), BigInt::from(n * (n + 1) / 2));
        }
        let d = detect_polynomial(&seq(&[1, 2, 5, 16, 47, 146]), 3).unwrap();
        assert!(!d.is_eventually_polynomial);
        let d = detect_polynomial(&seq(&[3, 3, 3, 3, 3]), 3).unwrap();
        assert!(d.is_eventually_polynomial);
        assert_eq!((d.m, d.poly.clone()), (0, vec![(0, BigInt::from(3))]));
        assert!(detect_polynomial(&seq(&[1, 2]), 2).is_err());
    }

    #[test]
    fn growth_examples() {
        let pow2 = IntSequence::tabulate(64, |n| BigInt::from(1) << n);
        let g = growth_exponent(&pow2).unwrap();
        assert!((g.at_last_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
        assert!(growth_exponent(&seq(&[0; 10])).is_err());
        assert!(growth_exponent(&seq(&[1; 5])).is_err());
    }
}
