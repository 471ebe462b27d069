//! Construction of genuine primary pseudo-polynomials with prescribed growth.
//!
//! Given `phi` with `phi(0) = 1`, the constructor picks nonzero multiples
//! `B_n = w_n P_n` one at a time so that `A_n = sum_k C(n,k) B_k` stays in
//! `[phi(n), phi(n) + 2 P_n]`. Every `B_n` is a nonzero multiple of `P_n`,
//! so `A` is primary and not a polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{binomial_row, ArithTables};
use crate::error::{Error, Result};
use crate::transforms::IntSequence;

/// Target growth `phi(n)` with exact rational values.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthFn {
    /// `phi(n) = P_n`.
    Primorial,
    /// `phi(n) = base^n`.
    Geometric(BigRational),
    /// User-supplied values `phi(0), phi(1), ...`.
    Table(Vec<BigRational>),
}

impl GrowthFn {
    pub fn value(&self, n: usize, tables: &ArithTables) -> Result<BigRational> {
        match self {
            GrowthFn::Primorial => Ok(BigRational::from_integer(tables.primorial(n).clone())),
            GrowthFn::Geometric(base) => Ok(num_traits::pow(base.clone(), n)),
            GrowthFn::Table(values) => values.get(n).cloned().ok_or(Error::GrowthTableExhausted(n)),
        }
    }
}

/// One step of the construction: `C_n = u_n P_n + v_n`, `B_n = w_n P_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub n: usize,
    pub c: BigInt,
    pub u: BigInt,
    pub v: BigInt,
    pub w: BigInt,
    pub b: BigInt,
    pub a: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstructTrace {
    pub steps: Vec<TraceStep>,
}

impl ConstructTrace {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.steps
                .iter()
                .map(|s| {
                    json!({
                        "A": s.a.to_string(),
                        "B": s.b.to_string(),
                        "C": s.c.to_string(),
                        "n": s.n,
                        "u": s.u.to_string(),
                        "v": s.v.to_string(),
                        "w": s.w.to_string(),
                    })
                })
                .collect(),
        )
    }

    /// Whitespace-separated table, one step per line.
    pub fn to_table(&self) -> String {
        let mut out = String::from("n\tC\tu\tv\tw\tB\tA\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                s.n, s.c, s.u, s.v, s.w, s.b, s.a
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub a: IntSequence,
    pub b: IntSequence,
    pub trace: ConstructTrace,
}

/// Exact `ceil(q / m)` for `m > 0`.
pub fn ceil_div_rational(q: &BigRational, m: &BigInt) -> Result<BigInt> {
    if !m.is_positive() {
        return Err(Error::NonPositiveDivisor);
    }
    let num = q.numer();
    let den = q.denom() * m;
    Ok(num.div_ceil(&den))
}

/// Builds `A_0..=A_N` and `B_0..=B_N`.
pub fn construct_genuine(phi: &GrowthFn, n_max: usize) -> Result<Construction> {
    let tables = ArithTables::new(n_max as u64)?;
    let phi0 = phi.value(0, &tables)?;
    if !phi0.is_one() {
        return Err(Error::GrowthNotNormalized(phi0.to_string()));
    }
    let mut a = Vec::with_capacity(n_max + 1);
    let mut b: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    let mut steps = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let pn = tables.primorial(n);
        let row = binomial_row(n);
        let c: BigInt = row.iter().zip(&b).map(|(binom, bk)| binom * bk).sum();
        let (u, v) = c.div_mod_floor(pn);
        let target = phi.value(n, &tables)? - BigRational::from_integer(v.clone());
        let ceil = ceil_div_rational(&target, pn)?;
        let w = if ceil == u { BigInt::one() } else { ceil - &u };
        debug_assert!(!w.is_zero());
        let bn = &w * pn;
        let an = &bn + &c;
        steps.push(TraceStep {
            n,
            c,
            u,
            v,
            w,
            b: bn.clone(),
            a: an.clone(),
        });
        a.push(an);
        b.push(bn);
    }
    Ok(Construction {
        a: IntSequence::new(a),
        b: IntSequence::new(b),
        trace: ConstructTrace { steps },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify_primary_direct, certify_primary_hall};
    use crate::transforms::inverse_binomial_transform;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ceil_div_examples() {
        assert_eq!(
            ceil_div_rational(&q(7, 1), &BigInt::from(2)).unwrap(),
            BigInt::from(4)
        );
        assert_eq!(
            ceil_div_rational(&q(-1, 1), &BigInt::from(2)).unwrap(),
            BigInt::from(0)
        );
        assert_eq!(
            ceil_div_rational(&q(3, 2), &BigInt::from(1)).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            ceil_div_rational(&q(-7, 3), &BigInt::from(2)).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            ceil_div_rational(&q(1, 1), &BigInt::from(0)),
            Err(Error::NonPositiveDivisor)
        );
    }

    #[test]
    fn constant_one_by_hand() {
        let c = construct_genuine(&GrowthFn::Table(vec![q(1, 1); 3]), 2).unwrap();
        assert_eq!(c.a, IntSequence::from_i64s(&[1, 2, 1]));
        assert_eq!(c.b, IntSequence::from_i64s(&[1, 1, -2]));
        let s = &c.trace.steps;
        assert_eq!(
            (s[1].c.clone(), s[1].u.clone(), s[1].v.clone(), s[1].w.clone()),
            (1.into(), 1.into(), 0.into(), 1.into())
        );
        assert_eq!(
            (s[2].c.clone(), s[2].u.clone(), s[2].v.clone(), s[2].w.clone()),
            (3.into(), 1.into(), 1.into(), (-1).into())
        );
    }

    #[test]
    fn sandwich_and_certificates() {
        for phi in [
            GrowthFn::Primorial,
            GrowthFn::Geometric(q(5, 2)),
            GrowthFn::Geometric(q(1, 3)),
        ] {
            let n = 60;
            let c = construct_genuine(&phi, n).unwrap();
            let tables = ArithTables::new(n as u64).unwrap();
            assert_eq!(c.a.terms()[0], BigInt::from(1));
            for k in 0..=n {
                let f = phi.value(k, &tables).unwrap();
                let ak = BigRational::from_integer(c.a[k].clone());
                let pk = BigRational::from_integer(tables.primorial(k).clone());
                assert!(f <= ak && ak <= &f + &pk + &pk, "{phi:?} at {k}");
                assert!(!c.b[k].is_zero());
                assert!(c.b[k].is_multiple_of(tables.primorial(k)));
            }
            assert_eq!(inverse_binomial_transform(&c.b).unwrap(), c.a);
            assert!(certify_primary_hall(&c.a).unwrap().is_certified());
            assert!(certify_primary_direct(&c.a).unwrap().is_certified());
        }
    }

    #[test]
    fn rejects_unnormalized_phi() {
        let phi = GrowthFn::Table(vec![q(2, 1), q(3, 1)]);
        assert!(matches!(
            construct_genuine(&phi, 1),
            Err(Error::GrowthNotNormalized(_))
        ));
        let short = GrowthFn::Table(vec![q(1, 1)]);
        assert_eq!(construct_genuine(&short, 3), Err(Error::GrowthTableExhausted(1)));
    }

    #[test]
    fn deterministic() {
        let x = construct_genuine(&GrowthFn::Primorial, 40).unwrap();
        let y = construct_genuine(&GrowthFn::Primorial, 40).unwrap();
        assert_eq!(x, y);
    }
}
