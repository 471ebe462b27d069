//! Linear recurrences with polynomial coefficients,
//! `sum_{j=0}^S p_j(n) a_{n+j} = 0`.
//!
//! Guessing solves an exact homogeneous system over a prefix and keeps a tail
//! of equations back for verification. Anything returned holds on the given
//! prefix only.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::certify::{CertKind, CertReport, Counterexample};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank_mod_p, PREFILTER_PRIME};
use crate::transforms::IntSequence;

/// Coefficient polynomials `p_0..=p_S`, each stored low degree first with
/// trailing zeros trimmed (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRecurrence {
    polys: Vec<Vec<BigInt>>,
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn eval_poly(p: &[BigInt], n: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + c)
}

impl PolyRecurrence {
    /// Normalizes: content 1 and a positive leading coefficient on the
    /// highest-index nonzero polynomial.
    pub fn new(mut polys: Vec<Vec<BigInt>>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidRecurrence("no coefficient polynomials".into()));
        }
        polys.iter_mut().for_each(trim);
        let g = polys.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::InvalidRecurrence("all polynomials are zero".into()));
        }
        let top = polys.iter().rev().find(|p| !p.is_empty()).unwrap();
        let g = if top.last().unwrap().is_negative() { -g } else { g };
        for x in polys.iter_mut().flatten() {
            *x /= &g;
        }
        Ok(PolyRecurrence { polys })
    }

    /// Same as [`PolyRecurrence::new`] with `i64` coefficients.
    pub fn from_i64s(polys: &[&[i64]]) -> Result<Self> {
        Self::new(
            polys
                .iter()
                .map(|p| p.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn polys(&self) -> &[Vec<BigInt>] {
        &self.polys
    }

    /// Degree of each `p_j`, with `-1` for the zero polynomial.
    pub fn degree_vector(&self) -> Vec<isize> {
        self.polys.iter().map(|p| p.len() as isize - 1).collect()
    }

    pub fn normalized(&self) -> Self {
        Self::new(self.polys.clone()).expect("a valid recurrence stays valid")
    }

    /// `sum_j p_j(n) a_{n+j}`; `terms` must reach index `n + S`.
    pub fn residual(&self, terms: &[BigInt], n: usize) -> BigInt {
        let nb = BigInt::from(n);
        self.polys
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(j, p)| eval_poly(p, &nb) * &terms[n + j])
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let polys: Vec<Value> = self
            .polys
            .iter()
            .map(|p| {
                if p.is_empty() {
                    json!(["0"])
                } else {
                    Value::Array(p.iter().map(|c| Value::String(c.to_string())).collect())
                }
            })
            .collect();
        json!({ "order": self.order(), "polys": polys })
    }

    /// Accepts coefficients as decimal strings or JSON integers.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("recurrence: {m}"));
        let polys = v
            .get("polys")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"polys\" array"))?;
        let mut out = Vec::with_capacity(polys.len());
        for p in polys {
            let coeffs = p.as_array().ok_or_else(|| bad("polynomial is not an array"))?;
            let mut q = Vec::with_capacity(coeffs.len());
            for c in coeffs {
                let parsed = match c {
                    Value::String(s) => s.trim().parse::<BigInt>().ok(),
                    Value::Number(n) => n.to_string().parse::<BigInt>().ok(),
                    _ => None,
                };
                q.push(parsed.ok_or_else(|| bad(&format!("bad coefficient {c}")))?);
            }
            out.push(q);
        }
        let r = Self::new(out)?;
        if let Some(order) = v.get("order") {
            if order.as_u64() != Some(r.order() as u64) {
                return Err(bad("\"order\" disagrees with the number of polynomials"));
            }
        }
        Ok(r)
    }
}

fn fmt_poly(p: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match i {
            0 => c.to_string(),
            _ => {
                let var = if i == 1 { "n".to_string() } else { format!("n^{i}") };
                match c {
                    c if c.is_one() => var,
                    c if *c == -BigInt::one() => format!("-{var}"),
                    c => format!("{c}*{var}"),
                }
            }
        };
        parts.push(mono);
    }
    parts.join(" + ").replace("+ -", "- ")
}

impl fmt::Display for PolyRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, p) in self.polys.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let shift = if j == 0 {
                "a(n)".to_string()
            } else {
                format!("a(n+{j})")
            };
            if p.len() == 1 && p[0].is_one() {
                write!(f, "{shift}")?;
            } else {
                write!(f, "({})*{shift}", fmt_poly(p))?;
            }
        }
        write!(f, " = 0")
    }
}

/// Search limits for [`guess_recurrence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessBudget {
    pub s_max: usize,
    pub d_max: usize,
    /// Equations held back from the solve and used only for verification.
    pub verify_margin: usize,
}

impl GuessBudget {
    pub const DEFAULT_MARGIN: usize = 10;

    pub fn new(s_max: usize, d_max: usize) -> Self {
        GuessBudget {
            s_max,
            d_max,
            verify_margin: Self::DEFAULT_MARGIN,
        }
    }

    /// Shortest prefix that over-determines every cell of the search.
    pub fn required_len(&self) -> usize {
        (self.s_max + 1) * (self.d_max + 1) + self.s_max + self.verify_margin
    }
}

/// Searches `(S, D)` by increasing `S + D`, then increasing `S`.
pub fn guess_recurrence(a: &IntSequence, budget: &GuessBudget) -> Result<Option<PolyRecurrence>> {
    let terms = a.require_origin()?;
    if budget.required_len() > terms.len() {
        return Err(Error::BudgetInfeasible(format!(
            "S_max={}, D_max={}, margin={} needs {} terms, got {}",
            budget.s_max,
            budget.d_max,
            budget.verify_margin,
            budget.required_len(),
            terms.len()
        )));
    }
    for total in 0..=budget.s_max + budget.d_max {
        for s in 0..=total.min(budget.s_max) {
            let d = total - s;
            if d > budget.d_max {
                continue;
            }
            if let Some(r) = guess_cell(terms, s, d, budget.verify_margin) {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

fn guess_cell(terms: &[BigInt], s: usize, d: usize, margin: usize) -> Option<PolyRecurrence> {
    let unknowns = (s + 1) * (d + 1);
    let equations = terms.len() - s - margin;
    let rows: Vec<Vec<BigInt>> = (0..equations)
        .map(|n| {
            let mut row = Vec::with_capacity(unknowns);
            for j in 0..=s {
                let mut npow = BigInt::one();
                for _ in 0..=d {
                    row.push(&npow * &terms[n + j]);
                    npow *= n;
                }
            }
            row
        })
        .collect();
    // full rank mod p forces full rank over Q
    if rank_mod_p(&rows, unknowns, PREFILTER_PRIME) == unknowns {
        return None;
    }
    let mut candidates: Vec<PolyRecurrence> = nullspace(&rows, unknowns)
        .into_iter()
        .filter_map(|v| PolyRecurrence::new(v.chunks(d + 1).map(<[BigInt]>::to_vec).collect()).ok())
        .collect();
    candidates.sort_by_key(PolyRecurrence::degree_vector);
    let last = terms.len() - 1;
    candidates
        .into_iter()
        .find(|r| (0..=last - s).all(|n| r.residual(terms, n).is_zero()))
}

/// Exact check of the recurrence at every `n` with `n + S <= N`.
pub fn verify_recurrence(a: &IntSequence, r: &PolyRecurrence) -> Result<CertReport> {
    let terms = a.require_origin()?;
    if terms.len() <= r.order() {
        return Err(Error::PrefixTooShort {
            needed: r.order() + 1,
            got: terms.len(),
        });
    }
    let n_max = terms.len() - 1;
    let failures = (0..=n_max - r.order())
        .filter_map(|n| {
            let res = r.residual(terms, n);
            (!res.is_zero()).then(|| Counterexample {
                n,
                modulus: BigInt::zero(),
                witness: res,
            })
        })
        .collect();
    Ok(CertReport::from_failures(CertKind::Recurrence, n_max, failures))
}

/// Extends `initial` to `a_0..=a_N` by solving for `a_{n+S}` at each step.
pub fn apply_recurrence(r: &PolyRecurrence, initial: &IntSequence, n_max: usize) -> Result<IntSequence> {
    let init = initial.require_origin()?;
    let s = r.order();
    if init.len() < s {
        return Err(Error::PrefixTooShort {
            needed: s,
            got: init.len(),
        });
    }
    let mut terms: Vec<BigInt> = init.iter().take(n_max + 1).cloned().collect();
    let top = &r.polys()[s];
    while terms.len() <= n_max {
        let n = terms.len() - s;
        let nb = BigInt::from(n);
        let lead = eval_poly(top, &nb);
        if lead.is_zero() {
            return Err(Error::LeadingZero(n as u64));
        }
        let rhs: BigInt = -r.polys()[..s]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(j, p)| eval_poly(p, &nb) * &terms[n + j])
            .sum::<BigInt>();
        let (q, rem) = rhs.div_rem(&lead);
        if !rem.is_zero() {
            return Err(Error::NonIntegral(n as u64));
        }
        terms.push(q);
    }
    Ok(IntSequence::new(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e_seq(n: usize) -> IntSequence {
        // e_n = sum_k C(n+1,k) k! computed as sum_k (n+1)!/(n+1-k)!
        IntSequence::tabulate(n, |n| {
            let m = n + 1;
            let mut acc = BigInt::zero();
            let mut falling = BigInt::one();
            for k in 0..=m {
                acc += &falling;
                falling *= m - k;
            }
            acc
        })
    }

    fn e_rec() -> PolyRecurrence {
        PolyRecurrence::from_i64s(&[&[2, 1], &[-4, -1], &[1]]).unwrap()
    }

    #[test]
    fn normalization() {
        let r = PolyRecurrence::from_i64s(&[&[4, 2], &[-2, -2, 0]]).unwrap();
        assert_eq!(r, PolyRecurrence::from_i64s(&[&[-2, -1], &[1, 1]]).unwrap());
        assert_eq!(r.normalized(), r);
        assert_eq!(r.degree_vector(), vec![1, 1]);
        assert!(PolyRecurrence::from_i64s(&[&[0], &[]]).is_err());
        assert_eq!(
            r.to_json().to_string(),
            r#"{"order":1,"polys":[["-2","-1"],["1","1"]]}"#
        );
        assert_eq!(PolyRecurrence::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(e_rec().to_string(), "(n + 2)*a(n) + (-n - 4)*a(n+1) + a(n+2) = 0");
    }

    #[test]
    fn guess_linear() {
        let a = IntSequence::tabulate(20, |n| BigInt::from(n + 1));
        let r = guess_recurrence(&a, &GuessBudget::new(1, 1)).unwrap().unwrap();
        assert_eq!(r, PolyRecurrence::from_i64s(&[&[2, 1], &[-1, -1]]).unwrap());
    }

    #[test]
    fn guess_e() {
        let e = e_seq(39);
        assert_eq!(
            &e.terms()[..4],
            &IntSequence::from_i64s(&[2, 5, 16, 65]).terms()[..]
        );
        let r = guess_recurrence(&e, &GuessBudget::new(3, 3)).unwrap().unwrap();
        assert_eq!(r, e_rec());
        assert!(verify_recurrence(&e, &r).unwrap().is_certified());
        let doubled = IntSequence::new(e.terms().iter().map(|t| t * 2).collect());
        assert_eq!(
            guess_recurrence(&doubled, &GuessBudget::new(3, 3)).unwrap(),
            Some(r)
        );
    }

    #[test]
    fn budget_errors() {
        let a = IntSequence::from_i64s(&[1; 12]);
        assert!(matches!(
            guess_recurrence(&a, &GuessBudget::new(1, 1)),
            Err(Error::BudgetInfeasible(_))
        ));
    }

    #[test]
    fn verify_examples() {
        let mut terms = e_seq(20).into_terms();
        terms[9] += 1;
        let rep = verify_recurrence(&IntSequence::new(terms), &e_rec()).unwrap();
        assert!(!rep.is_certified());
        let ns: Vec<usize> = rep.counterexamples.iter().map(|c| c.n).collect();
        assert_eq!(ns, vec![7, 8, 9]);
        assert!(rep.counterexamples.iter().all(Counterexample::recheck));
        let constant = PolyRecurrence::from_i64s(&[&[-1], &[1]]).unwrap();
        assert!(verify_recurrence(&IntSequence::from_i64s(&[4; 9]), &constant)
            .unwrap()
            .is_certified());
    }

    #[test]
    fn apply_examples() {
        let out = apply_recurrence(&e_rec(), &IntSequence::from_i64s(&[2, 5]), 10).unwrap();
        assert_eq!(
            out,
            IntSequence::from_i64s(&[2, 5, 16, 65, 326, 1957, 13700, 109601, 986410, 9864101, 108505112])
        );
        let constant = PolyRecurrence::from_i64s(&[&[-1], &[1]]).unwrap();
        assert_eq!(
            apply_recurrence(&constant, &IntSequence::from_i64s(&[7]), 3).unwrap(),
            IntSequence::from_i64s(&[7; 4])
        );
        let singular = PolyRecurrence::from_i64s(&[&[], &[-3, 1]]).unwrap();
        assert_eq!(
            apply_recurrence(&singular, &IntSequence::from_i64s(&[1]), 6),
            Err(Error::LeadingZero(3))
        );
        let halving = PolyRecurrence::from_i64s(&[&[-1], &[2]]).unwrap();
        assert_eq!(
            apply_recurrence(&halving, &IntSequence::from_i64s(&[4]), 4),
            Err(Error::NonIntegral(2))
        );
    }
}
