//! Effective constants for the recurrence theorem: parameter choice
//! `(l, d, rho, eps)`, the majorant of `Phi(D, x)`, `J(eps)` and the height
//! constant `H(c, delta)`.
//!
//! Every inequality is decided on outward-rounded enclosures, so "holds"
//! means it holds for the exact reals. `J(eps)` is found by a finite scan of
//! primorials and is therefore only as trustworthy as that scan (no explicit
//! prime number theorem constants are used).

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::{parse_rational, primes_up_to, product, PrimeTable};
use crate::error::{Error, Result};
use crate::real::{e, ln2, ln_bigint, ln_factorial, ln_rational, zeta2, Float, Interval, Round};

pub const DEFAULT_BITS: u32 = 256;
pub const DEFAULT_J_CAP: u64 = 1_000_000;
/// The `H` search gives up beyond `2^DEFAULT_MAX_H_BITS`.
pub const DEFAULT_MAX_H_BITS: u64 = 16_384;
const MAX_D_BUMPS: u64 = 64;
const MAX_HALVINGS: u32 = 200;
const SCAN_LIMIT: u64 = 1024;
const DIGITS: u32 = 30;

/// Working precision and search caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionCtx {
    pub bits: u32,
    pub j_cap: u64,
    pub max_h_bits: u64,
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        PrecisionCtx {
            bits: DEFAULT_BITS,
            j_cap: DEFAULT_J_CAP,
            max_h_bits: DEFAULT_MAX_H_BITS,
        }
    }
}

impl PrecisionCtx {
    pub fn with_bits(bits: u32) -> Self {
        PrecisionCtx {
            bits: bits.max(64),
            ..Self::default()
        }
    }
}

/// `delta` given exactly, either as a rational or as `exp(q)` for rational `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaSpec {
    Rational(BigRational),
    ExpOf(BigRational),
}

impl DeltaSpec {
    /// `"11/10"`, `"1.1"`, `"exp:1/2"` or `"exp(1/2)"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(q) = s.strip_prefix("exp:") {
            return Ok(DeltaSpec::ExpOf(parse_rational(q)?));
        }
        if let Some(q) = s.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
            return Ok(DeltaSpec::ExpOf(parse_rational(q)?));
        }
        Ok(DeltaSpec::Rational(parse_rational(s)?))
    }

    /// `l = log(delta)` when it is rational.
    pub fn ell_exact(&self) -> Option<&BigRational> {
        match self {
            DeltaSpec::ExpOf(q) => Some(q),
            DeltaSpec::Rational(_) => None,
        }
    }

    pub fn ell(&self, prec: u32) -> Interval {
        match self {
            DeltaSpec::ExpOf(q) => Interval::from_rational(q, prec),
            DeltaSpec::Rational(q) => ln_rational(q, prec),
        }
    }

    pub fn value(&self, prec: u32) -> Interval {
        match self {
            DeltaSpec::ExpOf(q) => Interval::from_rational(q, prec + 8).exp(prec),
            DeltaSpec::Rational(q) => Interval::from_rational(q, prec),
        }
    }

    /// Requires `1 < delta < e`.
    pub fn validate(&self, prec: u32) -> Result<()> {
        let out = || Error::Domain(format!("delta = {self} is not in (1, e)"));
        match self {
            DeltaSpec::ExpOf(q) => {
                if !q.is_positive() || *q >= BigRational::one() {
                    return Err(out());
                }
            }
            DeltaSpec::Rational(q) => {
                if *q <= BigRational::one() {
                    return Err(out());
                }
                match self.value(prec).decide_le(&e(prec)) {
                    Some(true) => {}
                    Some(false) => return Err(out()),
                    None => return Err(Error::PrecisionExhausted(format!("cannot compare {self} with e"))),
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for DeltaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaSpec::Rational(q) => write!(f, "{q}"),
            DeltaSpec::ExpOf(q) => write!(f, "exp({q})"),
        }
    }
}

fn iv_json(iv: &Interval) -> Value {
    let (lo, hi) = iv.to_decimal_pair(DIGITS);
    json!({ "hi": hi, "lo": lo, "width": iv.width().to_decimal(3, Round::Up) })
}

fn iv_min(a: &Interval, b: &Interval) -> Interval {
    Interval::new(a.lo().min(b.lo()).clone(), a.hi().min(b.hi()).clone())
}

fn ceil_formula(
    delta: &DeltaSpec,
    exact: impl Fn(&BigRational) -> BigRational,
    approx: impl Fn(&Interval, u32) -> Interval,
    ctx: &PrecisionCtx,
) -> Result<BigInt> {
    if let Some(l) = delta.ell_exact() {
        return Ok(exact(l).ceil().to_integer());
    }
    approx(&delta.ell(ctx.bits), ctx.bits)
        .ceil()
        .ok_or_else(|| Error::PrecisionExhausted("ceiling of a degree formula".into()))
}

/// `max(0, ceil((5 l - 1) / (1 - l)))`.
pub fn degree_bound_from_theorem(delta: &DeltaSpec, ctx: &PrecisionCtx) -> Result<u64> {
    delta.validate(ctx.bits)?;
    let one = BigRational::one();
    let v = ceil_formula(
        delta,
        |l| (l * BigRational::from_integer(5.into()) - &one) / (&one - l),
        |l, p| {
            let one = Interval::from_int(1);
            l.mul_int(5, p).sub(&one, p).div(&one.sub(l, p), p)
        },
        ctx,
    )?;
    Ok(v.max(BigInt::zero()).to_u64().expect("small degree bound"))
}

/// `max(1, ceil(4 l / (1 - l)))`, the value of `d` before any adjustment.
pub fn paper_d(delta: &DeltaSpec, ctx: &PrecisionCtx) -> Result<u64> {
    delta.validate(ctx.bits)?;
    let one = BigRational::one();
    let v = ceil_formula(
        delta,
        |l| l * BigRational::from_integer(4.into()) / (&one - l),
        |l, p| l.mul_int(4, p).div(&Interval::from_int(1).sub(l, p), p),
        ctx,
    )?;
    Ok(v.max(BigInt::one()).to_u64().expect("small d"))
}

/// The chosen `(d, rho, eps)` and the quantities certifying them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameters {
    pub delta: DeltaSpec,
    pub ell: Interval,
    pub d_paper: u64,
    pub d: u64,
    /// `d (1 - l) (d (1 - l) - 4 l)`.
    pub discriminant: Interval,
    /// Roots of the `rho` quadratic, the upper one clipped at `1 / l`.
    pub rho_interval: (Interval, Interval),
    pub rho: BigRational,
    /// `l^2 rho^2 + (2 l - d (1 - l)) rho + 1`, certified negative.
    pub rho2_value: Interval,
    pub epsilon: BigRational,
    pub halvings: u32,
    pub omega: Interval,
    /// `log(1 / omega) = log(e - eps) - l`.
    pub log_inv_omega: Interval,
    /// `(1 + rho l)^2 / log(1 / omega)`, certified below `d rho`.
    pub rho1_lhs: Interval,
    pub rho1_rhs: Interval,
}

impl Parameters {
    pub fn bumped(&self) -> bool {
        self.d != self.d_paper
    }

    pub fn rho_iv(&self, prec: u32) -> Interval {
        Interval::from_rational(&self.rho, prec)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "Delta": iv_json(&self.discriminant),
            "d": self.d.to_string(),
            "d_paper": self.d_paper.to_string(),
            "d_note": if self.bumped() {
                format!("d bumped from paper value {} to {}", self.d_paper, self.d)
            } else {
                "paper value of d used".to_string()
            },
            "delta": self.delta.to_string(),
            "ell": iv_json(&self.ell),
            "epsilon": self.epsilon.to_string(),
            "epsilon_halvings": self.halvings.to_string(),
            "log_inv_omega": iv_json(&self.log_inv_omega),
            "omega": iv_json(&self.omega),
            "rho": self.rho.to_string(),
            "rho1_lhs": iv_json(&self.rho1_lhs),
            "rho1_rhs": iv_json(&self.rho1_rhs),
            "rho2_value": iv_json(&self.rho2_value),
            "rho_decimal": iv_json(&self.rho_iv(DIGITS * 4)),
            "rho_interval": [iv_json(&self.rho_interval.0), iv_json(&self.rho_interval.1)],
        })
    }
}

/// Picks `d`, `rho` and `eps`. `d` starts at `max(1, ceil(4l / (1 - l)))` and is raised
/// until the `rho` interval has interior and the quadratic is strictly
/// negative at its midpoint; `eps` starts at `(e - delta) / 2` and is halved
/// until `(1 + rho l)^2 / log(1/omega) < d rho` is certified.
pub fn choose_parameters(c: &BigRational, delta: &DeltaSpec, ctx: &PrecisionCtx) -> Result<Parameters> {
    if !c.is_positive() {
        return Err(Error::Domain(format!("c = {c} must be positive")));
    }
    let p = ctx.bits;
    let d_paper = paper_d(delta, ctx)?;
    let ell = delta.ell(p);
    let one = Interval::from_int(1);
    let oml = one.sub(&ell, p);
    let two_l2 = ell.sqr(p).mul_pow2(1);
    let inv_l = one.div(&ell, p);

    let mut chosen = None;
    for d in d_paper..=d_paper + MAX_D_BUMPS {
        let a = oml.mul_int(d as i64, p);
        let disc = a.mul(&a.sub(&ell.mul_int(4, p), p), p);
        if !disc.is_positive() {
            continue;
        }
        let sq = disc.sqrt(p);
        let base = a.sub(&ell.mul_pow2(1), p);
        let lo = base.sub(&sq, p).div(&two_l2, p);
        let hi = iv_min(&base.add(&sq, p).div(&two_l2, p), &inv_l);
        if !lo.certainly_lt(&hi) {
            continue;
        }
        let rho_f = Interval::new(lo.hi().clone(), hi.lo().clone())
            .mid()
            .round(64, Round::Down);
        let rho = rho_f.to_rational();
        let rho_iv = Interval::from_rational(&rho, p);
        let rho2 = ell
            .sqr(p)
            .mul(&rho_iv.sqr(p), p)
            .add(&ell.mul_pow2(1).sub(&a, p).mul(&rho_iv, p), p)
            .add(&one, p);
        if !rho2.is_negative() || !rho_iv.mul(&ell, p).certainly_le(&one) || !rho_iv.is_positive() {
            continue;
        }
        chosen = Some((d, disc, (lo, hi), rho, rho_iv, rho2));
        break;
    }
    let (d, discriminant, rho_interval, rho, rho_iv, rho2_value) = chosen.ok_or_else(|| {
        Error::PrecisionExhausted(format!(
            "no d in {d_paper}..={} gives a usable rho",
            d_paper + MAX_D_BUMPS
        ))
    })?;

    let e_iv = e(p);
    let delta_iv = delta.value(p);
    let eps0 = e_iv
        .sub(&delta_iv, p)
        .mul_pow2(-1)
        .lo()
        .round(64, Round::Down)
        .to_rational();
    if !eps0.is_positive() {
        return Err(Error::PrecisionExhausted("e - delta not resolved".into()));
    }
    let a2 = one.add(&rho_iv.mul(&ell, p), p).sqr(p);
    let rhs = rho_iv.mul_int(d as i64, p);
    for k in 0..MAX_HALVINGS {
        let epsilon = &eps0 / BigRational::from_integer(BigInt::one() << k);
        let eme = e_iv.sub(&Interval::from_rational(&epsilon, p), p);
        let log_inv_omega = eme.ln(p).sub(&ell, p);
        if !log_inv_omega.is_positive() {
            continue;
        }
        let lhs = a2.div(&log_inv_omega, p);
        if lhs.certainly_lt(&rhs) {
            return Ok(Parameters {
                delta: delta.clone(),
                ell,
                d_paper,
                d,
                discriminant,
                rho_interval,
                rho,
                rho2_value,
                epsilon,
                halvings: k,
                omega: delta_iv.div(&eme, p),
                log_inv_omega,
                rho1_lhs: lhs,
                rho1_rhs: rhs,
            });
        }
    }
    Err(Error::PrecisionExhausted(
        "strict rho1 not certified after halving eps".into(),
    ))
}

static SIEVE: Mutex<Option<Arc<PrimeTable>>> = Mutex::new(None);

fn sieve(limit: u64) -> Result<Arc<PrimeTable>> {
    let mut slot = SIEVE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = slot.as_ref().filter(|t| t.limit() >= limit) {
        return Ok(Arc::clone(t));
    }
    let t = Arc::new(primes_up_to(limit)?);
    *slot = Some(Arc::clone(&t));
    Ok(t)
}

fn ladder<T>(start: u32, max: u32, mut f: impl FnMut(u32) -> Option<T>, what: &str) -> Result<T> {
    let mut p = start.min(max);
    loop {
        if let Some(v) = f(p) {
            return Ok(v);
        }
        if p >= max {
            return Err(Error::PrecisionExhausted(format!(
                "{what} undecided at {max} bits"
            )));
        }
        p = p.saturating_mul(2).min(max);
    }
}

/// `J(eps)`: the largest `j <= cap` with `P_{j-1} < (e - eps)^j`.
pub fn compute_j(epsilon: &BigRational, ctx: &PrecisionCtx) -> Result<u64> {
    compute_j_with_cap(epsilon, ctx.j_cap, ctx)
}

/// As [`compute_j`] with an explicit scan cap. Errors with `CapExceeded` when
/// a violation falls in the top tenth of the scanned range.
pub fn compute_j_with_cap(epsilon: &BigRational, cap: u64, ctx: &PrecisionCtx) -> Result<u64> {
    let p = ctx.bits;
    let lam_at = |q: u32| e(q).sub(&Interval::from_rational(epsilon, q), q);
    let base = lam_at(p);
    if !epsilon.is_positive() || !base.certainly_lt(&e(p)) || !Interval::from_int(1).certainly_lt(&base) {
        return Err(Error::Domain(format!("eps = {epsilon} is not in (0, e - 1)")));
    }
    let lam = base.ln(p).mid_f64();
    let primes = sieve(cap)?;
    let primes = primes.primes();
    let mut theta = 0f64;
    let mut idx = 0;
    let mut last = 0;
    for j in 1..=cap {
        while idx < primes.len() && primes[idx] < j {
            theta += (primes[idx] as f64).ln();
            idx += 1;
        }
        let diff = theta - j as f64 * lam;
        // float sums of logs drift by far less than this
        let tol = 1e-9 * j as f64 + 1e-6;
        let violated = if diff.abs() <= tol {
            let prim = product(&primes[..idx]);
            !ladder(
                p,
                4096,
                |q| {
                    let lhs = if prim.is_one() {
                        Interval::from_int(0)
                    } else {
                        ln_bigint(&prim, q)
                    };
                    lam_at(q).ln(q).mul_int(j as i64, q).decide_le(&lhs)
                },
                "primorial comparison",
            )?
        } else {
            diff < 0.0
        };
        if violated {
            last = j;
        }
    }
    if last > cap - cap / 10 {
        return Err(Error::CapExceeded(format!(
            "P_(j-1) < (e - eps)^j still at j = {last} with cap {cap}"
        )));
    }
    Ok(last)
}

/// Constants of the majorant of `log Phi(d, x)` at one precision.
struct Majorant {
    prec: u32,
    ell: Interval,
    log_inv_omega: Interval,
    ln2: Interval,
    j0: Interval,
    j0_floor: u64,
    /// `d log j0`.
    shift: Interval,
    /// Every term that does not involve `x`.
    k0: Interval,
    /// `J + floor(j0)`, the multiplicity of `log(1 + x)`.
    coef: i64,
}

impl Majorant {
    /// `None` when `floor(j0)` is not resolved at this precision.
    fn new(d: u64, j: u64, delta: &DeltaSpec, epsilon: &BigRational, prec: u32) -> Result<Option<Majorant>> {
        let p = prec;
        let ell = delta.ell(p);
        let log_inv_omega = e(p)
            .sub(&Interval::from_rational(epsilon, p), p)
            .ln(p)
            .sub(&ell, p);
        if !log_inv_omega.is_positive() {
            return Err(Error::Domain("delta >= e - eps: omega is not below 1".into()));
        }
        let j0 = Interval::from_int(2 * d).div(&log_inv_omega, p);
        let Some(j0_floor) = j0.floor() else {
            return Ok(None);
        };
        let j0_floor = j0_floor.to_u64().expect("moderate j0");
        let ln2 = ln2(p);
        let shift = j0.ln(p).mul_int(d as i64, p);
        let ji = j as i64;
        let k0 = zeta2(p)
            .mul_int(4, p)
            .div(&log_inv_omega, p)
            .add(&ln2.mul_int(ji, p), p)
            .add(&ln_factorial(j, p).mul_int(d as i64, p), p)
            .add(&ell.mul_int(ji * ji, p), p)
            .add(&ln2.add(&shift, p).mul_int(j0_floor as i64, p), p);
        Ok(Some(Majorant {
            prec,
            ell,
            log_inv_omega,
            ln2,
            j0,
            j0_floor,
            shift,
            k0,
            coef: ji + j0_floor as i64,
        }))
    }

    /// `log` of `2^J (1+x)^J J!^d delta^(J^2) (2(1+x) j0^d)^floor(j0) c0 exp(log(x j0^d)^2 / log(1/omega))`.
    fn log_bound(&self, ln_x: &Interval) -> Interval {
        let p = self.prec;
        let u = ln_x.add(&self.shift, p);
        self.k0
            .add(&ln1p_exp(ln_x, p).mul_int(self.coef, p), p)
            .add(&u.sqr(p).div(&self.log_inv_omega, p), p)
    }
}

/// Enclosure of `log(1 + e^y)`.
fn ln1p_exp(y: &Interval, p: u32) -> Interval {
    let y_lo = y.lo().to_f64();
    if y_lo > 64.0 {
        // 0 <= log(1 + e^-y) <= e^-y <= 2^-k
        let k = ((y_lo / std::f64::consts::LN_2) * (1.0 - 1e-12)).floor() as i64 - 1;
        let tail = Float::new(BigInt::one(), -k);
        return Interval::new(y.lo().clone(), y.hi().add_round(&tail, p, Round::Up));
    }
    Interval::from_int(1).add(&y.exp(p), p).ln(p)
}

/// Upper enclosure of `log` of the majorant of `Phi(D, x)`. Requires
/// `y = x j0^D >= 1`, where the dilogarithm step of the bound is valid.
pub fn phi_upper_bound(
    d: u64,
    x: &BigRational,
    delta: &DeltaSpec,
    epsilon: &BigRational,
    ctx: &PrecisionCtx,
) -> Result<Interval> {
    delta.validate(ctx.bits)?;
    if d == 0 || !x.is_positive() {
        return Err(Error::Domain("need D >= 1 and x > 0".into()));
    }
    let j = compute_j(epsilon, ctx)?;
    let p = ctx.bits;
    let maj = ladder::<Result<Majorant>>(
        p,
        p * 16,
        |q| Majorant::new(d, j, delta, epsilon, q).transpose(),
        "floor(j0)",
    )??;
    let ln_x = ln_rational(x, maj.prec);
    let ln_y = ln_x.add(&maj.shift, maj.prec);
    match Interval::from_int(0).decide_le(&ln_y) {
        Some(true) => Ok(maj.log_bound(&ln_x)),
        Some(false) => Err(Error::Domain(
            "y = x * j0^D < 1; the majorant is only valid for y >= 1".into(),
        )),
        None => Err(Error::PrecisionExhausted("sign of log(x j0^D)".into())),
    }
}

/// The minimal `h` found for the defining inequality and how it was checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HResult {
    pub h: BigInt,
    pub ln_h: Interval,
    /// `r = floor(rho log H) + 1` at `H`.
    pub r: u64,
    /// `H` lies in `(2^(e-1), 2^e]`.
    pub exponent: u64,
    /// The predicate was decided true at `H` and false at `H - 1`
    /// (`None` when `H = 1`).
    pub holds_below: Option<bool>,
    /// Candidate produced by the bisection before the final scan.
    pub candidate: BigInt,
    /// Integers stepped over by the final scan (downward or upward).
    pub scan_steps: u64,
}

struct HEval<'a> {
    params: &'a Parameters,
    j: u64,
    two_cd: BigRational,
    majorants: HashMap<u32, Option<Rc<Majorant>>>,
    ln_r: HashMap<(u64, u32), Interval>,
}

impl<'a> HEval<'a> {
    fn new(c: &BigRational, params: &'a Parameters, j: u64) -> Self {
        HEval {
            params,
            j,
            two_cd: c * BigRational::from_integer(BigInt::from(2 * params.d)),
            majorants: HashMap::new(),
            ln_r: HashMap::new(),
        }
    }

    fn majorant(&mut self, p: u32) -> Result<Option<Rc<Majorant>>> {
        if let Some(m) = self.majorants.get(&p) {
            return Ok(m.clone());
        }
        let pr = self.params;
        let m = Majorant::new(pr.d, self.j, &pr.delta, &pr.epsilon, p)?.map(Rc::new);
        self.majorants.insert(p, m.clone());
        Ok(m)
    }

    fn ln_2crd(&mut self, r: u64, p: u32) -> Interval {
        let two_cd = &self.two_cd;
        self.ln_r
            .entry((r, p))
            .or_insert_with(|| ln_rational(&(two_cd * BigRational::from_integer(r.into())), p))
            .clone()
    }

    /// `log LHS(h) - r d log h` for an enclosure `t` of `log h`.
    fn gap(&mut self, t: &Interval, r: u64, p: u32) -> Result<Option<Interval>> {
        let Some(m) = self.majorant(p)? else {
            return Ok(None);
        };
        let ln_x = self
            .ln_2crd(r, p)
            .add(t, p)
            .add(&m.ell.mul_int(r as i64 - 1, p), p);
        let rhs = t.mul_int((r * self.params.d) as i64, p);
        Ok(Some(m.log_bound(&ln_x).sub(&rhs, p)))
    }

    fn decide(&mut self, t: &Interval, r: u64, p: u32) -> Result<Option<bool>> {
        Ok(self.gap(t, r, p)?.and_then(|g| {
            if !g.hi().is_positive() {
                Some(true)
            } else if g.lo().is_positive() {
                Some(false)
            } else {
                None
            }
        }))
    }

    /// The predicate at a real `t = log h` given exactly as a dyadic.
    fn at_point(&mut self, t: &Float, p: u32) -> Result<Option<bool>> {
        let r: BigInt = (&self.params.rho * t.to_rational()).floor().to_integer() + 1;
        let r = r.to_u64().expect("moderate r");
        self.decide(&Interval::point(t.clone()), r, p)
    }

    /// The predicate for an enclosure of `log h`.
    fn at_log(&mut self, t: &Interval, p: u32) -> Result<Option<bool>> {
        let Some(fl) = self.params.rho_iv(p).mul(t, p).floor() else {
            return Ok(None);
        };
        self.decide(t, fl.to_u64().expect("moderate r") + 1, p)
    }

    fn at_int(&mut self, h: &BigInt, p: u32) -> Result<Option<bool>> {
        let t = if h.is_one() {
            Interval::from_int(0)
        } else {
            ln_bigint(h, p)
        };
        self.at_log(&t, p)
    }

    fn ladder(
        &mut self,
        start: u32,
        max: u32,
        mut f: impl FnMut(&mut Self, u32) -> Result<Option<bool>>,
    ) -> Result<bool> {
        let mut p = start.min(max);
        loop {
            if let Some(v) = f(self, p)? {
                return Ok(v);
            }
            if p >= max {
                return Err(Error::PrecisionExhausted(format!(
                    "H predicate undecided at {max} bits"
                )));
            }
            p = p.saturating_mul(2).min(max);
        }
    }

    fn int_pred(&mut self, h: &BigInt, base: u32) -> Result<bool> {
        let max = h.bits() as u32 + base + 64;
        self.ladder(base, max, |s, p| s.at_int(h, p))
    }

    fn pow2_pred(&mut self, e: u64, base: u32) -> Result<bool> {
        let max = e as u32 + base + 64;
        self.ladder(base, max, |s, p| s.at_log(&ln2(p).mul_int(e as i64, p), p))
    }

    fn point_pred(&mut self, t: &Float, base: u32, max: u32) -> Result<bool> {
        self.ladder(base, max, |s, p| s.at_point(t, p))
    }
}

fn r_at(rho: &Interval, ln_h: &Interval) -> Option<u64> {
    rho.mul(ln_h, rho.lo().to_rational().numer().bits() as u32 + 256)
        .floor()
        .and_then(|f| f.to_u64())
        .map(|r| r + 1)
}

/// Smallest `h` (as found by the search) with
/// `LHS(h) <= h^(r d)`, `r = floor(rho log h) + 1`, `x = 2 c r d h delta^(r-1)`.
///
/// Gallops over `h = 2^e`, bisects on `e`, then bisects on `t = log h`
/// (where the predicate needs no logarithm of `h`), and finally checks the
/// integer candidate and its neighbours exactly, scanning down while the
/// predicate still holds.
pub fn compute_h(c: &BigRational, params: &Parameters, j: u64, ctx: &PrecisionCtx) -> Result<HResult> {
    let base = ctx.bits;
    let mut ev = HEval::new(c, params, j);
    let one = BigInt::one();
    if ev.int_pred(&one, base)? {
        return Ok(HResult {
            h: one.clone(),
            ln_h: Interval::from_int(0),
            r: 1,
            exponent: 0,
            holds_below: None,
            candidate: one,
            scan_steps: 0,
        });
    }
    let (mut lo_e, mut hi_e) = (0u64, 1u64);
    loop {
        if hi_e > ctx.max_h_bits {
            return Err(Error::SearchExceeded(format!(
                "no h <= 2^{} satisfies the inequality",
                ctx.max_h_bits
            )));
        }
        if ev.pow2_pred(hi_e, base)? {
            break;
        }
        lo_e = hi_e;
        hi_e *= 2;
    }
    while hi_e - lo_e > 1 {
        let mid = (lo_e + hi_e) / 2;
        if ev.pow2_pred(mid, base)? {
            hi_e = mid;
        } else {
            lo_e = mid;
        }
    }

    let target = hi_e as i64 + 40;
    let max_p = (hi_e as u32 + base + 160).next_power_of_two();
    let l2 = ln2(hi_e as u32 + 128);
    let mut ta = l2.mul_int(lo_e as i64, hi_e as u32 + 128).lo().clone();
    let mut tb = l2.mul_int(hi_e as i64, hi_e as u32 + 128).hi().clone();
    if ev.point_pred(&ta, base, max_p)? {
        ta = Float::zero();
    }
    while !ev.point_pred(&tb, base, max_p)? {
        tb = tb.add_round(&Float::from_int(1), max_p, Round::Up);
    }
    let stop = Float::new(BigInt::one(), -target);
    let mut k = 0u32;
    while tb.sub_round(&ta, 64, Round::Up) > stop {
        let m = Interval::new(ta.clone(), tb.clone()).mid();
        let p = (k + 128).max(base).next_power_of_two().min(max_p);
        if ev.point_pred(&m, p, max_p)? {
            tb = m;
        } else {
            ta = m;
        }
        k += 1;
    }

    let candidate: BigInt = Interval::point(ta).exp(hi_e as u32 + 64).lo().floor() + 1;
    let mut h = candidate.clone();
    let mut steps = 0u64;
    if ev.int_pred(&h, base)? {
        while !h.is_one() && ev.int_pred(&(&h - 1), base)? {
            h -= 1;
            steps += 1;
            if steps > SCAN_LIMIT {
                return Err(Error::SearchExceeded("downward scan did not terminate".into()));
            }
        }
    } else {
        loop {
            h += 1;
            steps += 1;
            if ev.int_pred(&h, base)? {
                break;
            }
            if steps > SCAN_LIMIT {
                return Err(Error::SearchExceeded("upward scan did not terminate".into()));
            }
        }
    }
    let holds_below = if h.is_one() {
        None
    } else {
        Some(ev.int_pred(&(&h - 1), base)?)
    };
    let p = base.max(h.bits() as u32 + 64);
    let ln_h = ln_bigint(&h, p);
    let r = r_at(&params.rho_iv(p), &ln_h).ok_or_else(|| Error::PrecisionExhausted("r at H".into()))?;
    Ok(HResult {
        exponent: h.bits(),
        h,
        ln_h,
        r,
        holds_below,
        candidate,
        scan_steps: steps,
    })
}

/// Decides the defining inequality at a given `h` (used to re-check results).
pub fn h_predicate(
    c: &BigRational,
    params: &Parameters,
    j: u64,
    h: &BigInt,
    ctx: &PrecisionCtx,
) -> Result<bool> {
    if !h.is_positive() {
        return Err(Error::Domain("h must be >= 1".into()));
    }
    HEval::new(c, params, j).int_pred(h, ctx.bits)
}

/// The explicit upper bound `H <= 1 + exp(t*)`, `t*` the largest root of
/// `gamma t^2 - alpha t - beta`.
///
/// With `t = log h`, `a = 1 + rho l` and `L = log(1/omega)`:
/// `log r <= log(1 + rho t) <= eta t + kappa` for any `eta > 0`, where
/// `kappa = max(0, log(rho/eta) - 1 + eta/rho)`; hence
/// `log x <= (a + eta) t + log(2cd) + kappa` and, with `b = log(2cd) + d log j0`,
/// `|log x + d log j0| <= (a + eta) t + |b| + kappa`. Also
/// `log(1 + x) <= log 2 + max(0, log x)` and `r d t >= rho d t^2`. Collecting
/// terms gives the quadratic with `gamma = rho d - (a + eta)^2 / L`; `eta` is
/// taken halfway between 0 and `sqrt(rho d L) - a`, which is positive by the
/// strict `rho1` inequality. The `eta` slack absorbs the `t log t` growth of
/// `log r`, which no bound of the form `alpha t + beta` can absorb when
/// `gamma` is taken exactly as `rho d - a^2 / L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperDiag {
    pub eta: Interval,
    pub alpha: Interval,
    pub beta: Interval,
    pub gamma: Interval,
    /// Enclosure of `t*`; the bound is `H <= 1 + exp(t*)`.
    pub t_star: Interval,
}

fn upper_diagnostic(c: &BigRational, params: &Parameters, j: u64, p: u32) -> Result<Option<UpperDiag>> {
    let Some(m) = Majorant::new(params.d, j, &params.delta, &params.epsilon, p)? else {
        return Ok(None);
    };
    let one = Interval::from_int(1);
    let rho = params.rho_iv(p);
    let l = &m.log_inv_omega;
    let a = one.add(&rho.mul(&m.ell, p), p);
    let rd = rho.mul_int(params.d as i64, p);
    let gap = rd.mul(l, p).sqrt(p).sub(&a, p);
    if !gap.is_positive() {
        return Ok(None);
    }
    let eta = Interval::point(gap.mul_pow2(-1).lo().round(64, Round::Down));
    let a1 = a.add(&eta, p);
    let gamma = rd.sub(&a1.sqr(p).div(l, p), p);
    if !gamma.is_positive() {
        return Ok(None);
    }
    let kappa = rho
        .div(&eta, p)
        .ln(p)
        .sub(&one, p)
        .add(&eta.div(&rho, p), p)
        .max(&Interval::from_int(0));
    let ln2cd = ln_rational(&(c * BigRational::from_integer(BigInt::from(2 * params.d))), p);
    let b2 = ln2cd.add(&m.shift, p).abs().add(&kappa, p);
    let mx = ln2cd.add(&kappa, p).max(&Interval::from_int(0));
    let alpha = a1
        .mul_int(m.coef, p)
        .add(&a1.mul(&b2, p).mul_pow2(1).div(l, p), p);
    let beta =
        m.k0.add(&m.ln2.add(&mx, p).mul_int(m.coef, p), p)
            .add(&b2.sqr(p).div(l, p), p);
    let disc = alpha.sqr(p).add(&beta.mul(&gamma, p).mul_int(4, p), p);
    let t_star = alpha.add(&disc.sqrt(p), p).div(&gamma.mul_pow2(1), p);
    Ok(Some(UpperDiag {
        eta,
        alpha,
        beta,
        gamma,
        t_star,
    }))
}

/// Full output of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveBounds {
    pub c: BigRational,
    pub params: Parameters,
    pub j: u64,
    pub j_cap: u64,
    pub j0: Interval,
    pub j0_floor: u64,
    pub h: HResult,
    /// Enclosure of `log H_lower`.
    pub ln_h_lower: Interval,
    /// `H_lower <= H` certified.
    pub h_lower_holds: bool,
    pub upper: Option<UpperDiag>,
    /// `log H <= t*` certified, when the diagnostic is available.
    pub upper_holds: Option<bool>,
    pub deg_bound_theorem: u64,
    /// `d - 1` for the `d` actually used.
    pub deg_bound_construction: u64,
    /// `floor(log H / l)`.
    pub order_bound: BigInt,
}

impl EffectiveBounds {
    pub fn to_json(&self) -> Value {
        let upper = match &self.upper {
            Some(u) => json!({
                "alpha": iv_json(&u.alpha),
                "beta": iv_json(&u.beta),
                "eta": iv_json(&u.eta),
                "gamma": iv_json(&u.gamma),
                "holds": self.upper_holds,
                "log_bound": iv_json(&u.t_star),
                "note": "H <= 1 + exp(log_bound)",
            }),
            None => json!({ "note": "unavailable" }),
        };
        json!({
            "H": self.h.h.to_string(),
            "H_bits": self.h.h.bits().to_string(),
            "H_digits": self.h.h.to_string().len().to_string(),
            "H_lower_log": iv_json(&self.ln_h_lower),
            "H_lower_holds": self.h_lower_holds,
            "H_search": {
                "candidate": self.h.candidate.to_string(),
                "exponent": self.h.exponent.to_string(),
                "holds_below": self.h.holds_below,
                "scan_steps": self.h.scan_steps.to_string(),
                "scan_window": format!(
                    "predicate true at H, false at H-1; scanned {} integers from the bisection candidate",
                    self.h.scan_steps
                ),
            },
            "H_upper": upper,
            "J": self.j.to_string(),
            "J_cap": self.j_cap.to_string(),
            "J_note": "J from a finite primorial scan (no explicit prime number theorem constants); heuristic beyond the cap",
            "c": self.c.to_string(),
            "deg_bound_construction": self.deg_bound_construction.to_string(),
            "deg_bound_theorem": self.deg_bound_theorem.to_string(),
            "j0": iv_json(&self.j0),
            "j0_floor": self.j0_floor.to_string(),
            "log_H": iv_json(&self.h.ln_h),
            "order_bound": self.order_bound.to_string(),
            "parameters": self.params.to_json(),
            "r_at_H": self.h.r.to_string(),
        })
    }
}

impl fmt::Display for EffectiveBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pr = &self.params;
        writeln!(f, "c = {}, delta = {}", self.c, pr.delta)?;
        writeln!(f, "l = log(delta) in {}", pr.ell)?;
        write!(f, "d = {}", pr.d)?;
        if pr.bumped() {
            write!(f, " (bumped from paper value {})", pr.d_paper)?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "rho = {} in [{}, {}]",
            pr.rho, pr.rho_interval.0, pr.rho_interval.1
        )?;
        writeln!(
            f,
            "eps = {} after {} halvings; log(1/omega) in {}",
            pr.epsilon, pr.halvings, pr.log_inv_omega
        )?;
        writeln!(f, "J = {} (primorial scan to {})", self.j, self.j_cap)?;
        writeln!(
            f,
            "H has {} digits ({} bits); log H in {}",
            self.h.h.to_string().len(),
            self.h.h.bits(),
            self.h.ln_h
        )?;
        writeln!(f, "log H_lower in {}", self.ln_h_lower)?;
        match &self.upper {
            Some(u) => writeln!(f, "H <= 1 + exp(t*), t* in {}", u.t_star)?,
            None => writeln!(f, "upper bound diagnostic unavailable")?,
        }
        writeln!(
            f,
            "degree bound: theorem {}, construction {}",
            self.deg_bound_theorem, self.deg_bound_construction
        )?;
        write!(f, "order bound: {}", self.order_bound)
    }
}

/// Runs the whole pipeline for `(c, delta)`.
pub fn bounds_report(c: &BigRational, delta: &DeltaSpec, ctx: &PrecisionCtx) -> Result<EffectiveBounds> {
    let params = choose_parameters(c, delta, ctx)?;
    let j = compute_j(&params.epsilon, ctx)?;
    let h = compute_h(c, &params, j, ctx)?;
    let p = ctx.bits;
    let maj = ladder::<Result<Majorant>>(
        p,
        p * 16,
        |q| Majorant::new(params.d, j, delta, &params.epsilon, q).transpose(),
        "floor(j0)",
    )??;

    // A = LHS at h = 1, where r = 1 and x = 2cd
    let ln_a = maj.log_bound(&ln_rational(
        &(c * BigRational::from_integer(BigInt::from(2 * params.d))),
        p,
    ));
    let d = Interval::from_int(params.d);
    let drho = d.mul(&params.rho_iv(p), p);
    let ln_h_lower = d
        .sqr(p)
        .add(&drho.mul(&ln_a, p).mul_int(4, p), p)
        .sqrt(p)
        .sub(&d, p)
        .div(&drho, p);
    let ln_h = ln_bigint(&h.h, p.max(h.h.bits() as u32 + 64));
    let h_lower_holds = ln_h_lower.certainly_le(&ln_h);

    let upper = upper_diagnostic(c, &params, j, p)?;
    let upper_holds = upper.as_ref().map(|u| ln_h.certainly_le(&u.t_star));

    let order_bound = ladder(
        p,
        p * 16,
        |q| {
            let lh = if h.h.is_one() {
                Interval::from_int(0)
            } else {
                ln_bigint(&h.h, q)
            };
            lh.div(&delta.ell(q), q).floor()
        },
        "order bound",
    )?;
    Ok(EffectiveBounds {
        c: c.clone(),
        deg_bound_theorem: degree_bound_from_theorem(delta, ctx)?,
        deg_bound_construction: params.d - 1,
        j0: maj.j0.clone(),
        j0_floor: maj.j0_floor,
        j,
        j_cap: ctx.j_cap,
        h,
        ln_h_lower,
        h_lower_holds,
        upper,
        upper_holds,
        order_bound,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::default()
    }

    #[test]
    fn delta_parsing() {
        assert_eq!(DeltaSpec::parse("exp:1/2").unwrap(), DeltaSpec::ExpOf(q(1, 2)));
        assert_eq!(DeltaSpec::parse("exp(3/4)").unwrap(), DeltaSpec::ExpOf(q(3, 4)));
        assert_eq!(DeltaSpec::parse("1.1").unwrap(), DeltaSpec::Rational(q(11, 10)));
        assert_eq!(DeltaSpec::ExpOf(q(1, 2)).to_string(), "exp(1/2)");
        for bad in ["1", "3", "exp:1", "exp:0", "14/5"] {
            let d = DeltaSpec::parse(bad).unwrap();
            assert!(matches!(d.validate(128), Err(Error::Domain(_))), "{bad}");
        }
        assert!(DeltaSpec::parse("27/10").unwrap().validate(128).is_ok());
    }

    #[test]
    fn degree_bounds() {
        let c = ctx();
        assert_eq!(
            degree_bound_from_theorem(&DeltaSpec::ExpOf(q(1, 2)), &c).unwrap(),
            3
        );
        assert_eq!(
            degree_bound_from_theorem(&DeltaSpec::ExpOf(q(3, 4)), &c).unwrap(),
            11
        );
        assert_eq!(
            degree_bound_from_theorem(&DeltaSpec::ExpOf(q(1, 5)), &c).unwrap(),
            0
        );
        assert_eq!(
            degree_bound_from_theorem(&DeltaSpec::Rational(q(11, 10)), &c).unwrap(),
            0
        );
        assert_eq!(paper_d(&DeltaSpec::ExpOf(q(1, 2)), &c).unwrap(), 4);
        assert_eq!(paper_d(&DeltaSpec::Rational(q(11, 10)), &c).unwrap(), 1);
    }

    #[test]
    fn parameters_half() {
        let p = choose_parameters(&q(1, 1), &DeltaSpec::ExpOf(q(1, 2)), &ctx()).unwrap();
        assert_eq!((p.d_paper, p.d), (4, 5));
        let rho = p.rho_iv(128).mid_f64();
        assert!((rho - 1.382).abs() < 1e-3, "{rho}");
        assert!((p.rho_interval.0.mid_f64() - 0.764).abs() < 1e-3);
        assert!((p.rho_interval.1.mid_f64() - 2.0).abs() < 1e-12);
        assert!(p.rho2_value.is_negative());
        assert!(p.rho1_lhs.certainly_lt(&p.rho1_rhs));
        assert!(p.epsilon < q(1, 4));
        let omega = p.omega.mid_f64();
        assert!(omega > 0.0 && omega < 1.0);
    }

    #[test]
    fn parameters_eleven_tenths() {
        let p = choose_parameters(&q(1, 1), &DeltaSpec::Rational(q(11, 10)), &ctx()).unwrap();
        assert_eq!((p.d_paper, p.d), (1, 1));
        assert!((p.discriminant.mid_f64() - 0.474).abs() < 1e-3);
        assert!((p.rho_interval.0.mid_f64() - 1.4263).abs() < 1e-3);
        assert!((p.rho_interval.1.mid_f64() - 10.49).abs() < 1e-2);
        assert!((p.rho_iv(64).mid_f64() - 5.96).abs() < 1e-2);
        assert!(matches!(
            choose_parameters(&q(0, 1), &DeltaSpec::Rational(q(11, 10)), &ctx()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn j_values() {
        let c = ctx();
        assert_eq!(compute_j(&q(3, 2), &c).unwrap(), 2);
        let small = compute_j_with_cap(&q(1, 5), 100_000, &c).unwrap();
        assert_eq!(compute_j_with_cap(&q(1, 5), 200_000, &c).unwrap(), small);
        let mut prev = u64::MAX;
        for k in 1..=15 {
            let j = compute_j_with_cap(&q(k, 10), 100_000, &c).unwrap();
            assert!(j <= prev);
            prev = j;
        }
        assert!(matches!(compute_j(&q(2, 1), &c), Err(Error::Domain(_))));
        assert!(matches!(
            compute_j_with_cap(&q(1, 1000), 10_000, &c),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn phi_bound_basics() {
        let c = ctx();
        let delta = DeltaSpec::Rational(q(3, 2));
        let eps = q(1, 2);
        let lo = phi_upper_bound(2, &q(1, 1), &delta, &eps, &c).unwrap();
        let hi = phi_upper_bound(2, &q(1000, 1), &delta, &eps, &c).unwrap();
        assert!(!lo.lo().is_negative());
        assert!(lo.certainly_le(&hi));
        assert!(matches!(
            phi_upper_bound(1, &q(1, 1_000_000), &delta, &eps, &c),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn h_small_delta() {
        let r = bounds_report(&q(1, 1), &DeltaSpec::Rational(q(11, 10)), &ctx()).unwrap();
        assert_eq!(r.deg_bound_theorem, 0);
        assert!(r.h_lower_holds);
        assert_eq!(r.upper_holds, Some(true));
        if r.h.h > BigInt::one() {
            assert_eq!(r.h.holds_below, Some(false));
        }
        let pr = &r.params;
        assert!(h_predicate(&r.c, pr, r.j, &r.h.h, &ctx()).unwrap());
    }
}
