//! Outward-rounded interval arithmetic over binary floating-point endpoints.
//!
//! Every [`Interval`] operation takes a precision in bits and rounds its lower
//! endpoint toward `-inf` and its upper endpoint toward `+inf`, so the exact
//! result of the corresponding real operation is always enclosed. `exp`, `ln`,
//! `sqrt`, `pi` and `ln 2` are evaluated with truncated series whose tails are
//! bounded explicitly and added to the enclosure.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// `mant * 2^exp`. Equality and ordering compare values.
#[derive(Debug, Clone)]
pub struct Float {
    mant: BigInt,
    exp: i64,
}

fn shift_floor(m: &BigInt, s: u64) -> BigInt {
    m >> s
}

fn shift_ceil(m: &BigInt, s: u64) -> BigInt {
    -((-m) >> s)
}

impl Float {
    pub fn zero() -> Self {
        Float {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Float {
            mant: v.into(),
            exp: 0,
        }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Float { mant, exp }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Position of the top bit: `|x| < 2^(top+1)`. Undefined for zero.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64 - 1
    }

    /// Rounds to at most `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Float {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let mant = match dir {
            Round::Down => shift_floor(&self.mant, s),
            Round::Up => shift_ceil(&self.mant, s),
        };
        Float {
            mant,
            exp: self.exp + s as i64,
        }
    }

    fn neg(&self) -> Float {
        Float {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    fn mul_exact(&self, other: &Float) -> Float {
        Float {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    fn mul_pow2(&self, k: i64) -> Float {
        Float {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    fn add_exact(&self, other: &Float) -> Float {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Float { mant: a + b, exp: e }
    }

    /// Directed-rounded sum. Operands far below the rounding position are
    /// replaced by a sticky stand-in of the same sign, which rounds identically.
    pub fn add_round(&self, other: &Float, prec: u32, dir: Round) -> Float {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        let cut = big.exp.min(big.top() - prec as i64) - 2;
        if small.top() < cut {
            let stand_in = Float {
                mant: if small.is_negative() {
                    -BigInt::one()
                } else {
                    BigInt::one()
                },
                exp: cut - 1,
            };
            return big.add_exact(&stand_in).round(prec, dir);
        }
        big.add_exact(small).round(prec, dir)
    }

    pub fn sub_round(&self, other: &Float, prec: u32, dir: Round) -> Float {
        self.add_round(&other.neg(), prec, dir)
    }

    pub fn mul_round(&self, other: &Float, prec: u32, dir: Round) -> Float {
        self.mul_exact(other).round(prec, dir)
    }

    /// Directed-rounded quotient; `other` must be nonzero.
    pub fn div_round(&self, other: &Float, prec: u32, dir: Round) -> Float {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Float::zero();
        }
        let want = prec as i64 + 2;
        let have = self.mant.bits() as i64 - other.mant.bits() as i64;
        let shift = (want - have).max(0) as u64;
        let num = &self.mant << shift;
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => num.div_ceil(&other.mant),
        };
        Float {
            mant: q,
            exp: self.exp - shift as i64 - other.exp,
        }
        .round(prec, dir)
    }

    /// Directed-rounded square root of a non-negative value.
    pub fn sqrt_round(&self, prec: u32, dir: Round) -> Float {
        assert!(!self.is_negative(), "square root of a negative value");
        if self.is_zero() {
            return Float::zero();
        }
        let mut shift = (2 * prec as i64 + 4 - self.mant.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as u64;
        let mut s = m.sqrt();
        if dir == Round::Up && &s * &s != m {
            s += 1;
        }
        Float {
            mant: s,
            exp: (self.exp - shift) / 2,
        }
        .round(prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Float {
        let num = Float::from_int(q.numer().clone());
        let den = Float::from_int(q.denom().clone());
        num.div_round(&den, prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_ceil(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let drop = (bits - 60).max(0);
        let m = (&self.mant >> drop as u64).to_f64().unwrap_or(0.0);
        let e = self.exp + drop;
        m * 2f64.powi(e.clamp(-1100, 1100) as i32)
    }

    /// Decimal rendering with `digits` significant digits, rounded in `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let q = self.to_rational();
        // Estimate the decimal exponent from the binary one.
        let mut e10 = ((self.top() as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigRational::from_integer(BigInt::from(10));
        let mag = q.abs();
        loop {
            let lower = pow_rational(&ten, e10);
            if mag < lower {
                e10 -= 1;
            } else if mag >= &lower * &ten {
                e10 += 1;
            } else {
                break;
            }
        }
        let scale = pow_rational(&ten, digits as i64 - 1 - e10);
        let scaled = &q * &scale;
        let mut int = match dir {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        let mut point = e10;
        // rounding may carry into an extra digit
        if int.abs().to_string().len() > digits as usize {
            int = match dir {
                Round::Down => int.div_floor(&BigInt::from(10)),
                Round::Up => int.div_ceil(&BigInt::from(10)),
            };
            point += 1;
        }
        format_scientific(&int, point, digits)
    }
}

fn pow_rational(base: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

// `int` carries `digits` significant digits; the leading one has weight 10^point.
fn format_scientific(int: &BigInt, point: i64, digits: u32) -> String {
    let neg = int.is_negative();
    let s = int.abs().to_string();
    let sign = if neg { "-" } else { "" };
    if (-6..=30).contains(&point) {
        if point >= 0 {
            let int_len = point as usize + 1;
            if s.len() <= int_len {
                format!("{sign}{s}{}", "0".repeat(int_len - s.len()))
            } else {
                let (a, b) = s.split_at(int_len);
                let b = b.trim_end_matches('0');
                if b.is_empty() {
                    format!("{sign}{a}")
                } else {
                    format!("{sign}{a}.{b}")
                }
            }
        } else {
            let zeros = (-point - 1) as usize;
            let b = s.trim_end_matches('0');
            format!("{sign}0.{}{b}", "0".repeat(zeros))
        }
    } else {
        let _ = digits;
        let (a, b) = s.split_at(1);
        let b = b.trim_end_matches('0');
        if b.is_empty() {
            format!("{sign}{a}e{point}")
        } else {
            format!("{sign}{a}.{b}e{point}")
        }
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Float {}

impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.add_exact(&other.neg()).mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

/// A closed interval `[lo, hi]` known to contain some exact real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(f: Float) -> Self {
        Interval { lo: f.clone(), hi: f }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::point(Float::from_int(v))
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        let f = Float::from_int(v.clone());
        Interval {
            lo: f.round(prec, Round::Down),
            hi: f.round(prec, Round::Up),
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Float::from_rational(q, prec, Round::Down),
            hi: Float::from_rational(q, prec, Round::Up),
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), prec)
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> Float {
        self.hi.sub_round(&self.lo, 64, Round::Up)
    }

    pub fn mid(&self) -> Float {
        self.lo.add_exact(&self.hi).mul_pow2(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certainly `self < other` for every pair of enclosed values.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// `Some(true)` if certainly `self <= other`, `Some(false)` if certainly
    /// `self > other`, `None` when the enclosures overlap.
    pub fn decide_le(&self, other: &Interval) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, o: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add_round(&o.lo, prec, Round::Down),
            hi: self.hi.add_round(&o.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.sub_round(&o.hi, prec, Round::Down),
            hi: self.hi.sub_round(&o.lo, prec, Round::Up),
        }
    }

    pub fn mul(&self, o: &Interval, prec: u32) -> Interval {
        let cands = [
            self.lo.mul_exact(&o.lo),
            self.lo.mul_exact(&o.hi),
            self.hi.mul_exact(&o.lo),
            self.hi.mul_exact(&o.hi),
        ];
        let lo = cands.iter().min().unwrap().round(prec, Round::Down);
        let hi = cands.iter().max().unwrap().round(prec, Round::Up);
        Interval { lo, hi }
    }

    pub fn sqr(&self, prec: u32) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let a = self.lo.mul_exact(&self.lo);
            let b = self.hi.mul_exact(&self.hi);
            return Interval {
                lo: Float::zero(),
                hi: a.max(b).round(prec, Round::Up),
            };
        }
        let a = self.lo.mul_exact(&self.lo);
        let b = self.hi.mul_exact(&self.hi);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
        }
    }

    /// Panics if `o` contains zero.
    pub fn div(&self, o: &Interval, prec: u32) -> Interval {
        assert!(!o.contains_zero(), "interval division by an enclosure of zero");
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div_round(b, prec, Round::Down))
            .min()
            .unwrap();
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div_round(b, prec, Round::Up))
            .max()
            .unwrap();
        Interval { lo, hi }
    }

    pub fn mul_int(&self, k: i64, prec: u32) -> Interval {
        self.mul(&Interval::from_int(k), prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Float::zero(),
                hi: self.lo.neg().max(self.hi.clone()),
            }
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    /// Enlarges the interval by `[-r, r]`, `r >= 0`.
    pub fn widen(&self, r: &Float, prec: u32) -> Interval {
        Interval {
            lo: self.lo.sub_round(r, prec, Round::Down),
            hi: self.hi.add_round(r, prec, Round::Up),
        }
    }

    pub fn sqrt(&self, prec: u32) -> Interval {
        assert!(!self.lo.is_negative(), "square root of a negative enclosure");
        Interval {
            lo: self.lo.sqrt_round(prec, Round::Down),
            hi: self.hi.sqrt_round(prec, Round::Up),
        }
    }

    /// Floor of the enclosed value, when both endpoints agree.
    pub fn floor(&self) -> Option<BigInt> {
        let a = self.lo.floor();
        (a == self.hi.floor()).then_some(a)
    }

    pub fn ceil(&self) -> Option<BigInt> {
        let a = self.lo.ceil();
        (a == self.hi.ceil()).then_some(a)
    }

    pub fn exp(&self, prec: u32) -> Interval {
        Interval {
            lo: exp_point(&self.lo, prec).lo,
            hi: exp_point(&self.hi, prec).hi,
        }
    }

    /// Panics unless the enclosure is strictly positive.
    pub fn ln(&self, prec: u32) -> Interval {
        assert!(self.is_positive(), "logarithm of a non-positive enclosure");
        if self.lo == self.hi {
            return ln_point(&self.lo, prec);
        }
        Interval {
            lo: ln_point(&self.lo, prec).lo,
            hi: ln_point(&self.hi, prec).hi,
        }
    }

    /// Decimal enclosure `(lo, hi)` with `digits` significant digits each.
    pub fn to_decimal_pair(&self, digits: u32) -> (String, String) {
        (
            self.lo.to_decimal(digits, Round::Down),
            self.hi.to_decimal(digits, Round::Up),
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_pair(20);
        write!(f, "[{lo}, {hi}]")
    }
}

// Target size of the reduced argument: |r| < 2^-k with k about sqrt(prec)/2.
fn reduction_bits(prec: u32) -> i64 {
    (((prec as f64).sqrt() / 2.0) as i64).max(4)
}

fn exp_point(x: &Float, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::from_int(1);
    }
    let target = reduction_bits(prec);
    let k = (x.top() + 1 + target).max(0);
    let w = prec + k as u32 + 32;
    let r = Interval::point(x.mul_pow2(-k));
    // Taylor series; |r| <= 2^-4 so the tail is at most twice the last term.
    let mut sum = Interval::from_int(1);
    let mut term = Interval::from_int(1);
    let eps = Float::new(BigInt::one(), -(w as i64) - 8);
    let mut i = 1i64;
    loop {
        term = term.mul(&r, w).div(&Interval::from_int(i), w);
        sum = sum.add(&term, w);
        let mag = term.abs().hi;
        if mag < eps {
            sum = sum.widen(&mag.mul_pow2(1), w);
            break;
        }
        i += 1;
    }
    for _ in 0..k {
        sum = sum.sqr(w);
    }
    Interval {
        lo: sum.lo.round(prec, Round::Down),
        hi: sum.hi.round(prec, Round::Up),
    }
}

// atanh(t) for an enclosure 0 <= t <= 1/2.
fn atanh_series(t: &Interval, w: u32) -> Interval {
    let t2 = t.sqr(w);
    let mut power = t.clone();
    let mut sum = t.clone();
    let eps = Float::new(BigInt::one(), -(w as i64) - 8);
    let mut i = 1i64;
    loop {
        power = power.mul(&t2, w);
        let term = power.div(&Interval::from_int(2 * i + 1), w);
        sum = sum.add(&term, w);
        if term.hi < eps {
            // remaining terms sum to at most t^(2i+3)/((2i+3)(1-t^2)) <= 2*term
            let tail = Interval::new(Float::zero(), term.hi.mul_pow2(1));
            return sum.add(&tail, w);
        }
        i += 1;
    }
}

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, Interval>> = RefCell::new(HashMap::new());
    static PI_CACHE: RefCell<HashMap<u32, Interval>> = RefCell::new(HashMap::new());
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Interval {
    if let Some(v) = LN2_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
        return v;
    }
    let w = prec + 16;
    let third = Interval::from_ratio(1, 3, w);
    let v = atanh_series(&third, w).mul_pow2(1);
    let v = Interval {
        lo: v.lo.round(prec, Round::Down),
        hi: v.hi.round(prec, Round::Up),
    };
    LN2_CACHE.with(|c| c.borrow_mut().insert(prec, v.clone()));
    v
}

// arctan(1/n) by the alternating series, n >= 2
fn atan_inv(n: i64, w: u32) -> Interval {
    let x = Interval::from_ratio(1, n, w);
    let x2 = x.sqr(w);
    let mut power = x.clone();
    let mut sum = x.clone();
    let eps = Float::new(BigInt::one(), -(w as i64) - 8);
    let mut i = 1i64;
    loop {
        power = power.mul(&x2, w);
        let term = power.div(&Interval::from_int(2 * i + 1), w);
        sum = if i % 2 == 1 {
            sum.sub(&term, w)
        } else {
            sum.add(&term, w)
        };
        if term.hi < eps {
            return sum.widen(&term.hi, w);
        }
        i += 1;
    }
}

/// Enclosure of `pi` (Machin's formula).
pub fn pi(prec: u32) -> Interval {
    if let Some(v) = PI_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
        return v;
    }
    let w = prec + 16;
    let v = atan_inv(5, w)
        .mul_int(16, w)
        .sub(&atan_inv(239, w).mul_int(4, w), w);
    let v = Interval {
        lo: v.lo.round(prec, Round::Down),
        hi: v.hi.round(prec, Round::Up),
    };
    PI_CACHE.with(|c| c.borrow_mut().insert(prec, v.clone()));
    v
}

/// Enclosure of Euler's number.
pub fn e(prec: u32) -> Interval {
    Interval::from_int(1).exp(prec)
}

/// Enclosure of `zeta(2) = pi^2 / 6`.
pub fn zeta2(prec: u32) -> Interval {
    pi(prec + 8).sqr(prec + 8).div(&Interval::from_int(6), prec)
}

fn ln_point(x: &Float, prec: u32) -> Interval {
    assert!(x.is_positive());
    let bits = x.mant.bits() as i64;
    let e2 = x.exp + bits - 1;
    // y = x / 2^e2 in [1, 2)
    let y = Float::new(x.mant.clone(), -(bits - 1));
    let k = reduction_bits(prec);
    let w = prec + k as u32 + 32;
    let mut acc = if e2 == 0 {
        Interval::from_int(0)
    } else {
        ln2(w).mul_int(e2, w)
    };
    if y != Float::from_int(1) {
        let mut s = Interval::point(y);
        {
            for _ in 0..k {
                s = s.sqrt(w);
            }
            let one = Interval::from_int(1);
            let t = s.sub(&one, w).div(&s.add(&one, w), w);
            let t = Interval {
                lo: t.lo.max(Float::zero()),
                hi: t.hi,
            };
            let ln_y = atanh_series(&t, w).mul_pow2(k + 1);
            acc = acc.add(&ln_y, w);
        }
    }
    Interval {
        lo: acc.lo.round(prec, Round::Down),
        hi: acc.hi.round(prec, Round::Up),
    }
}

/// Enclosure of `ln v` for a positive integer.
pub fn ln_bigint(v: &BigInt, prec: u32) -> Interval {
    Interval::from_bigint(v, prec + 8).ln(prec)
}

/// Enclosure of `ln q` for a positive rational.
pub fn ln_rational(q: &BigRational, prec: u32) -> Interval {
    Interval::from_rational(q, prec + 8).ln(prec)
}

/// Enclosure of `ln(n!)` from the exact factorial.
pub fn ln_factorial(n: u64, prec: u32) -> Interval {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    ln_bigint(&f, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    fn close(iv: &Interval, v: f64, tol: f64) -> bool {
        (iv.mid_f64() - v).abs() <= tol * v.abs().max(1.0)
    }

    #[test]
    fn rounding_directions() {
        let x = Float::from_int(0b1011); // 11
        assert_eq!(x.round(2, Round::Down), Float::new(BigInt::from(2), 2));
        assert_eq!(x.round(2, Round::Up), Float::new(BigInt::from(3), 2));
        let y = Float::from_int(-11);
        assert_eq!(y.round(2, Round::Down), Float::new(BigInt::from(-3), 2));
        assert_eq!(y.round(2, Round::Up), Float::new(BigInt::from(-2), 2));
    }

    #[test]
    fn sticky_addition_is_directed() {
        let one = Float::from_int(1);
        let tiny = Float::new(BigInt::one(), -100_000);
        let up = one.add_round(&tiny, 53, Round::Up);
        let down = one.add_round(&tiny, 53, Round::Down);
        assert_eq!(down, one);
        assert!(up > one);
        assert!(up.to_rational() - one.to_rational() <= BigRational::new(1.into(), BigInt::one() << 50));
        let down2 = one.sub_round(&tiny, 53, Round::Down);
        assert!(down2 < one);
        assert_eq!(one.sub_round(&tiny, 53, Round::Up), one);
    }

    #[test]
    fn division_and_sqrt_enclose() {
        let third = Interval::from_ratio(1, 3, P);
        let back = third.mul_int(3, P);
        assert!(back.lo <= Float::from_int(1) && Float::from_int(1) <= back.hi);
        let r2 = Interval::from_int(2).sqrt(P);
        let sq = r2.sqr(P);
        assert!(sq.lo <= Float::from_int(2) && Float::from_int(2) <= sq.hi);
        assert!(r2.width() < Float::new(BigInt::one(), -(P as i64) + 4));
    }

    #[test]
    fn constants() {
        assert!(close(&ln2(P), std::f64::consts::LN_2, 1e-15));
        assert!(close(&pi(P), std::f64::consts::PI, 1e-15));
        assert!(close(&e(P), std::f64::consts::E, 1e-15));
        assert!(close(&zeta2(P), std::f64::consts::PI.powi(2) / 6.0, 1e-15));
        let (lo, hi) = pi(P).to_decimal_pair(40);
        assert!(lo.starts_with("3.14159265358979323846264338327950288419"));
        assert!(hi.starts_with("3.14159265358979323846264338327950288419"));
        let (lo, _) = e(P).to_decimal_pair(40);
        assert!(lo.starts_with("2.718281828459045235360287471352662497757"));
    }

    #[test]
    fn exp_ln_roundtrip() {
        for v in [-700i64, -3, -1, 1, 2, 10, 345, 2000] {
            let x = Interval::from_int(v);
            let back = x.exp(P).ln(P);
            assert!(
                back.lo <= Float::from_int(v) && Float::from_int(v) <= back.hi,
                "{v}"
            );
            assert!(back.width() < Float::new(BigInt::one(), -(P as i64) + 24));
        }
        let q = Interval::from_ratio(7, 10, P);
        assert!(close(&q.exp(P), 0.7f64.exp(), 1e-15));
        assert!(close(&q.ln(P), 0.7f64.ln(), 1e-15));
        assert!(close(&Interval::from_int(1_000_000).ln(P), 1e6f64.ln(), 1e-15));
    }

    #[test]
    fn ln_of_huge_integer() {
        let big = BigInt::one() << 5000u32;
        let l = ln_bigint(&(big + 1), P);
        assert!(close(&l, 5000.0 * std::f64::consts::LN_2, 1e-14));
    }

    #[test]
    fn enclosures_shrink_with_precision() {
        let a = Interval::from_int(3).ln(64);
        let b = Interval::from_int(3).ln(512);
        assert!(b.lo >= a.lo && b.hi <= a.hi);
        assert!(b.width() < Float::new(BigInt::one(), -480));
    }

    #[test]
    fn floor_and_decimal() {
        let x = Interval::from_ratio(7, 2, P);
        assert_eq!(x.floor(), Some(BigInt::from(3)));
        assert_eq!(x.ceil(), Some(BigInt::from(4)));
        assert_eq!(Float::from_int(1234500).to_decimal(3, Round::Down), "1230000");
        assert_eq!(Float::from_int(1234500).to_decimal(3, Round::Up), "1240000");
        assert_eq!(Float::new(BigInt::from(1), -1).to_decimal(5, Round::Down), "0.5");
        assert_eq!(Float::new(BigInt::from(-3), -2).to_decimal(5, Round::Up), "-0.75");
        assert_eq!(
            Float::new(BigInt::one(), 200).to_decimal(3, Round::Down),
            "1.6e60"
        );
    }
}
