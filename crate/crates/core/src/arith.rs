//! Exact integer primitives: the prime sieve, primorials `P_n`, the lcm values
//! `d_n = lcm(1, ..., n)`, binomial coefficients and Lucas reductions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`primes_up_to`].
pub const MAX_SIEVE_LIMIT: u64 = 1 << 32;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Membership test by binary search; `n` must not exceed the limit.
    pub fn contains(&self, n: u64) -> bool {
        debug_assert!(n <= self.limit);
        self.primes.binary_search(&n).is_ok()
    }
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::SieveLimit {
            limit,
            max: MAX_SIEVE_LIMIT,
        });
    }
    let n = limit as usize;
    if n < 2 {
        return Ok(PrimeTable {
            limit,
            primes: Vec::new(),
        });
    }
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    let primes = (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect();
    Ok(PrimeTable { limit, primes })
}

/// Deterministic trial-division primality test, used for argument checks.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `P_n`, the product of all primes `<= n` (`P_0 = P_1 = 1`).
pub fn primorial(n: u64) -> Result<BigInt> {
    Ok(product(primes_up_to(n)?.primes()))
}

/// Product of `vals` by balanced splitting, so large products stay fast.
pub fn product(vals: &[u64]) -> BigInt {
    match vals.len() {
        0 => BigInt::one(),
        1..=16 => vals.iter().fold(BigInt::one(), |acc, &v| acc * v),
        n => product(&vals[..n / 2]) * product(&vals[n / 2..]),
    }
}

/// `d_n = lcm(1, ..., n)` with `d_0 = 1`.
pub fn lcm_to(n: u64) -> Result<BigInt> {
    let table = primes_up_to(n)?;
    let mut acc = BigInt::one();
    for &p in table.primes() {
        let mut q = p;
        while let Some(next) = q.checked_mul(p).filter(|&v| v <= n) {
            q = next;
        }
        acc *= q;
    }
    Ok(acc)
}

/// Prefix tables `P_0..=P_n` and `d_0..=d_n`, built incrementally once.
#[derive(Debug, Clone)]
pub struct ArithTables {
    primes: PrimeTable,
    primorials: Vec<BigInt>,
    lcms: Vec<BigInt>,
}

impl ArithTables {
    pub fn new(n: u64) -> Result<Self> {
        let primes = primes_up_to(n)?;
        let len = n as usize + 1;
        let mut primorials = Vec::with_capacity(len);
        let mut lcms = Vec::with_capacity(len);
        let mut p_acc = BigInt::one();
        let mut d_acc = BigInt::one();
        for k in 0..=n {
            if k >= 2 {
                if primes.contains(k) {
                    p_acc *= k;
                }
                if let Some(p) = prime_power_base(k, &primes) {
                    d_acc *= p;
                }
            }
            primorials.push(p_acc.clone());
            lcms.push(d_acc.clone());
        }
        Ok(ArithTables {
            primes,
            primorials,
            lcms,
        })
    }

    /// Largest index covered.
    pub fn max_n(&self) -> u64 {
        self.primes.limit()
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    pub fn primorial(&self, n: usize) -> &BigInt {
        &self.primorials[n]
    }

    pub fn lcm(&self, n: usize) -> &BigInt {
        &self.lcms[n]
    }

    pub fn primorials(&self) -> &[BigInt] {
        &self.primorials
    }

    pub fn lcms(&self) -> &[BigInt] {
        &self.lcms
    }
}

// Returns p when k = p^e for a prime p and e >= 1.
fn prime_power_base(k: u64, primes: &PrimeTable) -> Option<u64> {
    for &p in primes.primes() {
        if p * p > k {
            break;
        }
        if k.is_multiple_of(p) {
            let mut m = k;
            while m.is_multiple_of(p) {
                m /= p;
            }
            return (m == 1).then_some(p);
        }
    }
    // no prime factor up to sqrt(k): k itself is prime
    Some(k)
}

/// `C(n, k)` by the multiplicative formula; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
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

/// Row `C(n, 0), ..., C(n, n)` built from the symmetric multiplicative step.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// Rows `0..=n` of Pascal's triangle via the additive recurrence.
pub fn pascal_rows(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    rows.push(vec![BigInt::one()]);
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = Vec::with_capacity(i + 1);
        row.push(BigInt::one());
        for k in 1..i {
            row.push(&prev[k - 1] + &prev[k]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows
}

/// `C(n, k) mod p` as the product of base-`p` digit binomials.
pub fn lucas_binomial_mod(mut n: u64, mut k: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut acc = 1u128;
    let p128 = p as u128;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return Ok(0);
        }
        acc = acc * small_binomial_mod(ni, ki, p) % p128;
        n /= p;
        k /= p;
    }
    Ok(acc as u64)
}

// C(n, k) mod p for 0 <= k <= n < p.
fn small_binomial_mod(n: u64, k: u64, p: u64) -> u128 {
    let p128 = p as u128;
    let k = k.min(n - k);
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num = num * ((n - i) as u128) % p128;
        den = den * ((i + 1) as u128) % p128;
    }
    num * pow_mod(den, p128 - 2, p128) % p128
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Non-negative residue of `x` modulo a positive `m`.
pub fn mod_floor_u64(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    u64::try_from(r).expect("residue fits in u64")
}

/// Parses `p/q`, a decimal such as `-1.25`, or a plain integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        if frac.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let v: BigInt = digits.parse().map_err(|_| bad())?;
        let v = if neg { -v } else { v };
        return Ok(BigRational::new(v, num_traits::pow(BigInt::from(10), frac.len())));
    }
    let v: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(n: u64) -> Vec<u64> {
        (2..=n)
            .filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
            .collect()
    }

    #[test]
    fn sieve_small_cases() {
        assert!(primes_up_to(0).unwrap().is_empty());
        assert!(primes_up_to(1).unwrap().is_empty());
        assert_eq!(primes_up_to(10).unwrap().primes(), &[2, 3, 5, 7]);
        let t30 = primes_up_to(30).unwrap();
        assert_eq!(*t30.primes().last().unwrap(), 29);
        assert_eq!(t30.primes(), trial_division_primes(30).as_slice());
    }

    #[test]
    fn sieve_matches_trial_division() {
        assert_eq!(
            primes_up_to(2000).unwrap().primes(),
            trial_division_primes(2000).as_slice()
        );
    }

    #[test]
    fn sieve_limit_is_reported() {
        assert!(matches!(
            primes_up_to(MAX_SIEVE_LIMIT + 1),
            Err(Error::SieveLimit { .. })
        ));
    }

    #[test]
    fn primorial_values() {
        assert_eq!(primorial(0).unwrap(), BigInt::from(1));
        assert_eq!(primorial(1).unwrap(), BigInt::from(1));
        assert_eq!(primorial(5).unwrap(), BigInt::from(30));
        assert_eq!(primorial(30).unwrap(), BigInt::from(6469693230u64));
    }

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_to(0).unwrap(), BigInt::from(1));
        assert_eq!(lcm_to(2).unwrap(), BigInt::from(2));
        assert_eq!(lcm_to(6).unwrap(), BigInt::from(60));
        // iterated lcm oracle
        let mut acc = BigInt::one();
        for k in 1..=80u64 {
            acc = acc.lcm(&BigInt::from(k));
            assert_eq!(lcm_to(k).unwrap(), acc);
        }
    }

    #[test]
    fn tables_agree_with_direct() {
        let t = ArithTables::new(120).unwrap();
        for n in 0..=120u64 {
            assert_eq!(t.primorial(n as usize), &primorial(n).unwrap());
            assert_eq!(t.lcm(n as usize), &lcm_to(n).unwrap());
        }
    }

    #[test]
    fn primorial_divides_lcm_but_not_conversely() {
        let t = ArithTables::new(1000).unwrap();
        for n in 0..=1000usize {
            assert!(t.lcm(n).is_multiple_of(t.primorial(n)), "P_{n} | d_{n}");
            if n >= 4 {
                assert!(
                    !t.primorial(n).is_multiple_of(t.lcm(n)),
                    "d_{n} does not divide P_{n}"
                );
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(9, 0), BigInt::from(1));
        assert_eq!(binomial(7, 9), BigInt::from(0));
    }

    #[test]
    fn pascal_and_multiplicative_agree() {
        let rows = pascal_rows(80);
        for (n, row) in rows.iter().enumerate() {
            assert_eq!(row, &binomial_row(n));
            for (k, c) in row.iter().enumerate() {
                assert_eq!(c, &binomial(n as u64, k as u64));
            }
        }
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_binomial_mod(7, 2, 3).unwrap(), 0);
        for p in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..p {
                assert_eq!(lucas_binomial_mod(p, k, p).unwrap(), 0);
            }
        }
        assert_eq!(lucas_binomial_mod(123, 123, 7).unwrap(), 1);
        assert_eq!(lucas_binomial_mod(5, 2, 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn lucas_matches_exact_binomials() {
        let rows = pascal_rows(200);
        for p in [2u64, 3, 5, 7, 11] {
            for (n, row) in rows.iter().enumerate() {
                for k in 0..=200usize {
                    let exact = row.get(k).map_or(0, |c| mod_floor_u64(c, p));
                    assert_eq!(lucas_binomial_mod(n as u64, k as u64, p).unwrap(), exact);
                }
            }
        }
    }

    #[test]
    fn chebyshev_range_sanity() {
        let t = primes_up_to(10_000).unwrap();
        let mut theta = 0.0f64;
        let mut it = t.primes().iter().peekable();
        for n in 1..=10_000u64 {
            while let Some(&&p) = it.peek() {
                if p > n {
                    break;
                }
                theta += (p as f64).ln();
                it.next();
            }
            if n >= 100 {
                let r = theta / n as f64;
                assert!((0.8..=1.2).contains(&r), "theta({n})/{n} = {r}");
            }
        }
    }

    #[test]
    fn rational_parsing() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("11/10").unwrap(), q(11, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational(" 3 ").unwrap(), q(3, 1));
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        for bad in ["1/0", "x", "1.", "1.2.3", ""] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }
}
