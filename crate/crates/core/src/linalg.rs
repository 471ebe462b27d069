//! Exact integer linear algebra for small dense systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::mod_floor_u64;

/// `2^62 - 57`, the largest prime below `2^62`.
pub const PREFILTER_PRIME: u64 = 4_611_686_018_427_387_847;

fn content(row: &[BigInt]) -> BigInt {
    row.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn divide_content(row: &mut [BigInt]) {
    let g = content(row);
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// Rank of the matrix reduced modulo the prime `p`.
pub fn rank_mod_p(rows: &[Vec<BigInt>], ncols: usize, p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| mod_floor_u64(x, p)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for i in rank + 1..m.len() {
            if m[i][col] == 0 {
                continue;
            }
            let f = (m[i][col] as u128 * inv as u128 % p as u128) as u64;
            for k in col..ncols {
                let sub = (f as u128 * m[rank][k] as u128 % p as u128) as u64;
                m[i][k] = (m[i][k] + p - sub) % p;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Integer basis of the right nullspace, one vector per free column in
/// ascending column order, each with content 1.
///
/// Fraction-free Gauss-Jordan: rows are combined by cross multiplication and
/// divided by their content after every step.
pub fn nullspace(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        // smallest nonzero entry keeps intermediate growth down
        let piv = (r..m.len())
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].bits());
        let Some(piv) = piv else { continue };
        m.swap(r, piv);
        for i in 0..m.len() {
            if i == r || m[i][col].is_zero() {
                continue;
            }
            let g = m[i][col].gcd(&m[r][col]);
            let fi = &m[r][col] / &g;
            let fr = &m[i][col] / &g;
            let (head, tail) = m.split_at_mut(i.max(r));
            let (row_i, row_r) = if i < r {
                (&mut head[i], &tail[0])
            } else {
                (&mut tail[0], &head[r])
            };
            for k in 0..ncols {
                row_i[k] = &row_i[k] * &fi - &row_r[k] * &fr;
            }
            divide_content(row_i);
        }
        pivots.push((r, col));
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut scale = BigInt::one();
        for &(row, col) in &pivots {
            if !m[row][free].is_zero() {
                scale = scale.lcm(&m[row][col]);
            }
        }
        let mut v = vec![BigInt::zero(); ncols];
        v[free] = scale.clone();
        for &(row, col) in &pivots {
            if !m[row][free].is_zero() {
                v[col] = -(&m[row][free] * &scale) / &m[row][col];
            }
        }
        divide_content(&mut v);
        if v.iter()
            .rev()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_negative())
        {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
        basis.push(v);
    }
    basis
}
