//! Exact computation with primary pseudo-polynomials: integer sequences
//! `(a_n)` with `a_{n+p} = a_n (mod p)` for every prime `p`.
//!
//! The crate covers the binomial transform and its generating-series
//! identities, prefix certifiers (direct congruences and primorial
//! divisibility of the transform), the genuine-sequence constructor, the
//! EGF-reciprocal construction, guessing and verification of linear
//! recurrences with polynomial coefficients, and the effective constants
//! bounding such recurrences.

pub mod arith;
pub mod bounds;
pub mod certify;
pub mod construct;
pub mod egfinv;
pub mod error;
mod linalg;
pub mod real;
pub mod recur;
pub mod transforms;

pub use error::{Error, Result};
pub use transforms::{IntSequence, RationalSeries};
