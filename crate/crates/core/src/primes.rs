//! Deterministic primality and prime selection avoiding a fixed integer.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

/// Bases making Miller–Rabin exact for every `n < 2^64`.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact primality for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `π ∤ u`, computed as a single remainder.
pub fn avoids(u: &BigUint, p: u64) -> bool {
    !(u % p).is_zero()
}

/// A prime chosen by [`find_prime_avoiding`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeChoice {
    pub prime: u64,
    /// `Y` with the prime in `(Y, 2Y]`, when the windowed search was requested.
    pub window: Option<u64>,
    /// Number of integers examined.
    pub candidates: u64,
}

fn start_above(lower: &BigInt) -> Result<u64> {
    if lower.is_negative() {
        return Ok(0);
    }
    lower
        .to_u64()
        .filter(|&v| v < 1 << 62)
        .ok_or_else(|| Error::Precondition(format!("prime search lower bound {lower} exceeds 2^62")))
}

/// The least prime `π > lower` with `π ∤ u`.
///
/// With `window_doubling` the search is reported in windows `(Y, 2Y]`
/// starting at `Y = lower` and doubling; the prime returned is the same.
pub fn find_prime_avoiding(u: &BigUint, lower: &BigInt, window_doubling: bool, limits: &Limits) -> Result<PrimeChoice> {
    if u.is_zero() {
        return Err(Error::Precondition("the avoided integer must be positive".into()));
    }
    let from = start_above(lower)?;
    let mut candidates = 0u64;
    let mut n = from;
    loop {
        n += 1;
        candidates += 1;
        if candidates > limits.prime_candidates {
            return Err(Error::SearchExhausted(format!(
                "no prime above {lower} avoids the target within {} candidates",
                limits.prime_candidates
            )));
        }
        if is_prime(n) && avoids(u, n) {
            let window = window_doubling.then(|| {
                let mut y = from.max(1);
                while n > 2 * y {
                    y *= 2;
                }
                y
            });
            return Ok(PrimeChoice {
                prime: n,
                window,
                candidates,
            });
        }
    }
}
