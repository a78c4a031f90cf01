//! Outward-rounded `f64` intervals, enough to decide inequalities between
//! logarithms of very large integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Libm `ln` is accurate to about one ulp; this is a generous allowance.
const LN_SLACK_ULPS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(mut v: f64, n: u32) -> f64 {
    for _ in 0..n {
        v = v.next_down();
    }
    v
}

fn up(mut v: f64, n: u32) -> f64 {
    for _ in 0..n {
        v = v.next_up();
    }
    v
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn around(v: f64, ulps: u32) -> Self {
        Interval {
            lo: down(v, ulps),
            hi: up(v, ulps),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo / 2.0 + self.hi / 2.0
    }

    /// Division by an interval that excludes zero.
    pub fn try_div(self, o: Interval) -> Result<Interval> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Err(Error::Numerical("interval division by a range containing 0".into()));
        }
        let inv = Interval {
            lo: (1.0 / o.hi).next_down(),
            hi: (1.0 / o.lo).next_up(),
        };
        Ok(self * inv)
    }

    pub fn ln2() -> Interval {
        Interval::around(std::f64::consts::LN_2, 1)
    }

    /// Encloses the value of an exact rational.
    pub fn from_rational(q: &BigRational) -> Result<Interval> {
        let v = q
            .to_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Numerical(format!("{q} is not representable as f64")))?;
        Ok(Interval::around(v, 2))
    }

    pub fn from_u64(n: u64) -> Interval {
        let v = n as f64;
        if v as u64 == n {
            Interval::point(v)
        } else {
            Interval::around(v, 1)
        }
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, o: Interval) -> Interval {
        Interval {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, o: Interval) -> Interval {
        self + -o
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

/// Encloses `ln n` for `n ≥ 1` from the top 53 bits and the binary exponent.
pub fn ln_interval(n: &BigUint) -> Result<Interval> {
    if n.is_zero() {
        return Err(Error::Numerical("logarithm of zero".into()));
    }
    let bits = n.bits();
    if bits <= 53 {
        let v = n.to_u64().expect("fits") as f64;
        if v == 1.0 {
            return Ok(Interval::point(0.0));
        }
        return Ok(Interval::around(v.ln(), LN_SLACK_ULPS));
    }
    let shift = bits - 53;
    let m = (n >> shift).to_u64().expect("53 bits");
    let lo = down((m as f64).ln(), LN_SLACK_ULPS);
    let hi = up(((m + 1) as f64).ln(), LN_SLACK_ULPS);
    let scale = Interval::from_u64(shift) * Interval::ln2();
    Ok(Interval { lo, hi } + scale)
}

pub fn ln_interval_int(n: &BigInt) -> Result<Interval> {
    if !n.is_positive() {
        return Err(Error::Numerical(format!("logarithm of non-positive {n}")));
    }
    ln_interval(n.magnitude())
}

/// Outcome of comparing two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Holds,
    Fails,
    Undecided,
}

impl Decision {
    pub fn holds(self) -> bool {
        self == Decision::Holds
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Holds => "holds",
            Decision::Fails => "fails",
            Decision::Undecided => "undecided",
        })
    }
}

/// A certified comparison `left ≤ right` together with the evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub left: Interval,
    pub right: Interval,
    pub decision: Decision,
}

impl Comparison {
    /// Signed gap `right − left` measured between the inner interval ends.
    pub fn margin(&self) -> f64 {
        match self.decision {
            Decision::Fails => self.right.hi - self.left.lo,
            _ => self.right.lo - self.left.hi,
        }
    }

    /// Total enclosure width on both sides, the evaluation error.
    pub fn error(&self) -> f64 {
        self.left.width() + self.right.width()
    }
}

pub fn compare_le(left: Interval, right: Interval) -> Comparison {
    let decision = if left.hi <= right.lo {
        Decision::Holds
    } else if left.lo > right.hi {
        Decision::Fails
    } else {
        Decision::Undecided
    };
    Comparison { left, right, decision }
}

/// Strict `left < right`.
pub fn compare_lt(left: Interval, right: Interval) -> Comparison {
    let decision = if left.hi < right.lo {
        Decision::Holds
    } else if left.lo >= right.hi {
        Decision::Fails
    } else {
        Decision::Undecided
    };
    Comparison { left, right, decision }
}
