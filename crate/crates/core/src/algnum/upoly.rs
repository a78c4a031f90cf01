use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer polynomial in one variable, coefficients stored low degree first.
/// The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn from_ascending(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_descending(mut coeffs: Vec<BigInt>) -> Self {
        coeffs.reverse();
        Self::from_ascending(coeffs)
    }

    pub fn from_i64s_descending(coeffs: &[i64]) -> Self {
        Self::from_descending(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x − a`.
    pub fn linear_root(a: &BigInt) -> Self {
        UPoly::from_ascending(vec![-a, BigInt::one()])
    }

    /// `x^t − b`.
    pub fn binomial(t: u32, b: &BigInt) -> Self {
        let mut c = vec![BigInt::zero(); t as usize + 1];
        c[0] = -b;
        c[t as usize] += 1;
        UPoly::from_ascending(c)
    }

    pub fn ascending(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn descending(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Content 1 and positive leading coefficient.
    pub fn is_normalized(&self) -> bool {
        self.leading().is_some_and(|l| l.is_positive()) && self.content().is_one()
    }

    pub fn normalized(&self) -> Result<Self> {
        let lead = self
            .leading()
            .ok_or_else(|| Error::Precondition("zero polynomial".into()))?;
        let mut g = self.content();
        if lead.is_negative() {
            g = -g;
        }
        Ok(UPoly::from_ascending(self.coeffs.iter().map(|c| c / &g).collect()))
    }

    pub fn norm1(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn norm2_sq(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::from_ascending(Vec::new());
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::from_ascending(c)
    }

    /// `self / d` when the quotient has integer coefficients and the remainder is zero.
    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let dl = d.leading()?;
        let dd = d.coeffs.len() - 1;
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.coeffs.len() <= dd {
            return None;
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let (qk, rem) = r[k + dd].div_rem(dl);
            if !rem.is_zero() {
                return None;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] -= &qk * c;
            }
            q[k] = qk;
        }
        r.iter().all(Zero::is_zero).then(|| UPoly::from_ascending(q))
    }

    pub fn divides(&self, f: &UPoly) -> bool {
        f.div_exact(self).is_some()
    }

    pub(crate) fn to_f64s(&self) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| {
                c.to_f64()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Numerical("coefficient exceeds the floating-point range".into()))
            })
            .collect()
    }

    /// Horner value and the a priori rounding bound `4n·u·Σ|a_i||z|^i`.
    pub(crate) fn eval_complex(coeffs: &[f64], z: Complex64) -> (Complex64, f64) {
        let az = z.norm();
        let mut v = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for &c in coeffs.iter().rev() {
            v = v * z + c;
            mag = mag * az + c.abs();
        }
        let n = coeffs.len().max(1) as f64;
        (v, 4.0 * n * f64::EPSILON * mag)
    }

    pub(crate) fn derivative_f64(coeffs: &[f64]) -> Vec<f64> {
        coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
    }
}

impl fmt::Display for UPoly {
    /// Descending coefficients separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().rev().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `(F_n, L_n)`, Fibonacci and Lucas numbers, so that `φ^n = (L_n + F_n√5)/2`.
pub fn fibonacci_lucas(n: u32) -> (BigInt, BigInt) {
    let (mut f0, mut f1) = (BigInt::zero(), BigInt::one());
    let (mut l0, mut l1) = (BigInt::from(2), BigInt::one());
    for _ in 0..n {
        let f2 = &f0 + &f1;
        let l2 = &l0 + &l1;
        f0 = std::mem::replace(&mut f1, f2);
        l0 = std::mem::replace(&mut l1, l2);
    }
    (f0, l0)
}

/// Exact test of `‖r‖₂ ≤ φ^d ‖q‖₂` with `φ = (1+√5)/2`.
///
/// Squared: `2‖r‖² ≤ (L + F√5)‖q‖²` with `(F, L) = (F_{2d}, L_{2d})`.
pub fn granville_bound_holds(r: &UPoly, q: &UPoly, d: u32) -> bool {
    let (f, l) = fibonacci_lucas(2 * d);
    let n = q.norm2_sq();
    let lhs = BigInt::from(2) * r.norm2_sq() - &l * &n;
    if !lhs.is_positive() {
        return true;
    }
    let rhs = &f * &n;
    &lhs * &lhs <= BigInt::from(5) * &rhs * &rhs
}
