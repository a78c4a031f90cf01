//! Algebraic numbers given by a defining polynomial and a root index,
//! the algebraic enveloping radius, and condensation of diagonal systems
//! through `t`-th roots.
//!
//! Equation checking never touches floating point: for diagonal systems
//! every algebraic condition reduces to integer arithmetic on `t`-th powers.
//! Root approximations only order roots and separate elements.

mod diagonal;
mod roots;
mod upoly;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;

pub use diagonal::{
    condense_diagonal, is_algebraic_freiman_iso_diagonal, AlgMap, DiagonalCertificate, DiagonalCondensation,
    DiagonalImage, DiagonalOptions,
};
pub use roots::{binomial_roots, canonical_order, complex_roots, RootDisk};
pub use upoly::{fibonacci_lucas, granville_bound_holds, UPoly};

/// Coefficients of a trial divisor must stay below this for the rounding
/// step to be trusted.
const TRIAL_MAGNITUDE: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgNum {
    defining_poly: UPoly,
    root_index: usize,
    certified_minimal: bool,
}

impl AlgNum {
    pub fn new(defining_poly: UPoly, root_index: usize, certified_minimal: bool) -> Result<Self> {
        let deg = defining_poly
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Precondition("defining polynomial must have degree at least 1".into()))?;
        if !defining_poly.is_normalized() {
            return Err(Error::Precondition(format!(
                "defining polynomial {defining_poly} must have content 1 and positive leading coefficient"
            )));
        }
        if root_index >= deg {
            return Err(Error::Precondition(format!(
                "root index {root_index} out of range for degree {deg}"
            )));
        }
        Ok(AlgNum {
            defining_poly,
            root_index,
            certified_minimal,
        })
    }

    /// The rational integer `a`, as `x − a`.
    pub fn integer(a: &BigInt) -> Self {
        AlgNum {
            defining_poly: UPoly::linear_root(a),
            root_index: 0,
            certified_minimal: true,
        }
    }

    pub fn defining_poly(&self) -> &UPoly {
        &self.defining_poly
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn is_certified_minimal(&self) -> bool {
        self.certified_minimal
    }

    pub fn degree(&self) -> usize {
        self.defining_poly.degree().unwrap_or(0)
    }

    /// `‖m‖₁` of the defining polynomial.
    pub fn norm1(&self) -> BigInt {
        self.defining_poly.norm1()
    }

    /// The value when it is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        let c = self.defining_poly.ascending();
        (c.len() == 2 && c[1].is_one()).then(|| -&c[0])
    }

    /// A disk containing the selected root.
    pub fn approx(&self) -> Result<RootDisk> {
        let c = self.defining_poly.ascending();
        if c.len() == 2 {
            let q = num_rational::BigRational::new(-&c[0], c[1].clone());
            let v = q
                .to_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Numerical("root out of range".into()))?;
            return Ok(RootDisk {
                re: v,
                im: 0.0,
                radius: v.abs() * f64::EPSILON,
            });
        }
        Ok(complex_roots(&self.defining_poly)?[self.root_index])
    }
}

impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "poly: {} ; root: {} ; minimal: {}",
            self.defining_poly,
            self.root_index,
            if self.certified_minimal { "yes" } else { "no" }
        )
    }
}

impl FromStr for AlgNum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::parse(1, format!("{m} in algebraic number {s:?}"));
        let mut poly = None;
        let mut root = None;
        let mut minimal = None;
        for part in s.split(';') {
            let (key, value) = part.split_once(':').ok_or_else(|| bad("expected key: value"))?;
            let value = value.trim();
            match key.trim() {
                "poly" => {
                    let c = value
                        .split_whitespace()
                        .map(|w| w.parse::<BigInt>().map_err(|_| bad("bad coefficient")))
                        .collect::<Result<Vec<_>>>()?;
                    poly = Some(UPoly::from_descending(c));
                }
                "root" => root = Some(value.parse::<usize>().map_err(|_| bad("bad root index"))?),
                "minimal" => {
                    minimal = Some(match value {
                        "yes" => true,
                        "no" => false,
                        _ => return Err(bad("minimal must be yes or no")),
                    })
                }
                _ => return Err(bad("unknown key")),
            }
        }
        let (Some(p), Some(r), Some(m)) = (poly, root, minimal) else {
            return Err(bad("missing field"));
        };
        AlgNum::new(p, r, m)
    }
}

/// A finite set of pairwise distinct algebraic numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgSet {
    elements: Vec<AlgNum>,
}

/// `Env(𝒞)`, exact only when every element is certified minimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgEnv {
    pub value: BigInt,
    pub exact: bool,
}

impl AlgSet {
    /// Fails unless distinctness can be certified for every pair.
    pub fn new(elements: Vec<AlgNum>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut approx: Vec<Option<RootDisk>> = vec![None; elements.len()];
        for i in 0..elements.len() {
            for j in 0..i {
                let (a, b) = (&elements[i], &elements[j]);
                if a.defining_poly == b.defining_poly {
                    if a.root_index == b.root_index {
                        return Err(Error::NonBijective(format!("repeated element {a}")));
                    }
                    continue;
                }
                if a.certified_minimal && b.certified_minimal {
                    continue;
                }
                for k in [i, j] {
                    if approx[k].is_none() {
                        approx[k] = Some(elements[k].approx()?);
                    }
                }
                if !approx[i].unwrap().disjoint(&approx[j].unwrap()) {
                    return Err(Error::NonBijective(format!("cannot separate {a} from {b}")));
                }
            }
        }
        Ok(AlgSet { elements })
    }

    pub fn from_intset(set: &IntSet) -> Self {
        AlgSet {
            elements: set.elements().iter().map(AlgNum::integer).collect(),
        }
    }

    pub fn elements(&self) -> &[AlgNum] {
        &self.elements
    }

    pub fn card(&self) -> usize {
        self.elements.len()
    }

    /// `Π deg m_c`, an upper bound for the degree of the compositum.
    pub fn degree_bound(&self) -> BigUint {
        self.elements.iter().map(|c| BigUint::from(c.degree())).product()
    }
}

/// `max ‖m_c‖₁` over the set.
pub fn env_algebraic(set: &AlgSet) -> AlgEnv {
    AlgEnv {
        value: set.elements.iter().map(AlgNum::norm1).max().expect("nonempty"),
        exact: set.elements.iter().all(|c| c.certified_minimal),
    }
}

/// The principal `t`-th root of `b` with a divisor of `x^t − b` as defining
/// polynomial, minimal when the trial factorization is conclusive.
///
/// Perfect powers are peeled first (`b = c^e`, `e | t`). What remains is
/// decided exactly by the rational root test for `t ≤ 3`; for larger `t`
/// every product of candidate linear factors through the principal root is
/// tried in order of degree, and the first exact integer divisor is minimal.
pub fn certify_minimal_tth_root(b: &BigInt, t: u32, limits: &Limits) -> Result<AlgNum> {
    if t == 0 {
        return Err(Error::Precondition("t must be positive".into()));
    }
    if b.is_zero() {
        return AlgNum::new(UPoly::from_ascending(vec![BigInt::zero(), BigInt::one()]), 0, true);
    }
    if t == 1 {
        return Ok(AlgNum::integer(b));
    }
    if b.is_positive() || t % 2 == 1 {
        for e in (2..=t).rev().filter(|&e| t.is_multiple_of(e)) {
            if e.is_multiple_of(2) && b.is_negative() {
                continue;
            }
            let c = b.nth_root(e);
            if &c.pow(e) == b {
                return certify_minimal_tth_root(&c, t / e, limits);
            }
        }
    }
    let f = UPoly::binomial(t, b);
    let (roots, principal) = binomial_roots(b, t)?;
    let index_in = |subset: &[usize]| -> usize {
        let mut disks: Vec<(RootDisk, usize)> = subset.iter().map(|&k| (roots[k], k)).collect();
        let mut plain: Vec<RootDisk> = disks.iter().map(|d| d.0).collect();
        roots::snap(&mut plain);
        for (d, p) in disks.iter_mut().zip(plain) {
            d.0 = p;
        }
        disks.sort_by(|a, b| canonical_order(&a.0, &b.0));
        disks
            .iter()
            .position(|d| d.1 == principal)
            .expect("principal root in subset")
    };
    let all: Vec<usize> = (0..t as usize).collect();
    if t <= 3 {
        // No perfect t-th power, so no rational root: irreducible.
        return AlgNum::new(f, index_in(&all), true);
    }
    let r = roots::abs_root(b, t)?;
    if t > limits.factor_degree || (1.0 + r).powi(t as i32) > TRIAL_MAGNITUDE {
        return AlgNum::new(f, index_in(&all), false);
    }
    let others: Vec<usize> = all.iter().copied().filter(|&k| k != principal).collect();
    let mut masks: Vec<u32> = (0..1u32 << others.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let mut subset = vec![principal];
        subset.extend(
            others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &k)| k),
        );
        if let Some(g) = integer_product(&subset, &roots) {
            if f.div_exact(&g).is_some() {
                return AlgNum::new(g, index_in(&subset), true);
            }
        }
    }
    Err(Error::VerificationFailed(
        "x^t - b has no divisor through its own root".into(),
    ))
}

/// `Π (x − z_k)` rounded to integers, if every coefficient is near one.
fn integer_product(subset: &[usize], roots: &[RootDisk]) -> Option<UPoly> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &k in subset {
        let z = roots[k].center();
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * z;
        }
        c = next;
    }
    let mut out = Vec::with_capacity(c.len());
    for v in c {
        let rounded = v.re.round();
        if v.im.abs() > 0.25 || (v.re - rounded).abs() > 0.25 {
            return None;
        }
        out.push(BigInt::from(rounded as i64));
    }
    Some(UPoly::from_ascending(out))
}
