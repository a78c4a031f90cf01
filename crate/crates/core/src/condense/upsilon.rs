use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::PolySystem;
use crate::solutions::{for_each_tuple, Evaluator};

/// Product of a list of integers by balanced halving.
pub(crate) fn product(mut factors: Vec<BigUint>) -> BigUint {
    if factors.is_empty() {
        return BigUint::one();
    }
    while factors.len() > 1 {
        let mut next = Vec::with_capacity(factors.len().div_ceil(2));
        let mut it = factors.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a * b,
                None => a,
            });
        }
        factors = next;
    }
    factors.pop().expect("nonempty")
}

/// `|a_1 − a_2|` over ordered pairs of distinct elements.
fn difference_factors(set: &IntSet) -> Vec<BigUint> {
    let e = set.elements();
    let mut out = Vec::with_capacity(e.len() * e.len());
    for (i, a) in e.iter().enumerate() {
        for b in &e[i + 1..] {
            let d = (b - a).magnitude().clone();
            out.push(d.clone());
            out.push(d);
        }
    }
    out
}

/// `Υ(A;P)`: the product of `|a_1 − a_2|` over ordered distinct pairs times
/// the product of `Σ_i |P_i(a)|` over the non-solutions `a ∈ A^s`.
///
/// A prime avoiding `Υ` separates the elements of `A` and detects every
/// non-solution modulo itself.
pub fn compute_upsilon(set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<BigUint> {
    limits.check_power("upsilon card(A)^s", set.card(), system.num_vars())?;
    let mut factors = difference_factors(set);
    let ev = Evaluator::new(system, set.elements());
    let _ = for_each_tuple(set.card(), system.num_vars(), |idx| {
        let total: BigInt = (0..ev.num_polys()).map(|i| ev.eval(i, idx).abs()).sum();
        if !total.is_zero() {
            factors.push(total.into_parts().1);
        }
        ControlFlow::Continue(())
    });
    Ok(product(factors))
}

/// The variant used for nonlinear homogeneous systems: the difference
/// product times `|P_i(d)|` over every polynomial and every tuple on which
/// that polynomial does not vanish.
pub fn compute_upsilon_separate(set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<BigUint> {
    limits.check_power("upsilon card(D)^s", set.card(), system.num_vars())?;
    let mut factors = difference_factors(set);
    let ev = Evaluator::new(system, set.elements());
    let _ = for_each_tuple(set.card(), system.num_vars(), |idx| {
        for i in 0..ev.num_polys() {
            let v = ev.eval(i, idx);
            if !v.is_zero() {
                factors.push(v.into_parts().1);
            }
        }
        ControlFlow::Continue(())
    });
    Ok(product(factors))
}
