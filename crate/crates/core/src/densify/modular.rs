use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::condense::compute_upsilon_separate;
use crate::counting::{count_congruence_solutions, is_separable};
use crate::densify::{cofactors, omega_images};
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::{check_pow, Limits};
use crate::poly::PolySystem;
use crate::primes::{avoids, is_prime};
use crate::solutions::{decode_tuple, for_each_tuple, solution_set, solution_table, Evaluator};
use crate::verify::{Direction, SliceCounterexample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModularMethod {
    /// Every slice tuple of `(D^t)^s`.
    Exhaustive,
    /// Every tuple of `S(D;P)^t` is checked, then the congruence solutions
    /// over `E^s` are counted by meet in the middle and compared with `|S(D;P)|^t`.
    Counting,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularReport {
    pub holds: bool,
    pub method: ModularMethod,
    /// `π_1 ⋯ π_t`.
    pub modulus: BigUint,
    /// `|S(D;P)|^t`.
    pub expected: u64,
    /// Slice tuples whose images satisfy every congruence.
    pub congruence_solutions: u64,
    /// The first failing slice tuple, when one was located.
    pub counterexample: Option<SliceCounterexample>,
}

fn check_primes(set: &IntSet, system: &PolySystem, primes: &[u64], limits: &Limits) -> Result<()> {
    if primes.is_empty() {
        return Err(Error::Precondition("at least one prime is required".into()));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("primes must be distinct".into()));
    }
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let upsilon = compute_upsilon_separate(set, system, limits)?;
    if let Some(p) = primes.iter().find(|&&p| !avoids(&upsilon, p)) {
        return Err(Error::Precondition(format!("prime {p} divides Υ(D;P)")));
    }
    Ok(())
}

/// Decides whether, for every slice tuple, `(d_1, …, d_t) ∈ S(D;P)^t`
/// exactly when every `P_l(ω(d^{(1)}), …, ω(d^{(s)}))` vanishes modulo
/// `π_1 ⋯ π_t`, for a homogeneous system of any degree.
///
/// Runs exhaustively when `card(D)^{ts}` fits the budget, otherwise by
/// counting when the system is separable.
pub fn modular_preservation_check(
    set: &IntSet,
    system: &PolySystem,
    primes: &[u64],
    limits: &Limits,
) -> Result<ModularReport> {
    if !system.is_homogeneous() {
        return Err(Error::Precondition(
            "the modular check requires a homogeneous system".into(),
        ));
    }
    check_primes(set, system, primes, limits)?;
    let n = set.card();
    let t = primes.len();
    let s = system.num_vars();
    let modulus: BigUint = primes.iter().map(|&p| BigUint::from(p)).product();
    let images = omega_images(set, primes, limits)?;
    let mut distinct = images.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != images.len() {
        return Err(Error::VerificationFailed("ω is not injective on D^t".into()));
    }
    let base = solution_set(set, system, limits)?;
    let expected = check_pow("|S(D;P)|^t", base.len(), t, limits.enumeration)?;
    let exhaustive_cost = check_pow("modular check card(D)^{ts}", n, t * s, limits.enumeration);
    match exhaustive_cost {
        Ok(_) => exhaustive(set, system, primes, &images, modulus, expected, limits),
        Err(e) if e.is_budget() && is_separable(system) => {
            counting(set, system, primes, &images, &base, modulus, expected, limits)
        }
        Err(e) => Err(e),
    }
}

fn exhaustive(
    set: &IntSet,
    system: &PolySystem,
    primes: &[u64],
    images: &[BigInt],
    modulus: BigUint,
    expected: u64,
    limits: &Limits,
) -> Result<ModularReport> {
    let n = set.card();
    let t = primes.len();
    let s = system.num_vars();
    let m = BigInt::from(modulus.clone());
    let table = solution_table(set.elements(), system, limits)?;
    let dst = Evaluator::new(system, images);
    let mut digits: Vec<Vec<usize>> = Vec::with_capacity(images.len());
    let mut scratch = vec![0usize; t];
    for code in 0..images.len() {
        decode_tuple(code as u64, n, t, &mut scratch);
        digits.push(scratch.clone());
    }
    let mut row = vec![0usize; s];
    let mut congruent = 0u64;
    let mut counterexample = None;
    let _ = for_each_tuple(images.len(), s, |codes| {
        let before = (0..t).all(|i| {
            for (slot, &c) in row.iter_mut().zip(codes) {
                *slot = digits[c][i];
            }
            table[crate::solutions::encode_tuple(&row, n) as usize]
        });
        let after = (0..dst.num_polys()).all(|l| dst.eval(l, codes).mod_floor(&m).is_zero());
        congruent += u64::from(after);
        if before != after && counterexample.is_none() {
            counterexample = Some(SliceCounterexample {
                slices: codes
                    .iter()
                    .map(|&c| digits[c].iter().map(|&d| set.elements()[d].clone()).collect())
                    .collect(),
                image: codes.iter().map(|&c| images[c].clone()).collect(),
                direction: if before { Direction::Lost } else { Direction::Spurious },
            });
        }
        ControlFlow::Continue(())
    });
    Ok(ModularReport {
        holds: counterexample.is_none(),
        method: ModularMethod::Exhaustive,
        modulus,
        expected,
        congruence_solutions: congruent,
        counterexample,
    })
}

#[allow(clippy::too_many_arguments)]
fn counting(
    set: &IntSet,
    system: &PolySystem,
    primes: &[u64],
    images: &[BigInt],
    base: &crate::solutions::SolutionSet,
    modulus: BigUint,
    expected: u64,
    limits: &Limits,
) -> Result<ModularReport> {
    let t = primes.len();
    let s = system.num_vars();
    let m = BigInt::from(modulus.clone());
    let e = set.elements();
    let cof = cofactors(primes);
    let sols = base.index_tuples();
    let mut choice = vec![0usize; t];
    let mut y = vec![BigInt::zero(); s];
    let mut counterexample = None;
    for code in 0..expected {
        decode_tuple(code, sols.len(), t, &mut choice);
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = choice.iter().zip(&cof).map(|(&c, k)| &e[sols[c][j]] * k).sum();
        }
        let ok = system
            .polys()
            .iter()
            .map(|p| p.eval(&y))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|v| v.mod_floor(&m).is_zero());
        if !ok {
            counterexample = Some(SliceCounterexample {
                slices: (0..s)
                    .map(|j| choice.iter().map(|&c| e[sols[c][j]].clone()).collect())
                    .collect(),
                image: y.clone(),
                direction: Direction::Lost,
            });
            break;
        }
    }
    let congruent = count_congruence_solutions(images, system, &modulus, limits)?;
    Ok(ModularReport {
        holds: counterexample.is_none() && congruent == expected,
        method: ModularMethod::Counting,
        modulus,
        expected,
        congruence_solutions: congruent,
        counterexample,
    })
}
