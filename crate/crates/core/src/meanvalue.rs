//! Vinogradov-type mean values `J_{s,k}(A)` and `J_{s,k}(A;φ)` by exact counting.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::{PolySystem, Polynomial, Term};
use crate::solutions::for_each_tuple;

/// `(Σ_i φ_1(x_i), …, Σ_i φ_k(x_i))` for an `s`-tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MomentVector(pub Vec<BigInt>);

/// `φ_j(t) = t^j` for `j = 1..k`.
pub fn power_phis(k: u32) -> Vec<Polynomial> {
    (1..=k)
        .map(|j| Polynomial::new(1, vec![Term::new(1, vec![j])]).expect("monomial"))
        .collect()
}

fn phi_table(set: &IntSet, phis: &[Polynomial]) -> Result<Vec<Vec<BigInt>>> {
    if phis.is_empty() {
        return Err(Error::Precondition("at least one φ is required".into()));
    }
    if let Some(p) = phis.iter().find(|p| p.num_vars() != 1) {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: p.num_vars(),
        });
    }
    set.elements()
        .iter()
        .map(|x| phis.iter().map(|p| p.eval(std::slice::from_ref(x))).collect())
        .collect()
}

/// Number of `s`-tuples over `A` with each moment vector.
pub fn moment_tally(
    set: &IntSet,
    s: usize,
    phis: &[Polynomial],
    limits: &Limits,
) -> Result<HashMap<MomentVector, u64>> {
    limits.check_power("moment tally card(A)^s", set.card(), s)?;
    let table = phi_table(set, phis)?;
    let k = phis.len();
    let mut tally: HashMap<MomentVector, u64> = HashMap::new();
    let _ = for_each_tuple(set.card(), s, |idx| {
        let mut v = vec![BigInt::zero(); k];
        for &i in idx {
            for (acc, x) in v.iter_mut().zip(&table[i]) {
                *acc += x;
            }
        }
        *tally.entry(MomentVector(v)).or_default() += 1;
        ControlFlow::Continue(())
    });
    Ok(tally)
}

/// `J_{s,k}(A;φ) = Σ_v N(v)²` over the moment tally.
pub fn count_j_phi(set: &IntSet, s: usize, phis: &[Polynomial], limits: &Limits) -> Result<u64> {
    let tally = moment_tally(set, s, phis, limits)?;
    tally.values().try_fold(0u64, |acc, &n| {
        n.checked_mul(n)
            .and_then(|sq| acc.checked_add(sq))
            .ok_or_else(|| Error::budget("J value", BigUint::from(u64::MAX) + 1u32, u64::MAX))
    })
}

/// `J_{s,k}(A)`: solutions of `Σ_{i≤s} x_i^j = Σ_{i≤s} x_{s+i}^j` for `1 ≤ j ≤ k`.
pub fn count_j(set: &IntSet, s: usize, k: u32, limits: &Limits) -> Result<u64> {
    count_j_phi(set, s, &power_phis(k), limits)
}

/// The same count by enumerating all `2s`-tuples directly.
pub fn count_j_phi_oracle(set: &IntSet, s: usize, phis: &[Polynomial], limits: &Limits) -> Result<u64> {
    limits.check_power("direct card(A)^{2s}", set.card(), 2 * s)?;
    let table = phi_table(set, phis)?;
    let mut total = 0u64;
    let _ = for_each_tuple(set.card(), 2 * s, |idx| {
        let hit = (0..phis.len()).all(|j| {
            let left: BigInt = idx[..s].iter().map(|&i| &table[i][j]).sum();
            let right: BigInt = idx[s..].iter().map(|&i| &table[i][j]).sum();
            left == right
        });
        total += u64::from(hit);
        ControlFlow::Continue(())
    });
    Ok(total)
}

pub fn count_j_oracle(set: &IntSet, s: usize, k: u32, limits: &Limits) -> Result<u64> {
    count_j_phi_oracle(set, s, &power_phis(k), limits)
}

/// The Vinogradov system in `2s` variables as a [`PolySystem`].
pub fn vinogradov_system(s: usize, k: u32) -> Result<PolySystem> {
    if s == 0 || k == 0 {
        return Err(Error::InvalidSystem("s and k must be positive".into()));
    }
    let polys = (1..=k)
        .map(|j| {
            let terms = (0..2 * s)
                .map(|v| {
                    let mut e = vec![0u32; 2 * s];
                    e[v] = j;
                    Term::new(if v < s { 1 } else { -1 }, e)
                })
                .collect();
            Polynomial::new(2 * s, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(2 * s, polys)
}

/// `{a − min A}`; its `env` equals the `diam` of the input.
pub fn translate_to_zero(set: &IntSet) -> IntSet {
    let m = set.min().clone();
    set.map(|a| a - &m).expect("translation is injective")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub card: usize,
    pub s: usize,
    pub k: u32,
    pub j: u64,
    /// `A^s`.
    pub lower: BigUint,
    /// `A^{2s}`.
    pub upper: BigUint,
    pub trivial_holds: bool,
    pub epsilon: f64,
    /// `diam^ε (A^s + A^{2s − k(k+1)/2})`, informational only.
    pub main_term_shape: f64,
    /// `J_{s,k}({1, …, A})` when within budget.
    pub consecutive_j: Option<u64>,
}

impl BoundReport {
    /// `J ≤ J_{s,k}({1,…,A})`, when the comparison value is available.
    pub fn at_most_consecutive(&self) -> Option<bool> {
        self.consecutive_j.map(|c| self.j <= c)
    }
}

/// Places a computed `J` against the trivial bounds, the shape of the
/// mean value estimate, and the consecutive-integer comparison value.
pub fn bound_report(set: &IntSet, s: usize, k: u32, j: u64, epsilon: f64, limits: &Limits) -> BoundReport {
    let a = set.card();
    let lower = BigUint::from(a).pow(s as u32);
    let upper = BigUint::from(a).pow(2 * s as u32);
    let jb = BigUint::from(j);
    let diam = set.diam().to_f64().unwrap_or(f64::INFINITY);
    let af = a as f64;
    let critical = 2.0 * s as f64 - (k as f64) * (k as f64 + 1.0) / 2.0;
    let main_term_shape = diam.powf(epsilon) * (af.powi(s as i32) + af.powf(critical));
    let consecutive = IntSet::new(1..=a as i64).expect("nonempty");
    let consecutive_j = count_j(&consecutive, s, k, limits).ok();
    BoundReport {
        card: a,
        s,
        k,
        j,
        trivial_holds: lower <= jb && jb <= upper,
        lower,
        upper,
        epsilon,
        main_term_shape,
        consecutive_j,
    }
}
