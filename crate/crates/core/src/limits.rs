use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Work caps shared by every exhaustive routine.
///
/// Each cap bounds a count that is known before the work starts, so an
/// operation either runs to completion or refuses up front.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of tuples any single enumeration may visit.
    pub enumeration: u64,
    /// Vertex cap for hypergraph isomorphism backtracking.
    pub hypergraph_vertices: usize,
    /// Maximum value of `(Λ+1)^A` for which `lcm[1, …, (Λ+1)^A]` is formed.
    pub lcm_range: u64,
    /// Maximum number of multipliers tried by the box-principle scan.
    pub rho_scan: u64,
    /// Maximum number of integers examined by a prime search.
    pub prime_candidates: u64,
    /// Maximum number of window doublings when collecting several primes.
    pub window_doublings: u32,
    /// Maximum cardinality of a materialized densified set.
    pub output_set: u64,
    /// Largest `t` for which `x^t - b` is factored to certify minimality.
    pub factor_degree: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 100_000_000,
            hypergraph_vertices: 8,
            lcm_range: 10_000,
            rho_scan: 1_000_000,
            prime_candidates: 10_000_000,
            window_doublings: 64,
            output_set: 1_000_000,
            factor_degree: 8,
        }
    }
}

impl Limits {
    pub fn with_enumeration(mut self, budget: u64) -> Self {
        self.enumeration = budget;
        self
    }

    /// Fails unless `base^exp` tuples fit in the enumeration budget.
    pub fn check_power(&self, what: &'static str, base: usize, exp: usize) -> Result<u64> {
        check_pow(what, base, exp, self.enumeration)
    }
}

/// `base^exp` as a `u64` if it does not exceed `limit`.
pub(crate) fn check_pow(what: &'static str, base: usize, exp: usize, limit: u64) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        match acc.checked_mul(base as u64) {
            Some(v) if v <= limit => acc = v,
            _ => {
                let required = BigUint::from(base).pow(exp as u32);
                return Err(Error::budget(what, required, limit));
            }
        }
    }
    Ok(acc)
}
