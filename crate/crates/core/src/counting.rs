//! Solution counts by meet in the middle for separable systems.
//!
//! A system is separable when every term involves at most one variable, so
//! each `P_i(y)` splits as `c_i + Σ_j f_ij(y_j)`. The `s` coordinates are
//! then split into two halves whose partial sums are matched through a tally.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::limits::Limits;
use crate::poly::PolySystem;
use crate::solutions::{for_each_tuple, Evaluator};

pub fn is_separable(system: &PolySystem) -> bool {
    system
        .polys()
        .iter()
        .all(|p| p.terms().iter().all(|t| t.exps.iter().filter(|&&e| e > 0).count() <= 1))
}

/// `f_ij(v)` for every variable `j`, ground value `v` and polynomial `i`,
/// plus the constants `c_i`.
struct Split {
    /// `table[j][v][i]`.
    table: Vec<Vec<Vec<BigInt>>>,
    constants: Vec<BigInt>,
}

impl Split {
    fn new(system: &PolySystem, values: &[BigInt], modulus: Option<&BigInt>) -> Self {
        let s = system.num_vars();
        let r = system.num_polys();
        let reduce = |x: BigInt| match modulus {
            Some(m) => x.mod_floor(m),
            None => x,
        };
        let mut table = vec![vec![vec![BigInt::zero(); r]; values.len()]; s];
        let mut constants = vec![BigInt::zero(); r];
        for (i, p) in system.polys().iter().enumerate() {
            for t in p.terms() {
                match t.exps.iter().position(|&e| e > 0) {
                    None => constants[i] += &t.coeff,
                    Some(j) => {
                        for (v, val) in values.iter().enumerate() {
                            table[j][v][i] += &t.coeff * val.pow(t.exps[j]);
                        }
                    }
                }
            }
        }
        for row in table.iter_mut().flatten() {
            for x in row.iter_mut() {
                *x = reduce(std::mem::take(x));
            }
        }
        let constants = constants.into_iter().map(reduce).collect();
        Split { table, constants }
    }

    fn partial(
        &self,
        vars: std::ops::Range<usize>,
        idx: &[usize],
        start: &[BigInt],
        modulus: Option<&BigInt>,
    ) -> Vec<BigInt> {
        let mut acc = start.to_vec();
        for (j, &v) in vars.zip(idx) {
            for (a, f) in acc.iter_mut().zip(&self.table[j][v]) {
                *a += f;
            }
        }
        if let Some(m) = modulus {
            for a in acc.iter_mut() {
                *a = a.mod_floor(m);
            }
        }
        acc
    }
}

fn mitm(values: &[BigInt], system: &PolySystem, modulus: Option<&BigInt>, limits: &Limits) -> Result<u64> {
    let s = system.num_vars();
    let n = values.len();
    let left = s / 2;
    let right = s - left;
    limits.check_power("meet-in-the-middle half card^⌈s/2⌉", n, right)?;
    let split = Split::new(system, values, modulus);
    let r = system.num_polys();
    let mut tally: HashMap<Vec<BigInt>, u64> = HashMap::new();
    let _ = for_each_tuple(n, left, |idx| {
        *tally
            .entry(split.partial(0..left, idx, &split.constants, modulus))
            .or_default() += 1;
        ControlFlow::Continue(())
    });
    let zero = vec![BigInt::zero(); r];
    let mut total = 0u64;
    let _ = for_each_tuple(n, right, |idx| {
        let mut key = split.partial(left..s, idx, &zero, modulus);
        for k in key.iter_mut() {
            *k = match modulus {
                Some(m) => (-std::mem::take(k)).mod_floor(m),
                None => -std::mem::take(k),
            };
        }
        total += tally.get(&key).copied().unwrap_or(0);
        ControlFlow::Continue(())
    });
    Ok(total)
}

fn brute(values: &[BigInt], system: &PolySystem, modulus: Option<&BigInt>, limits: &Limits) -> Result<u64> {
    limits.check_power("solution count card^s", values.len(), system.num_vars())?;
    let ev = Evaluator::new(system, values);
    let mut total = 0u64;
    let _ = for_each_tuple(values.len(), system.num_vars(), |idx| {
        let hit = (0..ev.num_polys()).all(|i| {
            let v = ev.eval(i, idx);
            match modulus {
                Some(m) => v.mod_floor(m).is_zero(),
                None => v.is_zero(),
            }
        });
        total += u64::from(hit);
        ControlFlow::Continue(())
    });
    Ok(total)
}

/// `|S(values;P)|`, by meet in the middle when the system is separable.
pub fn count_solutions(values: &[BigInt], system: &PolySystem, limits: &Limits) -> Result<u64> {
    if is_separable(system) {
        mitm(values, system, None, limits)
    } else {
        brute(values, system, None, limits)
    }
}

/// Number of `y ∈ values^s` with `P_i(y) ≡ 0 (mod m)` for every `i`.
pub fn count_congruence_solutions(
    values: &[BigInt],
    system: &PolySystem,
    modulus: &BigUint,
    limits: &Limits,
) -> Result<u64> {
    let m = BigInt::from(modulus.clone());
    if m <= BigInt::one() {
        return brute(values, system, Some(&BigInt::one()), limits);
    }
    if is_separable(system) {
        mitm(values, system, Some(&m), limits)
    } else {
        brute(values, system, Some(&m), limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Polynomial, Term};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn squares4() -> PolySystem {
        PolySystem::single(Polynomial::diagonal(&[1, 1, -1, -1], 2).unwrap())
    }

    #[test]
    fn separability() {
        assert!(is_separable(&squares4()));
        let mixed =
            PolySystem::single(Polynomial::new(2, vec![Term::new(1, vec![1, 1]), Term::new(-1, vec![0, 0])]).unwrap());
        assert!(!is_separable(&mixed));
    }

    #[test]
    fn pythagorean_count() {
        let v = ints(&[0, 3, 4, 5]);
        let l = Limits::default();
        assert_eq!(count_solutions(&v, &squares4(), &l).unwrap(), 36);
        assert_eq!(brute(&v, &squares4(), None, &l).unwrap(), 36);
    }

    #[test]
    fn mitm_matches_brute() {
        let l = Limits::default();
        let systems = [
            PolySystem::linear(&[(&[1, 1, -2], 0)]).unwrap(),
            PolySystem::linear(&[(&[1, 1, -1, -1], 0), (&[1, -1, 0, 0], 0)]).unwrap(),
            PolySystem::linear(&[(&[2, -1], 3)]).unwrap(),
            PolySystem::linear(&[(&[1], 5)]).unwrap(),
            squares4(),
            PolySystem::single(Polynomial::diagonal(&[1, 1, 1, -1, -1, -1], 3).unwrap()),
        ];
        let sets = [
            ints(&[0, 1, 3, 7]),
            ints(&[-4, -1, 2, 5, 8]),
            ints(&[1, 2, 3]),
            ints(&[5, 10, 13]),
        ];
        for p in &systems {
            for v in &sets {
                assert_eq!(mitm(v, p, None, &l).unwrap(), brute(v, p, None, &l).unwrap(), "{p}");
                for m in [1u32, 2, 7, 35] {
                    let mb = BigInt::from(m);
                    assert_eq!(
                        count_congruence_solutions(v, p, &BigUint::from(m), &l).unwrap(),
                        brute(v, p, Some(&mb), &l).unwrap(),
                        "{p} mod {m}"
                    );
                }
            }
        }
    }
}
