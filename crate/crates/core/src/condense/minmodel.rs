use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::PolySystem;
use crate::solutions::build_hypergraph;
use crate::verify::{hypergraph_isomorphic, induced_map, MapTable};

/// A smallest-`env` set whose solution hypergraph is isomorphic to the input's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinModel {
    pub witness: IntSet,
    /// `env*(A;P)`, the enveloping radius of the witness.
    pub env: BigInt,
    pub map: MapTable,
    /// Number of candidate sets examined.
    pub candidates: u64,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Advances `c` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Searches `R = 1, 2, …, env_cap` and, for each, the `card(A)`-subsets of
/// `[−(R−1), R−1]` in lexicographic order, returning the first whose
/// solution hypergraph is isomorphic to that of `A`.
///
/// Subsets that avoid both `±(R−1)` were already seen at a smaller `R`
/// and are skipped, which does not change the first hit. The work of each
/// radius is charged to the budget before that radius is searched.
pub fn exact_min_model(set: &IntSet, system: &PolySystem, env_cap: u64, limits: &Limits) -> Result<MinModel> {
    let k = set.card();
    if k > limits.hypergraph_vertices {
        return Err(Error::budget(
            "hypergraph vertices",
            k as u64,
            limits.hypergraph_vertices as u64,
        ));
    }
    let per = limits.check_power("min-model card(A)^s", k, system.num_vars())? as u128;
    // `A` itself lies in `[−(env−1), env−1]`, so the search never needs a larger radius.
    let env_cap = env_cap.min(set.env().to_u64().unwrap_or(u64::MAX));
    let mut work: u128 = 0;

    let target = build_hypergraph(set, system, limits)?;
    let mut candidates = 0u64;
    for r in 1..=env_cap {
        let width = (2 * r - 1) as usize;
        if width < k {
            continue;
        }
        work += binomial(2 * r - 1, k as u64) * per;
        if work > limits.enumeration as u128 {
            return Err(Error::budget(
                "min-model search",
                BigUint::from(work),
                limits.enumeration,
            ));
        }
        let lo = -(r as i64 - 1);
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            let touches_edge = comb[0] == 0 || comb[k - 1] == width - 1;
            if touches_edge {
                candidates += 1;
                let cand = IntSet::new(comb.iter().map(|&i| lo + i as i64))?;
                let g = build_hypergraph(&cand, system, limits)?;
                if let Some(forward) = hypergraph_isomorphic(&target, &g, limits)? {
                    let map = induced_map(&target, &g, &forward)?;
                    return Ok(MinModel {
                        env: cand.env(),
                        witness: cand,
                        map,
                        candidates,
                    });
                }
            }
            if !next_combination(&mut comb, width) {
                break;
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no isomorphic set with env ≤ {env_cap}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::env_floor;
    use crate::poly::Polynomial;
    use crate::verify::is_freiman_iso;

    fn set(v: &[i64]) -> IntSet {
        IntSet::new(v.iter().copied()).unwrap()
    }

    fn ap() -> PolySystem {
        PolySystem::single(Polynomial::linear(&[1, 1, -2], 0).unwrap())
    }

    #[test]
    fn spread_triple() {
        let l = Limits::default();
        let m = exact_min_model(&set(&[0, 100, 200]), &ap(), 10, &l).unwrap();
        assert_eq!(m.env, BigInt::from(2));
        assert_eq!(m.witness, set(&[-1, 0, 1]));
        assert!(is_freiman_iso(&m.map, &set(&[0, 100, 200]), &ap(), &l)
            .unwrap()
            .is_yes());
    }

    #[test]
    fn consecutive_sets_meet_the_floor() {
        let l = Limits::default();
        for a in 1..=5usize {
            let s = IntSet::new(0..a as i64).unwrap();
            let m = exact_min_model(&s, &ap(), 10, &l).unwrap();
            assert_eq!(m.env, env_floor(a), "A = {a}");
        }
    }

    #[test]
    fn singleton() {
        let m = exact_min_model(&set(&[42]), &ap(), 3, &Limits::default()).unwrap();
        assert_eq!(m.witness, set(&[0]));
    }

    #[test]
    fn exhausted_cap() {
        let e = exact_min_model(&set(&[0, 1, 3, 7]), &ap(), 2, &Limits::default()).unwrap_err();
        assert!(e.is_budget());
    }

    #[test]
    fn budget_is_charged_per_radius() {
        let l = Limits::default();
        let m = exact_min_model(&set(&[0, 100, 200]), &ap(), 1_000_000, &l).unwrap();
        assert_eq!(m.env, BigInt::from(2));
        let tight = Limits::default().with_enumeration(200);
        let e = exact_min_model(&set(&[0, 1, 3, 7, 15]), &ap(), 64, &tight).unwrap_err();
        assert!(matches!(e, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(binomial(9, 5), 126);
    }
}
