//! Exhaustive decision procedures for Freiman `P`-isomorphisms.

mod hypergraph;
mod map;

use std::fmt;
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::PolySystem;
use crate::solutions::{decode_tuple, encode_tuple, for_each_tuple, solution_table, Evaluator};

pub use hypergraph::{hypergraph_isomorphic, induced_map};
pub use map::{MapKind, MapTable};

/// Which side of the equivalence broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// A source solution whose image is not a solution.
    Lost,
    /// An image solution whose source tuple is not a solution.
    Spurious,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lost => "solution lost",
            Direction::Spurious => "spurious solution",
        })
    }
}

/// First violating tuple of a single map check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub tuple: Vec<BigInt>,
    pub image: Vec<BigInt>,
    pub direction: Direction,
}

/// First violating slice tuple of a `t`-fold check. `slices[j]` is the
/// `t`-tuple fed to the map in coordinate `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceCounterexample {
    pub slices: Vec<Vec<BigInt>>,
    pub image: Vec<BigInt>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<C = Counterexample> {
    Yes,
    No(C),
}

impl<C> Verdict<C> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn counterexample(&self) -> Option<&C> {
        match self {
            Verdict::Yes => None,
            Verdict::No(c) => Some(c),
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {:?} -> {:?}",
            self.direction,
            fmt_ints(&self.tuple),
            fmt_ints(&self.image)
        )
    }
}

impl fmt::Display for SliceCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slices: Vec<Vec<String>> = self.slices.iter().map(|s| fmt_ints(s)).collect();
        write!(
            f,
            "{}: slices {:?} -> {:?}",
            self.direction,
            slices,
            fmt_ints(&self.image)
        )
    }
}

fn fmt_ints(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Images of the elements of `set` under a single map, in element order.
pub(crate) fn images_on(psi: &MapTable, set: &IntSet) -> Result<Vec<BigInt>> {
    if psi.t() != 1 {
        return Err(Error::Precondition(format!(
            "expected a single map, got a {}-fold map",
            psi.t()
        )));
    }
    if psi.len() != set.card() {
        return Err(Error::NonBijective(format!(
            "map has {} entries but the set has {} elements",
            psi.len(),
            set.card()
        )));
    }
    set.elements()
        .iter()
        .map(|a| {
            psi.apply(a)
                .cloned()
                .ok_or_else(|| Error::NonBijective(format!("map is undefined at {a}")))
        })
        .collect()
}

/// Decides whether `psi` is a Freiman `P`-isomorphism on `set`: for every
/// `x ∈ A^s`, `x` solves `P` exactly when `ψ(x)` does.
///
/// Tuples are visited in lexicographic order, so a failure reports the
/// first violating tuple.
pub fn is_freiman_iso(psi: &MapTable, set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<Verdict> {
    let images = images_on(psi, set)?;
    let s = system.num_vars();
    limits.check_power("Freiman check card(A)^s", set.card(), s)?;
    let src = Evaluator::new(system, set.elements());
    let dst = Evaluator::new(system, &images);
    let mut found = None;
    let _ = for_each_tuple(set.card(), s, |idx| {
        let before = src.is_solution(idx);
        if before != dst.is_solution(idx) {
            found = Some(Counterexample {
                tuple: idx.iter().map(|&i| set.elements()[i].clone()).collect(),
                image: idx.iter().map(|&i| images[i].clone()).collect(),
                direction: if before { Direction::Lost } else { Direction::Spurious },
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(found.map_or(Verdict::Yes, Verdict::No))
}

/// Number of slice tuples a `t`-fold check visits: `card(D)^{ts}`.
pub fn tfold_check_cost(card: usize, t: usize, s: usize) -> BigUint {
    BigUint::from(card).pow((t * s) as u32)
}

/// Decides whether `omega: D^t → E` is a `t`-fold Freiman `P`-isomorphism:
/// `(x_1, …, x_t) ∈ S(D;P)^t` exactly when `(ω(x^{(1)}), …, ω(x^{(s)})) ∈ S(E;P)`,
/// where `x^{(j)} = (x_{1j}, …, x_{tj})`.
///
/// Visits all `card(D)^{ts}` slice tuples; see [`tfold_check_cost`].
pub fn is_tfold_freiman_iso(
    omega: &MapTable,
    set: &IntSet,
    system: &PolySystem,
    limits: &Limits,
) -> Result<Verdict<SliceCounterexample>> {
    let t = omega.t();
    let n = set.card();
    let s = system.num_vars();
    let domain = limits.check_power("t-fold domain card(D)^t", n, t)?;
    if omega.len() as u64 != domain {
        return Err(Error::NonBijective(format!(
            "t-fold map has {} entries, D^t has {domain}",
            omega.len()
        )));
    }
    limits.check_power("t-fold check card(D)^{ts}", n, t * s)?;

    // Image of every D^t tuple, indexed by its lexicographic code.
    let mut digits = vec![0usize; t];
    let mut key = vec![BigInt::default(); t];
    let mut images = Vec::with_capacity(domain as usize);
    let mut code_digits = Vec::with_capacity(domain as usize);
    for code in 0..domain {
        decode_tuple(code, n, t, &mut digits);
        for (slot, &d) in key.iter_mut().zip(&digits) {
            *slot = set.elements()[d].clone();
        }
        let v = omega
            .get(&key)
            .ok_or_else(|| Error::NonBijective(format!("t-fold map is undefined at {key:?}")))?;
        images.push(v.clone());
        code_digits.push(digits.clone());
    }

    let base = solution_table(set.elements(), system, limits)?;
    let dst = Evaluator::new(system, &images);
    let mut row = vec![0usize; s];
    let mut found = None;
    let _ = for_each_tuple(domain as usize, s, |codes| {
        let before = (0..t).all(|i| {
            for (slot, &c) in row.iter_mut().zip(codes) {
                *slot = code_digits[c][i];
            }
            base[encode_tuple(&row, n) as usize]
        });
        if before != dst.is_solution(codes) {
            found = Some(SliceCounterexample {
                slices: codes
                    .iter()
                    .map(|&c| code_digits[c].iter().map(|&d| set.elements()[d].clone()).collect())
                    .collect(),
                image: codes.iter().map(|&c| images[c].clone()).collect(),
                direction: if before { Direction::Lost } else { Direction::Spurious },
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(found.map_or(Verdict::Yes, Verdict::No))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn b(x: i64) -> BigInt {
        x.into()
    }

    fn set(v: &[i64]) -> IntSet {
        IntSet::new(v.iter().copied()).unwrap()
    }

    fn ap3() -> PolySystem {
        PolySystem::single(Polynomial::linear(&[1, 1, -2], 0).unwrap())
    }

    fn map(pairs: &[(i64, i64)]) -> MapTable {
        MapTable::single(pairs.iter().map(|&(a, v)| (b(a), b(v)))).unwrap()
    }

    /// `ω(d) = Σ d_i Π_{j≠i} π_j` built directly, independent of the densify module.
    fn omega_table(d: &IntSet, primes: &[i64]) -> Result<MapTable> {
        let t = primes.len();
        let n = d.card();
        let mut pairs = Vec::new();
        let mut digits = vec![0; t];
        for code in 0..(n as u64).pow(t as u32) {
            decode_tuple(code, n, t, &mut digits);
            let key: Vec<BigInt> = digits.iter().map(|&i| d.elements()[i].clone()).collect();
            let mut v = BigInt::default();
            for (i, k) in key.iter().enumerate() {
                let mut c = k.clone();
                for (j, &p) in primes.iter().enumerate() {
                    if j != i {
                        c *= p;
                    }
                }
                v += c;
            }
            pairs.push((key, v));
        }
        MapTable::tfold(t, pairs)
    }

    #[test]
    fn identity_is_iso() {
        let a = set(&[0, 100, 200]);
        let v = is_freiman_iso(&MapTable::identity(&a), &a, &ap3(), &Limits::default()).unwrap();
        assert!(v.is_yes());
    }

    #[test]
    fn rescaled_ap_is_iso() {
        let a = set(&[0, 100, 200]);
        let psi = map(&[(0, 0), (100, 1), (200, 2)]);
        assert!(is_freiman_iso(&psi, &a, &ap3(), &Limits::default()).unwrap().is_yes());
    }

    #[test]
    fn broken_ap_reports_first_lost_solution() {
        let a = set(&[0, 100, 200]);
        let psi = map(&[(0, 0), (100, 1), (200, 3)]);
        let v = is_freiman_iso(&psi, &a, &ap3(), &Limits::default()).unwrap();
        let c = v.counterexample().unwrap();
        assert_eq!(c.tuple, vec![b(0), b(200), b(100)]);
        assert_eq!(c.image, vec![b(0), b(3), b(1)]);
        assert_eq!(c.direction, Direction::Lost);
    }

    #[test]
    fn spurious_direction() {
        let a = set(&[0, 1, 3]);
        let psi = map(&[(0, 0), (1, 1), (3, 2)]);
        let c = is_freiman_iso(&psi, &a, &ap3(), &Limits::default()).unwrap();
        let c = c.counterexample().unwrap();
        assert_eq!(c.direction, Direction::Spurious);
        assert_eq!(c.tuple, vec![b(0), b(3), b(1)]);
    }

    #[test]
    fn partial_or_wrong_domain_rejected() {
        let a = set(&[0, 100, 200]);
        let psi = map(&[(0, 0), (100, 1)]);
        assert!(matches!(
            is_freiman_iso(&psi, &a, &ap3(), &Limits::default()),
            Err(Error::NonBijective(_))
        ));
        let psi = map(&[(0, 0), (100, 1), (300, 2)]);
        assert!(is_freiman_iso(&psi, &a, &ap3(), &Limits::default()).is_err());
    }

    #[test]
    fn one_fold_matches_single() {
        let a = set(&[0, 100, 200]);
        for img in [[0, 1, 2], [0, 1, 3], [5, 6, 7], [2, 0, 1]] {
            let single = map(&[(0, img[0]), (100, img[1]), (200, img[2])]);
            let one = MapTable::tfold(
                1,
                [(0, img[0]), (100, img[1]), (200, img[2])]
                    .iter()
                    .map(|&(k, v)| (vec![b(k)], b(v))),
            )
            .unwrap();
            let s = is_freiman_iso(&single, &a, &ap3(), &Limits::default())
                .unwrap()
                .is_yes();
            let t = is_tfold_freiman_iso(&one, &a, &ap3(), &Limits::default())
                .unwrap()
                .is_yes();
            assert_eq!(s, t, "image {img:?}");
        }
    }

    #[test]
    fn tfold_equality_system() {
        let d = set(&[0, 1]);
        let eq = PolySystem::single(Polynomial::linear(&[1, -1], 0).unwrap());
        let omega = omega_table(&d, &[5, 7]).unwrap();
        assert!(is_tfold_freiman_iso(&omega, &d, &eq, &Limits::default())
            .unwrap()
            .is_yes());
        let e = omega.image().unwrap();
        let sols = crate::solutions::solution_set(&e, &eq, &Limits::default()).unwrap();
        assert_eq!(sols.len(), 4);
    }

    #[test]
    fn tfold_ap_three_primes() {
        let d = set(&[0, 1, 3]);
        // Υ({0,1,3}) only has the prime factors 2, 3 and 5.
        let omega = omega_table(&d, &[7, 11, 13]).unwrap();
        assert!(is_tfold_freiman_iso(&omega, &d, &ap3(), &Limits::default())
            .unwrap()
            .is_yes());
        let e = omega.image().unwrap();
        assert_eq!(e.card(), 27);
        let sols = crate::solutions::solution_set(&e, &ap3(), &Limits::default()).unwrap();
        assert_eq!(sols.len(), 27);
    }

    #[test]
    fn tfold_detects_bad_primes() {
        // 2 divides 3 - 1, so ω is not even injective.
        let d = set(&[0, 1, 3]);
        assert!(matches!(omega_table(&d, &[2, 3]), Err(Error::NonBijective(_))));

        // 5 divides Υ through 3 + 3 - 2·... non-solutions; injective but not an isomorphism.
        let d = set(&[0, 1, 4]);
        let omega = omega_table(&d, &[3, 5]).unwrap();
        let v = is_tfold_freiman_iso(&omega, &d, &ap3(), &Limits::default()).unwrap();
        assert!(!v.is_yes());
    }
}
