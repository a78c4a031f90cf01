use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::condense::step::{finish_step, require_mode, Closeness, StepParts};
use crate::condense::{CondenseMode, CondenseStep};
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::PolySystem;
use crate::solutions::{decode_tuple, solution_table};

/// Machine-word view of a linear homogeneous system, used to screen
/// candidate moduli quickly before the exact re-check.
struct WordSystem {
    rows: Vec<Vec<i64>>,
    s: usize,
}

impl WordSystem {
    fn new(system: &PolySystem) -> Option<Self> {
        let rows = system
            .polys()
            .iter()
            .map(|p| {
                p.linear_coeffs()?
                    .iter()
                    .map(ToPrimitive::to_i64)
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(WordSystem {
            rows,
            s: system.num_vars(),
        })
    }

    /// Property (ii) for every non-solution tuple.
    fn detects_all(&self, images: &[i64], h: i64, solutions: &[bool], n: usize) -> bool {
        let mut idx = vec![0usize; self.s];
        for (code, &is_sol) in solutions.iter().enumerate() {
            if is_sol {
                continue;
            }
            decode_tuple(code as u64, n, self.s, &mut idx);
            let detected = self.rows.iter().any(|row| {
                let v: i128 = row.iter().zip(&idx).map(|(&c, &i)| c as i128 * images[i] as i128).sum();
                v.rem_euclid(h as i128) != 0
            });
            if !detected {
                return false;
            }
        }
        true
    }
}

/// Scans `h = 2, 3, …, h_cap` and then `ρ = 1, …, h−1` for the first
/// pair making `a ↦ [ρa mod h]` satisfy properties (i)–(iii), with (iii)
/// in the strict form `‖ρa/h‖ < 1/Λ`.
///
/// The chosen map is re-verified exactly before it is returned.
pub fn greedy_min_modulus(
    set: &IntSet,
    system: &PolySystem,
    h_cap: u64,
    limits: &Limits,
) -> Result<Option<CondenseStep>> {
    require_mode(system, CondenseMode::Greedy)?;
    let pairs = (h_cap as u128 * h_cap as u128) / 2;
    if pairs > limits.enumeration as u128 {
        return Err(Error::budget(
            "greedy (h, ρ) scan",
            BigUint::from(pairs),
            limits.enumeration,
        ));
    }
    if h_cap > i64::MAX as u64 / 4 {
        return Err(Error::Precondition("h_cap is too large".into()));
    }
    let words = WordSystem::new(system)
        .ok_or_else(|| Error::Precondition("greedy mode needs coefficients that fit in 64 bits".into()))?;
    let lambda = system
        .lambda()
        .to_i128()
        .ok_or_else(|| Error::Precondition("Λ is too large for greedy mode".into()))?;
    let n = set.card();
    let solutions = solution_table(set.elements(), system, limits)?;
    let mut residues = vec![0u64; n];
    let mut images = vec![0i64; n];
    let mut sorted = vec![0i64; n];
    for h in 2..=h_cap {
        let hb = BigInt::from(h);
        for (r, a) in residues.iter_mut().zip(set.elements()) {
            *r = a.mod_floor(&hb).to_u64().expect("below h");
        }
        'rho: for rho in 1..h {
            for (y, &r) in images.iter_mut().zip(&residues) {
                let m = ((rho as u128 * r as u128) % h as u128) as i64;
                *y = if 2 * m > h as i64 { m - h as i64 } else { m };
                if lambda * (*y as i128).abs() >= h as i128 {
                    continue 'rho;
                }
            }
            sorted.copy_from_slice(&images);
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            if !words.detects_all(&images, h as i64, &solutions, n) {
                continue;
            }
            let parts = StepParts {
                pi: None,
                window: None,
                rho,
                l: BigUint::one(),
                h: BigUint::from(h),
                mult: rho,
            };
            return finish_step(set, system, CondenseMode::Greedy, parts, Closeness::Strict, limits).map(Some);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::step::condense_step;
    use crate::condense::StepOutcome;
    use crate::poly::Polynomial;

    fn set(v: &[i64]) -> IntSet {
        IntSet::new(v.iter().copied()).unwrap()
    }

    fn sidon() -> PolySystem {
        PolySystem::single(Polynomial::linear(&[1, 1, -1, -1], 0).unwrap())
    }

    #[test]
    fn pair_with_lambda_two() {
        let p = PolySystem::single(Polynomial::linear(&[1, -1], 0).unwrap());
        let step = greedy_min_modulus(&set(&[0, 1]), &p, 100, &Limits::default())
            .unwrap()
            .unwrap();
        assert_eq!((step.h.clone(), step.rho), (BigUint::from(3u32), 1));
    }

    #[test]
    fn singletons() {
        let p = PolySystem::single(Polynomial::linear(&[1, -1], 0).unwrap());
        for a in [0, 4] {
            let step = greedy_min_modulus(&set(&[a]), &p, 100, &Limits::default())
                .unwrap()
                .unwrap();
            assert_eq!(step.h, BigUint::from(2u32));
        }
    }

    #[test]
    fn beats_homogeneous_on_spread_progression() {
        let d = 1_000_000_000_000i64;
        let a = set(&[0, d, 2 * d, 3 * d]);
        let l = Limits::default();
        let g = greedy_min_modulus(&a, &sidon(), 10_000, &l).unwrap().unwrap();
        let StepOutcome::Improved(t) = condense_step(&a, &sidon(), CondenseMode::Thm32, &l).unwrap() else {
            panic!("homogeneous step should improve");
        };
        assert!(g.h < t.h, "{} vs {}", g.h, t.h);
        // The image is a dilate of {0,1,2,3} up to sign.
        let img = g.map.image().unwrap();
        let e = img.elements();
        let gap = &e[1] - &e[0];
        assert!(e.windows(2).all(|w| &w[1] - &w[0] == gap));
    }
}
