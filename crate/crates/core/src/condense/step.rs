use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::condense::upsilon::compute_upsilon;
use crate::condense::{CondenseMode, CondenseStep, StepOutcome};
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::{check_pow, Limits};
use crate::poly::PolySystem;
use crate::primes::{find_prime_avoiding, is_prime};
use crate::solutions::{for_each_tuple, Evaluator};
use crate::verify::{is_freiman_iso, MapTable};

/// The numerically least residue of `x` modulo `h`: the `m ≡ x (mod h)`
/// with `−h/2 < m ≤ h/2`.
pub fn least_residue(x: &BigInt, h: &BigInt) -> BigInt {
    let m = x.mod_floor(h);
    if (&m << 1u32) > *h {
        m - h
    } else {
        m
    }
}

/// `lcm[1, 2, …, n]` as a product of maximal prime powers.
pub fn lcm_upto(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for p in 2..=n {
        if !is_prime(p) {
            continue;
        }
        let mut q = p;
        while q <= n / p {
            q *= p;
        }
        acc *= q;
    }
    acc
}

/// Least `ρ ∈ [1, rho_cap]` with `‖ρa/M‖ ≤ 1/(Λ+1)` for every `a` in the
/// set, where `M` is `modulus`.
///
/// The distance to the nearest integer is compared exactly:
/// `‖ρa/M‖ ≤ 1/(Λ+1)` iff `(Λ+1)·min(r, M−r) ≤ M` with `r = ρa mod M`.
pub fn box_principle_rho(
    set: &IntSet,
    modulus: &BigUint,
    lambda: &BigUint,
    rho_cap: u64,
    limits: &Limits,
) -> Result<Option<u64>> {
    if rho_cap == 0 {
        return Err(Error::Precondition("rho_cap must be at least 1".into()));
    }
    if rho_cap > limits.rho_scan {
        return Err(Error::budget("box-principle scan", rho_cap, limits.rho_scan));
    }
    if modulus.is_zero() {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let m = BigInt::from(modulus.clone());
    let scale = BigInt::from(lambda.clone()) + 1;
    let steps: Vec<BigInt> = set.elements().iter().map(|a| a.mod_floor(&m)).collect();
    let mut r = steps.clone();
    for rho in 1..=rho_cap {
        let ok = r.iter().all(|x| {
            let d = std::cmp::min(x.clone(), &m - x);
            &scale * d <= m
        });
        if ok {
            return Ok(Some(rho));
        }
        for (x, a) in r.iter_mut().zip(&steps) {
            *x += a;
            if *x >= m {
                *x -= &m;
            }
        }
    }
    Ok(None)
}

/// How property (iii) is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Closeness {
    /// `‖ψ(a)/h‖ ≤ 1/(Λ+1)`, as produced by the box principle.
    BoxPrinciple,
    /// `‖ψ(a)/h‖ < 1/Λ`.
    Strict,
}

/// Re-checks properties (i)–(iii) for images that are least residues mod
/// `h`, plus `|P_i(ψ(a))| < h` on every solution `a`.
pub(crate) fn check_properties(
    set: &IntSet,
    images: &[BigInt],
    system: &PolySystem,
    h: &BigInt,
    closeness: Closeness,
    limits: &Limits,
) -> Result<()> {
    let lambda = system.lambda();
    let half = h.clone();
    for y in images {
        if (y << 1u32) > half || (y << 1u32) <= -&half {
            return Err(Error::VerificationFailed(format!("{y} is not a least residue mod {h}")));
        }
        let ok = match closeness {
            Closeness::BoxPrinciple => (&lambda + 1) * y.abs() <= *h,
            Closeness::Strict => &lambda * y.abs() < *h,
        };
        if !ok {
            return Err(Error::VerificationFailed(format!(
                "property (iii) fails at image {y} mod {h}"
            )));
        }
    }
    let mut sorted: Vec<&BigInt> = images.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::VerificationFailed(format!("property (i) fails mod {h}")));
    }
    limits.check_power("property check card(A)^s", set.card(), system.num_vars())?;
    let src = Evaluator::new(system, set.elements());
    let dst = Evaluator::new(system, images);
    let mut failure = None;
    let _ = for_each_tuple(set.card(), system.num_vars(), |idx| {
        if src.is_solution(idx) {
            for i in 0..dst.num_polys() {
                let v = dst.eval(i, idx);
                if v.abs() >= *h {
                    failure = Some(format!(
                        "|P_{}| = {} is not below h = {h} on a solution",
                        i + 1,
                        v.abs()
                    ));
                    return ControlFlow::Break(());
                }
            }
        } else if (0..dst.num_polys()).all(|i| dst.eval(i, idx).mod_floor(h).is_zero()) {
            failure = Some(format!("property (ii) fails mod {h} at index tuple {idx:?}"));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    match failure {
        Some(msg) => Err(Error::VerificationFailed(msg)),
        None => Ok(()),
    }
}

/// `(Λ+1)^A` as a `u64`, bounded by `limit`.
pub(crate) fn box_cap(system: &PolySystem, card: usize, limit: u64) -> Result<u64> {
    let lambda = system
        .lambda()
        .to_usize()
        .ok_or_else(|| Error::budget("(Λ+1)^A", BigUint::from(u64::MAX), limit))?;
    check_pow("(Λ+1)^A", lambda + 1, card, limit)
}

/// Builds the single map `a ↦ [mult·a mod h]`, re-checks all properties and
/// the Freiman property, and packages the step.
pub(crate) fn finish_step(
    set: &IntSet,
    system: &PolySystem,
    mode: CondenseMode,
    parts: StepParts,
    closeness: Closeness,
    limits: &Limits,
) -> Result<CondenseStep> {
    let h = BigInt::from(parts.h.clone());
    let mult = BigInt::from(parts.mult);
    let images: Vec<BigInt> = set.elements().iter().map(|a| least_residue(&(&mult * a), &h)).collect();
    check_properties(set, &images, system, &h, closeness, limits)?;
    let map = MapTable::single(set.elements().iter().cloned().zip(images.iter().cloned()))
        .map_err(|e| Error::VerificationFailed(format!("step map is not injective: {e}")))?;
    if !is_freiman_iso(&map, set, system, limits)?.is_yes() {
        return Err(Error::VerificationFailed(format!(
            "{mode} step with h = {h} is not a Freiman isomorphism"
        )));
    }
    let env_after = map.image()?.env();
    Ok(CondenseStep {
        mode,
        pi: parts.pi,
        prime_window: parts.window,
        rho: parts.rho,
        l: parts.l,
        h: parts.h,
        map,
        env_before: set.env(),
        env_after,
    })
}

pub(crate) struct StepParts {
    pub pi: Option<u64>,
    pub window: Option<u64>,
    pub rho: u64,
    pub l: BigUint,
    pub h: BigUint,
    /// Multiplier applied before reduction: `1` for the inhomogeneous step, `ρ` otherwise.
    pub mult: u64,
}

fn inhomogeneous_parts(set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<StepParts> {
    let cap = box_cap(system, set.card(), limits.lcm_range.min(limits.rho_scan))?;
    let upsilon = compute_upsilon(set, system, limits)?;
    let choice = find_prime_avoiding(&upsilon, &system.lambda(), true, limits)?;
    let l = lcm_upto(cap);
    let modulus = &l * choice.prime;
    let lambda = system.lambda().into_parts().1;
    let rho = box_principle_rho(set, &modulus, &lambda, cap, limits)?
        .ok_or_else(|| Error::VerificationFailed(format!("no multiplier up to {cap} satisfies the box principle")))?;
    let h = &modulus / rho;
    Ok(StepParts {
        pi: Some(choice.prime),
        window: choice.window,
        rho,
        l,
        h,
        mult: 1,
    })
}

fn homogeneous_parts(set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<StepParts> {
    let cap = box_cap(system, set.card(), limits.rho_scan)?;
    let upsilon = compute_upsilon(set, system, limits)?;
    let choice = find_prime_avoiding(&upsilon, &BigInt::from(cap), true, limits)?;
    let modulus = BigUint::from(choice.prime);
    let lambda = system.lambda().into_parts().1;
    let rho = box_principle_rho(set, &modulus, &lambda, cap, limits)?
        .ok_or_else(|| Error::VerificationFailed(format!("no multiplier up to {cap} satisfies the box principle")))?;
    Ok(StepParts {
        pi: Some(choice.prime),
        window: choice.window,
        rho,
        l: BigUint::one(),
        h: modulus,
        mult: rho,
    })
}

pub(crate) fn require_mode(system: &PolySystem, mode: CondenseMode) -> Result<()> {
    if !system.is_linear() {
        return Err(Error::Precondition("condensation requires a linear system".into()));
    }
    if mode != CondenseMode::Thm31 && !system.is_homogeneous() {
        return Err(Error::Precondition(format!(
            "{mode} mode requires a homogeneous system"
        )));
    }
    Ok(())
}

/// One condensation step in the given mode.
///
/// Every emitted map has been re-checked against properties (i)–(iii) and
/// by [`is_freiman_iso`]; a failed re-check is reported as
/// [`Error::VerificationFailed`].
pub fn condense_step(set: &IntSet, system: &PolySystem, mode: CondenseMode, limits: &Limits) -> Result<StepOutcome> {
    condense_step_with(set, system, mode, crate::condense::DEFAULT_H_CAP, limits)
}

pub fn condense_step_with(
    set: &IntSet,
    system: &PolySystem,
    mode: CondenseMode,
    h_cap: u64,
    limits: &Limits,
) -> Result<StepOutcome> {
    require_mode(system, mode)?;
    let step = match mode {
        CondenseMode::Thm31 => {
            let parts = inhomogeneous_parts(set, system, limits)?;
            finish_step(set, system, mode, parts, Closeness::BoxPrinciple, limits)?
        }
        CondenseMode::Thm32 => {
            let parts = homogeneous_parts(set, system, limits)?;
            finish_step(set, system, mode, parts, Closeness::BoxPrinciple, limits)?
        }
        CondenseMode::Greedy => match crate::condense::greedy::greedy_min_modulus(set, system, h_cap, limits)? {
            Some(step) => step,
            None => return Ok(StepOutcome::NoImprovement(None)),
        },
    };
    Ok(if step.env_after < step.env_before {
        StepOutcome::Improved(step)
    } else {
        StepOutcome::NoImprovement(Some(Box::new(step)))
    })
}
