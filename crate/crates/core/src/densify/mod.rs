//! Densification through the CRT-style map `ω(d) = Σ_i d_i Π_{j≠i} π_j`.

mod modular;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::condense::compute_upsilon;
use crate::counting::count_solutions;
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::{check_pow, Limits};
use crate::numeric::{compare_le, compare_lt, ln_interval, ln_interval_int, Comparison, Decision, Interval};
use crate::poly::PolySystem;
use crate::primes::{avoids, is_prime};
use crate::solutions::{decode_tuple, solution_set};
use crate::verify::{is_tfold_freiman_iso, MapTable};

pub use modular::{modular_preservation_check, ModularMethod, ModularReport};

/// Output of [`find_d_primes`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DPrimes {
    pub primes: Vec<u64>,
    /// The `Y` whose window `(Y, 2Y]` supplied the primes.
    pub y_used: u64,
}

/// The `count` smallest primes in `(Y, 2Y]` not dividing `u`, doubling `Y`
/// from `y_start` until one window holds enough of them.
pub fn find_d_primes(u: &BigUint, count: usize, y_start: u64, limits: &Limits) -> Result<DPrimes> {
    if u.is_zero() || count == 0 {
        return Err(Error::Precondition("need u ≥ 1 and at least one prime".into()));
    }
    let mut y = y_start.max(1);
    let mut examined = 0u64;
    for _ in 0..=limits.window_doublings {
        let hi = y.checked_mul(2).filter(|&v| v < 1 << 62).ok_or_else(|| {
            Error::SearchExhausted(format!("prime window beyond 2^62 while collecting {count} primes"))
        })?;
        let mut found = Vec::with_capacity(count);
        for n in y + 1..=hi {
            examined += 1;
            if examined > limits.prime_candidates {
                return Err(Error::SearchExhausted(format!(
                    "{count} primes avoiding the target not found within {} candidates",
                    limits.prime_candidates
                )));
            }
            if is_prime(n) && avoids(u, n) {
                found.push(n);
                if found.len() == count {
                    return Ok(DPrimes {
                        primes: found,
                        y_used: y,
                    });
                }
            }
        }
        y = hi;
    }
    Err(Error::SearchExhausted(format!(
        "no window with {count} qualifying primes after {} doublings",
        limits.window_doublings
    )))
}

/// `Π_{j≠i} π_j` for each `i`.
pub fn cofactors(primes: &[u64]) -> Vec<BigInt> {
    (0..primes.len())
        .map(|i| {
            primes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(BigInt::one(), |acc, (_, &p)| acc * p)
        })
        .collect()
}

/// `ω(d) = Σ_i d_i Π_{j≠i} π_j`.
pub fn omega_map(d: &[BigInt], primes: &[u64]) -> Result<BigInt> {
    if d.len() != primes.len() {
        return Err(Error::ArityMismatch {
            expected: primes.len(),
            found: d.len(),
        });
    }
    Ok(d.iter().zip(cofactors(primes)).map(|(x, c)| x * c).sum())
}

/// `ω` on the full power `D^t` (with `t` the number of primes), in
/// lexicographic order of the index tuples.
pub(crate) fn omega_images(set: &IntSet, primes: &[u64], limits: &Limits) -> Result<Vec<BigInt>> {
    let n = set.card();
    let t = primes.len();
    let total = check_pow("densified set card(D)^t", n, t, limits.output_set)?;
    let cof = cofactors(primes);
    let e = set.elements();
    // ω is linear in each coordinate, so precompute d·cofactor per position.
    let scaled: Vec<Vec<BigInt>> = cof.iter().map(|c| e.iter().map(|x| x * c).collect()).collect();
    let mut digits = vec![0usize; t];
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        decode_tuple(code, n, t, &mut digits);
        out.push(digits.iter().enumerate().map(|(i, &d)| &scaled[i][d]).sum());
    }
    Ok(out)
}

/// The `t`-fold table of `ω` on `D^t`.
pub fn omega_table(set: &IntSet, primes: &[u64], limits: &Limits) -> Result<MapTable> {
    let images = omega_images(set, primes, limits)?;
    let n = set.card();
    let t = primes.len();
    let mut digits = vec![0usize; t];
    let pairs = images.into_iter().enumerate().map(|(code, v)| {
        decode_tuple(code as u64, n, t, &mut digits);
        (digits.iter().map(|&d| set.elements()[d].clone()).collect(), v)
    });
    MapTable::tfold(t, pairs.collect::<Vec<_>>())
}

/// `log env / log card` for a set, kept exactly with an enclosure of its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub env: BigInt,
    pub card: BigUint,
    pub value: Interval,
}

impl Ratio {
    pub fn of(env: &BigInt, card: &BigUint) -> Result<Ratio> {
        if *card < BigUint::from(2u32) {
            return Err(Error::Precondition("the ratio needs card ≥ 2".into()));
        }
        let value = ln_interval_int(env)?.try_div(ln_interval(card)?)?;
        Ok(Ratio {
            env: env.clone(),
            card: card.clone(),
            value,
        })
    }

    pub fn for_set(set: &IntSet) -> Result<Ratio> {
        Ratio::of(&set.env(), &BigUint::from(set.card()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    /// Every slice tuple of `(D^t)^s`.
    Full,
    /// The identity `|S(E;P)| = |S(D;P)|^t`.
    Count,
    /// The counting identity plus randomly drawn slice tuples.
    Sample,
}

impl fmt::Display for VerifyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyLevel::Full => "full",
            VerifyLevel::Count => "count",
            VerifyLevel::Sample => "sample",
        })
    }
}

impl FromStr for VerifyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(VerifyLevel::Full),
            "count" => Ok(VerifyLevel::Count),
            "sample" => Ok(VerifyLevel::Sample),
            other => Err(Error::Precondition(format!("unknown verification level {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensifyOptions {
    pub epsilon: BigRational,
    /// `None` picks `full` for `card ≤ 3` and `sample` above.
    pub verify: Option<VerifyLevel>,
    pub samples: u64,
    pub seed: u64,
}

impl Default for DensifyOptions {
    fn default() -> Self {
        DensifyOptions {
            epsilon: BigRational::new(1.into(), 10.into()),
            verify: None,
            samples: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub level: VerifyLevel,
    /// `|S(E;P)|` and `|S(D;P)|^t`.
    pub counts: (u64, u64),
    pub samples_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensifyStep {
    pub primes: Vec<u64>,
    pub y_start: u64,
    pub y_used: u64,
    pub input: IntSet,
    pub output: IntSet,
    pub ratio_before: Ratio,
    pub ratio_after: Ratio,
    /// `D·(2Y)^{D−1}·env(D)`, which bounds `env(E)`.
    pub env_bound: BigInt,
    /// `log(2Y)/log D ≤ (1−2ε)·log env(D)/log D`.
    pub precondition: Comparison,
    /// `ratio_after ≤ (1−ε)·ratio_before`.
    pub improvement: Comparison,
    pub verification: VerificationReport,
}

impl DensifyStep {
    pub fn omega_table(&self, limits: &Limits) -> Result<MapTable> {
        omega_table(&self.input, &self.primes, limits)
    }
}

/// `⌈4·D^s·ln(rΛX)⌉` with `X = env − 1`, or 1 when `rΛX ≤ 1`.
pub fn window_start(set: &IntSet, system: &PolySystem) -> Result<u64> {
    let x: BigInt = set.env() - BigInt::one();
    let q: BigUint = (x * system.lambda() * BigInt::from(system.num_polys())).into_parts().1;
    if q <= BigUint::one() {
        return Ok(1);
    }
    let d_pow_s = Interval::from_u64(set.card() as u64);
    let mut acc = Interval::point(4.0);
    for _ in 0..system.num_vars() {
        acc = acc * d_pow_s;
    }
    let y = (acc * ln_interval(&q)?).hi.ceil();
    if !(y.is_finite() && y < (1u64 << 61) as f64) {
        return Err(Error::budget("prime window start", BigUint::from(u64::MAX), 1 << 61));
    }
    Ok(y as u64)
}

fn epsilon_interval(eps: &BigRational) -> Result<Interval> {
    let lo = BigRational::zero();
    let hi = BigRational::new(1.into(), 8.into());
    if *eps <= lo || *eps >= hi {
        return Err(Error::Precondition(format!("epsilon {eps} must lie in (0, 1/8)")));
    }
    Interval::from_rational(eps)
}

fn require_linear_homogeneous(system: &PolySystem) -> Result<()> {
    if !(system.is_linear() && system.is_homogeneous()) {
        return Err(Error::Precondition(
            "densification requires a linear homogeneous system".into(),
        ));
    }
    Ok(())
}

/// One densification step `ω: D^D → E`, with the ratio bookkeeping and
/// the requested level of verification.
pub fn densify_step(set: &IntSet, system: &PolySystem, opts: &DensifyOptions, limits: &Limits) -> Result<DensifyStep> {
    require_linear_homogeneous(system)?;
    let eps = epsilon_interval(&opts.epsilon)?;
    let d = set.card();
    if d < 2 {
        return Err(Error::Precondition("densification needs at least two elements".into()));
    }
    let expected_card = check_pow("densified set card(D)^D", d, d, limits.output_set)?;
    let s = system.num_vars();
    let level = opts
        .verify
        .unwrap_or(if d <= 3 { VerifyLevel::Full } else { VerifyLevel::Sample });
    if level == VerifyLevel::Full {
        limits.check_power("t-fold check card(D)^{Ds}", d, d * s)?;
    }

    let upsilon = compute_upsilon(set, system, limits)?;
    let y_start = window_start(set, system)?;
    let chosen = find_d_primes(&upsilon, d, y_start, limits)?;
    let images = omega_images(set, &chosen.primes, limits)?;
    let output = IntSet::new(images.iter().cloned())?;
    if output.card() as u64 != expected_card {
        return Err(Error::VerificationFailed(format!(
            "ω is not injective: {} images for {expected_card} tuples",
            output.card()
        )));
    }

    let two_y = BigInt::from(chosen.y_used) * 2;
    let env_bound: BigInt = BigInt::from(d) * BigInt::pow(&two_y, d as u32 - 1) * set.env();
    if output.env() > env_bound {
        return Err(Error::VerificationFailed(format!(
            "env(E) = {} exceeds D(2Y)^(D-1) env(D) = {env_bound}",
            output.env()
        )));
    }

    let ratio_before = Ratio::for_set(set)?;
    let ratio_after = Ratio::for_set(&output)?;
    let ln_d = ln_interval(&BigUint::from(d))?;
    let one = Interval::point(1.0);
    let two = Interval::point(2.0);
    let precondition = compare_le(
        ln_interval_int(&two_y)?.try_div(ln_d)?,
        (one - two * eps) * ln_interval_int(&set.env())?.try_div(ln_d)?,
    );
    let improvement = compare_le(ratio_after.value, (one - eps) * ratio_before.value);

    let verification = verify_step(set, system, &chosen.primes, &output, level, opts, limits)?;
    Ok(DensifyStep {
        primes: chosen.primes,
        y_start,
        y_used: chosen.y_used,
        input: set.clone(),
        output,
        ratio_before,
        ratio_after,
        env_bound,
        precondition,
        improvement,
        verification,
    })
}

fn verify_step(
    set: &IntSet,
    system: &PolySystem,
    primes: &[u64],
    output: &IntSet,
    level: VerifyLevel,
    opts: &DensifyOptions,
    limits: &Limits,
) -> Result<VerificationReport> {
    let t = primes.len();
    let base = solution_set(set, system, limits)?;
    let expected = (base.len() as u64)
        .checked_pow(t as u32)
        .ok_or_else(|| Error::budget("|S(D;P)|^t", BigUint::from(base.len()).pow(t as u32), u64::MAX))?;
    let found = count_solutions(output.elements(), system, limits)?;
    if found != expected {
        return Err(Error::VerificationFailed(format!(
            "|S(E;P)| = {found}, expected |S(D;P)|^{t} = {expected}"
        )));
    }
    let mut samples_checked = 0;
    match level {
        VerifyLevel::Full => {
            let table = omega_table(set, primes, limits)?;
            if let Some(c) = is_tfold_freiman_iso(&table, set, system, limits)?.counterexample() {
                return Err(Error::VerificationFailed(format!(
                    "ω is not a {t}-fold isomorphism: {c}"
                )));
            }
        }
        VerifyLevel::Count => {}
        VerifyLevel::Sample => {
            samples_checked = sample_slices(set, system, primes, &base, opts)?;
        }
    }
    Ok(VerificationReport {
        level,
        counts: (found, expected),
        samples_checked,
    })
}

/// Draws slice tuples, half of the rows from `S(D;P)` so that solution
/// patterns are exercised, and checks each one exactly.
fn sample_slices(
    set: &IntSet,
    system: &PolySystem,
    primes: &[u64],
    base: &crate::solutions::SolutionSet,
    opts: &DensifyOptions,
) -> Result<u64> {
    let t = primes.len();
    let s = system.num_vars();
    let n = set.card();
    let e = set.elements();
    let cof = cofactors(primes);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = vec![vec![0usize; s]; t];
    let mut y = vec![BigInt::zero(); s];
    for _ in 0..opts.samples {
        let mut all_solve = true;
        for row in rows.iter_mut() {
            if !base.is_empty() && rng.random_bool(0.5) {
                row.copy_from_slice(&base.index_tuples()[rng.random_range(0..base.len())]);
            } else {
                for slot in row.iter_mut() {
                    *slot = rng.random_range(0..n);
                }
            }
            all_solve &= base.contains_indices(row);
        }
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = rows.iter().zip(&cof).map(|(row, c)| &e[row[j]] * c).sum();
        }
        if system.is_solution(&y)? != all_solve {
            return Err(Error::VerificationFailed(format!(
                "sampled slice tuple {rows:?} breaks the {t}-fold property"
            )));
        }
    }
    Ok(opts.samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensifyStop {
    /// `env ≤ card^{s(1+4ε)}` holds for the current set.
    TargetReached,
    Budget,
    StepLimit,
    /// The continuation test could not be decided at the working precision.
    Undecided,
}

impl fmt::Display for DensifyStop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensifyStop::TargetReached => "target_reached",
            DensifyStop::Budget => "budget",
            DensifyStop::StepLimit => "step_limit",
            DensifyStop::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensifyRun {
    pub steps: Vec<DensifyStep>,
    pub stop: DensifyStop,
    pub stop_detail: Option<String>,
    /// The last continuation test `s(1+4ε)·log card < log env`.
    pub continuation: Comparison,
    pub final_ratio: Ratio,
}

impl DensifyRun {
    pub fn target_reached(&self) -> bool {
        self.stop == DensifyStop::TargetReached
    }
}

/// `s(1+4ε)·log card < log env`: densification continues while this holds.
pub fn continuation_test(set: &IntSet, s: usize, eps: &BigRational) -> Result<Comparison> {
    let e = epsilon_interval(eps)?;
    let factor = Interval::from_u64(s as u64) * (Interval::point(1.0) + Interval::point(4.0) * e);
    let left = factor * ln_interval(&BigUint::from(set.card()))?;
    Ok(compare_lt(left, ln_interval_int(&set.env())?))
}

/// Repeats [`densify_step`] while the continuation test holds.
pub fn densify_iterate(
    set: &IntSet,
    system: &PolySystem,
    opts: &DensifyOptions,
    max_steps: usize,
    limits: &Limits,
) -> Result<DensifyRun> {
    require_linear_homogeneous(system)?;
    let mut current = set.clone();
    let mut steps: Vec<DensifyStep> = Vec::new();
    let mut detail = None;
    let (stop, continuation) = loop {
        let test = continuation_test(&current, system.num_vars(), &opts.epsilon)?;
        match test.decision {
            Decision::Fails => break (DensifyStop::TargetReached, test),
            Decision::Undecided => break (DensifyStop::Undecided, test),
            Decision::Holds => {}
        }
        if steps.len() >= max_steps {
            break (DensifyStop::StepLimit, test);
        }
        match densify_step(&current, system, opts, limits) {
            Ok(st) => {
                current = st.output.clone();
                steps.push(st);
            }
            Err(e) if e.is_budget() => {
                detail = Some(e.to_string());
                break (DensifyStop::Budget, test);
            }
            Err(e) => return Err(e),
        }
    };
    let final_ratio = match steps.last() {
        Some(st) => st.ratio_after.clone(),
        None => Ratio::for_set(&current)?,
    };
    Ok(DensifyRun {
        steps,
        stop,
        stop_detail: detail,
        continuation,
        final_ratio,
    })
}
