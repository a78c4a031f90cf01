//! Condensation of integer sets relative to linear systems.

mod greedy;
mod minmodel;
mod step;
mod upsilon;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::PolySystem;
use crate::verify::{is_freiman_iso, MapTable};

pub use greedy::greedy_min_modulus;
pub use minmodel::{exact_min_model, MinModel};
pub use step::{box_principle_rho, condense_step, condense_step_with, lcm_upto, least_residue};
pub use upsilon::{compute_upsilon, compute_upsilon_separate};

/// Default modulus cap for greedy mode.
pub const DEFAULT_H_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CondenseMode {
    /// Inhomogeneous step: `h = πL/ρ`, map `a ↦ [a mod h]`.
    Thm31,
    /// Homogeneous step: `h = π`, map `a ↦ [ρa mod π]`.
    Thm32,
    /// Homogeneous step with the least admissible `(h, ρ)` found by scanning.
    Greedy,
}

impl fmt::Display for CondenseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CondenseMode::Thm31 => "thm31",
            CondenseMode::Thm32 => "thm32",
            CondenseMode::Greedy => "greedy",
        })
    }
}

impl FromStr for CondenseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm31" => Ok(CondenseMode::Thm31),
            "thm32" => Ok(CondenseMode::Thm32),
            "greedy" => Ok(CondenseMode::Greedy),
            other => Err(Error::Precondition(format!("unknown condense mode {other:?}"))),
        }
    }
}

/// One verified condensation `ψ(a) = [mult·a mod h]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondenseStep {
    pub mode: CondenseMode,
    /// The prime avoiding `Υ`; absent in greedy mode.
    pub pi: Option<u64>,
    /// `Y` with `π ∈ (Y, 2Y]` in the upward prime scan.
    pub prime_window: Option<u64>,
    pub rho: u64,
    /// `lcm[1, …, (Λ+1)^A]` in the inhomogeneous mode, otherwise 1.
    pub l: BigUint,
    pub h: BigUint,
    pub map: MapTable,
    pub env_before: BigInt,
    pub env_after: BigInt,
}

impl CondenseStep {
    pub fn image(&self) -> Result<IntSet> {
        self.map.image()
    }
}

/// Result of attempting one step. A non-improving step is still verified
/// and is returned for inspection when one was constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Improved(CondenseStep),
    NoImprovement(Option<Box<CondenseStep>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    NoStrictDecrease,
    Budget,
    TargetReached,
    StepLimit,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::NoStrictDecrease => "no_strict_decrease",
            StopReason::Budget => "budget",
            StopReason::TargetReached => "target_reached",
            StopReason::StepLimit => "step_limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondenseTrace {
    pub steps: Vec<CondenseStep>,
    pub initial: IntSet,
    pub final_set: IntSet,
    pub composed_map: MapTable,
    pub stop_reason: StopReason,
    /// The budget error that ended the run, if any.
    pub stop_detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterateOptions {
    pub mode: CondenseMode,
    pub max_steps: usize,
    /// Stop as soon as `env` is at most this value.
    pub target_env: Option<BigInt>,
    pub h_cap: u64,
}

impl IterateOptions {
    pub fn new(mode: CondenseMode, max_steps: usize) -> Self {
        IterateOptions {
            mode,
            max_steps,
            target_env: None,
            h_cap: DEFAULT_H_CAP,
        }
    }
}

/// `⌈(A+1)/2⌉`: no set of `A` distinct integers has a smaller `env`.
pub fn env_floor(card: usize) -> BigInt {
    BigInt::from((card + 2) / 2)
}

/// Repeats [`condense_step`] while `env` strictly decreases.
///
/// The composed map is re-verified against the original set at the end.
pub fn condense_iterate(
    set: &IntSet,
    system: &PolySystem,
    opts: &IterateOptions,
    limits: &Limits,
) -> Result<CondenseTrace> {
    step::require_mode(system, opts.mode)?;
    let mut current = set.clone();
    let mut composed = MapTable::identity(set);
    let mut steps = Vec::new();
    let mut detail = None;
    let floor = env_floor(set.card());
    let stop = loop {
        if opts.target_env.as_ref().is_some_and(|t| current.env() <= *t) {
            break StopReason::TargetReached;
        }
        if current.env() <= floor {
            break StopReason::NoStrictDecrease;
        }
        if steps.len() >= opts.max_steps {
            break StopReason::StepLimit;
        }
        match step::condense_step_with(&current, system, opts.mode, opts.h_cap, limits) {
            Ok(StepOutcome::Improved(st)) => {
                composed = composed.compose(&st.map)?;
                current = st.image()?;
                steps.push(st);
            }
            Ok(StepOutcome::NoImprovement(_)) => break StopReason::NoStrictDecrease,
            Err(e) if e.is_budget() => {
                detail = Some(e.to_string());
                break StopReason::Budget;
            }
            Err(e) => return Err(e),
        }
    };
    if !steps.is_empty() && !is_freiman_iso(&composed, set, system, limits)?.is_yes() {
        return Err(Error::VerificationFailed(
            "composed condensation map is not a Freiman isomorphism".into(),
        ));
    }
    Ok(CondenseTrace {
        steps,
        initial: set.clone(),
        final_set: current,
        composed_map: composed,
        stop_reason: stop,
        stop_detail: detail,
    })
}
