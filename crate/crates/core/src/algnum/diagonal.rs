use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use super::upoly::{granville_bound_holds, UPoly};
use super::{certify_minimal_tth_root, env_algebraic, AlgEnv, AlgNum, AlgSet};
use crate::condense::{condense_iterate, CondenseMode, CondenseTrace, IterateOptions, DEFAULT_H_CAP};
use crate::counting::count_solutions;
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::{PolySystem, Polynomial, Term};
use crate::solutions::for_each_tuple;
use crate::verify::{Counterexample, Direction, MapTable, Verdict};

/// An image point together with its `t`-th power, which is what every
/// equation check uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalImage {
    pub root: AlgNum,
    pub power: Option<BigInt>,
}

/// A map from integers to algebraic numbers for a diagonal system of degree `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgMap {
    pub t: u32,
    pub entries: BTreeMap<BigInt, DiagonalImage>,
}

impl AlgMap {
    /// Each `a` sent to itself, with power `a^t`.
    pub fn identity(set: &IntSet, t: u32) -> Self {
        let entries = set
            .elements()
            .iter()
            .map(|a| {
                let img = DiagonalImage {
                    root: AlgNum::integer(a),
                    power: Some(Pow::pow(a, t)),
                };
                (a.clone(), img)
            })
            .collect();
        AlgMap { t, entries }
    }

    pub fn image(&self) -> Result<AlgSet> {
        AlgSet::new(self.entries.values().map(|i| i.root.clone()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalOptions {
    pub mode: CondenseMode,
    pub max_steps: usize,
    pub h_cap: u64,
}

impl Default for DiagonalOptions {
    fn default() -> Self {
        DiagonalOptions {
            mode: CondenseMode::Greedy,
            max_steps: 64,
            h_cap: DEFAULT_H_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalCertificate {
    pub t: u32,
    /// `max_i ‖P_i‖₁`.
    pub k: BigInt,
    pub iso: bool,
    pub solutions_source: u64,
    pub solutions_image: u64,
    pub env: AlgEnv,
    /// `t·2^{t+1}(k+1)^A`.
    pub env_bound: BigUint,
    pub env_within_bound: bool,
    /// `Π deg m_b`.
    pub degree: BigUint,
    /// `t^A`.
    pub degree_cap: BigUint,
    pub degree_within_cap: bool,
    /// Every emitted polynomial `r` has `‖r‖₂ ≤ φ^t ‖x^t − b‖₂`.
    pub granville: bool,
}

impl DiagonalCertificate {
    pub fn holds(&self) -> bool {
        self.iso
            && self.solutions_source == self.solutions_image
            && self.env_within_bound
            && self.degree_within_cap
            && self.granville
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalCondensation {
    /// `A_t = {a^t}`.
    pub powers: IntSet,
    /// `L_i(y) = Σ_j c_ij y_j`.
    pub linear: PolySystem,
    pub trace: CondenseTrace,
    /// `a ↦ ψ(a^t)`, the integer part of the map.
    pub power_map: MapTable,
    pub map: AlgMap,
    pub image: AlgSet,
    pub certificate: DiagonalCertificate,
}

/// Degree `t` and coefficient rows of a diagonal system.
fn diagonal_rows(system: &PolySystem) -> Result<(u32, Vec<Vec<BigInt>>)> {
    let mut t = None;
    let mut rows = Vec::new();
    for p in system.polys() {
        let (d, c) = p
            .diagonal_shape()
            .ok_or_else(|| Error::InvalidSystem(format!("{p} is not of the form Σ c_j x_j^t")))?;
        if t.is_some_and(|t0| t0 != d) {
            return Err(Error::InvalidSystem(
                "diagonal polynomials must share one degree".into(),
            ));
        }
        t = Some(d);
        rows.push(c);
    }
    let t = t.ok_or_else(|| Error::InvalidSystem("empty system".into()))?;
    Ok((t, rows))
}

fn linear_system(rows: &[Vec<BigInt>], s: usize) -> Result<PolySystem> {
    let polys = rows
        .iter()
        .map(|row| {
            let terms = row
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let mut e = vec![0u32; s];
                    e[j] = 1;
                    Term::new(c.clone(), e)
                })
                .collect();
            Polynomial::new(s, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(s, polys)
}

/// `{a^t : a ∈ A}`, rejecting `a ≠ a'` with `a^t = a'^t`.
fn power_set(set: &IntSet, t: u32) -> Result<IntSet> {
    let mut seen: BTreeMap<BigInt, &BigInt> = BTreeMap::new();
    for a in set.elements() {
        if let Some(prev) = seen.insert(Pow::pow(a, t), a) {
            return Err(Error::SignCollision {
                a: prev.to_string(),
                b: a.to_string(),
                t,
            });
        }
    }
    IntSet::new(seen.into_keys())
}

/// Exhaustive check that `a ↦ ψ(a)` is an algebraic Freiman `P`-isomorphism,
/// evaluated as `P_i(ψa) = Σ_j c_ij (ψa_j)^t` on the stored powers.
pub fn is_algebraic_freiman_iso_diagonal(
    map: &AlgMap,
    set: &IntSet,
    system: &PolySystem,
    limits: &Limits,
) -> Result<Verdict> {
    let (t, rows) = diagonal_rows(system)?;
    if t != map.t {
        return Err(Error::InvalidSystem(format!(
            "system has degree {t}, map carries degree {}",
            map.t
        )));
    }
    let s = system.num_vars();
    let mut powers = Vec::with_capacity(set.card());
    for a in set.elements() {
        let img = map
            .entries
            .get(a)
            .ok_or_else(|| Error::NonBijective(format!("{a} has no image")))?;
        let pw = img
            .power
            .clone()
            .ok_or_else(|| Error::Precondition(format!("image of {a} lacks its integer {t}-th power")))?;
        if !img.root.defining_poly().divides(&UPoly::binomial(t, &pw)) {
            return Err(Error::Precondition(format!(
                "image of {a}: {} does not divide x^{t} - {pw}",
                img.root.defining_poly()
            )));
        }
        powers.push(pw);
    }
    AlgSet::new(set.elements().iter().map(|a| map.entries[a].root.clone()).collect())?;
    let linear = linear_system(&rows, s)?;
    limits.check_power("diagonal iso check card(A)^s", set.card(), s)?;
    let mut found = None;
    let mut x = vec![BigInt::default(); s];
    let mut y = vec![BigInt::default(); s];
    let mut err = None;
    let _ = for_each_tuple(set.card(), s, |idx| {
        for (j, &i) in idx.iter().enumerate() {
            x[j] = set.elements()[i].clone();
            y[j] = powers[i].clone();
        }
        let r = system.is_solution(&x).and_then(|a| Ok((a, linear.is_solution(&y)?)));
        match r {
            Ok((a, b)) if a == b => ControlFlow::Continue(()),
            Ok((a, _)) => {
                found = Some(Counterexample {
                    tuple: x.clone(),
                    image: y.clone(),
                    direction: if a { Direction::Lost } else { Direction::Spurious },
                });
                ControlFlow::Break(())
            }
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(found.map_or(Verdict::Yes, Verdict::No))
}

/// Condenses `A` for a diagonal system through the power map, linear
/// condensation of `A_t`, and principal `t`-th roots of the result.
pub fn condense_diagonal(
    set: &IntSet,
    system: &PolySystem,
    opts: &DiagonalOptions,
    limits: &Limits,
) -> Result<DiagonalCondensation> {
    let (t, rows) = diagonal_rows(system)?;
    let s = system.num_vars();
    let k = system.polys().iter().map(Polynomial::norm1).max().unwrap_or_default();
    let powers = power_set(set, t)?;
    let linear = linear_system(&rows, s)?;
    let iterate = IterateOptions {
        h_cap: opts.h_cap,
        ..IterateOptions::new(opts.mode, opts.max_steps)
    };
    let trace = condense_iterate(&powers, &linear, &iterate, limits)?;
    let mut pairs = Vec::with_capacity(set.card());
    let mut entries = BTreeMap::new();
    let mut granville = true;
    for a in set.elements() {
        let b = trace
            .composed_map
            .apply(&Pow::pow(a, t))
            .expect("composed map covers A_t")
            .clone();
        let root = certify_minimal_tth_root(&b, t, limits)?;
        let f = UPoly::binomial(t, &b);
        granville &= granville_bound_holds(root.defining_poly(), &f, t);
        pairs.push((a.clone(), b.clone()));
        entries.insert(a.clone(), DiagonalImage { root, power: Some(b) });
    }
    let power_map = MapTable::single(pairs)?;
    let map = AlgMap { t, entries };
    let image = map.image()?;
    let verdict = is_algebraic_freiman_iso_diagonal(&map, set, system, limits)?;
    if let Verdict::No(c) = &verdict {
        return Err(Error::VerificationFailed(format!(
            "diagonal lift is not an isomorphism: {c}"
        )));
    }
    let solutions_source = count_solutions(set.elements(), system, limits)?;
    let solutions_image = count_solutions(trace.final_set.elements(), &linear, limits)?;
    let env = env_algebraic(&image);
    let a_card = set.card() as u32;
    let env_bound =
        BigUint::from(t) * BigUint::from(2u32).pow(t + 1) * Pow::pow(BigUint::try_from(&k + 1).expect("k ≥ 0"), a_card);
    let degree = image.degree_bound();
    let degree_cap = Pow::pow(BigUint::from(t), a_card);
    let certificate = DiagonalCertificate {
        t,
        iso: true,
        solutions_source,
        solutions_image,
        env_within_bound: BigInt::from(env_bound.clone()) >= env.value,
        env,
        env_bound,
        degree_within_cap: degree <= degree_cap,
        degree,
        degree_cap,
        granville,
        k,
    };
    Ok(DiagonalCondensation {
        powers,
        linear,
        trace,
        power_map,
        map,
        image,
        certificate,
    })
}
