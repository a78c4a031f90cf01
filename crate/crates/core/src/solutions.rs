use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::intset::IntSet;
use crate::limits::Limits;
use crate::poly::PolySystem;

/// Visits every `s`-tuple over `0..n` in lexicographic order.
pub(crate) fn for_each_tuple<F>(n: usize, s: usize, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if n == 0 {
        return ControlFlow::Continue(());
    }
    let mut idx = vec![0usize; s];
    loop {
        f(&idx)?;
        let mut pos = s;
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Decodes a mixed-radix index into an `s`-tuple over `0..n`, most
/// significant digit first.
pub(crate) fn decode_tuple(mut code: u64, n: usize, s: usize, out: &mut [usize]) {
    for slot in out[..s].iter_mut().rev() {
        *slot = (code % n as u64) as usize;
        code /= n as u64;
    }
}

pub(crate) fn encode_tuple(idx: &[usize], n: usize) -> u64 {
    idx.iter().fold(0u64, |acc, &i| acc * n as u64 + i as u64)
}

/// Coefficient and `(variable, exponent)` factors of one monomial.
type CompiledTerm = (BigInt, Vec<(usize, u32)>);

/// A polynomial system compiled against a fixed list of ground values, with
/// all needed powers precomputed. Tuples are given as indices into the list.
pub(crate) struct Evaluator {
    polys: Vec<Vec<CompiledTerm>>,
    powers: Vec<Vec<BigInt>>,
}

impl Evaluator {
    pub(crate) fn new(system: &PolySystem, values: &[BigInt]) -> Self {
        let polys: Vec<Vec<CompiledTerm>> = system
            .polys()
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .map(|t| {
                        let vars = t
                            .exps
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(j, &e)| (j, e))
                            .collect();
                        (t.coeff.clone(), vars)
                    })
                    .collect()
            })
            .collect();
        let max_exp = system.degree_bound() as usize;
        let powers = values
            .iter()
            .map(|v| {
                let mut row = Vec::with_capacity(max_exp + 1);
                let mut acc = BigInt::one();
                for _ in 0..=max_exp {
                    row.push(acc.clone());
                    acc *= v;
                }
                row
            })
            .collect();
        Evaluator { polys, powers }
    }

    pub(crate) fn num_polys(&self) -> usize {
        self.polys.len()
    }

    pub(crate) fn eval(&self, i: usize, idx: &[usize]) -> BigInt {
        let mut total = BigInt::zero();
        for (coeff, vars) in &self.polys[i] {
            let mut term = coeff.clone();
            for &(j, e) in vars {
                term *= &self.powers[idx[j]][e as usize];
            }
            total += term;
        }
        total
    }

    pub(crate) fn is_solution(&self, idx: &[usize]) -> bool {
        (0..self.polys.len()).all(|i| self.eval(i, idx).is_zero())
    }
}

/// `S(A;P)`: the solving `s`-tuples, stored as index tuples into the
/// sorted ground set and kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    ground: IntSet,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl SolutionSet {
    pub fn ground(&self) -> &IntSet {
        &self.ground
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn index_tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn contains_indices(&self, idx: &[usize]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(idx)).is_ok()
    }

    /// The tuples as integer values.
    pub fn labels(&self) -> impl Iterator<Item = Vec<BigInt>> + '_ {
        let e = self.ground.elements();
        self.tuples
            .iter()
            .map(move |t| t.iter().map(|&i| e[i].clone()).collect())
    }

    /// Re-evaluates every stored tuple against `system`.
    pub fn recheck(&self, system: &PolySystem) -> Result<bool> {
        for x in self.labels() {
            if !system.is_solution(&x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exhaustive enumeration of `A^s`, keeping tuples where every `P_i` vanishes.
pub fn solution_set(set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<SolutionSet> {
    let s = system.num_vars();
    limits.check_power("solution enumeration card(A)^s", set.card(), s)?;
    let ev = Evaluator::new(system, set.elements());
    let mut tuples = Vec::new();
    let _ = for_each_tuple(set.card(), s, |idx| {
        if ev.is_solution(idx) {
            tuples.push(idx.to_vec());
        }
        ControlFlow::Continue(())
    });
    Ok(SolutionSet {
        ground: set.clone(),
        arity: s,
        tuples,
    })
}

/// `Γ(A;P)`: vertices are the elements of `A`, hyperedges the solving tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionHypergraph {
    edges: SolutionSet,
}

impl SolutionHypergraph {
    pub fn vertices(&self) -> &IntSet {
        self.edges.ground()
    }

    pub fn edges(&self) -> &SolutionSet {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.edges.ground().card()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

pub fn build_hypergraph(set: &IntSet, system: &PolySystem, limits: &Limits) -> Result<SolutionHypergraph> {
    Ok(SolutionHypergraph {
        edges: solution_set(set, system, limits)?,
    })
}

impl From<SolutionSet> for SolutionHypergraph {
    fn from(edges: SolutionSet) -> Self {
        SolutionHypergraph { edges }
    }
}

/// Evaluates `system` at every tuple of `values^s` and reports whether
/// each is a solution, as a flat table indexed by [`encode_tuple`].
pub(crate) fn solution_table(values: &[BigInt], system: &PolySystem, limits: &Limits) -> Result<Vec<bool>> {
    let s = system.num_vars();
    let total = limits.check_power("solution table card^s", values.len(), s)?;
    let ev = Evaluator::new(system, values);
    let mut table = Vec::with_capacity(total as usize);
    let _ = for_each_tuple(values.len(), s, |idx| {
        table.push(ev.is_solution(idx));
        ControlFlow::Continue(())
    });
    Ok(table)
}
