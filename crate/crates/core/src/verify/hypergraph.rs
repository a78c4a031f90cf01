use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::solutions::SolutionHypergraph;
use crate::verify::MapTable;

/// Per-vertex count of edges holding it at each coordinate. Any isomorphism
/// of ordered hypergraphs preserves it.
fn signatures(g: &SolutionHypergraph) -> Vec<Vec<usize>> {
    let arity = g.edges().arity();
    let mut sig = vec![vec![0usize; arity]; g.num_vertices()];
    for e in g.edges().index_tuples() {
        for (pos, &v) in e.iter().enumerate() {
            sig[v][pos] += 1;
        }
    }
    sig
}

struct Search<'a> {
    n: usize,
    sig1: Vec<Vec<usize>>,
    sig2: Vec<Vec<usize>>,
    /// G1 edges grouped by their largest vertex: they become checkable
    /// exactly when that vertex is assigned.
    closing1: Vec<Vec<&'a [usize]>>,
    edges1: HashSet<&'a [usize]>,
    edges2: HashSet<&'a [usize]>,
    incident2: Vec<Vec<&'a [usize]>>,
    forward: Vec<usize>,
    inverse: Vec<Option<usize>>,
    scratch: Vec<usize>,
}

impl Search<'_> {
    fn consistent(&mut self, v: usize, w: usize) -> bool {
        for e in &self.closing1[v] {
            self.scratch.clear();
            self.scratch.extend(e.iter().map(|&x| self.forward[x]));
            if !self.edges2.contains(self.scratch.as_slice()) {
                return false;
            }
        }
        'edge: for e in &self.incident2[w] {
            self.scratch.clear();
            for &y in e.iter() {
                match self.inverse[y] {
                    Some(x) => self.scratch.push(x),
                    None => continue 'edge,
                }
            }
            if !self.edges1.contains(self.scratch.as_slice()) {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, v: usize) -> bool {
        if v == self.n {
            return true;
        }
        for w in 0..self.n {
            if self.inverse[w].is_some() || self.sig1[v] != self.sig2[w] {
                continue;
            }
            self.forward[v] = w;
            self.inverse[w] = Some(v);
            if self.consistent(v, w) && self.extend(v + 1) {
                return true;
            }
            self.inverse[w] = None;
        }
        false
    }
}

/// Searches for a vertex bijection carrying the edges of `g1` exactly onto
/// the edges of `g2`.
///
/// Returns `forward[i]`, the index in `g2` assigned to vertex `i` of `g1`.
/// Candidates are tried in increasing order, so the result is the
/// lexicographically least valid bijection.
pub fn hypergraph_isomorphic(
    g1: &SolutionHypergraph,
    g2: &SolutionHypergraph,
    limits: &Limits,
) -> Result<Option<Vec<usize>>> {
    let cap = limits.hypergraph_vertices;
    for g in [g1, g2] {
        if g.num_vertices() > cap {
            return Err(Error::budget(
                "hypergraph vertices",
                g.num_vertices() as u64,
                cap as u64,
            ));
        }
    }
    let n = g1.num_vertices();
    if n != g2.num_vertices() || g1.num_edges() != g2.num_edges() || g1.edges().arity() != g2.edges().arity() {
        return Ok(None);
    }
    let sig1 = signatures(g1);
    let sig2 = signatures(g2);
    let mut a = sig1.clone();
    let mut b = sig2.clone();
    a.sort();
    b.sort();
    if a != b {
        return Ok(None);
    }

    let mut closing1 = vec![Vec::new(); n];
    for e in g1.edges().index_tuples() {
        let top = *e.iter().max().expect("arity is positive");
        closing1[top].push(e.as_slice());
    }
    let mut incident2 = vec![Vec::new(); n];
    for e in g2.edges().index_tuples() {
        let mut seen: Vec<usize> = e.clone();
        seen.sort_unstable();
        seen.dedup();
        for v in seen {
            incident2[v].push(e.as_slice());
        }
    }
    let mut search = Search {
        n,
        sig1,
        sig2,
        closing1,
        edges1: g1.edges().index_tuples().iter().map(Vec::as_slice).collect(),
        edges2: g2.edges().index_tuples().iter().map(Vec::as_slice).collect(),
        incident2,
        forward: vec![usize::MAX; n],
        inverse: vec![None; n],
        scratch: Vec::new(),
    };
    Ok(search.extend(0).then_some(search.forward))
}

/// The vertex map `Ψ` as a [`MapTable`] between the two vertex sets.
pub fn induced_map(g1: &SolutionHypergraph, g2: &SolutionHypergraph, forward: &[usize]) -> Result<MapTable> {
    let src = g1.vertices().elements();
    let dst = g2.vertices().elements();
    MapTable::single(
        forward
            .iter()
            .enumerate()
            .map(|(i, &j)| (src[i].clone(), dst[j].clone())),
    )
}
