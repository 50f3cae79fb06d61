//! k-uniform hypergraphs and their k-partite incidence structure.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;

use super::RegularityError;
use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::three_graph::ThreeGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KGraph {
    k: usize,
    n: usize,
    edges: BTreeSet<Vec<usize>>,
}

impl KGraph {
    pub fn new(k: usize, n: usize) -> Self {
        Self { k, n, edges: BTreeSet::new() }
    }

    /// Simple graph as a 2-graph.
    pub fn from_graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(2, n);
        for (u, v) in edges {
            g.add_edge(vec![u, v]);
        }
        g
    }

    pub fn add_edge(&mut self, mut e: Vec<usize>) -> bool {
        e.sort_unstable();
        assert!(e.len() == self.k && e.windows(2).all(|w| w[0] < w[1]) && e[self.k - 1] < self.n, "malformed edge {e:?}");
        self.edges.insert(e)
    }

    pub fn contains(&self, e: &[usize]) -> bool {
        let mut e = e.to_vec();
        e.sort_unstable();
        self.edges.contains(&e)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn remove_edge(&mut self, e: &[usize]) -> bool {
        let mut e = e.to_vec();
        e.sort_unstable();
        self.edges.remove(&e)
    }
}

impl From<&ThreeGraph> for KGraph {
    fn from(g: &ThreeGraph) -> Self {
        let mut k = KGraph::new(3, g.n());
        for e in g.edges() {
            k.edges.insert(e.to_vec());
        }
        k
    }
}

/// Validates that `parts` are non-empty, pairwise disjoint and inside `0..n`;
/// returns `(part, local index)` for every vertex.
pub(crate) fn locate(n: usize, parts: &[Vec<usize>]) -> Result<Vec<Option<(usize, usize)>>, RegularityError> {
    let mut loc = vec![None; n];
    for (p, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(RegularityError::EmptyPart(p));
        }
        for (i, &v) in part.iter().enumerate() {
            if v >= n {
                return Err(RegularityError::VertexOutOfRange(v));
            }
            if loc[v].is_some() {
                return Err(RegularityError::PartsOverlap(v));
            }
            loc[v] = Some((p, i));
        }
    }
    Ok(loc)
}

/// Edges meeting every part exactly once, stored as one bitset over the last
/// part per tuple of the first `k - 1` parts.
#[derive(Clone, Debug)]
pub struct PartiteIncidence {
    parts: Vec<Vec<usize>>,
    strides: Vec<usize>,
    rows: Vec<FixedBitSet>,
    total: u64,
}

impl PartiteIncidence {
    fn empty(parts: &[Vec<usize>]) -> Self {
        let k = parts.len();
        let mut strides = vec![0; k.saturating_sub(1)];
        let mut s = 1;
        for i in (0..k - 1).rev() {
            strides[i] = s;
            s *= parts[i].len();
        }
        let last = parts[k - 1].len();
        Self { parts: parts.to_vec(), strides, rows: vec![FixedBitSet::with_capacity(last); s], total: 0 }
    }

    fn set(&mut self, locals: &[usize]) {
        let k = self.parts.len();
        let row: usize = (0..k - 1).map(|i| locals[i] * self.strides[i]).sum();
        if !self.rows[row].contains(locals[k - 1]) {
            self.rows[row].insert(locals[k - 1]);
            self.total += 1;
        }
    }

    /// Builds from edges already given as local indices, one per part.
    pub(crate) fn from_locals<'a>(parts: &[Vec<usize>], edges: impl IntoIterator<Item = &'a [usize]>) -> Self {
        let mut inc = Self::empty(parts);
        for e in edges {
            inc.set(e);
        }
        inc
    }

    pub fn from_kgraph(g: &KGraph, parts: &[Vec<usize>]) -> Result<Self, RegularityError> {
        if parts.len() != g.k() || g.k() < 2 {
            return Err(RegularityError::PartCount { expected: g.k(), got: parts.len() });
        }
        let loc = locate(g.n(), parts)?;
        let mut inc = Self::empty(parts);
        let mut locals = vec![0; g.k()];
        'edges: for e in g.edges() {
            let mut seen = 0u64;
            for &v in e {
                let Some((p, i)) = loc[v] else { continue 'edges };
                if seen & (1 << p) != 0 {
                    continue 'edges;
                }
                seen |= 1 << p;
                locals[p] = i;
            }
            inc.set(&locals);
        }
        Ok(inc)
    }

    /// The 3-partite structure `(V1, V2, colours)` of a collection.
    pub fn from_collection(gc: &GraphCollection, v1: &[VertexId], v2: &[VertexId], colours: &[ColourId]) -> Result<Self, RegularityError> {
        let parts = vec![v1.to_vec(), v2.to_vec(), colours.to_vec()];
        locate(gc.n(), &parts[..2])?;
        if colours.is_empty() {
            return Err(RegularityError::EmptyPart(2));
        }
        let mut inc = Self::empty(&parts);
        for (i, &u) in v1.iter().enumerate() {
            for (j, &v) in v2.iter().enumerate() {
                for (l, &c) in colours.iter().enumerate() {
                    if gc.has_edge(c, u, v) {
                        inc.set(&[i, j, l]);
                    }
                }
            }
        }
        Ok(inc)
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cells(&self) -> u64 {
        self.parts.iter().map(|p| p.len() as u64).product()
    }

    pub fn density(&self) -> Ratio<i64> {
        Ratio::new(self.total as i64, self.cells() as i64)
    }

    /// For each element of the last part, the number of edges it forms with
    /// tuples drawn from `prefix` (local indices, one list per part but the last).
    pub fn last_weights(&self, prefix: &[Vec<usize>]) -> Vec<u64> {
        let k = self.k();
        let mut w = vec![0u64; self.parts[k - 1].len()];
        let mut idx = vec![0usize; k - 1];
        if prefix.iter().any(Vec::is_empty) {
            return w;
        }
        loop {
            let row: usize = (0..k - 1).map(|i| prefix[i][idx[i]] * self.strides[i]).sum();
            for c in self.rows[row].ones() {
                w[c] += 1;
            }
            let mut i = k - 1;
            loop {
                if i == 0 {
                    return w;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < prefix[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// Edges inside the product of the given local subsets.
    pub fn count(&self, subsets: &[Vec<usize>]) -> u64 {
        let k = self.k();
        let w = self.last_weights(&subsets[..k - 1]);
        subsets[k - 1].iter().map(|&c| w[c]).sum()
    }

    pub fn count_density(&self, subsets: &[Vec<usize>]) -> Ratio<i64> {
        let cells: u64 = subsets.iter().map(|s| s.len() as u64).product();
        Ratio::new(self.count(subsets) as i64, cells as i64)
    }

    /// Degree of every vertex of part `p` (local index order).
    pub fn degrees(&self, p: usize) -> Vec<u64> {
        let k = self.k();
        let all: Vec<Vec<usize>> = self.parts.iter().map(|q| (0..q.len()).collect()).collect();
        if p == k - 1 {
            return self.last_weights(&all[..k - 1]);
        }
        (0..self.parts[p].len())
            .map(|i| {
                let mut s = all.clone();
                s[p] = vec![i];
                self.count(&s)
            })
            .collect()
    }

    pub fn to_global(&self, locals: &[Vec<usize>]) -> Vec<Vec<usize>> {
        locals.iter().enumerate().map(|(p, l)| l.iter().map(|&i| self.parts[p][i]).collect()).collect()
    }
}
