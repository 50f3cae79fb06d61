//! Edge-coloured multigraphs: a family of graphs `G_c` on a shared vertex set,
//! one per colour. The same pair may appear in several colours.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::CoreError;

pub type VertexId = usize;
pub type ColourId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub left: Vec<VertexId>,
    pub right: Vec<VertexId>,
}

/// A collection `(G_c : c in C)` of graphs on vertices `0..n`.
///
/// Adjacency is colour-major: one bitset row per `(colour, vertex)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(into = "crate::io::CollectionDoc", try_from = "crate::io::CollectionDoc")]
pub struct GraphCollection {
    n: usize,
    labels: Vec<String>,
    index: BTreeMap<String, ColourId>,
    adj: Vec<FixedBitSet>,
    edge_counts: Vec<usize>,
    bipartitions: Vec<Option<Bipartition>>,
}

impl GraphCollection {
    pub fn new(n: usize, labels: Vec<String>) -> Result<Self, CoreError> {
        let mut index = BTreeMap::new();
        for (c, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), c).is_some() {
                return Err(CoreError::DuplicateColour(l.clone()));
            }
        }
        let k = labels.len();
        Ok(Self {
            n,
            labels,
            index,
            adj: vec![FixedBitSet::with_capacity(n); n * k],
            edge_counts: vec![0; k],
            bipartitions: vec![None; k],
        })
    }

    /// Empty collection with colours labelled `0..k`.
    pub fn with_colours(n: usize, k: usize) -> Self {
        Self::new(n, (0..k).map(|c| c.to_string()).collect()).expect("labels are distinct")
    }

    /// Every colour is the complete graph on `0..n`.
    pub fn complete(n: usize, k: usize) -> Self {
        let mut gc = Self::with_colours(n, k);
        for c in 0..k {
            for u in 0..n {
                for v in u + 1..n {
                    gc.insert(c, u, v);
                }
            }
        }
        gc
    }

    /// Every colour is the complete bipartite graph between `left` and `right`.
    pub fn complete_bipartite(n: usize, k: usize, left: &[VertexId], right: &[VertexId]) -> Self {
        let mut gc = Self::with_colours(n, k);
        for c in 0..k {
            for &u in left {
                for &v in right {
                    if u != v {
                        gc.insert(c, u, v);
                    }
                }
            }
        }
        gc
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colour_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, c: ColourId) -> &str {
        &self.labels[c]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn colour_index(&self, label: &str) -> Option<ColourId> {
        self.index.get(label).copied()
    }

    fn check(&self, c: ColourId, u: VertexId, v: VertexId) -> Result<(), CoreError> {
        if c >= self.labels.len() {
            return Err(CoreError::ColourOutOfRange { colour: c, count: self.labels.len() });
        }
        for x in [u, v] {
            if x >= self.n {
                return Err(CoreError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(CoreError::SelfLoop(u));
        }
        Ok(())
    }

    /// Adds `uv` to `G_c`; returns false if it was already present.
    pub fn add_edge(&mut self, c: ColourId, u: VertexId, v: VertexId) -> Result<bool, CoreError> {
        self.check(c, u, v)?;
        if let Some(bp) = &self.bipartitions[c] {
            if !crosses(bp, u, v) {
                return Err(CoreError::OutsideBipartition { colour: c, u, v });
            }
        }
        Ok(self.insert(c, u, v))
    }

    pub(crate) fn insert(&mut self, c: ColourId, u: VertexId, v: VertexId) -> bool {
        let row = c * self.n;
        if self.adj[row + u].contains(v) {
            return false;
        }
        self.adj[row + u].insert(v);
        self.adj[row + v].insert(u);
        self.edge_counts[c] += 1;
        true
    }

    pub(crate) fn remove(&mut self, c: ColourId, u: VertexId, v: VertexId) -> bool {
        let row = c * self.n;
        if !self.adj[row + u].contains(v) {
            return false;
        }
        self.adj[row + u].set(v, false);
        self.adj[row + v].set(u, false);
        self.edge_counts[c] -= 1;
        true
    }

    /// Declares that `G_c` is bipartite with the given sides.
    pub fn set_bipartition(&mut self, c: ColourId, bp: Bipartition) -> Result<(), CoreError> {
        if c >= self.labels.len() {
            return Err(CoreError::ColourOutOfRange { colour: c, count: self.labels.len() });
        }
        let mut seen = FixedBitSet::with_capacity(self.n);
        for &x in bp.left.iter().chain(&bp.right) {
            if x >= self.n {
                return Err(CoreError::VertexOutOfRange { vertex: x, n: self.n });
            }
            if seen.contains(x) {
                return Err(CoreError::InvalidBipartition(format!("vertex {x} on both sides")));
            }
            seen.insert(x);
        }
        for (u, v) in self.edges(c) {
            if !crosses(&bp, u, v) {
                return Err(CoreError::OutsideBipartition { colour: c, u, v });
            }
        }
        self.bipartitions[c] = Some(bp);
        Ok(())
    }

    pub fn bipartition(&self, c: ColourId) -> Option<&Bipartition> {
        self.bipartitions[c].as_ref()
    }

    pub fn has_edge(&self, c: ColourId, u: VertexId, v: VertexId) -> bool {
        u < self.n && v < self.n && self.adj[c * self.n + u].contains(v)
    }

    pub fn neighbours(&self, c: ColourId, v: VertexId) -> &FixedBitSet {
        &self.adj[c * self.n + v]
    }

    pub fn degree(&self, c: ColourId, v: VertexId) -> usize {
        self.adj[c * self.n + v].count_ones(..)
    }

    /// `|N_{G_c}(v) ∩ set|`.
    pub fn degree_into(&self, c: ColourId, v: VertexId, set: &FixedBitSet) -> usize {
        self.adj[c * self.n + v].intersection_count(set)
    }

    /// `sum_c d_{G_c}(v)`.
    pub fn total_degree(&self, v: VertexId) -> usize {
        (0..self.colour_count()).map(|c| self.degree(c, v)).sum()
    }

    pub fn edge_count(&self, c: ColourId) -> usize {
        self.edge_counts[c]
    }

    pub fn total_edges(&self) -> usize {
        self.edge_counts.iter().sum()
    }

    /// Colours in which `uv` is an edge, ascending.
    pub fn colours_of(&self, u: VertexId, v: VertexId) -> Vec<ColourId> {
        (0..self.colour_count()).filter(|&c| self.has_edge(c, u, v)).collect()
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        (0..self.colour_count()).filter(|&c| self.has_edge(c, u, v)).count()
    }

    /// Edges of `G_c` as `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self, c: ColourId) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |u| self.adj[c * n + u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// `e(G_c[A, B])` for disjoint `A`, `B`.
    pub fn edges_between(&self, c: ColourId, a: &[VertexId], b: &FixedBitSet) -> usize {
        a.iter().map(|&u| self.degree_into(c, u, b)).sum()
    }

    /// Copy keeping only the edges accepted by `keep(c, u, v)` (called with `u < v`).
    pub fn filtered(&self, mut keep: impl FnMut(ColourId, VertexId, VertexId) -> bool) -> Self {
        let mut out = self.clone();
        for c in 0..self.colour_count() {
            let edges: Vec<_> = self.edges(c).collect();
            for (u, v) in edges {
                if !keep(c, u, v) {
                    out.remove(c, u, v);
                }
            }
        }
        out
    }

    /// Sub-collection on the given colours (relabelled `0..`), same vertex set.
    pub fn with_colour_subset(&self, colours: &[ColourId]) -> Self {
        let labels = colours.iter().map(|&c| self.labels[c].clone()).collect();
        let mut out = Self::new(self.n, labels).expect("labels distinct");
        for (i, &c) in colours.iter().enumerate() {
            for u in 0..self.n {
                out.adj[i * self.n + u] = self.adj[c * self.n + u].clone();
            }
            out.edge_counts[i] = self.edge_counts[c];
            out.bipartitions[i] = self.bipartitions[c].clone();
        }
        out
    }

    /// Same vertex count, colour labels and edge sets (declared bipartitions ignored).
    pub fn same_edges(&self, other: &Self) -> bool {
        self.n == other.n && self.labels == other.labels && self.adj == other.adj
    }
}

fn crosses(bp: &Bipartition, u: VertexId, v: VertexId) -> bool {
    let l = |x| bp.left.contains(&x);
    let r = |x| bp.right.contains(&x);
    (l(u) && r(v)) || (r(u) && l(v))
}

/// Bitset over `0..n` holding `items`.
pub fn bitset(n: usize, items: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for &i in items {
        s.insert(i);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_and_degrees() {
        let mut gc = GraphCollection::with_colours(4, 2);
        assert!(gc.add_edge(0, 0, 1).unwrap());
        assert!(!gc.add_edge(0, 1, 0).unwrap());
        gc.add_edge(1, 0, 1).unwrap();
        gc.add_edge(1, 2, 3).unwrap();
        assert_eq!(gc.colours_of(1, 0), vec![0, 1]);
        assert_eq!(gc.total_degree(0), 2);
        assert_eq!(gc.edges(1).collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
        assert!(matches!(gc.add_edge(0, 2, 2), Err(CoreError::SelfLoop(2))));
        assert!(gc.add_edge(2, 0, 1).is_err());
    }

    #[test]
    fn bipartition_is_enforced() {
        let mut gc = GraphCollection::with_colours(4, 1);
        gc.set_bipartition(0, Bipartition { left: vec![0, 1], right: vec![2, 3] }).unwrap();
        gc.add_edge(0, 0, 3).unwrap();
        assert!(matches!(gc.add_edge(0, 0, 1), Err(CoreError::OutsideBipartition { .. })));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(GraphCollection::new(2, vec!["a".into(), "a".into()]).is_err());
    }
}
