//! 3-uniform hypergraphs and the correspondence with graph collections:
//! `xyc` is a 3-edge exactly when `xy` is an edge of `G_c`.

use std::collections::BTreeSet;

use crate::collection::{GraphCollection, VertexId};
use crate::error::CoreError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeGraph {
    n: usize,
    labels: Vec<String>,
    edges: BTreeSet<[usize; 3]>,
    parts: Option<Vec<usize>>,
}

pub fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

impl ThreeGraph {
    pub fn new(n: usize) -> Self {
        Self { n, labels: (0..n).map(|v| v.to_string()).collect(), edges: BTreeSet::new(), parts: None }
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        Self { n: labels.len(), labels, edges: BTreeSet::new(), parts: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn add_edge(&mut self, a: usize, b: usize, c: usize) -> Result<bool, CoreError> {
        let t = sorted3(a, b, c);
        if t[2] >= self.n || t[0] == t[1] || t[1] == t[2] {
            return Err(CoreError::InvalidTriple([a, b, c]));
        }
        Ok(self.edges.insert(t))
    }

    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        self.edges.contains(&sorted3(a, b, c))
    }

    pub fn edges(&self) -> impl Iterator<Item = &[usize; 3]> + '_ {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// Optional part label per vertex (for k-partite 3-graphs).
    pub fn parts(&self) -> Option<&[usize]> {
        self.parts.as_deref()
    }

    pub fn set_parts(&mut self, parts: Vec<usize>) -> Result<(), CoreError> {
        if parts.len() != self.n {
            return Err(CoreError::InvalidSides);
        }
        self.parts = Some(parts);
        Ok(())
    }

    /// Vertices of each part, if parts are declared.
    pub fn part_lists(&self) -> Option<Vec<Vec<VertexId>>> {
        let parts = self.parts.as_ref()?;
        let k = parts.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); k];
        for (v, &p) in parts.iter().enumerate() {
            out[p].push(v);
        }
        Some(out)
    }
}

/// The 3-graph on `V ⊎ C`: vertices keep their indices, colour `c` becomes vertex `n + c`.
pub fn to_three_graph(gc: &GraphCollection) -> ThreeGraph {
    let n = gc.n();
    let mut labels: Vec<String> = (0..n).map(|v| v.to_string()).collect();
    labels.extend(gc.labels().iter().cloned());
    let mut g = ThreeGraph::with_labels(labels);
    for c in 0..gc.colour_count() {
        for (u, v) in gc.edges(c) {
            g.edges.insert(sorted3(u, v, n + c));
        }
    }
    g
}

/// Collection on `v_side` (relabelled `0..`) with one colour per element of `c_side`,
/// labelled by that vertex's label in `g`.
pub fn from_three_graph(g: &ThreeGraph, v_side: &[VertexId], c_side: &[VertexId]) -> Result<GraphCollection, CoreError> {
    let mut vpos = vec![usize::MAX; g.n()];
    let mut cpos = vec![usize::MAX; g.n()];
    for (i, &v) in v_side.iter().enumerate() {
        if v >= g.n() || vpos[v] != usize::MAX {
            return Err(CoreError::InvalidSides);
        }
        vpos[v] = i;
    }
    for (i, &c) in c_side.iter().enumerate() {
        if c >= g.n() || vpos[c] != usize::MAX || cpos[c] != usize::MAX {
            return Err(CoreError::InvalidSides);
        }
        cpos[c] = i;
    }
    let labels = c_side.iter().map(|&c| g.label(c).to_string()).collect();
    let mut gc = GraphCollection::new(v_side.len(), labels)?;
    for e in g.edges() {
        for (k, &c) in e.iter().enumerate() {
            if cpos[c] == usize::MAX {
                continue;
            }
            let (x, y) = match k {
                0 => (e[1], e[2]),
                1 => (e[0], e[2]),
                _ => (e[0], e[1]),
            };
            if vpos[x] != usize::MAX && vpos[y] != usize::MAX {
                gc.insert(cpos[c], vpos[x], vpos[y]);
            }
        }
    }
    Ok(gc)
}
