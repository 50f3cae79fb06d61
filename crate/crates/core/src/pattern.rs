//! Pattern graphs `H` to be embedded, with an optional cluster assignment `phi`
//! and optional target sets `T_x`.

use std::collections::{BTreeMap, VecDeque};

use crate::collection::VertexId;
use crate::error::CoreError;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(into = "crate::io::PatternDoc", try_from = "crate::io::PatternDoc")]
pub struct PatternGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    index: BTreeMap<(usize, usize), usize>,
    phi: Option<Vec<usize>>,
    targets: BTreeMap<usize, Vec<VertexId>>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl PatternGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, CoreError> {
        let mut h = Self { n, edges: Vec::new(), adj: vec![Vec::new(); n], index: BTreeMap::new(), phi: None, targets: BTreeMap::new() };
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(CoreError::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(CoreError::SelfLoop(u));
            }
            let k = key(u, v);
            if h.index.contains_key(&k) {
                return Err(CoreError::DuplicateEdge(k.0, k.1));
            }
            h.index.insert(k, h.edges.len());
            h.edges.push(k);
            h.adj[u].push(v);
            h.adj[v].push(u);
        }
        Ok(h)
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("no edges")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in insertion order; the position is the edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&key(u, v)).copied()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.index.contains_key(&key(u, v))
    }

    pub fn with_phi(mut self, phi: Vec<usize>) -> Result<Self, CoreError> {
        if phi.len() != self.n {
            return Err(CoreError::InvalidPattern(format!("phi has {} entries for {} vertices", phi.len(), self.n)));
        }
        self.phi = Some(phi);
        Ok(self)
    }

    pub fn phi(&self) -> Option<&[usize]> {
        self.phi.as_deref()
    }

    pub fn set_phi(&mut self, phi: Option<Vec<usize>>) {
        self.phi = phi;
    }

    pub fn with_targets(mut self, targets: BTreeMap<usize, Vec<VertexId>>) -> Result<Self, CoreError> {
        if let Some(&x) = targets.keys().find(|&&x| x >= self.n) {
            return Err(CoreError::VertexOutOfRange { vertex: x, n: self.n });
        }
        self.targets = targets;
        Ok(self)
    }

    pub fn targets(&self) -> &BTreeMap<usize, Vec<VertexId>> {
        &self.targets
    }

    pub fn target(&self, x: usize) -> Option<&[VertexId]> {
        self.targets.get(&x).map(Vec::as_slice)
    }

    pub fn set_targets(&mut self, targets: BTreeMap<usize, Vec<VertexId>>) {
        self.targets = targets;
    }

    /// Connected components of `H - removed`, each sorted, ordered by smallest vertex.
    pub fn components_without(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = removed.to_vec();
        seen.resize(self.n, false);
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        q.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_without(&[])
    }

    /// Induced subgraph on `vertices` (relabelled by position). Returns the
    /// subgraph and, for each of its edges, the id of the original edge.
    /// `phi` and targets are carried over.
    pub fn induced(&self, vertices: &[usize]) -> (PatternGraph, Vec<usize>) {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        let mut ids = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if pos[u] != usize::MAX && pos[v] != usize::MAX {
                edges.push((pos[u], pos[v]));
                ids.push(e);
            }
        }
        let mut h = PatternGraph::new(vertices.len(), edges).expect("subgraph of a valid pattern");
        if let Some(phi) = &self.phi {
            h.phi = Some(vertices.iter().map(|&v| phi[v]).collect());
        }
        h.targets = vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| self.targets.get(v).map(|t| (i, t.clone())))
            .collect();
        (h, ids)
    }

    /// Proper 2-colouring by breadth-first search, the smallest vertex of
    /// every component on side 0; `None` if `H` has an odd cycle.
    pub fn two_colouring(&self) -> Option<Vec<usize>> {
        let mut side = vec![usize::MAX; self.n];
        for comp in self.components() {
            side[comp[0]] = 0;
            let mut queue = std::collections::VecDeque::from([comp[0]]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    if side[y] == usize::MAX {
                        side[y] = 1 - side[x];
                        queue.push_back(y);
                    } else if side[y] == side[x] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    /// Proper 2-colouring with exactly `left` vertices on side 0, flipping
    /// whole components as needed.
    pub fn balanced_two_colouring(&self, left: usize) -> Option<Vec<usize>> {
        let mut side = self.two_colouring()?;
        let comps = self.components();
        let zeros: Vec<usize> = comps.iter().map(|c| c.iter().filter(|&&v| side[v] == 0).count()).collect();
        // reach[i][s]: first i components can put s vertices on side 0
        let mut reach = vec![vec![false; left + 1]; comps.len() + 1];
        reach[0][0] = true;
        for (i, c) in comps.iter().enumerate() {
            for s in 0..=left {
                if reach[i][s] {
                    for add in [zeros[i], c.len() - zeros[i]] {
                        if s + add <= left {
                            reach[i + 1][s + add] = true;
                        }
                    }
                }
            }
        }
        if !reach[comps.len()][left] {
            return None;
        }
        let mut s = left;
        for i in (0..comps.len()).rev() {
            if s >= zeros[i] && reach[i][s - zeros[i]] {
                s -= zeros[i];
            } else {
                s -= comps[i].len() - zeros[i];
                for &v in &comps[i] {
                    side[v] = 1 - side[v];
                }
            }
        }
        Some(side)
    }

    /// Spanning subgraph keeping the listed edge ids (same vertices, `phi`, targets).
    /// Edge `i` of the result is original edge `ids[i]`.
    pub fn edge_subgraph(&self, ids: &[usize]) -> PatternGraph {
        let mut h = PatternGraph::new(self.n, ids.iter().map(|&e| self.edges[e])).expect("subgraph of a valid pattern");
        h.phi = self.phi.clone();
        h.targets = self.targets.clone();
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_colouring_flips_components() {
        // a star K_{1,3} plus an edge: sides 1+3 or 3+1, plus 1+1
        let h = PatternGraph::new(6, [(0, 1), (0, 2), (0, 3), (4, 5)]).unwrap();
        for left in [2, 4] {
            let side = h.balanced_two_colouring(left).unwrap();
            assert_eq!(side.iter().filter(|&&s| s == 0).count(), left);
            assert!(h.edges().iter().all(|&(u, v)| side[u] != side[v]));
        }
        assert!(h.balanced_two_colouring(3).is_none());
        assert!(PatternGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap().two_colouring().is_none());
    }

    #[test]
    fn components_and_induced() {
        let h = PatternGraph::new(6, [(0, 1), (1, 2), (3, 4)]).unwrap().with_phi(vec![0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(h.components(), vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
        assert_eq!(h.components_without(&[false, true]), vec![vec![0], vec![2], vec![3, 4], vec![5]]);
        let (sub, ids) = h.induced(&[1, 2, 4]);
        assert_eq!(sub.edges(), &[(0, 1)]);
        assert_eq!(ids, vec![1]);
        assert_eq!(sub.phi(), Some(&[1, 0, 0][..]));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(PatternGraph::new(2, [(0, 0)]).is_err());
        assert!(PatternGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(PatternGraph::new(2, [(0, 2)]).is_err());
    }
}
