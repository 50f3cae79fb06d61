//! Transversal embeddings `(tau, sigma)` and their verifier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::pattern::PatternGraph;

/// `tau[x]` is the host vertex of pattern vertex `x`; `sigma[e]` is the colour
/// of pattern edge `e` (ids as in [`PatternGraph::edges`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalEmbedding {
    pub tau: Vec<VertexId>,
    pub sigma: Vec<ColourId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape { tau_len: usize, sigma_len: usize, vertices: usize, edges: usize },
    VertexOutOfRange { x: usize, image: VertexId },
    ColourOutOfRange { edge: usize, colour: ColourId },
    TauCollision { x: usize, y: usize, image: VertexId },
    SigmaCollision { e: usize, f: usize, colour: ColourId },
    MissingEdge { edge: usize, x: usize, y: usize, colour: ColourId },
    TargetMissed { x: usize, image: VertexId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub accepted: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    fn from(violations: Vec<Violation>) -> Self {
        Self { accepted: violations.is_empty(), violations }
    }
}

/// Checks injectivity of `tau` and `sigma`, that every pattern edge lands in
/// the graph of its colour, and that every target set is respected.
pub fn verify_transversal_embedding(gc: &GraphCollection, h: &PatternGraph, emb: &TransversalEmbedding) -> VerificationReport {
    let mut out = Vec::new();
    if emb.tau.len() != h.n() || emb.sigma.len() != h.edge_count() {
        out.push(Violation::Shape { tau_len: emb.tau.len(), sigma_len: emb.sigma.len(), vertices: h.n(), edges: h.edge_count() });
        return VerificationReport::from(out);
    }
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (x, &v) in emb.tau.iter().enumerate() {
        if v >= gc.n() {
            out.push(Violation::VertexOutOfRange { x, image: v });
            continue;
        }
        if let Some(&y) = owner.get(&v) {
            out.push(Violation::TauCollision { x: y, y: x, image: v });
        } else {
            owner.insert(v, x);
        }
        if let Some(t) = h.target(x) {
            if !t.contains(&v) {
                out.push(Violation::TargetMissed { x, image: v });
            }
        }
    }
    let mut used: BTreeMap<ColourId, usize> = BTreeMap::new();
    for (e, &c) in emb.sigma.iter().enumerate() {
        if c >= gc.colour_count() {
            out.push(Violation::ColourOutOfRange { edge: e, colour: c });
            continue;
        }
        if let Some(&f) = used.get(&c) {
            out.push(Violation::SigmaCollision { e: f, f: e, colour: c });
        } else {
            used.insert(c, e);
        }
        let (x, y) = h.edge(e);
        let (u, v) = (emb.tau[x], emb.tau[y]);
        if u < gc.n() && v < gc.n() && !gc.has_edge(c, u, v) {
            out.push(Violation::MissingEdge { edge: e, x, y, colour: c });
        }
    }
    VerificationReport::from(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_rainbow_triangle() {
        let gc = GraphCollection::complete(3, 3);
        let h = PatternGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let emb = TransversalEmbedding { tau: vec![0, 1, 2], sigma: vec![0, 1, 2] };
        assert!(verify_transversal_embedding(&gc, &h, &emb).accepted);
    }

    #[test]
    fn reports_each_defect() {
        let mut gc = GraphCollection::with_colours(3, 2);
        gc.add_edge(0, 0, 1).unwrap();
        let h = PatternGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let emb = TransversalEmbedding { tau: vec![0, 1, 1], sigma: vec![0, 0] };
        let r = verify_transversal_embedding(&gc, &h, &emb);
        assert!(!r.accepted);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::TauCollision { .. })));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::SigmaCollision { .. })));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::MissingEdge { edge: 1, .. })));
    }
}
