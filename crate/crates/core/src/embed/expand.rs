//! 1-expansions in 3-graphs: a graph `H` is placed with every edge `xy`
//! sent to a third vertex `c` such that `xyc` is a 3-edge, all images distinct.

use serde::{Deserialize, Serialize};

use super::quasi::quasi_embed;
use super::{EmbedFailure, FailureReason, SplitPlan};
use crate::collection::VertexId;
use crate::pattern::PatternGraph;
use crate::rng;
use crate::three_graph::{from_three_graph, ThreeGraph};

const STAGE: &str = "expand_embed_3graph";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionEmbedding {
    pub vertex_images: Vec<VertexId>,
    pub edge_images: Vec<VertexId>,
}

/// Problems with a claimed 1-expansion of `h` in `g`; empty when valid.
pub fn expansion_violations(g: &ThreeGraph, h: &PatternGraph, emb: &ExpansionEmbedding) -> Vec<String> {
    let mut out = Vec::new();
    if emb.vertex_images.len() != h.n() || emb.edge_images.len() != h.edge_count() {
        out.push("image lengths do not match the pattern".to_string());
        return out;
    }
    let mut seen = vec![false; g.n()];
    for &v in emb.vertex_images.iter().chain(&emb.edge_images) {
        if v >= g.n() {
            out.push(format!("image {v} out of range"));
        } else if std::mem::replace(&mut seen[v], true) {
            out.push(format!("image {v} used twice"));
        }
    }
    for (e, &(x, y)) in h.edges().iter().enumerate() {
        let (a, b, c) = (emb.vertex_images[x], emb.vertex_images[y], emb.edge_images[e]);
        if a < g.n() && b < g.n() && c < g.n() && !g.contains(a, b, c) {
            out.push(format!("edge {x}{y}: {a}{b}{c} is not a 3-edge"));
        }
    }
    out
}

/// Embeds the 1-expansion of `h` into `g`. Small patterns are first padded
/// with edges between isolated vertices until `e > n/4 - 1`; a random split
/// of `V(g)` into a vertex side and a colour side then gives a graph
/// collection for [`quasi_embed`].
pub fn expand_embed_3graph(g: &ThreeGraph, h: &PatternGraph, plan: &SplitPlan, seed: u64) -> Result<ExpansionEmbedding, EmbedFailure> {
    let n = g.n();
    let need = h.n() + h.edge_count();
    if need > n {
        return Err(EmbedFailure::new(STAGE, FailureReason::PaddingImpossible { needed: need, available: n }, seed));
    }
    // padded pattern on original vertices followed by fresh ones
    let mut edges: Vec<(usize, usize)> = h.edges().to_vec();
    let mut free: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) == 0).collect();
    free.reverse();
    let mut total = h.n();
    while (edges.len() as f64) <= n as f64 / 4.0 - 1.0 {
        let mut end = || {
            free.pop().unwrap_or_else(|| {
                total += 1;
                total - 1
            })
        };
        let (a, b) = (end(), end());
        edges.push((a, b));
    }
    let padded = PatternGraph::new(total, edges.iter().copied()).expect("padding joins distinct vertices");
    let verts: Vec<usize> = (0..total).filter(|&v| padded.degree(v) > 0).collect();
    let (core, _) = padded.induced(&verts);
    let leftover: Vec<usize> = (0..h.n()).filter(|&v| padded.degree(v) == 0).collect();
    let used = core.n() + core.edge_count() + leftover.len();
    if used > n {
        return Err(EmbedFailure::new(STAGE, FailureReason::PaddingImpossible { needed: used, available: n }, seed));
    }

    let mut last = None;
    for attempt in 0..plan.restarts {
        let s = rng::derive2(seed, 0xE3, attempt as u64);
        let order = rng::shuffled(&(0..n).collect::<Vec<_>>(), &mut rng::rng(s));
        let v_side = &order[..core.n()];
        let c_side = &order[core.n()..core.n() + core.edge_count()];
        let gc = from_three_graph(g, v_side, c_side).map_err(|e| EmbedFailure::precondition(STAGE, e.to_string(), seed))?;
        let emb = match quasi_embed(&gc, &core, plan, s) {
            Ok(v) => v.into_embedding(),
            Err(f) => {
                last = Some(f.within(STAGE).note(format!("attempt {attempt}")));
                continue;
            }
        };
        let mut vertex_images = vec![usize::MAX; h.n()];
        for (i, &v) in verts.iter().enumerate() {
            if v < h.n() {
                vertex_images[v] = v_side[emb.tau[i]];
            }
        }
        let mut spare = order[core.n() + core.edge_count()..].iter();
        for &v in &leftover {
            vertex_images[v] = *spare.next().expect("room checked above");
        }
        // original edges come first in the padded list, and induced keeps edge order
        let edge_images: Vec<VertexId> = (0..h.edge_count()).map(|e| c_side[emb.sigma[e]]).collect();
        let out = ExpansionEmbedding { vertex_images, edge_images };
        let bad = expansion_violations(g, h, &out);
        if bad.is_empty() {
            return Ok(out);
        }
        let mut f = EmbedFailure::new(STAGE, FailureReason::IdentityViolated { detail: "expansion check failed".into() }, seed);
        f.diagnostics = bad;
        return Err(f);
    }
    Err(last.unwrap_or_else(|| EmbedFailure::precondition(STAGE, "no attempts", seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> ThreeGraph {
        let mut g = ThreeGraph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    g.add_edge(a, b, c).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn single_edge() {
        let g = complete(8);
        let h = PatternGraph::new(2, [(0, 1)]).unwrap();
        let e = expand_embed_3graph(&g, &h, &SplitPlan::default(), 1).unwrap();
        assert!(expansion_violations(&g, &h, &e).is_empty());
    }

    #[test]
    fn four_cycle_uses_eight_vertices() {
        let g = complete(8);
        let h = PatternGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let e = expand_embed_3graph(&g, &h, &SplitPlan::default(), 2).unwrap();
        let mut all: Vec<_> = e.vertex_images.iter().chain(&e.edge_images).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 8);
        assert!(expansion_violations(&g, &h, &e).is_empty());
    }

    #[test]
    fn too_large_pattern_is_rejected() {
        let g = complete(6);
        let h = PatternGraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let err = expand_embed_3graph(&g, &h, &SplitPlan::default(), 0).unwrap_err();
        assert!(matches!(err.reason, FailureReason::PaddingImpossible { .. }));
    }

    #[test]
    fn isolated_vertices_are_placed() {
        let g = complete(12);
        let h = PatternGraph::new(5, [(0, 1)]).unwrap();
        let e = expand_embed_3graph(&g, &h, &SplitPlan::default(), 4).unwrap();
        assert!(expansion_violations(&g, &h, &e).is_empty());
    }
}
