//! Exact transversal embedding by backtracking over vertex images, with the
//! colour assignment kept as an incrementally augmented bipartite matching
//! between embedded edges and colours.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use super::count::maps_vertex;
use super::{Meter, OracleResult, SearchBudget};
use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::embedding::TransversalEmbedding;
use crate::pattern::PatternGraph;

struct Search<'a> {
    gc: &'a GraphCollection,
    h: &'a PatternGraph,
    order: Vec<usize>,
    domains: Vec<Vec<VertexId>>,
    tau: Vec<Option<VertexId>>,
    used: FixedBitSet,
    compat: Vec<Vec<ColourId>>,
    edge_col: Vec<Option<ColourId>>,
    col_edge: Vec<Option<usize>>,
    /// Image of `order[0]` must be the smallest image (vertex-transitive patterns).
    anchor: bool,
    meter: Meter,
}

impl Search<'_> {
    fn augment(&mut self, e: usize, seen: &mut [bool]) -> bool {
        for i in 0..self.compat[e].len() {
            let c = self.compat[e][i];
            if seen[c] {
                continue;
            }
            seen[c] = true;
            let free = match self.col_edge[c] {
                None => true,
                Some(f) => self.augment(f, seen),
            };
            if free {
                self.edge_col[e] = Some(c);
                self.col_edge[c] = Some(e);
                return true;
            }
        }
        false
    }

    /// Some unused image remains for every unplaced vertex next to placed ones.
    fn forward_ok(&self) -> bool {
        for w in 0..self.h.n() {
            if self.tau[w].is_some() {
                continue;
            }
            let placed: Vec<VertexId> = self.h.neighbours(w).iter().filter_map(|&z| self.tau[z]).collect();
            if placed.is_empty() {
                continue;
            }
            if !self.domains[w].iter().any(|&u| !self.used.contains(u) && placed.iter().all(|&p| self.gc.multiplicity(u, p) > 0)) {
                return false;
            }
        }
        true
    }

    fn go(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        let floor = if self.anchor && depth > 0 { self.tau[self.order[0]].map_or(0, |v| v + 1) } else { 0 };
        let cands: Vec<VertexId> = self.domains[x].iter().copied().filter(|&v| v >= floor && !self.used.contains(v)).collect();
        for v in cands {
            if !self.meter.tick() {
                return false;
            }
            let placed: Vec<(usize, VertexId)> = self.h.neighbours(x).iter().filter_map(|&y| self.tau[y].map(|u| (y, u))).collect();
            if placed.iter().any(|&(_, u)| self.gc.multiplicity(v, u) == 0) {
                continue;
            }
            let saved = (self.edge_col.clone(), self.col_edge.clone());
            self.tau[x] = Some(v);
            self.used.insert(v);
            let mut ok = true;
            let mut added = Vec::new();
            for &(y, u) in &placed {
                let e = self.h.edge_id(x, y).expect("neighbour edge");
                self.compat[e] = self.gc.colours_of(v, u);
                added.push(e);
                let mut seen = vec![false; self.gc.colour_count()];
                if !self.augment(e, &mut seen) {
                    ok = false;
                    break;
                }
            }
            if ok && self.forward_ok() && self.go(depth + 1) {
                return true;
            }
            for e in added {
                self.compat[e].clear();
            }
            (self.edge_col, self.col_edge) = saved;
            self.tau[x] = None;
            self.used.set(v, false);
            if self.meter.exceeded {
                return false;
            }
        }
        false
    }
}

/// Placement order: most placed neighbours first, then degree, then index.
fn order(h: &PatternGraph) -> Vec<usize> {
    let mut placed = vec![false; h.n()];
    let mut out = Vec::with_capacity(h.n());
    for _ in 0..h.n() {
        let x = (0..h.n())
            .filter(|&x| !placed[x])
            .max_by_key(|&x| (h.neighbours(x).iter().filter(|&&y| placed[y]).count(), h.degree(x), std::cmp::Reverse(x)))
            .expect("unplaced vertex remains");
        placed[x] = true;
        out.push(x);
    }
    out
}

/// Decides whether `gc` has a transversal copy of `h` with `tau(x)` in the
/// target set of `x` (targets given here override those stored on `h`).
/// `Infeasible` is a proof: the search space was exhausted within budget.
pub fn exact_transversal_embed(gc: &GraphCollection, h: &PatternGraph, targets: &BTreeMap<usize, Vec<VertexId>>, budget: &SearchBudget) -> OracleResult<TransversalEmbedding> {
    let mut meter = Meter::new(budget);
    let mut all = h.targets().clone();
    all.extend(targets.iter().map(|(k, v)| (*k, v.clone())));
    if h.n() > gc.n() || h.edge_count() > gc.colour_count() || all.keys().any(|&x| x >= h.n()) {
        return meter.finish(None);
    }
    let domains: Vec<Vec<VertexId>> = (0..h.n())
        .map(|x| match all.get(&x) {
            Some(t) => {
                let mut t: Vec<VertexId> = t.iter().copied().filter(|&v| v < gc.n()).collect();
                t.sort_unstable();
                t.dedup();
                t
            }
            None => (0..gc.n()).collect(),
        })
        .collect();
    let order = order(h);
    let anchor = budget.symmetry_breaking && all.is_empty() && h.n() > 0 && (0..h.n()).all(|y| maps_vertex(h, order[0], y));
    meter.tick();
    let mut s = Search {
        gc,
        h,
        order,
        domains,
        tau: vec![None; h.n()],
        used: FixedBitSet::with_capacity(gc.n()),
        compat: vec![Vec::new(); h.edge_count()],
        edge_col: vec![None; h.edge_count()],
        col_edge: vec![None; gc.colour_count()],
        anchor,
        meter,
    };
    let found = s.go(0).then(|| TransversalEmbedding {
        tau: s.tau.iter().map(|t| t.expect("complete")).collect(),
        sigma: s.edge_col.iter().map(|c| c.expect("perfect matching")).collect(),
    });
    s.meter.finish(found)
}
