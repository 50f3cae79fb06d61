//! Exact counting: automorphisms, transversal copies, monochromatic triangles.

use serde::{Deserialize, Serialize};

use super::{Meter, OracleResult, SearchBudget};
use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::pattern::PatternGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyCount {
    /// Pairs `(tau, sigma)` with both maps injective and every edge present.
    pub labelled: u64,
    pub automorphisms: u64,
    /// `labelled / automorphisms`.
    pub copies: u64,
    pub convention: String,
}

const CONVENTION: &str = "labelled (tau, sigma) pairs divided by |Aut(F)|";

fn extend_auto(h: &PatternGraph, p: &mut Vec<Option<usize>>, used: &mut [bool], x: usize, stop_at_one: bool) -> u64 {
    if x == h.n() {
        return 1;
    }
    if let Some(fixed) = p[x] {
        // pre-assigned (used to ask for a specific image)
        let ok = (0..x).all(|y| h.has_edge(x, y) == h.has_edge(fixed, p[y].expect("assigned")));
        return if ok { extend_auto(h, p, used, x + 1, stop_at_one) } else { 0 };
    }
    let mut total = 0;
    for v in 0..h.n() {
        if used[v] || h.degree(v) != h.degree(x) {
            continue;
        }
        if (0..x).any(|y| h.has_edge(x, y) != h.has_edge(v, p[y].expect("assigned"))) {
            continue;
        }
        p[x] = Some(v);
        used[v] = true;
        total += extend_auto(h, p, used, x + 1, stop_at_one);
        p[x] = None;
        used[v] = false;
        if stop_at_one && total > 0 {
            return total;
        }
    }
    total
}

/// `|Aut(h)|` by backtracking over degree-preserving permutations.
pub fn automorphism_count(h: &PatternGraph) -> u64 {
    extend_auto(h, &mut vec![None; h.n()], &mut vec![false; h.n()], 0, false)
}

/// Whether some automorphism of `h` sends `a` to `b`.
pub(crate) fn maps_vertex(h: &PatternGraph, a: usize, b: usize) -> bool {
    if h.degree(a) != h.degree(b) {
        return false;
    }
    let mut p = vec![None; h.n()];
    p[a] = Some(b);
    let mut used = vec![false; h.n()];
    used[b] = true;
    // vertex a keeps its pre-assigned image; the others are searched in index order
    extend_auto(h, &mut p, &mut used, 0, true) > 0
}

struct Counter<'a> {
    gc: &'a GraphCollection,
    f: &'a PatternGraph,
    tau: Vec<Option<VertexId>>,
    used_v: Vec<bool>,
    meter: Meter,
}

impl Counter<'_> {
    fn sdr(&mut self, compat: &[Vec<ColourId>], e: usize, used: &mut [bool]) -> u64 {
        if e == compat.len() {
            return 1;
        }
        let mut total = 0;
        for &c in &compat[e] {
            if used[c] || !self.meter.tick() {
                continue;
            }
            used[c] = true;
            total += self.sdr(compat, e + 1, used);
            used[c] = false;
        }
        total
    }

    fn vertices(&mut self, x: usize) -> u64 {
        if self.meter.exceeded {
            return 0;
        }
        if x == self.f.n() {
            let compat: Vec<Vec<ColourId>> = self.f.edges().iter().map(|&(a, b)| self.gc.colours_of(self.tau[a].unwrap(), self.tau[b].unwrap())).collect();
            return self.sdr(&compat, 0, &mut vec![false; self.gc.colour_count()]);
        }
        let mut total = 0;
        for v in 0..self.gc.n() {
            if self.used_v[v] || !self.meter.tick() {
                continue;
            }
            if self.f.neighbours(x).iter().any(|&y| y < x && self.gc.multiplicity(v, self.tau[y].unwrap()) == 0) {
                continue;
            }
            self.tau[x] = Some(v);
            self.used_v[v] = true;
            total += self.vertices(x + 1);
            self.tau[x] = None;
            self.used_v[v] = false;
        }
        total
    }
}

/// Exact number of transversal copies of a small pattern `f`.
pub fn count_rainbow_copies(gc: &GraphCollection, f: &PatternGraph, budget: &SearchBudget) -> OracleResult<CopyCount> {
    let mut meter = Meter::new(budget);
    let automorphisms = automorphism_count(f);
    let done = |meter: Meter, labelled: u64| {
        let exceeded = meter.exceeded;
        let r = meter.finish(Some(CopyCount { labelled, automorphisms, copies: labelled / automorphisms, convention: CONVENTION.into() }));
        if exceeded {
            OracleResult { outcome: super::OracleOutcome::BudgetExceeded, stats: r.stats }
        } else {
            r
        }
    };
    if f.edge_count() > gc.colour_count() || f.n() > gc.n() {
        meter.tick();
        return done(meter, 0);
    }
    let mut c = Counter { gc, f, tau: vec![None; f.n()], used_v: vec![false; gc.n()], meter };
    let labelled = c.vertices(0);
    done(c.meter, labelled)
}

/// Triangles inside each `G_c`.
pub fn monochromatic_triangles(gc: &GraphCollection) -> Vec<u64> {
    (0..gc.colour_count())
        .map(|c| {
            let mut t = 0u64;
            for (u, v) in gc.edges(c) {
                let mut common = gc.neighbours(c, u).clone();
                common.intersect_with(gc.neighbours(c, v));
                t += common.ones().filter(|&w| w > u.max(v)).count() as u64;
            }
            t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automorphism_counts() {
        let k3 = PatternGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(automorphism_count(&k3), 6);
        let c5 = PatternGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(automorphism_count(&c5), 10);
        let p3 = PatternGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(automorphism_count(&p3), 2);
        assert!(maps_vertex(&p3, 0, 2));
        assert!(!maps_vertex(&p3, 0, 1));
        assert_eq!(automorphism_count(&PatternGraph::empty(4)), 24);
    }

    #[test]
    fn triangle_in_complete_three_colour_collection() {
        // hand enumeration: 3! vertex maps times 3! colour maps, over |Aut(K_3)| = 6
        let gc = GraphCollection::complete(3, 3);
        let k3 = PatternGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = count_rainbow_copies(&gc, &k3, &SearchBudget::default());
        let c = r.found().unwrap();
        assert_eq!((c.labelled, c.automorphisms, c.copies), (36, 6, 6));
    }

    #[test]
    fn too_few_colours_count_zero() {
        let gc = GraphCollection::complete(6, 2);
        let k3 = PatternGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(count_rainbow_copies(&gc, &k3, &SearchBudget::default()).found().unwrap().copies, 0);
    }

    #[test]
    fn monochromatic_triangles_of_complete_graphs() {
        let gc = GraphCollection::complete(5, 2);
        assert_eq!(monochromatic_triangles(&gc), vec![10, 10]);
    }
}
