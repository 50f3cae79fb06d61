//! Tight Hamilton cycles in 3-graphs: cyclic vertex orders in which every
//! three consecutive vertices form an edge.

use fixedbitset::FixedBitSet;

use super::{Meter, OracleResult, SearchBudget};
use crate::collection::VertexId;
use crate::three_graph::ThreeGraph;

pub fn is_tight_hamilton_cycle(g: &ThreeGraph, cycle: &[VertexId]) -> bool {
    let n = g.n();
    if n < 4 || cycle.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    (0..n).all(|i| g.contains(cycle[i], cycle[(i + 1) % n], cycle[(i + 2) % n]))
}

struct Walk<'a> {
    n: usize,
    /// `link[a * n + b]`: vertices `c` with `abc` an edge.
    link: &'a [FixedBitSet],
    path: Vec<VertexId>,
    used: FixedBitSet,
    meter: Meter,
}

impl Walk<'_> {
    fn closes(&self) -> bool {
        let (n, p) = (self.n, &self.path);
        self.link[p[n - 2] * n + p[n - 1]].contains(p[0]) && self.link[p[n - 1] * n + p[0]].contains(p[1])
    }

    fn go(&mut self) -> bool {
        let k = self.path.len();
        if k == self.n {
            return self.closes();
        }
        let (a, b) = (self.path[k - 2], self.path[k - 1]);
        let mut next = self.link[a * self.n + b].clone();
        next.difference_with(&self.used);
        for c in next.ones() {
            if !self.meter.tick() {
                return false;
            }
            self.path.push(c);
            self.used.insert(c);
            if self.go() {
                return true;
            }
            self.path.pop();
            self.used.set(c, false);
        }
        false
    }
}

/// Exhaustive search with the first vertex fixed to 0 (every Hamilton cycle
/// can be rotated to start there).
pub fn tight_hamilton_search(g: &ThreeGraph, budget: &SearchBudget) -> OracleResult<Vec<VertexId>> {
    let n = g.n();
    let mut meter = Meter::new(budget);
    meter.tick();
    if n < 4 || (0..n).any(|v| g.degree(v) == 0) {
        return meter.finish(None);
    }
    let mut link = vec![FixedBitSet::with_capacity(n); n * n];
    for e in g.edges() {
        for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            link[e[a] * n + e[b]].insert(e[c]);
            link[e[b] * n + e[a]].insert(e[c]);
        }
    }
    let mut w = Walk { n, link: &link, path: vec![0], used: FixedBitSet::with_capacity(n), meter };
    w.used.insert(0);
    for v1 in 1..n {
        w.path.push(v1);
        w.used.insert(v1);
        if w.go() {
            let cycle = w.path.clone();
            return w.meter.finish(Some(cycle));
        }
        w.path.pop();
        w.used.set(v1, false);
        if w.meter.exceeded {
            break;
        }
    }
    w.meter.finish(None)
}
