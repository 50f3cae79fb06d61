//! Spanning embeddings of bounded-degree patterns into a single host graph
//! made of bipartite slices between clusters.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{bits, edge_classes, ranks, EmbedFailure, FailureReason, SplitPlan, Targets};
use crate::collection::VertexId;
use crate::matching::max_bipartite_matching;
use crate::pattern::PatternGraph;
use crate::rng;
use crate::templates::{Template, ThickGraph};

/// Clusters indexed by the vertices of `R` and one simple graph on the host
/// vertices; only pairs inside slices of `R`-edges matter.
#[derive(Clone, Debug)]
pub struct ClusterHost {
    pub r: PatternGraph,
    pub clusters: Vec<Vec<VertexId>>,
    pub adj: Vec<FixedBitSet>,
}

impl ClusterHost {
    pub fn new(r: PatternGraph, clusters: Vec<Vec<VertexId>>, n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for (u, v) in edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Self { r, clusters, adj }
    }

    /// Complete bipartite slices for every edge of `R`.
    pub fn complete(r: PatternGraph, clusters: Vec<Vec<VertexId>>, n: usize) -> Self {
        let mut edges = Vec::new();
        for &(i, j) in r.edges() {
            for &u in &clusters[i] {
                edges.extend(clusters[j].iter().map(|&v| (u, v)));
            }
        }
        Self::new(r, clusters, n, edges)
    }

    /// The thick graph of a template, on the template's clusters.
    pub fn from_thick(t: &Template, thick: &ThickGraph) -> Self {
        Self { r: t.r.clone(), clusters: t.clusters.clone(), adj: thick.adj.clone() }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupEmbedding {
    pub tau: Vec<VertexId>,
    pub attempts: usize,
}

const STAGE: &str = "blowup_embed";

/// Degeneracy order, reversed: vertices of the densest core come first.
fn reverse_degeneracy(h: &PatternGraph) -> Vec<usize> {
    let n = h.n();
    let mut deg: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut gone = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !gone[v]).min_by_key(|&v| (deg[v], v)).expect("vertex left");
        gone[v] = true;
        order.push(v);
        for &w in h.neighbours(v) {
            if !gone[w] {
                deg[w] -= 1;
            }
        }
    }
    order.reverse();
    order
}

/// Embeds `H` with `tau(x)` in cluster `phi(x)` and in `T_x` when given.
///
/// Each attempt sets aside about `plan.blowup_buffer` of every cluster's
/// pattern vertices as an independent buffer, places the rest greedily (most
/// constrained first, ties by reverse degeneracy order, image maximising the
/// smallest remaining candidate set of a neighbour), and finally places the
/// buffer by one bipartite matching per cluster. A vertex left without a
/// candidate is placed by moving one or two already placed vertices to free
/// hosts. Attempts reseed up to `plan.retries` times.
pub fn blowup_embed(host: &ClusterHost, h: &PatternGraph, phi: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> Result<BlowupEmbedding, EmbedFailure> {
    edge_classes(&host.r, h, phi).map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let mut count = vec![0usize; host.r.n()];
    for &p in phi {
        count[p] += 1;
    }
    if let Some(j) = (0..host.r.n()).find(|&j| count[j] > host.clusters[j].len()) {
        return Err(EmbedFailure::precondition(STAGE, format!("cluster {j} has {} pattern vertices but {} host vertices", count[j], host.clusters[j].len()), seed));
    }
    let base = reverse_degeneracy(h);
    for attempt in 0..plan.retries {
        if let Some(tau) = attempt_once(host, h, phi, targets, plan, &base, rng::derive(seed, attempt as u64)) {
            debug_assert!(verify_blowup(host, h, phi, targets, &tau).is_empty());
            return Ok(BlowupEmbedding { tau, attempts: attempt + 1 });
        }
    }
    Err(EmbedFailure::new(STAGE, FailureReason::EmbeddingFailed { attempts: plan.retries }, seed))
}

struct State<'a> {
    host: &'a ClusterHost,
    h: &'a PatternGraph,
    allowed: Vec<FixedBitSet>,
    tau: Vec<Option<VertexId>>,
    owner: Vec<Option<usize>>,
    cand: Vec<FixedBitSet>,
}

impl State<'_> {
    /// Allowed, free, and adjacent to the images of all placed neighbours.
    fn fresh(&self, y: usize) -> FixedBitSet {
        let mut c = self.allowed[y].clone();
        for &w in self.h.neighbours(y) {
            if let Some(v) = self.tau[w] {
                c.intersect_with(&self.host.adj[v]);
            }
        }
        c.ones().filter(|&v| self.owner[v].is_none()).fold(FixedBitSet::with_capacity(self.host.n()), |mut b, v| {
            b.insert(v);
            b
        })
    }

    /// Images `x` could take ignoring occupancy.
    fn compatible(&self, x: usize) -> Vec<VertexId> {
        let mut c = self.allowed[x].clone();
        for &w in self.h.neighbours(x) {
            if let Some(v) = self.tau[w] {
                c.intersect_with(&self.host.adj[v]);
            }
        }
        c.ones().collect()
    }

    fn put(&mut self, x: usize, v: VertexId) {
        self.tau[x] = Some(v);
        self.owner[v] = Some(x);
    }

    fn lift(&mut self, x: usize) -> VertexId {
        let v = self.tau[x].take().expect("placed");
        self.owner[v] = None;
        v
    }

    fn refresh(&mut self) -> bool {
        let mut ok = true;
        for y in 0..self.h.n() {
            if self.tau[y].is_none() {
                self.cand[y] = self.fresh(y);
                ok &= self.cand[y].count_ones(..) > 0;
            }
        }
        ok
    }

    /// Places `x` on an occupied compatible vertex after moving its owner
    /// (and possibly that owner's new host's owner) to free vertices.
    fn repair(&mut self, x: usize, order: &[usize]) -> bool {
        let mut targets = self.compatible(x);
        targets.sort_by_key(|&v| order[v]);
        for v in targets {
            let Some(z) = self.owner[v] else { continue };
            if self.h.has_edge(x, z) {
                continue;
            }
            self.lift(z);
            self.put(x, v);
            let mut zs = self.compatible(z);
            zs.sort_by_key(|&u| order[u]);
            for &u in &zs {
                match self.owner[u] {
                    None => {
                        self.put(z, u);
                        if self.refresh() {
                            return true;
                        }
                        self.lift(z);
                    }
                    Some(z2) if z2 != x && !self.h.has_edge(z, z2) => {
                        self.lift(z2);
                        self.put(z, u);
                        let mut z2s = self.compatible(z2);
                        z2s.sort_by_key(|&w| order[w]);
                        for w in z2s {
                            if self.owner[w].is_none() {
                                self.put(z2, w);
                                if self.refresh() {
                                    return true;
                                }
                                self.lift(z2);
                            }
                        }
                        self.lift(z);
                        self.put(z2, u);
                    }
                    _ => {}
                }
            }
            self.lift(x);
            self.put(z, v);
        }
        self.refresh();
        false
    }
}

fn attempt_once(host: &ClusterHost, h: &PatternGraph, phi: &[usize], targets: &Targets, plan: &SplitPlan, base: &[usize], seed: u64) -> Option<Vec<VertexId>> {
    let n = host.n();
    let hn = h.n();
    let mut r = rng::rng(seed);
    let vrank = ranks(n, &mut r);
    let mut base_rank = vec![0; hn];
    for (i, &v) in base.iter().enumerate() {
        base_rank[v] = i;
    }

    let mut per_cluster = vec![Vec::new(); host.r.n()];
    for x in 0..hn {
        per_cluster[phi[x]].push(x);
    }
    let mut buffer = vec![false; hn];
    for xs in &per_cluster {
        let want = (plan.blowup_buffer * xs.len() as f64).ceil() as usize;
        let mut have = 0;
        for x in rng::shuffled(xs, &mut r) {
            if have == want {
                break;
            }
            if h.neighbours(x).iter().all(|&w| !buffer[w]) {
                buffer[x] = true;
                have += 1;
            }
        }
    }

    let allowed: Vec<FixedBitSet> = (0..hn)
        .map(|x| {
            let mut c = bits(n, host.clusters[phi[x]].iter().copied());
            if let Some(tx) = targets.get(&x) {
                c.intersect_with(&bits(n, tx.iter().copied()));
            }
            c
        })
        .collect();
    let mut st = State { host, h, cand: allowed.clone(), allowed, tau: vec![None; hn], owner: vec![None; n] };
    let mut left: Vec<usize> = (0..hn).filter(|&x| !buffer[x]).collect();

    while !left.is_empty() {
        let (i, &x) = left.iter().enumerate().min_by_key(|&(_, &x)| (st.cand[x].count_ones(..), base_rank[x]))?;
        left.swap_remove(i);
        let open: Vec<usize> = h.neighbours(x).iter().copied().filter(|&y| st.tau[y].is_none()).collect();
        let mut best: Option<(usize, usize, VertexId)> = None;
        for v in st.cand[x].ones() {
            let score = open.iter().map(|&y| st.cand[y].intersection_count(&host.adj[v])).min().unwrap_or(usize::MAX);
            if score == 0 {
                continue;
            }
            if best.is_none_or(|(s, rk, _)| score > s || (score == s && vrank[v] < rk)) {
                best = Some((score, vrank[v], v));
            }
        }
        match best {
            Some((_, _, v)) => {
                st.put(x, v);
                for c in st.cand.iter_mut() {
                    c.set(v, false);
                }
                for &y in &open {
                    st.cand[y].intersect_with(&host.adj[v]);
                }
            }
            None => {
                if !st.repair(x, &vrank) {
                    return None;
                }
            }
        }
    }

    for xs in &per_cluster {
        let buf: Vec<usize> = xs.iter().copied().filter(|&x| buffer[x]).collect();
        if buf.is_empty() {
            continue;
        }
        for &x in &buf {
            st.cand[x] = st.fresh(x);
        }
        let free: Vec<VertexId> = {
            let mut all = FixedBitSet::with_capacity(n);
            for &x in &buf {
                all.union_with(&st.cand[x]);
            }
            all.ones().collect()
        };
        let adj: Vec<Vec<usize>> = buf.iter().map(|&x| free.iter().enumerate().filter(|&(_, &v)| st.cand[x].contains(v)).map(|(i, _)| i).collect()).collect();
        let m = max_bipartite_matching(free.len(), &adj);
        let mut unmatched = Vec::new();
        for (i, &x) in buf.iter().enumerate() {
            match m.left[i] {
                Some(j) => st.put(x, free[j]),
                None => unmatched.push(x),
            }
        }
        for x in unmatched {
            st.refresh();
            if !st.repair(x, &vrank) {
                return None;
            }
        }
    }
    st.tau.into_iter().collect()
}

/// Structural check: ranges, injectivity, clusters, targets and host edges.
pub fn verify_blowup(host: &ClusterHost, h: &PatternGraph, phi: &[usize], targets: &Targets, tau: &[VertexId]) -> Vec<String> {
    let mut out = Vec::new();
    if tau.len() != h.n() {
        return vec![format!("{} images for {} vertices", tau.len(), h.n())];
    }
    let mut seen = FixedBitSet::with_capacity(host.n());
    for (x, &v) in tau.iter().enumerate() {
        if v >= host.n() {
            out.push(format!("image of {x} out of range"));
            continue;
        }
        if seen.put(v) {
            out.push(format!("image {v} used twice"));
        }
        if !host.clusters[phi[x]].contains(&v) {
            out.push(format!("{x} leaves cluster {}", phi[x]));
        }
        if targets.get(&x).is_some_and(|t| !t.contains(&v)) {
            out.push(format!("{x} misses its target"));
        }
    }
    for &(a, b) in h.edges() {
        if tau[a] < host.n() && tau[b] < host.n() && !host.adj[tau[a]].contains(tau[b]) {
            out.push(format!("edge {a}{b} not in the host"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn two(n: usize) -> (PatternGraph, Vec<Vec<usize>>) {
        (PatternGraph::new(2, [(0, 1)]).unwrap(), vec![(0..n).collect(), (n..2 * n).collect()])
    }

    fn random_host(n: usize, p: f64, seed: u64) -> ClusterHost {
        let (r, cl) = two(n);
        let mut g = rng::rng(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in n..2 * n {
                if g.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        ClusterHost::new(r, cl, 2 * n, edges)
    }

    fn ladder(n: usize) -> (PatternGraph, Vec<usize>) {
        // two paths x_0..x_{n-1} and y_0..y_{n-1} with rungs; bipartite via parity
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, n + i));
            if i + 1 < n {
                edges.push((i, n + i + 1));
                edges.push((n + i, i + 1));
            }
        }
        (PatternGraph::new(2 * n, edges).unwrap(), (0..2 * n).map(|v| usize::from(v >= n)).collect())
    }

    #[test]
    fn complete_host_any_pattern() {
        let (r, cl) = two(10);
        let host = ClusterHost::complete(r, cl, 20);
        let (h, phi) = ladder(10);
        let out = blowup_embed(&host, &h, &phi, &Targets::new(), &SplitPlan::default(), 1).unwrap();
        assert!(verify_blowup(&host, &h, &phi, &Targets::new(), &out.tau).is_empty());
    }

    #[test]
    fn dense_random_matching() {
        let mut ok = 0;
        for seed in 0..20 {
            let host = random_host(30, 0.6, seed);
            let h = PatternGraph::new(60, (0..30).map(|i| (i, i + 30))).unwrap();
            let phi: Vec<usize> = (0..60).map(|v| usize::from(v >= 30)).collect();
            if let Ok(out) = blowup_embed(&host, &h, &phi, &Targets::new(), &SplitPlan::default(), seed) {
                assert!(verify_blowup(&host, &h, &phi, &Targets::new(), &out.tau).is_empty());
                ok += 1;
            }
        }
        assert!(ok >= 18, "{ok}/20");
    }

    #[test]
    fn isolated_host_vertex_fails() {
        let (r, cl) = two(4);
        let mut host = ClusterHost::complete(r, cl, 8);
        for v in 4..8 {
            host.adj[0].set(v, false);
            host.adj[v].set(0, false);
        }
        let h = PatternGraph::new(8, (0..4).map(|i| (i, i + 4))).unwrap();
        let phi: Vec<usize> = (0..8).map(|v| usize::from(v >= 4)).collect();
        let err = blowup_embed(&host, &h, &phi, &Targets::new(), &SplitPlan::default(), 0).unwrap_err();
        assert!(matches!(err.reason, FailureReason::EmbeddingFailed { .. }));
    }

    #[test]
    fn targets_are_respected() {
        let (r, cl) = two(6);
        let host = ClusterHost::complete(r, cl, 12);
        let (h, phi) = ladder(6);
        let targets: Targets = [(0, vec![5]), (7, vec![6, 7])].into();
        let out = blowup_embed(&host, &h, &phi, &targets, &SplitPlan::default(), 4).unwrap();
        assert_eq!(out.tau[0], 5);
        assert!([6, 7].contains(&out.tau[7]));
    }
}
