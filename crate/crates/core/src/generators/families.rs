//! Pattern families with small separators, and 1-expansions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pattern::PatternGraph;
use crate::rng;
use crate::separability::{certificate_from_separator, separability_certificate, SeparabilityCertificate};
use crate::three_graph::ThreeGraph;

/// The 3-graph obtained from `h` by giving edge `e = xy` the `t[e]` new
/// vertices `c`, each forming the 3-edge `xyc`.
pub fn one_expansion(h: &PatternGraph, t: &[usize]) -> ThreeGraph {
    assert_eq!(t.len(), h.edge_count(), "one multiplicity per edge");
    let mut g = ThreeGraph::new(h.n() + t.iter().sum::<usize>());
    let mut next = h.n();
    for (&(x, y), &te) in h.edges().iter().zip(t) {
        for _ in 0..te {
            g.add_edge(x, y, next).expect("fresh vertex");
            next += 1;
        }
    }
    g
}

pub fn one_expansion_uniform(h: &PatternGraph, t: usize) -> ThreeGraph {
    one_expansion(h, &vec![t; h.edge_count()])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// Vertex-disjoint copies of `K_size` (`size = 3` gives a triangle factor).
    FFactor { size: usize, copies: usize },
    CycleUnion { lengths: Vec<usize> },
    /// `k`-th power of the Hamilton cycle on `n` vertices.
    HamiltonPower { n: usize, k: usize },
    /// `b`-th power of the path on `n` vertices.
    Bandwidth { n: usize, b: usize },
    /// Random tree, each new vertex joined to an earlier one of degree below `max_degree`.
    Tree { n: usize, max_degree: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparableFamily {
    pub pattern: PatternGraph,
    pub mu: f64,
    pub certificate: Option<SeparabilityCertificate>,
    /// Vertex order realising the bandwidth (identity except for trees).
    pub order: Vec<usize>,
}

/// Largest `|pos(u) - pos(v)|` over the edges.
pub fn bandwidth_of_order(h: &PatternGraph, order: &[usize]) -> usize {
    let mut pos = vec![0; h.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    h.edges().iter().map(|&(u, v)| pos[u].abs_diff(pos[v])).max().unwrap_or(0)
}

fn power(n: usize, k: usize, cyclic: bool) -> PatternGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for s in 1..=k {
            let j = i + s;
            if j < n {
                edges.push((i, j));
            } else if cyclic && j % n != i && n > 2 * s {
                edges.push((i, j % n));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    PatternGraph::new(n, edges).expect("valid power graph")
}

/// Cut `k` consecutive vertices out of every window of `s + k`.
fn periodic_cut(n: usize, k: usize, s: usize) -> Vec<usize> {
    (0..n).filter(|i| i % (s + k) < k).collect()
}

pub fn separable_family(family: &Family, mu: f64) -> SeparableFamily {
    let (pattern, explicit) = match family {
        Family::FFactor { size, copies } => {
            let edges = (0..*copies).flat_map(|c| {
                let base = c * size;
                (0..*size).flat_map(move |a| (a + 1..*size).map(move |b| (base + a, base + b)))
            });
            (PatternGraph::new(size * copies, edges).expect("disjoint cliques"), Some(Vec::new()))
        }
        Family::CycleUnion { lengths } => {
            let mut edges = Vec::new();
            let mut base = 0;
            for &l in lengths {
                let l = l.max(3);
                edges.extend((0..l).map(|i| (base + i, base + (i + 1) % l)));
                base += l;
            }
            (PatternGraph::new(base, edges).expect("disjoint cycles"), Some(Vec::new()))
        }
        Family::HamiltonPower { n, k } => {
            let s = ((mu * *n as f64) + 1e-9).floor() as usize;
            (power(*n, *k, true), (s > 0).then(|| periodic_cut(*n, *k, s)))
        }
        Family::Bandwidth { n, b } => {
            let s = ((mu * *n as f64) + 1e-9).floor() as usize;
            (power(*n, *b, false), (s > 0).then(|| periodic_cut(*n, *b, s)))
        }
        Family::Tree { n, max_degree, seed } => {
            let mut r = rng::rng(*seed);
            let mut deg = vec![0usize; *n];
            let mut edges = Vec::new();
            for v in 1..*n {
                let open: Vec<usize> = (0..v).filter(|&u| deg[u] + 1 < (*max_degree).max(2) || (*max_degree <= 1 && deg[u] == 0)).collect();
                let u = if open.is_empty() { r.gen_range(0..v) } else { open[r.gen_range(0..open.len())] };
                deg[u] += 1;
                deg[v] += 1;
                edges.push((u, v));
            }
            (PatternGraph::new(*n, edges).expect("tree"), None)
        }
    };
    let from_explicit = explicit.and_then(|sep| certificate_from_separator(&pattern, &sep, mu));
    let greedy = separability_certificate(&pattern, mu);
    let certificate = match (from_explicit, greedy) {
        (Some(a), Some(b)) => Some(if b.separator.len() < a.separator.len() { b } else { a }),
        (a, b) => a.or(b),
    };
    let order = match family {
        Family::Tree { .. } => bfs_order(&pattern),
        _ => (0..pattern.n()).collect(),
    };
    SeparableFamily { pattern, mu, certificate, order }
}

fn bfs_order(h: &PatternGraph) -> Vec<usize> {
    let mut seen = vec![false; h.n()];
    let mut out = Vec::with_capacity(h.n());
    for s in 0..h.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            out.push(v);
            for &w in h.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_of_an_edge() {
        let h = PatternGraph::new(2, [(0, 1)]).unwrap();
        let g = one_expansion_uniform(&h, 1);
        assert_eq!((g.n(), g.edge_count()), (3, 1));
        assert!(g.contains(0, 1, 2));
    }

    #[test]
    fn expanded_cycle_is_a_loose_cycle() {
        let h = PatternGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let g = one_expansion_uniform(&h, 1);
        assert_eq!((g.n(), g.edge_count()), (10, 5));
        let edges: Vec<_> = g.edges().copied().collect();
        for (i, a) in edges.iter().enumerate() {
            for b in &edges[i + 1..] {
                assert!(a.iter().filter(|v| b.contains(v)).count() <= 1);
            }
        }
        // consecutive edges share exactly one vertex
        for v in 0..5 {
            assert_eq!(g.degree(v), 2);
        }
    }

    #[test]
    fn triangle_factor() {
        let f = separable_family(&Family::FFactor { size: 3, copies: 5 }, 0.2);
        assert_eq!(f.pattern.n(), 15);
        let cert = f.certificate.unwrap();
        assert!(cert.separator.is_empty() && cert.is_valid_for(&f.pattern));
    }

    #[test]
    fn square_of_hamilton_cycle() {
        let f = separable_family(&Family::HamiltonPower { n: 20, k: 2 }, 0.3);
        assert_eq!(f.pattern.edge_count(), 40);
        assert_eq!(f.pattern.max_degree(), 4);
        assert!(f.certificate.unwrap().is_valid_for(&f.pattern));
    }

    #[test]
    fn bandwidth_two_path_power() {
        let f = separable_family(&Family::Bandwidth { n: 30, b: 2 }, 0.3);
        assert_eq!(bandwidth_of_order(&f.pattern, &f.order), 2);
        assert!(f.pattern.edges().iter().all(|&(u, v)| u.abs_diff(v) <= 2));
    }

    #[test]
    fn trees_respect_the_degree_cap() {
        let f = separable_family(&Family::Tree { n: 40, max_degree: 3, seed: 5 }, 0.3);
        assert_eq!(f.pattern.edge_count(), 39);
        assert!(f.pattern.max_degree() <= 3);
        assert_eq!(f.pattern.components().len(), 1);
    }
}
