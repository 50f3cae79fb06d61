//! The parity 3-graph on three parts `V_1, V_2, V_3`: from a random
//! 3-partite graph `J`, the triple `abc` (one vertex per part) is an edge when
//! `|{a,b,c} ∩ X|` is even and `abc` is a triangle of `J`, or odd and `abc` is
//! independent in `J`.

use rand::Rng;

use crate::rng;
use crate::three_graph::ThreeGraph;

/// 3-partite graph on parts `0..p`, `p..2p`, `2p..3p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripartiteGraph {
    pub p: usize,
    adj: Vec<bool>,
}

impl TripartiteGraph {
    /// Each cross-part pair independently with probability 1/2.
    pub fn random(p: usize, seed: u64) -> Self {
        let n = 3 * p;
        let mut r = rng::rng(seed);
        let mut adj = vec![false; n * n];
        for u in 0..n {
            for v in u + 1..n {
                if u / p != v / p && r.gen_bool(0.5) {
                    adj[u * n + v] = true;
                    adj[v * n + u] = true;
                }
            }
        }
        Self { p, adj }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * 3 * self.p + v]
    }

    /// Complement inside the cross-part pairs.
    pub fn complement(&self) -> Self {
        let n = 3 * self.p;
        let mut adj = vec![false; n * n];
        for u in 0..n {
            for v in 0..n {
                adj[u * n + v] = u != v && u / self.p != v / self.p && !self.adj[u * n + v];
            }
        }
        Self { p: self.p, adj }
    }
}

pub fn parity_threegraph_from(j: &TripartiteGraph, x: &[usize]) -> ThreeGraph {
    let p = j.p;
    let mut in_x = vec![false; 3 * p];
    for &v in x {
        if v < 3 * p {
            in_x[v] = true;
        }
    }
    let mut g = ThreeGraph::new(3 * p);
    for a in 0..p {
        for b in p..2 * p {
            for c in 2 * p..3 * p {
                let odd = (in_x[a] as usize + in_x[b] as usize + in_x[c] as usize) % 2 == 1;
                let present = [j.has_edge(a, b), j.has_edge(b, c), j.has_edge(a, c)];
                let keep = if odd { present.iter().all(|&e| !e) } else { present.iter().all(|&e| e) };
                if keep {
                    g.add_edge(a, b, c).expect("distinct parts");
                }
            }
        }
    }
    g.set_parts((0..3 * p).map(|v| v / p).collect()).expect("one label per vertex");
    g
}

pub fn parity_threegraph(n_per_part: usize, x: &[usize], seed: u64) -> ThreeGraph {
    parity_threegraph_from(&TripartiteGraph::random(n_per_part, seed), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_x_keeps_only_triangles() {
        let j = TripartiteGraph::random(4, 2);
        let g = parity_threegraph_from(&j, &[]);
        for e in g.edges() {
            assert!(j.has_edge(e[0], e[1]) && j.has_edge(e[1], e[2]) && j.has_edge(e[0], e[2]));
        }
    }

    #[test]
    fn complementing_x_complements_j() {
        // flipping X flips every parity, which swaps the roles of triangles and independent triples
        for seed in 0..6 {
            let j = TripartiteGraph::random(3, seed);
            let x = [0, 4, 8];
            let rest: Vec<usize> = (0..9).filter(|v| !x.contains(v)).collect();
            assert_eq!(parity_threegraph_from(&j, &rest), parity_threegraph_from(&j.complement(), &x));
        }
    }

    #[test]
    fn parts_are_declared() {
        let g = parity_threegraph(2, &[1], 0);
        assert_eq!(g.part_lists().unwrap(), vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
    }
}
