//! Collections from a random tournament-like orientation `J` on `V ⊎ C`:
//! `xy` is an edge of `G_c` exactly when `x, y, c` form a cyclic triangle of
//! `J`. No colour then holds all three edges of a vertex triple.

use rand::Rng;

use crate::collection::GraphCollection;
use crate::rng;

/// Orientation of all vertex-vertex and vertex-colour pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub n: usize,
    pub k: usize,
    /// `vv[u * n + v]` for `u < v`: true when the arc is `u -> v`.
    pub vv: Vec<bool>,
    /// `vc[x * k + c]`: true when the arc is `x -> c`.
    pub vc: Vec<bool>,
}

impl Orientation {
    pub fn random(n: usize, k: usize, seed: u64) -> Self {
        let mut r = rng::rng(seed);
        let mut vv = vec![false; n * n];
        for u in 0..n {
            for v in u + 1..n {
                vv[u * n + v] = r.gen_bool(0.5);
            }
        }
        let vc = (0..n * k).map(|_| r.gen_bool(0.5)).collect();
        Self { n, k, vv, vc }
    }

    pub fn reversed(&self) -> Self {
        let mut vv = self.vv.clone();
        for u in 0..self.n {
            for v in u + 1..self.n {
                vv[u * self.n + v] = !vv[u * self.n + v];
            }
        }
        Self { n: self.n, k: self.k, vv, vc: self.vc.iter().map(|b| !b).collect() }
    }

    /// Whether the arc between vertices `u` and `v` points `u -> v`.
    pub fn arc(&self, u: usize, v: usize) -> bool {
        if u < v {
            self.vv[u * self.n + v]
        } else {
            !self.vv[v * self.n + u]
        }
    }

    /// `x -> y -> c -> x` or the reverse.
    pub fn cyclic(&self, x: usize, y: usize, c: usize) -> bool {
        let a = self.arc(x, y);
        let b = self.vc[y * self.k + c];
        let back = !self.vc[x * self.k + c];
        a == b && b == back
    }
}

pub fn cyclic_triangle_from(o: &Orientation) -> GraphCollection {
    let mut gc = GraphCollection::with_colours(o.n, o.k);
    for c in 0..o.k {
        for x in 0..o.n {
            for y in x + 1..o.n {
                if o.cyclic(x, y, c) {
                    gc.insert(c, x, y);
                }
            }
        }
    }
    gc
}

/// `n` vertices and `n` colours.
pub fn cyclic_triangle_collection(n: usize, seed: u64) -> GraphCollection {
    cyclic_triangle_collection_sized(n, n, seed)
}

pub fn cyclic_triangle_collection_sized(n: usize, k: usize, seed: u64) -> GraphCollection {
    cyclic_triangle_from(&Orientation::random(n, k, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::monochromatic_triangles;

    #[test]
    fn no_monochromatic_triangle() {
        for seed in 0..5 {
            let gc = cyclic_triangle_collection(12, seed);
            assert!(monochromatic_triangles(&gc).iter().all(|&t| t == 0));
        }
    }

    #[test]
    fn reversal_gives_the_same_collection() {
        let o = Orientation::random(10, 7, 3);
        assert!(cyclic_triangle_from(&o).same_edges(&cyclic_triangle_from(&o.reversed())));
    }

    #[test]
    fn arcs_are_antisymmetric() {
        let o = Orientation::random(6, 2, 1);
        for u in 0..6 {
            for v in 0..6 {
                if u != v {
                    assert_ne!(o.arc(u, v), o.arc(v, u));
                }
            }
        }
    }
}
