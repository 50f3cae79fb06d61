//! Maximum bipartite matching (Hopcroft-Karp).

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// Partner of each left vertex.
    pub left: Vec<Option<usize>>,
    /// Partner of each right vertex.
    pub right: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn is_left_perfect(&self) -> bool {
        self.size == self.left.len()
    }
}

const INF: usize = usize::MAX;

/// `adj[l]` lists the right neighbours of left vertex `l`. Neighbour lists are
/// scanned in order, so the result is deterministic.
pub fn max_bipartite_matching(n_right: usize, adj: &[Vec<usize>]) -> Matching {
    let n_left = adj.len();
    let mut ml = vec![None; n_left];
    let mut mr: Vec<Option<usize>> = vec![None; n_right];
    let mut dist = vec![INF; n_left];
    let mut size = 0;
    loop {
        let mut q = VecDeque::new();
        for l in 0..n_left {
            if ml[l].is_none() {
                dist[l] = 0;
                q.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = q.pop_front() {
            for &r in &adj[l] {
                match mr[r] {
                    None => found = true,
                    Some(l2) if dist[l2] == INF => {
                        dist[l2] = dist[l] + 1;
                        q.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for l in 0..n_left {
            if ml[l].is_none() && augment(l, adj, &mut ml, &mut mr, &mut dist, &mut it) {
                size += 1;
            }
        }
    }
    Matching { left: ml, right: mr, size }
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    ml: &mut [Option<usize>],
    mr: &mut [Option<usize>],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    while it[l] < adj[l].len() {
        let r = adj[l][it[l]];
        it[l] += 1;
        let ok = match mr[r] {
            None => true,
            Some(l2) => dist[l2] == dist[l].wrapping_add(1) && augment(l2, adj, ml, mr, dist, it),
        };
        if ok {
            ml[l] = Some(r);
            mr[r] = Some(l);
            return true;
        }
    }
    dist[l] = INF;
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n_right: usize, adj: &[Vec<usize>]) -> usize {
        fn go(l: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if l == adj.len() {
                return 0;
            }
            let mut best = go(l + 1, adj, used);
            for &r in &adj[l] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(l + 1, adj, used));
                    used[r] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; n_right])
    }

    #[test]
    fn matches_brute_force() {
        let cases: Vec<(usize, Vec<Vec<usize>>)> = vec![
            (3, vec![vec![0, 1], vec![0], vec![0, 2]]),
            (2, vec![vec![0], vec![0], vec![1]]),
            (4, vec![vec![], vec![1, 2], vec![1], vec![2, 3], vec![3]]),
        ];
        for (nr, adj) in cases {
            let m = max_bipartite_matching(nr, &adj);
            assert_eq!(m.size, brute(nr, &adj));
            for (l, r) in m.left.iter().enumerate() {
                if let Some(r) = r {
                    assert!(adj[l].contains(r));
                    assert_eq!(m.right[*r], Some(l));
                }
            }
        }
    }
}
