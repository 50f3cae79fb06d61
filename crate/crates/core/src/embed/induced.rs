//! Induced matchings whose vertices are pairwise far apart.

use std::collections::VecDeque;

use super::{edge_classes, EmbedFailure, FailureReason};
use crate::edge_colouring::vizing_matching;
use crate::pattern::PatternGraph;

const STAGE: &str = "find_induced_matching";

/// Whether a marked vertex lies within distance two of `s` in `h` minus the
/// `skip` edges.
fn near(h: &PatternGraph, s: usize, marked: &[bool], skip: &[(usize, usize)]) -> bool {
    let blocked = |a: usize, b: usize| skip.iter().any(|&(u, v)| (u == a && v == b) || (u == b && v == a));
    let mut dist = vec![usize::MAX; h.n()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        if dist[u] >= 2 {
            continue;
        }
        for &w in h.neighbours(u) {
            if dist[w] != usize::MAX || blocked(u, w) {
                continue;
            }
            if marked[w] {
                return true;
            }
            dist[w] = dist[u] + 1;
            q.push_back(w);
        }
    }
    false
}

/// For every edge `e = ij` of `R`, `sizes[e]` edges of `H` between
/// `phi^-1(i)` and `phi^-1(j)`, avoiding `forbidden`, such that any two
/// chosen vertices from different matching edges are at distance at least
/// three in `H` minus the matching. Candidates per edge of `R` are the largest
/// colour class of a proper edge colouring of that bipartite slice first, then
/// the rest of the slice.
pub fn find_induced_matching(h: &PatternGraph, phi: &[usize], r: &PatternGraph, sizes: &[usize], forbidden: &[usize]) -> Result<Vec<Vec<usize>>, EmbedFailure> {
    let classes = edge_classes(r, h, phi).map_err(|e| EmbedFailure::precondition(STAGE, e, 0))?;
    if sizes.len() != r.edge_count() {
        return Err(EmbedFailure::precondition(STAGE, format!("{} sizes for {} edges of R", sizes.len(), r.edge_count()), 0));
    }
    let mut banned = vec![false; h.n()];
    for &w in forbidden {
        if w < h.n() {
            banned[w] = true;
        }
    }
    let mut marked = vec![false; h.n()];
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut out = vec![Vec::new(); r.edge_count()];
    for e in 0..r.edge_count() {
        if sizes[e] == 0 {
            continue;
        }
        let slice: Vec<usize> = (0..h.edge_count()).filter(|&f| classes[f] == e).collect();
        let j = h.edge_subgraph(&slice);
        let mut order: Vec<usize> = vizing_matching(&j).into_iter().map(|i| slice[i]).collect();
        let rest: Vec<usize> = slice.iter().copied().filter(|f| !order.contains(f)).collect();
        order.extend(rest);
        for f in order {
            if out[e].len() == sizes[e] {
                break;
            }
            let (a, b) = h.edge(f);
            if banned[a] || banned[b] || marked[a] || marked[b] {
                continue;
            }
            let mut skip = chosen.clone();
            skip.push((a, b));
            if near(h, a, &marked, &skip) || near(h, b, &marked, &skip) {
                continue;
            }
            marked[a] = true;
            marked[b] = true;
            chosen.push((a, b));
            out[e].push(f);
        }
        if out[e].len() < sizes[e] {
            return Err(EmbedFailure::new(STAGE, FailureReason::MatchingTooSmall { edge: e, wanted: sizes[e], found: out[e].len() }, 0));
        }
    }
    Ok(out)
}

/// Brute-force check of the matching predicate: disjoint edges, no
/// forbidden vertex, no `H`-edge between different matching edges, and every
/// other vertex sees at most one matching edge.
pub fn induced_matching_violations(h: &PatternGraph, edges: &[usize], forbidden: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    let mut owner = vec![usize::MAX; h.n()];
    for (i, &f) in edges.iter().enumerate() {
        let (a, b) = h.edge(f);
        for v in [a, b] {
            if owner[v] != usize::MAX {
                out.push(format!("vertex {v} covered twice"));
            }
            owner[v] = i;
            if forbidden.contains(&v) {
                out.push(format!("forbidden vertex {v} used"));
            }
        }
    }
    for &(a, b) in h.edges() {
        if owner[a] != usize::MAX && owner[b] != usize::MAX && owner[a] != owner[b] {
            out.push(format!("edge {a}{b} joins two matching edges"));
        }
    }
    for y in (0..h.n()).filter(|&y| owner[y] == usize::MAX) {
        let mut seen: Vec<usize> = h.neighbours(y).iter().map(|&w| owner[w]).filter(|&o| o != usize::MAX).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() > 1 {
            out.push(format!("vertex {y} sees matching edges {seen:?}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_matching_any_edge() {
        let h = PatternGraph::new(6, [(0, 3), (1, 4), (2, 5)]).unwrap();
        let r = PatternGraph::new(2, [(0, 1)]).unwrap();
        let m = find_induced_matching(&h, &[0, 0, 0, 1, 1, 1], &r, &[1], &[]).unwrap();
        assert_eq!(m[0].len(), 1);
        let m = find_induced_matching(&h, &[0, 0, 0, 1, 1, 1], &r, &[3], &[0]).unwrap_err();
        assert!(matches!(m.reason, FailureReason::MatchingTooSmall { wanted: 3, found: 2, .. }));
    }

    #[test]
    fn eight_cycle_predicate() {
        let h = PatternGraph::new(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
        let phi: Vec<usize> = (0..8).map(|i| i % 2).collect();
        let r = PatternGraph::new(2, [(0, 1)]).unwrap();
        for want in 1..=2 {
            let m = find_induced_matching(&h, &phi, &r, &[want], &[]).unwrap();
            assert_eq!(m[0].len(), want);
            assert!(induced_matching_violations(&h, &m[0], &[]).is_empty());
        }
        assert!(find_induced_matching(&h, &phi, &r, &[3], &[]).is_err());
    }

    #[test]
    fn predicate_catches_close_edges() {
        let h = PatternGraph::new(6, (0..5).map(|i| (i, i + 1))).unwrap();
        assert!(!induced_matching_violations(&h, &[0, 2], &[]).is_empty());
        assert!(!induced_matching_violations(&h, &[0, 3], &[]).is_empty());
        assert!(induced_matching_violations(&h, &[0, 4], &[]).is_empty());
    }
}
