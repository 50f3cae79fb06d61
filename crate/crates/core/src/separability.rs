//! Separators certifying that a pattern breaks into small pieces: a set `X`
//! with `|X| <= mu v(H)` such that every component of `H - X` has at most
//! `mu v(H)` vertices.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::pattern::PatternGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub mu: f64,
    pub separator: Vec<usize>,
    /// Components of `H - X`, each sorted.
    pub components: Vec<Vec<usize>>,
}

impl SeparabilityCertificate {
    /// Recomputes the components and checks both size bounds.
    pub fn is_valid_for(&self, h: &PatternGraph) -> bool {
        let mut removed = vec![false; h.n()];
        for &x in &self.separator {
            if x >= h.n() || removed[x] {
                return false;
            }
            removed[x] = true;
        }
        let limit = self.mu * h.n() as f64;
        let comps = h.components_without(&removed);
        self.separator.len() as f64 <= limit && comps.iter().all(|c| c.len() as f64 <= limit) && comps == self.components
    }

    pub fn largest_component(&self) -> usize {
        self.components.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Certificate for a caller-supplied separator, if it satisfies both bounds.
pub fn certificate_from_separator(h: &PatternGraph, separator: &[usize], mu: f64) -> Option<SeparabilityCertificate> {
    let mut sep = separator.to_vec();
    sep.sort_unstable();
    sep.dedup();
    let mut removed = vec![false; h.n()];
    for &x in &sep {
        if x >= h.n() {
            return None;
        }
        removed[x] = true;
    }
    let cert = SeparabilityCertificate { mu, components: h.components_without(&removed), separator: sep };
    cert.is_valid_for(h).then_some(cert)
}

/// Greedy search for a separator. Two strategies run and the smaller valid
/// separator wins: breadth-first peeling (cut off a ball of at most
/// `mu v(H)` vertices by deleting the next layer) and max-reduction (delete the
/// vertex that most shrinks the largest component). `None` means the budget
/// `mu v(H)` was exhausted; that is not a proof that no separator exists.
pub fn separability_certificate(h: &PatternGraph, mu: f64) -> Option<SeparabilityCertificate> {
    let n = h.n();
    let limit = (mu * n as f64 + 1e-9).floor() as usize;
    let mut best: Option<SeparabilityCertificate> = None;
    for sep in [peel(h, limit), max_reduction(h, limit)].into_iter().flatten() {
        if let Some(cert) = certificate_from_separator(h, &sep, mu) {
            if best.as_ref().is_none_or(|b| cert.separator.len() < b.separator.len()) {
                best = Some(cert);
            }
        }
    }
    best
}

fn largest(comps: &[Vec<usize>]) -> usize {
    comps.iter().map(Vec::len).max().unwrap_or(0)
}

fn peel(h: &PatternGraph, limit: usize) -> Option<Vec<usize>> {
    let n = h.n();
    let mut removed = vec![false; n];
    let mut sep = Vec::new();
    loop {
        let comps = h.components_without(&removed);
        let Some(big) = comps.iter().filter(|c| c.len() > limit).max_by_key(|c| (c.len(), std::cmp::Reverse(c[0]))) else {
            return Some(sep);
        };
        if limit == 0 || sep.len() > limit {
            return None;
        }
        let far = bfs_layers(h, &removed, big[0]).into_iter().flatten().last().unwrap_or(big[0]);
        let layers = bfs_layers(h, &removed, far);
        let mut ball = 0usize;
        let mut choice: Option<(usize, f64)> = None;
        for (k, layer) in layers.iter().enumerate() {
            if ball > limit {
                break;
            }
            if k > 0 && ball > 0 {
                let score = layer.len() as f64 / (ball + layer.len()) as f64;
                if choice.is_none_or(|(_, s)| score <= s) {
                    choice = Some((k, score));
                }
            }
            ball += layer.len();
        }
        let (k, _) = choice?;
        for &v in &layers[k] {
            removed[v] = true;
            sep.push(v);
        }
        if sep.len() > limit {
            return None;
        }
    }
}

fn bfs_layers(h: &PatternGraph, removed: &[bool], s: usize) -> Vec<Vec<usize>> {
    let mut dist = vec![usize::MAX; h.n()];
    dist[s] = 0;
    let mut layers = vec![vec![s]];
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        let mut nb: Vec<usize> = h.neighbours(u).iter().copied().filter(|&w| !removed[w] && dist[w] == usize::MAX).collect();
        nb.sort_unstable();
        for w in nb {
            dist[w] = dist[u] + 1;
            if layers.len() <= dist[w] {
                layers.push(Vec::new());
            }
            layers[dist[w]].push(w);
            q.push_back(w);
        }
    }
    layers
}

fn max_reduction(h: &PatternGraph, limit: usize) -> Option<Vec<usize>> {
    let n = h.n();
    let mut removed = vec![false; n];
    let mut sep = Vec::new();
    loop {
        let comps = h.components_without(&removed);
        if largest(&comps) <= limit {
            return Some(sep);
        }
        if sep.len() >= limit {
            return None;
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..n {
            if removed[v] {
                continue;
            }
            removed[v] = true;
            let after = h.components_without(&removed);
            removed[v] = false;
            let top = largest(&after);
            let ties = after.iter().filter(|c| c.len() == top).count();
            if best.is_none_or(|(t, k, _)| (top, ties) < (t, k)) {
                best = Some((top, ties, v));
            }
        }
        let (_, _, v) = best?;
        removed[v] = true;
        sep.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> PatternGraph {
        PatternGraph::new(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn long_path_is_separable() {
        let h = path(100);
        let cert = separability_certificate(&h, 0.1).unwrap();
        assert!(cert.separator.len() <= 10);
        assert!(cert.largest_component() <= 10);
        assert!(cert.is_valid_for(&h));
    }

    #[test]
    fn clique_is_not_certified() {
        let edges = (0..10).flat_map(|u| (u + 1..10).map(move |v| (u, v)));
        let h = PatternGraph::new(10, edges).unwrap();
        assert!(separability_certificate(&h, 0.2).is_none());
    }

    #[test]
    fn supplied_separator_is_checked() {
        let h = path(9);
        assert!(certificate_from_separator(&h, &[3, 7], 0.4).is_some());
        assert!(certificate_from_separator(&h, &[4], 0.4).is_none());
    }
}
