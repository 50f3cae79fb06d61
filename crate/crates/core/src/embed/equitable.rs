//! Equitable colourings: proper vertex colourings whose classes differ in
//! size by at most one.

use std::collections::VecDeque;

use thiserror::Error;

use crate::pattern::PatternGraph;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EquitableError {
    #[error("{r} classes cannot properly colour a graph of maximum degree {max_degree}")]
    TooFewClasses { r: usize, max_degree: usize },
    #[error("balancing stopped after {rounds} rounds")]
    Unbalanceable { rounds: usize, best: Vec<Vec<usize>> },
}

/// Greedy colouring into the currently smallest admissible class, then
/// balancing by shifting vertices along paths of the "can move into" digraph
/// between classes.
pub fn equitable_colouring(h: &PatternGraph, r: usize) -> Result<Vec<Vec<usize>>, EquitableError> {
    let n = h.n();
    if r == 0 || r < h.max_degree() + 1 {
        return Err(EquitableError::TooFewClasses { r, max_degree: h.max_degree() });
    }
    let mut class = vec![usize::MAX; n];
    let mut sizes = vec![0usize; r];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    for v in order {
        let c = (0..r)
            .filter(|&c| h.neighbours(v).iter().all(|&w| class[w] != c))
            .min_by_key(|&c| (sizes[c], c))
            .expect("r > max degree leaves a free class");
        class[v] = c;
        sizes[c] += 1;
    }

    let cap = n * r + 1;
    let mut rounds = 0;
    loop {
        let max = *sizes.iter().max().unwrap_or(&0);
        let min = *sizes.iter().min().unwrap_or(&0);
        if max <= min + 1 {
            break;
        }
        if rounds >= cap || !shift_one(h, &mut class, &mut sizes, r) {
            return Err(EquitableError::Unbalanceable { rounds, best: classes(&class, r) });
        }
        rounds += 1;
    }
    Ok(classes(&class, r))
}

fn classes(class: &[usize], r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); r];
    for (v, &c) in class.iter().enumerate() {
        out[c].push(v);
    }
    out
}

/// A vertex of class `a` that has no neighbour in class `b`.
fn movable(h: &PatternGraph, class: &[usize], a: usize, b: usize) -> Option<usize> {
    (0..class.len()).find(|&v| class[v] == a && h.neighbours(v).iter().all(|&w| class[w] != b))
}

/// Moves one unit of size from a largest class to a smallest class along a
/// shortest path of movable vertices.
fn shift_one(h: &PatternGraph, class: &mut [usize], sizes: &mut [usize], r: usize) -> bool {
    let max = *sizes.iter().max().unwrap();
    let min = *sizes.iter().min().unwrap();
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; r];
    let mut seen = vec![false; r];
    let mut q = VecDeque::new();
    for c in 0..r {
        if sizes[c] == max {
            seen[c] = true;
            q.push_back(c);
        }
    }
    while let Some(a) = q.pop_front() {
        for b in 0..r {
            if seen[b] {
                continue;
            }
            let Some(v) = movable(h, class, a, b) else { continue };
            seen[b] = true;
            prev[b] = Some((a, v));
            if sizes[b] == min {
                let mut path = Vec::new();
                let mut cur = b;
                while let Some((from, v)) = prev[cur] {
                    path.push((v, cur));
                    cur = from;
                }
                // The move closest to the small class goes first, so every
                // later move still sees its target class unchanged.
                for (v, to) in path {
                    sizes[class[v]] -= 1;
                    sizes[to] += 1;
                    class[v] = to;
                }
                return true;
            }
            q.push_back(b);
        }
    }
    false
}
