//! Half-superregular to superregular: refine every part by a weak regularity
//! partition of the k-partite graph, then thin each regular sub-tuple of
//! density `d' >= d` by keeping edges with probability `d / d'`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::partite::{locate, KGraph, PartiteIncidence};
use super::witness::{self, SearchOptions};
use super::RegularityError;
use crate::rng;

/// Resampling attempts before giving up on the degree floor.
pub const SPARSIFY_ATTEMPTS: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct SparsifyReport {
    #[serde(skip)]
    pub graph: KGraph,
    /// Sub-parts of every original part.
    pub refinement: Vec<Vec<Vec<usize>>>,
    pub refinement_rounds: usize,
    pub tuples: usize,
    pub irregular_tuples: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    /// Smallest `deg(v) / prod_{j != i} |V_j|` over all vertices.
    pub min_degree_ratio: f64,
    pub attempts: usize,
}

fn tuples_of(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out.into_iter().flat_map(|t| (0..s).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Edges of `g` meeting every part once, grouped by the tuple of cells they
/// meet, each stored as local indices inside those cells.
fn bucket(g: &KGraph, sub: &[Vec<Vec<usize>>], loc: &[Option<(usize, usize)>]) -> BTreeMap<Vec<usize>, Vec<Vec<usize>>> {
    let mut at = vec![(0usize, 0usize); g.n()];
    for cells in sub {
        for (i, cell) in cells.iter().enumerate() {
            for (j, &v) in cell.iter().enumerate() {
                at[v] = (i, j);
            }
        }
    }
    let k = sub.len();
    let mut out: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    'edges: for e in g.edges() {
        let mut key = vec![usize::MAX; k];
        let mut locals = vec![0; k];
        for &v in e {
            let Some((p, _)) = loc[v] else { continue 'edges };
            if key[p] != usize::MAX {
                continue 'edges;
            }
            key[p] = at[v].0;
            locals[p] = at[v].1;
        }
        out.entry(key).or_default().push(locals);
    }
    out
}

fn incidence(sub: &[Vec<Vec<usize>>], t: &[usize], buckets: &BTreeMap<Vec<usize>, Vec<Vec<usize>>>) -> PartiteIncidence {
    let ps: Vec<Vec<usize>> = t.iter().enumerate().map(|(p, &i)| sub[p][i].clone()).collect();
    let none = Vec::new();
    PartiteIncidence::from_locals(&ps, buckets.get(t).unwrap_or(&none).iter().map(Vec::as_slice))
}

fn degree_floor(g: &KGraph, parts: &[Vec<usize>], loc: &[Option<(usize, usize)>]) -> (Vec<u64>, f64) {
    let mut deg = vec![0u64; g.n()];
    for e in g.edges() {
        for &v in e {
            deg[v] += 1;
        }
    }
    let total: f64 = parts.iter().map(|p| p.len() as f64).product();
    let ratio = (0..g.n())
        .filter_map(|v| loc[v].map(|(p, _)| deg[v] as f64 * parts[p].len() as f64 / total))
        .fold(f64::INFINITY, f64::min);
    (deg, ratio)
}

/// Thins an `(eps, d)`-half-superregular k-partite graph into an
/// `(eps_prime, d^2/2)`-superregular spanning subgraph. The output is checked
/// by exact degree counting against `d^2/2`; failing that after
/// [`SPARSIFY_ATTEMPTS`] reseeded thinnings gives `PromiseViolated`.
pub fn sparsify_to_superregular(
    g: &KGraph,
    parts: &[Vec<usize>],
    eps: f64,
    eps_prime: f64,
    d: f64,
    seed: u64,
) -> Result<SparsifyReport, RegularityError> {
    if !(eps > 0.0 && eps_prime > 0.0 && d > 0.0 && d <= 1.0) {
        return Err(RegularityError::InvalidParameter(format!("eps={eps} eps'={eps_prime} d={d}")));
    }
    let k = g.k();
    if parts.len() != k {
        return Err(RegularityError::PartCount { expected: k, got: parts.len() });
    }
    let loc = locate(g.n(), parts)?;
    let eps2 = (eps * eps_prime).sqrt();
    let opts = SearchOptions { budget: 400, seed: rng::derive(seed, 0x5EED), ..Default::default() };

    // weak regularity refinement by witness atoms
    let mut sub: Vec<Vec<Vec<usize>>> = parts.iter().map(|p| vec![p.clone()]).collect();
    let cap = (eps2.powi(-3)).ceil() as usize;
    let mut rounds = 0;
    let (regular, irregular) = loop {
        let sizes: Vec<usize> = sub.iter().map(Vec::len).collect();
        let ts = tuples_of(&sizes);
        let buckets = bucket(g, &sub, &loc);
        let found: Vec<(Vec<usize>, Option<witness::IrregularityWitness>)> = ts
            .iter()
            .map(|t| {
                let inc = incidence(&sub, t, &buckets);
                (t.clone(), witness::irregularity_witness_in(&inc, eps2, &opts).witness().cloned())
            })
            .collect();
        let bad = found.iter().filter(|f| f.1.is_some()).count();
        if bad as f64 <= eps2 * ts.len() as f64 || rounds >= cap {
            let reg: Vec<Vec<usize>> = found.iter().filter(|f| f.1.is_none()).map(|f| f.0.clone()).collect();
            break (reg, bad);
        }
        let mut best: BTreeMap<(usize, usize), (f64, Vec<usize>)> = BTreeMap::new();
        for (t, w) in &found {
            let Some(w) = w else { continue };
            let dev = witness::ratio_f64(&w.deviation).abs();
            for (p, &i) in t.iter().enumerate() {
                let slot = best.entry((p, i)).or_insert((-1.0, Vec::new()));
                if dev > slot.0 {
                    *slot = (dev, w.subsets[p].clone());
                }
            }
        }
        let mut next: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k];
        for p in 0..k {
            for (i, cell) in sub[p].iter().enumerate() {
                match best.get(&(p, i)) {
                    Some((_, w)) => {
                        let (a, b): (Vec<usize>, Vec<usize>) = cell.iter().partition(|x| w.contains(x));
                        next[p].extend([a, b].into_iter().filter(|x| !x.is_empty()));
                    }
                    None => next[p].push(cell.clone()),
                }
            }
        }
        sub = next;
        rounds += 1;
    };

    // keep-probability per regular tuple, keyed by sub-part indices
    let mut cell_of = vec![(0usize, 0usize); g.n()];
    for (p, cells) in sub.iter().enumerate() {
        for (i, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = (p, i);
            }
        }
    }
    let mut keep: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let buckets = bucket(g, &sub, &loc);
    for t in &regular {
        let inc = incidence(&sub, t, &buckets);
        let dens = witness::ratio_f64(&inc.density());
        if dens > d {
            keep.insert(t.clone(), d / dens);
        }
    }

    let required = d * d / 2.0;
    let mut worst = (0usize, 0u64);
    for attempt in 0..SPARSIFY_ATTEMPTS {
        let mut r = rng::rng(rng::derive(seed, attempt as u64));
        let mut out = KGraph::new(k, g.n());
        for e in g.edges() {
            let Some(_) = loc[e[0]] else { continue };
            let mut key = vec![0; k];
            let mut inside = true;
            for &v in e {
                match loc[v] {
                    Some((p, _)) => key[p] = cell_of[v].1,
                    None => inside = false,
                }
            }
            let kept = match (inside, keep.get(&key)) {
                (true, Some(&q)) => r.gen_bool(q),
                _ => true,
            };
            if kept {
                out.add_edge(e.clone());
            }
        }
        let (deg, ratio) = degree_floor(&out, parts, &loc);
        if ratio >= required - 1e-12 {
            return Ok(SparsifyReport {
                edges_before: g.edge_count(),
                edges_after: out.edge_count(),
                graph: out,
                refinement: sub,
                refinement_rounds: rounds,
                tuples: regular.len() + irregular,
                irregular_tuples: irregular,
                min_degree_ratio: ratio,
                attempts: attempt + 1,
            });
        }
        if let Some(v) = (0..g.n()).filter(|&v| loc[v].is_some()).min_by(|&a, &b| {
            let ra = deg[a] as f64 * parts[loc[a].unwrap().0].len() as f64;
            let rb = deg[b] as f64 * parts[loc[b].unwrap().0].len() as f64;
            ra.total_cmp(&rb)
        }) {
            worst = (v, deg[v]);
        }
    }
    let (v, deg) = worst;
    let p = loc[v].map_or(0, |(p, _)| p);
    let total: f64 = parts.iter().map(|q| q.len() as f64).product();
    Err(RegularityError::PromiseViolated { attempts: SPARSIFY_ATTEMPTS, vertex: v, degree: deg, required: required * total / parts[p].len() as f64 })
}
