//! Embedding a vertex set `X` while keeping large candidate sets for the
//! remaining independent set `Y`.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{bits, edge_classes, ranks, EmbedFailure, FailureReason, SplitPlan, Targets};
use crate::collection::{ColourId, VertexId};
use crate::pattern::PatternGraph;
use crate::rng;
use crate::templates::Template;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialEmbedding {
    /// Images of the vertices of `X`.
    pub tau: BTreeMap<usize, VertexId>,
    /// A colour for every edge of `H` (every edge meets `X`).
    pub sigma: Vec<ColourId>,
    /// `C_y` for every `y` outside `X`.
    pub candidates: BTreeMap<usize, Vec<VertexId>>,
    /// Processing order of `X`.
    pub order: Vec<usize>,
}

const STAGE: &str = "partial_embed";

fn exhausted(element: String, step: &str, seed: u64) -> EmbedFailure {
    EmbedFailure::new(STAGE, FailureReason::CandidateExhausted { element, step: step.into() }, seed)
}

/// Embeds `x` (in the given order) into the template, maintaining vertex
/// candidate sets `C_w` and colour candidate sets `C_xy`:
///
/// 1. drop `v` from `C_x` if for a later neighbour `y` the colour-summed
///    degree of `v` into `C_y` is below `(d - eps)|C_xy||C_y|`;
/// 2. choose `tau(x)` in `C_x`;
/// 3. remove `tau(x)` from every candidate set;
/// 4. for each later neighbour `y`: drop colours `c` with
///    `|N_c(tau(x)) cap C_y| < d|C_y|/2`, choose `sigma(xy)`, remove it from
///    every colour set, and shrink `C_y` to `N_sigma(tau(x))`.
///
/// Targets default to whole clusters. Success needs `|C_y| >= nu' m` for
/// every `y` outside `X`.
pub fn partial_embed(t: &Template, h: &PatternGraph, phi: &[usize], x: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> Result<PartialEmbedding, EmbedFailure> {
    let classes = edge_classes(&t.r, h, phi).map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let n = t.host.n();
    let k = t.host.colour_count();
    let mut in_x = vec![false; h.n()];
    for &v in x {
        if v >= h.n() || in_x[v] {
            return Err(EmbedFailure::precondition(STAGE, format!("X lists {v} twice or out of range"), seed));
        }
        in_x[v] = true;
    }
    if let Some(&(a, b)) = h.edges().iter().find(|&&(a, b)| !in_x[a] && !in_x[b]) {
        return Err(EmbedFailure::precondition(STAGE, format!("edge {a}{b} lies inside Y"), seed));
    }
    let d = t.ledger.d_f64();
    let eps = t.ledger.eps_f64();
    let floor = plan.nu_prime * t.ledger.m_f64();

    let mut pos = vec![usize::MAX; h.n()];
    for (i, &v) in x.iter().enumerate() {
        pos[v] = i;
    }
    let later = |a: usize, b: usize| !in_x[b] || pos[b] > pos[a];

    let mut cand: Vec<FixedBitSet> = (0..h.n())
        .map(|w| {
            let mut c = bits(n, t.clusters[phi[w]].iter().copied());
            if let Some(tw) = targets.get(&w) {
                c.intersect_with(&bits(n, tw.iter().copied()));
            }
            c
        })
        .collect();
    let mut ccand: Vec<FixedBitSet> = classes.iter().map(|&e| bits(k, t.colour_clusters[e].iter().copied())).collect();

    let mut r = rng::rng(rng::derive(seed, 0x5041_5254));
    let vrank = ranks(n, &mut r);
    let crank = ranks(k, &mut r);

    let mut tau = BTreeMap::new();
    let mut sigma: Vec<Option<ColourId>> = vec![None; h.edge_count()];

    for &xv in x {
        let nb: Vec<usize> = {
            let mut v: Vec<usize> = h.neighbours(xv).iter().copied().filter(|&y| later(xv, y)).collect();
            v.sort_by_key(|&y| if in_x[y] { (0, pos[y], y) } else { (1, 0, y) });
            v
        };
        let eid = |y: usize| h.edge_id(xv, y).expect("neighbour");

        // (x,1) and a score for (x,2): the smallest colour-summed density into a later C_y.
        let mut best: Option<(f64, usize, VertexId)> = None;
        let mut keep = FixedBitSet::with_capacity(n);
        for v in cand[xv].ones() {
            let mut score = f64::INFINITY;
            let mut ok = true;
            for &y in &nb {
                let cs = &ccand[eid(y)];
                let cy = &cand[y];
                let sum: usize = cs.ones().map(|c| t.host.neighbours(c, v).intersection_count(cy)).sum();
                let cells = (cs.count_ones(..) * cy.count_ones(..)) as f64;
                if (sum as f64) < (d - eps) * cells - 1e-9 {
                    ok = false;
                    break;
                }
                score = score.min(if cells > 0.0 { sum as f64 / cells } else { 0.0 });
            }
            if !ok {
                continue;
            }
            keep.insert(v);
            let score = if nb.is_empty() { 0.0 } else { score };
            if best.is_none_or(|(s, rk, _)| score > s + 1e-12 || ((score - s).abs() <= 1e-12 && vrank[v] < rk)) {
                best = Some((score, vrank[v], v));
            }
        }
        cand[xv] = keep;
        let Some((_, _, image)) = best else {
            return Err(exhausted(format!("vertex {xv}"), "(x,1)", seed));
        };
        // (x,2), (x,3)
        tau.insert(xv, image);
        for c in cand.iter_mut() {
            c.set(image, false);
        }
        // (x,y,4)
        for &y in &nb {
            let e = eid(y);
            let cy_len = cand[y].count_ones(..) as f64;
            let mut chosen: Option<(usize, usize, ColourId)> = None;
            let mut kept = FixedBitSet::with_capacity(k);
            for c in ccand[e].ones() {
                let over = t.host.neighbours(c, image).intersection_count(&cand[y]);
                if (over as f64) < d * cy_len / 2.0 - 1e-9 || over == 0 {
                    continue;
                }
                kept.insert(c);
                if chosen.is_none_or(|(o, rk, _)| over > o || (over == o && crank[c] < rk)) {
                    chosen = Some((over, crank[c], c));
                }
            }
            ccand[e] = kept;
            let Some((_, _, col)) = chosen else {
                return Err(exhausted(format!("colours of edge {xv}{y}"), "(x,y,4.1)", seed));
            };
            sigma[e] = Some(col);
            for cs in ccand.iter_mut() {
                cs.set(col, false);
            }
            let nbhd = t.host.neighbours(col, image).clone();
            cand[y].intersect_with(&nbhd);
            if cand[y].is_clear() {
                return Err(exhausted(format!("vertex {y}"), "(x,y,4.4)", seed));
            }
        }
    }

    let mut candidates = BTreeMap::new();
    for y in (0..h.n()).filter(|&y| !in_x[y]) {
        let c: Vec<VertexId> = cand[y].ones().collect();
        if (c.len() as f64) < floor - 1e-9 {
            return Err(exhausted(format!("vertex {y}"), "final size", seed).note(format!("|C_y| = {} < nu' m = {floor:.2}", c.len())));
        }
        candidates.insert(y, c);
    }
    let sigma = sigma.into_iter().collect::<Option<Vec<_>>>().expect("every edge meets X");
    let out = PartialEmbedding { tau, sigma, candidates, order: x.to_vec() };
    let bad = partial_violations(t, h, targets, &out, floor);
    if !bad.is_empty() {
        return Err(EmbedFailure::new(STAGE, FailureReason::IdentityViolated { detail: bad.join("; ") }, seed));
    }
    Ok(out)
}

/// Literal recheck of a partial embedding: injectivity, targets, edges
/// inside `X` present in their colour, and for every `y` outside `X` and every
/// `v` in `C_y`, `tau(x) v` present in colour `sigma(xy)` for all embedded
/// neighbours `x`; `|C_y| >= floor`.
pub fn partial_violations(t: &Template, h: &PatternGraph, targets: &Targets, pe: &PartialEmbedding, floor: f64) -> Vec<String> {
    let mut out = Vec::new();
    let mut images = BTreeMap::new();
    for (&x, &v) in &pe.tau {
        if let Some(y) = images.insert(v, x) {
            out.push(format!("{x} and {y} share image {v}"));
        }
        if targets.get(&x).is_some_and(|tx| !tx.contains(&v)) {
            out.push(format!("{x} misses its target"));
        }
    }
    let mut colours = BTreeMap::new();
    for (e, &c) in pe.sigma.iter().enumerate() {
        if let Some(f) = colours.insert(c, e) {
            out.push(format!("edges {e} and {f} share colour {c}"));
        }
        let (a, b) = h.edge(e);
        if let (Some(&u), Some(&v)) = (pe.tau.get(&a), pe.tau.get(&b)) {
            if !t.host.has_edge(c, u, v) {
                out.push(format!("edge {a}{b} missing in colour {c}"));
            }
        }
    }
    for (&y, cy) in &pe.candidates {
        if (cy.len() as f64) < floor - 1e-9 {
            out.push(format!("|C_{y}| = {} below {floor}", cy.len()));
        }
        for &v in cy {
            if images.contains_key(&v) {
                out.push(format!("C_{y} contains used vertex {v}"));
            }
            if targets.get(&y).is_some_and(|ty| !ty.contains(&v)) {
                out.push(format!("C_{y} leaves the target of {y}"));
            }
            for &x in h.neighbours(y) {
                let c = pe.sigma[h.edge_id(x, y).expect("edge")];
                if let Some(&u) = pe.tau.get(&x) {
                    if !t.host.has_edge(c, u, v) {
                        out.push(format!("C_{y} holds {v}, not joined to tau({x}) in colour {c}"));
                    }
                }
            }
        }
    }
    out
}
