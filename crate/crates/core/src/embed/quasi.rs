//! Transversal embeddings in dense, quasirandom-looking graph collections.
//! Sparse cluster pairs of `H` go through the partial embedder; the dense
//! remainder goes through the transversal blow-up with the resulting
//! candidate sets as targets.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::partial::partial_embed;
use super::transversal::transversal_blowup_traced;
use super::{assemble, certify, equitable_colouring, EmbedFailure, EmbedOutcome, EquitableError, FailureReason, Piece, Raw, SplitPlan, Targets, Trace, Verified};
use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::matching::max_bipartite_matching;
use crate::pattern::PatternGraph;
use crate::regularity::ledger::{ledger_template_slice, rational_from_f64, RegularityClass, TemplateSliceRule};
use crate::regularity::ParameterLedger;
use crate::rng;
use crate::templates::{slice_template, Selection, Template};

const STAGE: &str = "quasi_embed";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuasiDiagnostics {
    pub r: usize,
    /// Isolated vertices added so that `H` spans the host.
    pub padded: usize,
    /// Minimum normalised colour-summed degree and colour density of the host.
    pub alpha: f64,
    /// Measured half-superregular density of the cluster pairs.
    pub d_half: f64,
    pub partition_attempts: usize,
    pub level: usize,
    /// `(i, j, d_ij)` for every cluster pair.
    pub pair_densities: Vec<(usize, usize, f64)>,
    pub sparse_pairs: Vec<(usize, usize)>,
    pub x_size: usize,
    pub y_size: usize,
    pub h_less_edges: usize,
    pub h_greater_edges: usize,
    /// `(i, j, |C''_ij|)` for the dense pairs kept in `R''`.
    pub split_sizes: Vec<(usize, usize, usize)>,
}

fn fail(step: &str, reason: FailureReason, seed: u64) -> EmbedFailure {
    EmbedFailure::new(format!("{STAGE} / {step}"), reason, seed)
}

fn precondition(step: &str, detail: impl Into<String>, seed: u64) -> EmbedFailure {
    fail(step, FailureReason::PreconditionViolated { detail: detail.into() }, seed)
}

/// Transversal copy of `H` (with `e(H) = |C|` and `v(H) <= n`) in `gc`.
pub fn quasi_embed(gc: &GraphCollection, h: &PatternGraph, plan: &SplitPlan, seed: u64) -> EmbedOutcome {
    quasi_embed_traced(gc, h, plan, seed).map(|(v, _)| v)
}

/// [`quasi_embed`] together with the run's diagnostics.
pub fn quasi_embed_traced(gc: &GraphCollection, h: &PatternGraph, plan: &SplitPlan, seed: u64) -> Result<(Verified, QuasiDiagnostics), EmbedFailure> {
    plan.validate().map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let n = gc.n();
    let k = gc.colour_count();
    if h.edge_count() != k {
        return Err(EmbedFailure::precondition(STAGE, format!("e(H) = {} but {k} colours", h.edge_count()), seed));
    }
    if h.n() > n {
        return Err(EmbedFailure::precondition(STAGE, format!("v(H) = {} exceeds n = {n}", h.n()), seed));
    }
    let mut diag = QuasiDiagnostics { padded: n - h.n(), ..QuasiDiagnostics::default() };
    let mut trace = Trace::default();
    if k == 0 {
        let emb = crate::embedding::TransversalEmbedding { tau: (0..h.n()).collect(), sigma: Vec::new() };
        trace.push(STAGE, "no edges");
        return certify(gc, h, emb, trace, STAGE, seed).map(|v| (v, diag));
    }
    let hp = PatternGraph::new(n, h.edges().iter().copied()).expect("padding keeps the edge list valid");

    let r = (hp.max_degree() + 1).max(2);
    diag.r = r;
    if n < r {
        return Err(EmbedFailure::precondition(STAGE, format!("n = {n} below r = {r}"), seed));
    }
    let classes = match equitable_colouring(&hp, r) {
        Ok(c) => c,
        Err(EquitableError::Unbalanceable { .. }) => return Err(fail("equitable colouring", FailureReason::Unbalanceable, seed)),
        Err(e) => return Err(precondition("equitable colouring", e.to_string(), seed)),
    };
    let mut phi = vec![0; n];
    for (i, a) in classes.iter().enumerate() {
        for &x in a {
            phi[x] = i;
        }
    }

    // random partition with the degree and density checks
    diag.alpha = host_alpha(gc);
    let floor = diag.alpha * diag.alpha / 6.0;
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let mut clusters = None;
    for attempt in 0..plan.retries {
        diag.partition_attempts = attempt + 1;
        let mut g = rng::rng(rng::derive2(seed, 0x9A, attempt as u64));
        let order = rng::shuffled(&(0..n).collect::<Vec<_>>(), &mut g);
        let mut cl = Vec::with_capacity(r);
        let mut at = 0;
        for &s in &sizes {
            let mut c = order[at..at + s].to_vec();
            c.sort_unstable();
            cl.push(c);
            at += s;
        }
        if partition_floor(gc, &cl, &pairs) >= floor {
            clusters = Some(cl);
            break;
        }
    }
    let Some(clusters) = clusters else {
        return Err(fail("random partition", FailureReason::ChernoffRetryExhausted { event: "degree and density floors".into(), attempts: plan.retries }, seed));
    };
    diag.d_half = partition_floor(gc, &clusters, &pairs);
    trace.push("random partition", format!("alpha {:.4}, half-super density {:.4}", diag.alpha, diag.d_half));

    // sparsified K_r template
    let kr = PatternGraph::new(r, pairs.iter().copied()).expect("complete graph");
    let all: Vec<ColourId> = (0..k).collect();
    let m = sizes.iter().copied().min().unwrap_or(0) as f64;
    let ledger = ParameterLedger::from_f64(m, plan.eps, diag.d_half.min(1.0), (k as f64 / n as f64).min(1.0), RegularityClass::HalfSuper);
    let base = Template::new(kr, clusters.clone(), vec![all; pairs.len()], Arc::new(gc.clone()), ledger, false)
        .map_err(|e| precondition("template", e.to_string(), seed))?;
    let sparse = slice_template(&base, &Selection::Whole, &TemplateSliceRule::Sparsify { eps_prime: rational_from_f64(plan.eps) }, rng::derive(seed, 0x5A))
        .map_err(|e| precondition("sparsify", e.to_string(), seed))?;
    trace.lineage = sparse.ledger.lineage.clone();

    // density ladder
    let mut pair_edges = vec![0usize; pairs.len()];
    for &(x, y) in hp.edges() {
        pair_edges[sparse.r.edge_id(phi[x], phi[y]).expect("proper colouring")] += 1;
    }
    diag.pair_densities = pairs.iter().zip(&pair_edges).map(|(&(i, j), &c)| (i, j, c as f64 / n as f64)).collect();
    let level = (1..=pairs.len())
        .find(|&l| diag.pair_densities.iter().all(|&(_, _, d)| d <= plan.ladder(l) || d >= plan.ladder(l + 1)))
        .ok_or_else(|| fail("density ladder", FailureReason::LadderDegenerate, seed))?;
    diag.level = level;
    let sparse_pair: Vec<bool> = diag.pair_densities.iter().map(|&(_, _, d)| d <= plan.ladder(level)).collect();
    diag.sparse_pairs = pairs.iter().zip(&sparse_pair).filter(|p| *p.1).map(|p| *p.0).collect();
    trace.push("density ladder", format!("level {level}, {} sparse pairs", diag.sparse_pairs.len()));

    // Step 0: sparse pairs through the partial embedder
    let mut in_x = vec![false; n];
    for &(x, y) in hp.edges() {
        if sparse_pair[sparse.r.edge_id(phi[x], phi[y]).expect("proper colouring")] {
            in_x[x] = true;
            in_x[y] = true;
        }
    }
    let x_list: Vec<usize> = (0..n).filter(|&v| in_x[v]).collect();
    let less_ids: Vec<usize> = (0..hp.edge_count()).filter(|&e| in_x[hp.edge(e).0] || in_x[hp.edge(e).1]).collect();
    let y_list: Vec<usize> = (0..n).filter(|&v| !in_x[v] && hp.neighbours(v).iter().any(|&w| in_x[w])).collect();
    diag.x_size = x_list.len();
    diag.y_size = y_list.len();
    diag.h_less_edges = less_ids.len();
    diag.h_greater_edges = k - less_ids.len();

    let mut tau: Vec<Option<VertexId>> = vec![None; n];
    let mut sigma: Vec<Option<ColourId>> = vec![None; k];
    let mut targets = Targets::new();
    if !x_list.is_empty() {
        let h_less = hp.edge_subgraph(&less_ids);
        let pe = partial_embed(&sparse, &h_less, &phi, &x_list, &Targets::new(), plan, rng::derive(seed, 0x50)).map_err(|f| f.within(STAGE))?;
        for (&x, &v) in &pe.tau {
            tau[x] = Some(v);
        }
        for (i, &e) in less_ids.iter().enumerate() {
            sigma[e] = Some(pe.sigma[i]);
        }
        for &y in &y_list {
            targets.insert(y, pe.candidates[&y].clone());
        }
    }
    trace.push("step 0", format!("|X| = {}, e(H<) = {}", diag.x_size, diag.h_less_edges));

    // dense pairs through the transversal blow-up
    let used_v: BTreeSet<VertexId> = tau.iter().flatten().copied().collect();
    let used_c: BTreeSet<ColourId> = sigma.iter().flatten().copied().collect();
    let rest: Vec<usize> = (0..n).filter(|&v| !in_x[v]).collect();
    let piece = Piece::induced(&hp, &phi, &targets, &rest);
    let v_prime: Vec<Vec<VertexId>> = clusters.iter().map(|c| c.iter().copied().filter(|v| !used_v.contains(v)).collect()).collect();
    let c_prime: Vec<ColourId> = (0..k).filter(|c| !used_c.contains(c)).collect();
    if c_prime.len() != piece.h.edge_count() {
        return Err(fail("colour split", FailureReason::IdentityViolated { detail: format!("|C'| = {} but e(H>) = {}", c_prime.len(), piece.h.edge_count()) }, seed));
    }
    let raw = if piece.h.edge_count() == 0 {
        place_isolated(&piece, &v_prime).ok_or_else(|| fail("isolated remainder", FailureReason::CandidateExhausted { element: "H>".into(), step: "placement".into() }, seed))?
    } else {
        let mut dense_edges = vec![0usize; pairs.len()];
        for &(x, y) in piece.h.edges() {
            dense_edges[sparse.r.edge_id(piece.phi[x], piece.phi[y]).expect("proper colouring")] += 1;
        }
        let kept: Vec<usize> = (0..pairs.len()).filter(|&e| dense_edges[e] > 0).collect();
        let r2 = PatternGraph::new(r, kept.iter().map(|&e| pairs[e])).expect("subgraph of K_r");
        let mut g = rng::rng(rng::derive(seed, 0xC5));
        let shuffled = rng::shuffled(&c_prime, &mut g);
        let mut at = 0;
        let mut split = Vec::with_capacity(kept.len());
        for &e in &kept {
            let mut part = shuffled[at..at + dense_edges[e]].to_vec();
            part.sort_unstable();
            at += dense_edges[e];
            diag.split_sizes.push((pairs[e].0, pairs[e].1, part.len()));
            split.push(part);
        }
        let removed = clusters.iter().zip(&v_prime).map(|(a, b)| a.len() - b.len()).max().unwrap_or(0) as f64;
        let ledger = ledger_template_slice(&sparse.ledger, &TemplateSliceRule::NearSpanning { alpha: rational_from_f64((removed / m.max(1.0)).clamp(1e-6, 0.999)) })
            .unwrap_or_else(|_| sparse.ledger.clone());
        let f2 = Template::new(r2, v_prime, split, Arc::clone(&sparse.host), ledger, true).map_err(|e| precondition("dense template", e.to_string(), seed))?;
        let (v, _) = transversal_blowup_traced(&f2, &piece.h, &piece.phi, &piece.targets, plan, rng::derive(seed, 0xB1)).map_err(|f| f.within(STAGE))?;
        trace.lineage = f2.ledger.lineage.clone();
        let emb = v.into_embedding();
        Raw { tau: emb.tau, sigma: emb.sigma }
    };
    piece.commit(&raw, &mut tau, &mut sigma);
    trace.push("dense pairs", format!("e(H>) = {}, {} colour parts", diag.h_greater_edges, diag.split_sizes.len()));
    trace.push("diagnostics", serde_json::to_string(&diag).unwrap_or_default());

    let mut emb = assemble(tau, sigma).ok_or_else(|| fail("assembly", FailureReason::IdentityViolated { detail: "unassigned vertex or edge".into() }, seed))?;
    emb.tau.truncate(h.n());
    certify(gc, h, emb, trace, STAGE, seed).map(|v| (v, diag))
}

/// `min` over vertices of `sum_c d_c(v) / (|C| n)` and over colours of `e(G_c) / n^2`.
fn host_alpha(gc: &GraphCollection) -> f64 {
    let (n, k) = (gc.n() as f64, gc.colour_count() as f64);
    let vert = (0..gc.n()).map(|v| gc.total_degree(v) as f64 / (k * n)).fold(f64::INFINITY, f64::min);
    let col = (0..gc.colour_count()).map(|c| gc.edge_count(c) as f64 / (n * n)).fold(f64::INFINITY, f64::min);
    vert.min(col)
}

/// Smallest normalised colour-summed degree of a vertex into another
/// cluster, and smallest colour density of a cluster pair.
fn partition_floor(gc: &GraphCollection, clusters: &[Vec<VertexId>], pairs: &[(usize, usize)]) -> f64 {
    let k = gc.colour_count();
    let sets: Vec<_> = clusters.iter().map(|c| crate::collection::bitset(gc.n(), c)).collect();
    let mut worst = f64::INFINITY;
    for &(i, j) in pairs {
        for (a, b) in [(i, j), (j, i)] {
            if clusters[b].is_empty() {
                continue;
            }
            for &v in &clusters[a] {
                let s: usize = (0..k).map(|c| gc.degree_into(c, v, &sets[b])).sum();
                worst = worst.min(s as f64 / (clusters[b].len() * k) as f64);
            }
        }
        let cells = (clusters[i].len() * clusters[j].len()) as f64;
        if cells > 0.0 {
            for c in 0..k {
                worst = worst.min(gc.edges_between(c, &clusters[i], &sets[j]) as f64 / cells);
            }
        }
    }
    worst
}

/// Edgeless remainder: an injective placement respecting targets.
fn place_isolated(piece: &Piece, v_prime: &[Vec<VertexId>]) -> Option<Raw> {
    let hosts: Vec<VertexId> = v_prime.iter().flatten().copied().collect();
    let pos = |v: VertexId| hosts.iter().position(|&w| w == v);
    let adj: Vec<Vec<usize>> = (0..piece.h.n())
        .map(|x| match piece.targets.get(&x) {
            Some(t) => t.iter().filter_map(|&v| pos(v)).collect(),
            None => v_prime[piece.phi[x]].iter().filter_map(|&v| pos(v)).collect(),
        })
        .collect();
    let m = max_bipartite_matching(hosts.len(), &adj);
    if !m.is_left_perfect() {
        return None;
    }
    Some(Raw { tau: m.left.iter().map(|o| hosts[o.expect("perfect")]).collect(), sigma: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching(n: usize) -> PatternGraph {
        PatternGraph::new(n, (0..n / 2).map(|i| (2 * i, 2 * i + 1))).unwrap()
    }

    #[test]
    fn empty_pattern_succeeds() {
        let gc = GraphCollection::complete(5, 0);
        let v = quasi_embed(&gc, &PatternGraph::empty(3), &SplitPlan::default(), 1).unwrap();
        assert_eq!(v.embedding().tau.len(), 3);
    }

    #[test]
    fn perfect_matching_in_complete_collection() {
        let gc = GraphCollection::complete(12, 6);
        let (v, d) = quasi_embed_traced(&gc, &matching(12), &SplitPlan::default(), 3).unwrap();
        assert!(v.report().accepted);
        assert_eq!(d.split_sizes.iter().map(|s| s.2).sum::<usize>(), d.h_greater_edges);
    }

    #[test]
    fn colour_count_mismatch_is_a_precondition() {
        let gc = GraphCollection::complete(12, 5);
        let err = quasi_embed(&gc, &matching(12), &SplitPlan::default(), 3).unwrap_err();
        assert!(matches!(err.reason, FailureReason::PreconditionViolated { .. }));
    }

    #[test]
    fn split_sizes_match_dense_edges() {
        let gc = GraphCollection::complete(24, 24);
        let h = PatternGraph::new(24, (0..24).map(|i| (i, (i + 1) % 24))).unwrap();
        for seed in 0..4 {
            match quasi_embed_traced(&gc, &h, &SplitPlan::default(), seed) {
                Ok((_, d)) => assert_eq!(d.split_sizes.iter().map(|s| s.2).sum::<usize>(), d.h_greater_edges),
                Err(f) => assert!(!matches!(f.reason, FailureReason::VerificationRejected { .. }), "{f}"),
            }
        }
    }
}
