//! Transversal embedding when every cluster pair has spare colours: the
//! components of `H` are packed into chunks, each chunk is blown up into a
//! random part of the clusters and coloured greedily, and a last chunk goes
//! into the leftover vertices using a reserved colour buffer.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::blowup::{blowup_embed, ClusterHost};
use super::{assemble, bits, certify, edge_classes, ranks, subtemplate, with_targets, EmbedFailure, EmbedOutcome, FailureReason, Piece, Raw, SplitPlan, Targets, Trace};
use crate::collection::{ColourId, VertexId};
use crate::matching::max_bipartite_matching;
use crate::pattern::PatternGraph;
use crate::rng;
use crate::templates::{thick_graph, Template};

const STAGE: &str = "approx_embed";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ApproxDiagnostics {
    pub components: usize,
    pub t_star: usize,
    /// `b_ij` for chunks `i = 1..s`, one entry per cluster.
    pub chunks: Vec<Vec<usize>>,
    pub b0: Vec<usize>,
    pub gamma_m: f64,
    /// `2 (Delta+1)^(2r-2) gamma m`.
    pub chunk_upper: f64,
    /// `1 / (delta gamma)`.
    pub s_upper: f64,
    /// `mu' m` and `2 (Delta+1)^(r-1) mu' m`.
    pub b0_range: (f64, f64),
    pub bounds_hold: bool,
    pub slack: usize,
    pub buffer_sizes: Vec<usize>,
    pub attempts: usize,
    /// Low-degree vertices that had to stay in a round's cluster.
    pub bad_kept: usize,
    /// Whether the last round needed colours outside the buffer.
    pub buffer_extended: bool,
}

/// Distinct colours for `edges` (host pairs with their `R`-edge), each from
/// `allowed[e]` and present on the pair. Greedy, most constrained first; a
/// maximum matching when greedy gets stuck.
pub(crate) fn assign_colours(t: &Template, edges: &[(VertexId, VertexId, usize)], allowed: &[FixedBitSet], seed: u64) -> Option<Vec<ColourId>> {
    let k = t.host.colour_count();
    let options: Vec<Vec<ColourId>> = edges.iter().map(|&(u, v, e)| allowed[e].ones().filter(|&c| t.host.has_edge(c, u, v)).collect()).collect();
    let mut r = rng::rng(seed);
    let crank = ranks(k, &mut r);
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| (options[i].len(), i));
    let mut used = FixedBitSet::with_capacity(k);
    let mut out = vec![usize::MAX; edges.len()];
    let mut greedy_ok = true;
    for &i in &order {
        match options[i].iter().copied().filter(|&c| !used.contains(c)).min_by_key(|&c| crank[c]) {
            Some(c) => {
                used.insert(c);
                out[i] = c;
            }
            None => {
                greedy_ok = false;
                break;
            }
        }
    }
    if greedy_ok {
        return Some(out);
    }
    let m = max_bipartite_matching(k, &options);
    m.is_left_perfect().then(|| m.left.iter().map(|c| c.expect("perfect")).collect())
}

struct Layout {
    /// Component vertex lists in processing order.
    comps: Vec<Vec<usize>>,
    /// `[start, end)` component ranges of chunks `1..s`.
    chunks: Vec<(usize, usize)>,
    t_star: usize,
}

/// Transversal embedding of `H` into a rainbow semi-super template whose
/// clusters have exactly `|phi^-1(j)|` vertices and whose colour clusters
/// are at least as large as the corresponding slices of `H`.
pub fn approx_embed(t: &Template, h: &PatternGraph, phi: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> EmbedOutcome {
    plan.validate().map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let (raw, diag) = approx_core(t, h, phi, targets, plan, seed)?;
    let mut trace = Trace { lineage: t.ledger.lineage.clone(), ..Trace::default() };
    trace.push(STAGE, serde_json::to_string(&diag).unwrap_or_default());
    let emb = assemble(raw.tau.into_iter().map(Some).collect(), raw.sigma.into_iter().map(Some).collect()).expect("complete");
    certify(&t.host, &with_targets(h, targets), emb, trace, STAGE, seed)
}

fn chunk_layout(h: &PatternGraph, phi: &[usize], active: &[bool], count: &[usize], m: f64, plan: &SplitPlan, seed: u64) -> Result<Layout, EmbedFailure> {
    let rn = active.len();
    let mut r = rng::rng(rng::derive(seed, 0xC0));
    let comps = rng::shuffled(&h.components(), &mut r);
    let tt = comps.len();
    let mut pre = vec![vec![0usize; rn]; tt + 1];
    for (i, c) in comps.iter().enumerate() {
        pre[i + 1] = pre[i].clone();
        for &x in c {
            pre[i + 1][phi[x]] += 1;
        }
    }
    let mu_m = plan.mu_prime * m;
    let b0_ok = |t: usize| (0..rn).all(|j| !active[j] || (count[j] - pre[t][j]) as f64 >= mu_m - 1e-9);
    let Some(t_star) = (0..=tt).rev().find(|&t| b0_ok(t)) else {
        return Err(EmbedFailure::new(STAGE, FailureReason::ChunkingFailed { detail: format!("no cluster keeps mu' m = {mu_m:.2} vertices for the last round") }, seed));
    };
    let dmax = h.max_degree() as f64;
    let gm = plan.gamma * m;
    let q = 2.0 * (dmax + 1.0).powi(rn as i32 - 1) * gm;
    let mut chunks = Vec::new();
    let mut prev = 0;
    while prev < t_star {
        let roomy = (0..rn).all(|j| !active[j] || (count[j] - pre[prev][j]) as f64 > q);
        let end = if roomy {
            (prev + 1..=t_star).find(|&l| (0..rn).all(|j| !active[j] || (pre[l][j] - pre[prev][j]) as f64 >= gm - 1e-9)).unwrap_or(t_star)
        } else {
            t_star
        };
        chunks.push((prev, end));
        prev = end;
    }
    Ok(Layout { comps, chunks, t_star })
}

pub(crate) fn approx_core(t: &Template, h: &PatternGraph, phi: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> Result<(Raw, ApproxDiagnostics), EmbedFailure> {
    let classes = edge_classes(&t.r, h, phi).map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let rn = t.r.n();
    let re = t.r.edge_count();
    let n = t.host.n();
    let mut count = vec![0usize; rn];
    for &p in phi {
        count[p] += 1;
    }
    if let Some(j) = (0..rn).find(|&j| count[j] != t.clusters[j].len()) {
        return Err(EmbedFailure::precondition(STAGE, format!("cluster {j}: {} pattern vertices, {} host vertices", count[j], t.clusters[j].len()), seed));
    }
    let mut ecount = vec![0usize; re];
    for &e in &classes {
        ecount[e] += 1;
    }
    if let Some(e) = (0..re).find(|&e| ecount[e] > t.colour_clusters[e].len()) {
        return Err(EmbedFailure::precondition(STAGE, format!("R-edge {e}: {} pattern edges, {} colours", ecount[e], t.colour_clusters[e].len()), seed));
    }
    if h.n() == 0 {
        return Ok((Raw::default(), ApproxDiagnostics::default()));
    }
    let m = t.ledger.m_f64();
    let d = t.ledger.d_f64();
    let eps = t.ledger.eps_f64();
    let active: Vec<bool> = (0..rn).map(|j| count[j] > 0).collect();
    let layout = chunk_layout(h, phi, &active, &count, m, plan, seed)?;

    let comp_counts = |range: (usize, usize)| {
        let mut c = vec![0usize; rn];
        for comp in &layout.comps[range.0..range.1] {
            for &x in comp {
                c[phi[x]] += 1;
            }
        }
        c
    };
    let s = layout.chunks.len();
    let b: Vec<Vec<usize>> = layout.chunks.iter().map(|&rg| comp_counts(rg)).collect();
    let b0 = comp_counts((layout.t_star, layout.comps.len()));
    let dmax = h.max_degree() as f64;
    let gm = plan.gamma * m;
    let mut diag = ApproxDiagnostics {
        components: layout.comps.len(),
        t_star: layout.t_star,
        chunks: b.clone(),
        b0: b0.clone(),
        gamma_m: gm,
        chunk_upper: 2.0 * (dmax + 1.0).powi(2 * rn as i32 - 2) * gm,
        s_upper: 1.0 / (t.ledger.delta_f64() * plan.gamma),
        b0_range: (plan.mu_prime * m, 2.0 * (dmax + 1.0).powi(rn as i32 - 1) * plan.mu_prime * m),
        ..ApproxDiagnostics::default()
    };
    diag.bounds_hold = (s as f64) <= diag.s_upper + 1e-9
        && b.iter().enumerate().all(|(i, bi)| {
            (0..rn).all(|j| !active[j] || ((bi[j] as f64) <= diag.chunk_upper + 1e-9 && (i + 1 == s || bi[j] as f64 >= gm - 1e-9)))
        })
        && (0..rn).all(|j| !active[j] || (b0[j] as f64 >= diag.b0_range.0 - 1e-9 && b0[j] as f64 <= diag.b0_range.1 + 1e-9));

    let slack = if s == 0 {
        0
    } else {
        let want = (rn as f64 * eps.cbrt() * m).ceil() as usize;
        let room = (0..rn).filter(|&j| active[j]).map(|j| (b0[j] - b0[j].div_ceil(2)) / s).min().unwrap_or(0);
        want.min(room)
    };
    diag.slack = slack;

    // M_e(x): partners of x across R-edge e with at least d|C_e|/2 colours.
    let mut heavy: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); n];
    for e in 0..re {
        let (vi, vj, cc) = t.edge_parts(e);
        let need = d * cc.len() as f64 / 2.0;
        for &x in vi {
            for &y in vj {
                let mult = cc.iter().filter(|&&c| t.host.has_edge(c, x, y)).count();
                if mult > 0 && mult as f64 >= need - 1e-9 {
                    heavy[x].insert(y);
                    heavy[y].insert(x);
                }
            }
        }
    }

    let mut last_failure: Option<EmbedFailure> = None;
    let mut last_event = String::new();
    for attempt in 0..plan.retries {
        diag.attempts = attempt + 1;
        let aseed = rng::derive(seed, 0x100 + attempt as u64);
        let mut r = rng::rng(aseed);
        // vertex parts: parts[i][j] for i = 0..=s
        let mut parts: Vec<Vec<Vec<VertexId>>> = vec![vec![Vec::new(); rn]; s + 1];
        for j in 0..rn {
            let sh = rng::shuffled(&t.clusters[j], &mut r);
            let mut at = 0;
            for i in 1..=s {
                let len = if active[j] { b[i - 1][j] + slack } else { 0 };
                parts[i][j] = sh[at..at + len].to_vec();
                at += len;
            }
            parts[0][j] = sh[at..].to_vec();
        }
        // colour buffer
        let mut e0 = vec![0usize; re];
        for comp in &layout.comps[layout.t_star..] {
            for &x in comp {
                for &y in h.neighbours(x) {
                    if x < y {
                        e0[classes[h.edge_id(x, y).expect("edge")]] += 1;
                    }
                }
            }
        }
        let buffer: Vec<Vec<ColourId>> = (0..re)
            .map(|e| {
                let total = t.colour_clusters[e].len();
                let surplus = total - ecount[e];
                let rest = ecount[e] - e0[e];
                let size = ((plan.zeta * total as f64).ceil() as usize).max(e0[e] + surplus.div_ceil(2)).clamp(e0[e], total - rest);
                rng::sample(&t.colour_clusters[e], size, &mut r)
            })
            .collect();
        diag.buffer_sizes = buffer.iter().map(Vec::len).collect();

        if let Some(event) = concentration_failure(t, &parts, &buffer, &heavy, &layout, phi, targets, d) {
            last_event = event;
            continue;
        }
        match rounds(t, h, phi, targets, &classes, &layout, &parts, &buffer, &b, plan, aseed, &mut diag) {
            Ok(raw) => return Ok((raw, diag)),
            Err(f) => last_failure = Some(f),
        }
    }
    Err(match last_failure {
        Some(f) => f.note(format!("after {} attempts", plan.retries)),
        None => EmbedFailure::new(STAGE, FailureReason::ChernoffRetryExhausted { event: last_event, attempts: plan.retries }, seed),
    })
}

/// Checks (C1) buffer colours on heavy pairs, (C2) heavy degree into the last
/// round's part, and (C3) targets meeting their round's part; the first
/// failing event.
#[allow(clippy::too_many_arguments)]
fn concentration_failure(
    t: &Template,
    parts: &[Vec<Vec<VertexId>>],
    buffer: &[Vec<ColourId>],
    heavy: &[FixedBitSet],
    layout: &Layout,
    phi: &[usize],
    targets: &Targets,
    d: f64,
) -> Option<String> {
    let n = t.host.n();
    for e in 0..t.r.edge_count() {
        let (i, j) = t.r.edge(e);
        let buf = &buffer[e];
        if !buf.is_empty() {
            for &x in &t.clusters[i] {
                for y in heavy[x].ones().filter(|y| t.clusters[j].contains(y)) {
                    let c = buf.iter().filter(|&&c| t.host.has_edge(c, x, y)).count();
                    if (c as f64) < d * buf.len() as f64 / 4.0 - 1e-9 {
                        return Some("C1 buffer colours".into());
                    }
                }
            }
        }
        for (a, b) in [(i, j), (j, i)] {
            let last = bits(n, parts[0][b].iter().copied());
            let need = d * parts[0][b].len() as f64 / 4.0;
            if t.clusters[a].iter().any(|&x| (heavy[x].intersection_count(&last) as f64) < need - 1e-9) {
                return Some("C2 heavy degree".into());
            }
        }
    }
    let mut round_of = vec![0usize; phi.len()];
    for (i, &(a, b)) in layout.chunks.iter().enumerate() {
        for comp in &layout.comps[a..b] {
            for &x in comp {
                round_of[x] = i + 1;
            }
        }
    }
    for (&x, tx) in targets {
        let j = phi[x];
        let part = &parts[round_of[x]][j];
        let inside = tx.iter().filter(|v| t.clusters[j].contains(v)).count() as f64;
        let expect = inside * part.len() as f64 / t.clusters[j].len().max(1) as f64;
        let hit = tx.iter().filter(|v| part.contains(v)).count() as f64;
        if hit < 1.0 || hit < expect / 2.0 - 1e-9 {
            return Some("C3 targets".into());
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn rounds(
    t: &Template,
    h: &PatternGraph,
    phi: &[usize],
    targets: &Targets,
    classes: &[usize],
    layout: &Layout,
    parts: &[Vec<Vec<VertexId>>],
    buffer: &[Vec<ColourId>],
    b: &[Vec<usize>],
    plan: &SplitPlan,
    seed: u64,
    diag: &mut ApproxDiagnostics,
) -> Result<Raw, EmbedFailure> {
    let rn = t.r.n();
    let re = t.r.edge_count();
    let n = t.host.n();
    let k = t.host.colour_count();
    let d = t.ledger.d_f64();
    let mut tau: Vec<Option<VertexId>> = vec![None; h.n()];
    let mut sigma: Vec<Option<ColourId>> = vec![None; h.edge_count()];
    let reserved: Vec<FixedBitSet> = buffer.iter().map(|bf| bits(k, bf.iter().copied())).collect();
    let mut used = FixedBitSet::with_capacity(k);
    let mut leftovers: Vec<Vec<VertexId>> = parts[0].clone();

    for (i, &(a, bnd)) in layout.chunks.iter().enumerate() {
        let round = i + 1;
        let colours: Vec<Vec<ColourId>> =
            (0..re).map(|e| t.colour_clusters[e].iter().copied().filter(|&c| !reserved[e].contains(c) && !used.contains(c)).collect()).collect();
        // Y^i_j: vertices with a good colour-summed degree into every neighbouring part first.
        let mut chosen: Vec<Vec<VertexId>> = vec![Vec::new(); rn];
        for j in 0..rn {
            let part = &parts[round][j];
            let mut scored: Vec<(bool, f64, usize, VertexId)> = part
                .iter()
                .enumerate()
                .map(|(pos, &v)| {
                    let mut good = true;
                    let mut worst = f64::INFINITY;
                    for e in 0..re {
                        let (p, q) = t.r.edge(e);
                        let other = if p == j { q } else if q == j { p } else { continue };
                        let target = bits(n, parts[round][other].iter().copied());
                        let cells = (parts[round][other].len() * colours[e].len()) as f64;
                        if cells == 0.0 {
                            continue;
                        }
                        let sum: usize = colours[e].iter().map(|&c| t.host.neighbours(c, v).intersection_count(&target)).sum();
                        good &= sum as f64 >= 2.0 * d * cells / 3.0 - 1e-9;
                        worst = worst.min(sum as f64 / cells);
                    }
                    (!good, -worst, pos, v)
                })
                .collect();
            scored.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
            let want = b[i][j];
            diag.bad_kept += scored[..want.min(scored.len())].iter().filter(|s| s.0).count();
            chosen[j] = scored[..want].iter().map(|s| s.3).collect();
            let keep: BTreeSet<VertexId> = chosen[j].iter().copied().collect();
            leftovers[j].extend(part.iter().copied().filter(|v| !keep.contains(v)));
        }
        let verts: Vec<usize> = layout.comps[a..bnd].iter().flatten().copied().collect();
        let allowed: Vec<FixedBitSet> = colours.iter().map(|cs| bits(k, cs.iter().copied())).collect();
        let raw = embed_round(t, h, phi, targets, classes, &verts, chosen, colours, &allowed, plan, rng::derive(seed, round as u64)).map_err(|f| f.within(&format!("round {round}")))?;
        for (&x, &v) in verts.iter().zip(&raw.tau) {
            tau[x] = Some(v);
        }
        let piece_edges: Vec<usize> = h.induced(&verts).1;
        for (&e, &c) in piece_edges.iter().zip(&raw.sigma) {
            sigma[e] = Some(c);
            used.insert(c);
        }
    }

    let verts: Vec<usize> = layout.comps[layout.t_star..].iter().flatten().copied().collect();
    let colours: Vec<Vec<ColourId>> = buffer.to_vec();
    let allowed: Vec<FixedBitSet> = reserved.clone();
    let last = embed_round(t, h, phi, targets, classes, &verts, leftovers.clone(), colours, &allowed, plan, rng::derive(seed, 0));
    let raw = match last {
        Ok(raw) => raw,
        Err(_) => {
            // Fall back to every colour not used by earlier rounds.
            diag.buffer_extended = true;
            let colours: Vec<Vec<ColourId>> = (0..re).map(|e| t.colour_clusters[e].iter().copied().filter(|&c| !used.contains(c)).collect()).collect();
            let allowed: Vec<FixedBitSet> = colours.iter().map(|cs| bits(k, cs.iter().copied())).collect();
            embed_round(t, h, phi, targets, classes, &verts, leftovers, colours, &allowed, plan, rng::derive(seed, 1)).map_err(|f| f.within("last round"))?
        }
    };
    for (&x, &v) in verts.iter().zip(&raw.tau) {
        tau[x] = Some(v);
    }
    for (&e, &c) in h.induced(&verts).1.iter().zip(&raw.sigma) {
        sigma[e] = Some(c);
    }
    Ok(Raw { tau: tau.into_iter().map(|v| v.expect("all rounds placed")).collect(), sigma: sigma.into_iter().map(|c| c.expect("all rounds coloured")).collect() })
}

/// Blow-up of `H[verts]` into the thick graph of the sub-template on
/// `clusters` and `colours`, then distinct colours from `allowed`.
#[allow(clippy::too_many_arguments)]
fn embed_round(
    t: &Template,
    h: &PatternGraph,
    phi: &[usize],
    targets: &Targets,
    classes: &[usize],
    verts: &[usize],
    clusters: Vec<Vec<VertexId>>,
    colours: Vec<Vec<ColourId>>,
    allowed: &[FixedBitSet],
    plan: &SplitPlan,
    seed: u64,
) -> Result<Raw, EmbedFailure> {
    if verts.is_empty() {
        return Ok(Raw::default());
    }
    let n = t.host.n();
    let piece = Piece::induced(h, phi, targets, verts);
    let sub = subtemplate(t, clusters, colours, t.ledger.clone());
    let thick = thick_graph(&sub, plan.thick_lambda);
    let host = ClusterHost::from_thick(&sub, &thick);
    let mut local_targets = Targets::new();
    for (&x, tx) in &piece.targets {
        let cl = bits(n, sub.clusters[piece.phi[x]].iter().copied());
        let inside: Vec<VertexId> = tx.iter().copied().filter(|&v| cl.contains(v)).collect();
        local_targets.insert(x, inside);
    }
    let emb = blowup_embed(&host, &piece.h, &piece.phi, &local_targets, plan, seed).map_err(|f| f.within(STAGE))?;
    let edges: Vec<(VertexId, VertexId, usize)> = piece.edge_ids.iter().enumerate().map(|(i, &e)| {
        let (a, b) = piece.h.edge(i);
        (emb.tau[a], emb.tau[b], classes[e])
    }).collect();
    let sigma = assign_colours(t, &edges, allowed, seed).ok_or_else(|| {
        let e = edges.first().map(|x| x.2).unwrap_or(0);
        EmbedFailure::new(STAGE, FailureReason::ColourExhausted { edge: e }, seed)
    })?;
    Ok(Raw { tau: emb.tau, sigma })
}
