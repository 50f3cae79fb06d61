//! Embedding with prescribed colours: every colour of `D` must appear. An
//! induced matching `M` carries the prescribed colours; its edges are placed
//! one by one with degree-filtered sets `Z(x)`, `Z(x')`, and the rest of `H`
//! is finished by the partial embedder.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::induced::find_induced_matching;
use super::partial::partial_embed;
use super::{bits, certify, edge_classes, ranks, subtemplate, with_targets, EmbedFailure, EmbedOutcome, FailureReason, Piece, Raw, SplitPlan, Targets, Trace};
use crate::collection::{ColourId, VertexId};
use crate::pattern::PatternGraph;
use crate::rng;
use crate::templates::Template;

const STAGE: &str = "embed_prescribed_colours";

/// Transversal embedding of `H` using every colour in `prescribed[e]`
/// (`prescribed[e]` a subset of `C_e`).
pub fn embed_prescribed_colours(t: &Template, h: &PatternGraph, phi: &[usize], targets: &Targets, prescribed: &[Vec<ColourId>], plan: &SplitPlan, seed: u64) -> EmbedOutcome {
    let raw = prescribed_core(t, h, phi, targets, prescribed, t.ledger.d_f64(), plan, seed)?;
    let mut trace = Trace { lineage: t.ledger.lineage.clone(), ..Trace::default() };
    trace.push(STAGE, format!("{} prescribed colours", prescribed.iter().map(Vec::len).sum::<usize>()));
    let emb = super::assemble(raw.tau.into_iter().map(Some).collect(), raw.sigma.into_iter().map(Some).collect()).expect("complete");
    let out = certify(&t.host, &with_targets(h, targets), emb, trace, STAGE, seed)?;
    let used: BTreeSet<ColourId> = out.embedding().sigma.iter().copied().collect();
    if let Some(c) = prescribed.iter().flatten().find(|c| !used.contains(c)) {
        return Err(EmbedFailure::new(STAGE, FailureReason::IdentityViolated { detail: format!("prescribed colour {c} unused") }, seed));
    }
    Ok(out)
}

struct State<'a> {
    t: &'a Template,
    used_v: FixedBitSet,
    used_c: FixedBitSet,
    /// Colours that only matching edges may take.
    reserved: FixedBitSet,
    crank: Vec<usize>,
    vrank: Vec<usize>,
    d: f64,
}

impl State<'_> {
    fn free(&self, j: usize) -> FixedBitSet {
        let mut f = bits(self.t.host.n(), self.t.clusters[j].iter().copied());
        f.difference_with(&self.used_v);
        f
    }

    /// Colours for the edges from `x` (cluster `j`) to each `(y, base_y)`,
    /// shrinking `z` to vertices with `d_c(z, base_y) >= d|base_y|/6` each
    /// time. Returns the colours and the shrunk `z`.
    fn fan(&mut self, j: usize, nbrs: &[(usize, usize, FixedBitSet)], mut z: FixedBitSet) -> Option<(Vec<ColourId>, FixedBitSet)> {
        let mut out = Vec::new();
        for (_, a, base) in nbrs {
            let e = self.t.r.edge_id(j, *a)?;
            let need = self.d * base.count_ones(..) as f64 / 6.0;
            let mut best: Option<(usize, usize, ColourId, FixedBitSet)> = None;
            for &c in &self.t.colour_clusters[e] {
                if self.used_c.contains(c) || self.reserved.contains(c) {
                    continue;
                }
                let mut keep = FixedBitSet::with_capacity(z.len());
                for v in z.ones() {
                    let deg = self.t.host.neighbours(c, v).intersection_count(base);
                    if deg > 0 && deg as f64 >= need - 1e-9 {
                        keep.insert(v);
                    }
                }
                let k = keep.count_ones(..);
                if k > 0 && best.as_ref().is_none_or(|b| k > b.0 || (k == b.0 && self.crank[c] < b.1)) {
                    best = Some((k, self.crank[c], c, keep));
                }
            }
            let (_, _, c, keep) = best?;
            self.used_c.insert(c);
            out.push(c);
            z = keep;
        }
        Some((out, z))
    }

    /// The vertex of `z` whose smallest candidate set is largest.
    fn choose(&self, z: &FixedBitSet, sets: &[(ColourId, &FixedBitSet)]) -> Option<VertexId> {
        z.ones().max_by_key(|&v| {
            let worst = sets.iter().map(|(c, s)| self.t.host.neighbours(*c, v).intersection_count(s)).min().unwrap_or(0);
            (worst, std::cmp::Reverse(self.vrank[v]))
        })
    }
}

fn exhausted(element: String, step: &str, seed: u64) -> EmbedFailure {
    EmbedFailure::new(STAGE, FailureReason::CandidateExhausted { element, step: step.into() }, seed)
}

/// `dens` is the per-colour edge density floor required of prescribed colours.
#[allow(clippy::too_many_arguments)]
pub(crate) fn prescribed_core(
    t: &Template,
    h: &PatternGraph,
    phi: &[usize],
    targets: &Targets,
    prescribed: &[Vec<ColourId>],
    dens: f64,
    plan: &SplitPlan,
    seed: u64,
) -> Result<Raw, EmbedFailure> {
    edge_classes(&t.r, h, phi).map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let re = t.r.edge_count();
    let n = t.host.n();
    let k = t.host.colour_count();
    if prescribed.len() != re {
        return Err(EmbedFailure::precondition(STAGE, format!("{} prescribed sets for {re} edges of R", prescribed.len()), seed));
    }
    let d = t.ledger.d_f64();
    // D'_e: drop colours already prescribed on an earlier edge.
    let mut seen = FixedBitSet::with_capacity(k);
    let mut dprime: Vec<Vec<ColourId>> = vec![Vec::new(); re];
    for e in 0..re {
        let (vi, vj, cc) = t.edge_parts(e);
        for &c in &prescribed[e] {
            if !cc.contains(&c) {
                return Err(EmbedFailure::precondition(STAGE, format!("prescribed colour {c} is not in C_{e}"), seed));
            }
            let cnt = vi.iter().map(|&x| vj.iter().filter(|&&y| t.host.has_edge(c, x, y)).count()).sum::<usize>();
            if cnt == 0 || (cnt as f64) < dens * (vi.len() * vj.len()) as f64 - 1e-9 {
                return Err(EmbedFailure::precondition(STAGE, format!("prescribed colour {c} has {cnt} edges on R-edge {e}, below {dens} |V_i||V_j|"), seed));
            }
            if !seen.contains(c) {
                seen.insert(c);
                dprime[e].push(c);
            }
        }
    }
    for e in 0..re {
        let free = t.colour_clusters[e].iter().filter(|&&c| !seen.contains(c)).count();
        if (free as f64) < d * t.colour_clusters[e].len() as f64 - 1e-9 {
            return Err(EmbedFailure::precondition(STAGE, format!("C_{e} minus D has {free} colours, below d |C_{e}|"), seed));
        }
    }
    let all: Vec<usize> = (0..h.n()).collect();
    if seen.is_clear() {
        let pe = partial_embed(t, h, phi, &all, targets, plan, seed).map_err(|f| f.within(STAGE))?;
        return Ok(Raw { tau: all.iter().map(|x| pe.tau[x]).collect(), sigma: pe.sigma });
    }

    let forbidden: Vec<usize> = targets.keys().copied().collect();
    let sizes: Vec<usize> = dprime.iter().map(Vec::len).collect();
    let m = find_induced_matching(h, phi, &t.r, &sizes, &forbidden).map_err(|f| f.within(STAGE))?;
    let m_edges: BTreeSet<usize> = m.iter().flatten().copied().collect();

    let mut r = rng::rng(rng::derive(seed, 0x0D));
    let vrank = ranks(n, &mut r);
    let crank = ranks(k, &mut r);
    let mut st = State { t, used_v: FixedBitSet::with_capacity(n), used_c: FixedBitSet::with_capacity(k), reserved: seen.clone(), crank, vrank, d };
    let mut tau: Vec<Option<VertexId>> = vec![None; h.n()];
    let mut sigma: Vec<Option<ColourId>> = vec![None; h.edge_count()];
    let mut cand: Vec<Option<FixedBitSet>> = vec![None; h.n()];
    let target_bits = |y: usize| -> Option<FixedBitSet> { targets.get(&y).map(|ty| bits(n, ty.iter().copied())) };

    for e in 0..re {
        for (q, &f) in m[e].iter().enumerate() {
            let cstar = dprime[e][q];
            let (x0, x1) = h.edge(f);
            // x in V_j, x' in V_j' with e = jj'
            let (x, xp) = if phi[x0] == t.r.edge(e).0 { (x0, x1) } else { (x1, x0) };
            let (j, jp) = (phi[x], phi[xp]);
            st.used_c.insert(cstar);
            sigma[f] = Some(cstar);
            let uj = st.free(j);
            let ujp = st.free(jp);
            let need = d * ujp.count_ones(..) as f64 / 4.0;
            let mut zx = FixedBitSet::with_capacity(n);
            for v in uj.ones() {
                let deg = t.host.neighbours(cstar, v).intersection_count(&ujp);
                if deg > 0 && deg as f64 >= need - 1e-9 {
                    zx.insert(v);
                }
            }
            if zx.is_clear() {
                return Err(exhausted(format!("vertex {x}"), "Z(x)", seed));
            }
            let base_of = |y: usize, st: &State, cand: &[Option<FixedBitSet>]| -> FixedBitSet {
                match &cand[y] {
                    Some(c) => c.clone(),
                    None => {
                        let mut b = st.free(phi[y]);
                        if let Some(tb) = target_bits(y) {
                            b.intersect_with(&tb);
                        }
                        b
                    }
                }
            };
            let nx: Vec<(usize, usize, FixedBitSet)> = h.neighbours(x).iter().filter(|&&y| y != xp).map(|&y| (y, phi[y], base_of(y, &st, &cand))).collect();
            let (cols, zl) = st.fan(j, &nx, zx).ok_or_else(|| exhausted(format!("vertex {x}"), "Z_i(x)", seed))?;
            let mut sets: Vec<(ColourId, &FixedBitSet)> = vec![(cstar, &ujp)];
            sets.extend(cols.iter().zip(&nx).map(|(&c, (_, _, b))| (c, b)));
            let tx = st.choose(&zl, &sets).ok_or_else(|| exhausted(format!("vertex {x}"), "tau(x)", seed))?;
            tau[x] = Some(tx);
            st.used_v.insert(tx);
            for (&c, (y, _, b)) in cols.iter().zip(&nx) {
                sigma[h.edge_id(x, *y).expect("edge")] = Some(c);
                let mut cy = t.host.neighbours(c, tx).clone();
                cy.intersect_with(b);
                cy.set(tx, false);
                cand[*y] = Some(cy);
            }

            let mut zxp = t.host.neighbours(cstar, tx).clone();
            zxp.intersect_with(&st.free(jp));
            let nxp: Vec<(usize, usize, FixedBitSet)> = h.neighbours(xp).iter().filter(|&&w| w != x).map(|&w| (w, phi[w], base_of(w, &st, &cand))).collect();
            let (cols, zk) = st.fan(jp, &nxp, zxp).ok_or_else(|| exhausted(format!("vertex {xp}"), "Z_k(x')", seed))?;
            let sets: Vec<(ColourId, &FixedBitSet)> = cols.iter().zip(&nxp).map(|(&c, (_, _, b))| (c, b)).collect();
            let txp = st.choose(&zk, &sets).ok_or_else(|| exhausted(format!("vertex {xp}"), "tau(x')", seed))?;
            tau[xp] = Some(txp);
            st.used_v.insert(txp);
            for (&c, (w, _, b)) in cols.iter().zip(&nxp) {
                sigma[h.edge_id(xp, *w).expect("edge")] = Some(c);
                let mut cw = t.host.neighbours(c, txp).clone();
                cw.intersect_with(b);
                cw.set(txp, false);
                cand[*w] = Some(cw);
            }
            for c in cand.iter_mut().flatten() {
                c.set(tx, false);
                c.set(txp, false);
            }
        }
    }
    debug_assert!(m_edges.iter().all(|&f| sigma[f].is_some()));

    // Finish H - V(M) in the template with the used vertices and colours removed.
    let rest: Vec<usize> = (0..h.n()).filter(|&x| tau[x].is_none()).collect();
    let mut new_targets = Targets::new();
    for &y in &rest {
        if let Some(c) = &cand[y] {
            if c.is_clear() {
                return Err(exhausted(format!("vertex {y}"), "T_y", seed));
            }
            new_targets.insert(y, c.ones().collect());
        } else if let Some(ty) = targets.get(&y) {
            new_targets.insert(y, ty.clone());
        }
    }
    let piece = Piece::induced(h, phi, &new_targets, &rest);
    let clusters: Vec<Vec<VertexId>> = t.clusters.iter().map(|cl| cl.iter().copied().filter(|&v| !st.used_v.contains(v)).collect()).collect();
    let colours: Vec<Vec<ColourId>> = t.colour_clusters.iter().map(|cc| cc.iter().copied().filter(|&c| !st.used_c.contains(c)).collect()).collect();
    let sub = subtemplate(t, clusters, colours, t.ledger.clone());
    let order: Vec<usize> = (0..piece.h.n()).collect();
    let pe = partial_embed(&sub, &piece.h, &piece.phi, &order, &piece.targets, plan, seed).map_err(|f| f.within(STAGE))?;
    let raw = Raw { tau: order.iter().map(|x| pe.tau[x]).collect(), sigma: pe.sigma };
    piece.commit(&raw, &mut tau, &mut sigma);
    let tau: Vec<VertexId> = tau.into_iter().map(|v| v.expect("all placed")).collect();
    let sigma: Vec<ColourId> = sigma.into_iter().map(|c| c.expect("all coloured")).collect();
    Ok(Raw { tau, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::GraphCollection;
    use crate::regularity::{ParameterLedger, RegularityClass};
    use std::sync::Arc;

    fn template(gc: GraphCollection, n: usize, d: f64) -> Template {
        let k = gc.colour_count();
        let ledger = ParameterLedger::from_f64(n as f64, 0.05, d, 0.5, RegularityClass::Super);
        Template::new(PatternGraph::new(2, [(0, 1)]).unwrap(), vec![(0..n).collect(), (n..2 * n).collect()], vec![(0..k).collect()], Arc::new(gc), ledger, true).unwrap()
    }

    fn path(len: usize) -> (PatternGraph, Vec<usize>) {
        (PatternGraph::new(len, (0..len - 1).map(|i| (i, i + 1))).unwrap(), (0..len).map(|i| i % 2).collect())
    }

    #[test]
    fn empty_prescription_matches_partial_embed() {
        let t = template(GraphCollection::complete(12, 10), 6, 0.5);
        let (h, phi) = path(6);
        let out = embed_prescribed_colours(&t, &h, &phi, &Targets::new(), &[vec![]], &SplitPlan::default(), 5).unwrap();
        let pe = partial_embed(&t, &h, &phi, &(0..6).collect::<Vec<_>>(), &Targets::new(), &SplitPlan::default(), 5).unwrap();
        assert_eq!(out.embedding().tau, (0..6).map(|x| pe.tau[&x]).collect::<Vec<_>>());
        assert_eq!(out.embedding().sigma, pe.sigma);
    }

    #[test]
    fn single_edge_colour_is_used() {
        let mut gc = GraphCollection::complete(16, 12);
        // colour 11 is a single edge 3-12
        for u in 0..16 {
            for v in u + 1..16 {
                if (u, v) != (3, 12) {
                    gc.remove(11, u, v);
                }
            }
        }
        let t = template(gc, 8, 0.5);
        let (h, phi) = path(8);
        let out = prescribed_core(&t, &h, &phi, &Targets::new(), &[vec![11]], 0.0, &SplitPlan::default(), 1).unwrap();
        assert!(out.sigma.contains(&11));
        let f = out.sigma.iter().position(|&c| c == 11).unwrap();
        let (a, b) = h.edge(f);
        let ends = [out.tau[a], out.tau[b]];
        assert!(ends.contains(&3) && ends.contains(&12));
    }

    #[test]
    fn empty_colour_is_a_precondition_failure() {
        let mut gc = GraphCollection::complete(12, 10);
        for u in 0..12 {
            for v in u + 1..12 {
                gc.remove(9, u, v);
            }
        }
        let t = template(gc, 6, 0.5);
        let (h, phi) = path(6);
        let err = embed_prescribed_colours(&t, &h, &phi, &Targets::new(), &[vec![9]], &SplitPlan::default(), 0).unwrap_err();
        assert!(matches!(err.reason, FailureReason::PreconditionViolated { .. }));
    }

    #[test]
    fn several_prescribed_colours_on_a_long_path() {
        let t = template(GraphCollection::complete(24, 30), 12, 0.5);
        let (h, phi) = path(24);
        let out = embed_prescribed_colours(&t, &h, &phi, &Targets::new(), &[vec![2, 17, 29]], &SplitPlan::default(), 3).unwrap();
        for c in [2, 17, 29] {
            assert!(out.embedding().sigma.contains(&c));
        }
    }
}
