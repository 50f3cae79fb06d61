//! The transversal blow-up pipeline: connecting graph, colour absorber,
//! approximate embedding, prescribed leftover colours, the remaining
//! vertices, and finally the absorber closes the colouring.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::absorber::{build_absorber, AbsorberRequest, FlexCheck};
use super::approx::approx_core;
use super::blowup::{blowup_embed, ClusterHost};
use super::induced::find_induced_matching;
use super::partial::partial_embed;
use super::prescribed::prescribed_core;
use super::{assemble, bits, certify, edge_classes, subtemplate, with_targets, EmbedFailure, EmbedOutcome, FailureReason, Piece, SplitPlan, Targets, Trace, Verified};
use crate::collection::{ColourId, VertexId};
use crate::pattern::PatternGraph;
use crate::regularity::ledger::{ledger_template_slice, rational_from_f64, TemplateSliceRule};
use crate::regularity::ParameterLedger;
use crate::rng;
use crate::separability::separability_certificate;
use crate::templates::{thick_graph, Template};

const STAGE: &str = "transversal_blowup";

/// Parts of `H` outside the connecting graph.
const ABS: usize = 0;
const APP: usize = 1;
const COL: usize = 2;
const VX: usize = 3;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransversalDiagnostics {
    /// Separability parameter that produced the certificate.
    pub mu: f64,
    pub separator: usize,
    pub split_attempts: usize,
    /// `n^o_i` for o in abs, app, col, vx.
    pub vertex_counts: Vec<Vec<usize>>,
    /// `h^o_e` for o in abs, app, col, vx.
    pub edge_counts: Vec<Vec<usize>>,
    pub ell: Vec<usize>,
    /// Leftover colours of the approximate step, `|D_e|`.
    pub surplus: Vec<usize>,
    pub b_sizes: Vec<usize>,
    /// `|C^abs_e cap B_e|` at the end of the run.
    pub leftover_b: Vec<usize>,
    pub absorber_checks: Vec<FlexCheck>,
    pub placement_attempts: usize,
    /// Vertices of the low-degree sets that had to be used for `V^colvx`.
    pub bar_used: usize,
}

fn slice(l: &ParameterLedger, rule: TemplateSliceRule) -> ParameterLedger {
    ledger_template_slice(l, &rule).unwrap_or_else(|_| l.clone())
}

fn near(alpha: f64) -> TemplateSliceRule {
    TemplateSliceRule::NearSpanning { alpha: rational_from_f64(alpha.clamp(1e-6, 0.999)) }
}

fn fail(step: &str, reason: FailureReason, seed: u64) -> EmbedFailure {
    EmbedFailure::new(format!("{STAGE} / {step}"), reason, seed)
}

/// Transversal embedding of `H` into a rainbow super template with
/// `|phi^-1(j)| = |V_j|` and `e(H[phi^-1(i), phi^-1(j)]) = |C_ij|`, so every
/// colour is used exactly once.
pub fn transversal_blowup(t: &Template, h: &PatternGraph, phi: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> EmbedOutcome {
    transversal_blowup_traced(t, h, phi, targets, plan, seed).map(|(v, _)| v)
}

/// [`transversal_blowup`] together with the run's diagnostics.
pub fn transversal_blowup_traced(t: &Template, h: &PatternGraph, phi: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> Result<(Verified, TransversalDiagnostics), EmbedFailure> {
    plan.validate().map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    let classes = edge_classes(&t.r, h, phi).map_err(|e| EmbedFailure::precondition(STAGE, e, seed))?;
    if !t.rainbow {
        return Err(EmbedFailure::precondition(STAGE, "template is not rainbow", seed));
    }
    for j in 0..t.r.n() {
        let c = phi.iter().filter(|&&p| p == j).count();
        if c != t.clusters[j].len() {
            return Err(EmbedFailure::precondition(STAGE, format!("cluster {j}: {c} pattern vertices, {} host vertices", t.clusters[j].len()), seed));
        }
    }
    for e in 0..t.r.edge_count() {
        let c = classes.iter().filter(|&&x| x == e).count();
        if c != t.colour_clusters[e].len() {
            return Err(EmbedFailure::precondition(STAGE, format!("R-edge {e}: {c} pattern edges, {} colours", t.colour_clusters[e].len()), seed));
        }
    }
    for (&x, tx) in targets {
        if x >= h.n() || tx.iter().any(|v| !t.clusters[phi[x]].contains(v)) {
            return Err(EmbedFailure::precondition(STAGE, format!("target set of {x} leaves its cluster"), seed));
        }
    }
    let mut last = None;
    for restart in 0..plan.restarts {
        let s = rng::derive(seed, 0x7B00 + restart as u64);
        match run(t, h, phi, &classes, targets, plan, s) {
            Ok((raw_tau, raw_sigma, diag)) => {
                let mut trace = Trace { lineage: t.ledger.lineage.clone(), ..Trace::default() };
                trace.push(STAGE, format!("restart {restart}"));
                trace.push("diagnostics", serde_json::to_string(&diag).unwrap_or_default());
                let emb = assemble(raw_tau, raw_sigma).expect("every step completes its part");
                return certify(&t.host, &with_targets(h, targets), emb, trace, STAGE, seed).map(|v| (v, diag));
            }
            Err(f) => last = Some(f.note(format!("restart {restart} seed {s}"))),
        }
    }
    Err(last.expect("at least one restart"))
}

type Run = (Vec<Option<VertexId>>, Vec<Option<ColourId>>, TransversalDiagnostics);

struct Split {
    part: Vec<Option<usize>>,
    n: Vec<Vec<usize>>,
    h: Vec<Vec<usize>>,
}

fn split_components(h: &PatternGraph, phi: &[usize], classes: &[usize], t: &Template, comps: &[Vec<usize>], plan: &SplitPlan, seed: u64) -> Result<(Split, usize), EmbedFailure> {
    let probs = [plan.p_abs, plan.p_app(), plan.p_col, plan.p_vx];
    let rn = t.r.n();
    let re = t.r.edge_count();
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let largest_e = largest * h.max_degree() as f64;
    for attempt in 0..plan.retries {
        let mut r = rng::rng(rng::derive(seed, 0x5B + attempt as u64));
        let mut part = vec![None; h.n()];
        let mut n = vec![vec![0usize; rn]; 4];
        let mut he = vec![vec![0usize; re]; 4];
        for comp in comps {
            let u: f64 = rand::Rng::gen(&mut r);
            let mut acc = 0.0;
            let mut o = 3;
            for (k, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    o = k;
                    break;
                }
            }
            for &x in comp {
                part[x] = Some(o);
                n[o][phi[x]] += 1;
            }
        }
        for (f, &(a, b)) in h.edges().iter().enumerate() {
            if let (Some(o), Some(o2)) = (part[a], part[b]) {
                debug_assert_eq!(o, o2);
                he[o][classes[f]] += 1;
            }
        }
        let ok = (0..4).all(|o| {
            (0..rn).all(|i| (n[o][i] as f64 - probs[o] * t.clusters[i].len() as f64).abs() <= probs[o] * t.clusters[i].len() as f64 / 2.0 + largest + 1e-9)
                && (0..re).all(|e| (he[o][e] as f64 - probs[o] * t.colour_clusters[e].len() as f64).abs() <= probs[o] * t.colour_clusters[e].len() as f64 / 2.0 + largest_e + 1e-9)
        });
        if ok {
            return Ok((Split { part, n, h: he }, attempt + 1));
        }
    }
    Err(fail("split", FailureReason::ChernoffRetryExhausted { event: "component split".into(), attempts: plan.retries }, seed))
}

/// Largest size `<= want` of an induced matching in `h_col` on each `R`-edge,
/// taking the edges in order with earlier sizes fixed.
fn matching_capacity(h: &PatternGraph, phi: &[usize], r: &PatternGraph, want: &[usize], forbidden: &[usize]) -> Vec<usize> {
    let mut sizes = vec![0; want.len()];
    for e in 0..want.len() {
        for s in (0..=want[e]).rev() {
            sizes[e] = s;
            if s == 0 || find_induced_matching(h, phi, r, &sizes, forbidden).is_ok() {
                break;
            }
        }
    }
    sizes
}

fn sum_degree(t: &Template, colours: &[ColourId], v: VertexId, into: &FixedBitSet) -> usize {
    colours.iter().map(|&c| t.host.neighbours(c, v).intersection_count(into)).sum()
}

#[allow(clippy::too_many_arguments)]
fn run(t: &Template, h: &PatternGraph, phi: &[usize], classes: &[usize], targets: &Targets, plan: &SplitPlan, seed: u64) -> Result<Run, EmbedFailure> {
    let n = t.host.n();
    let k = t.host.colour_count();
    let rn = t.r.n();
    let re = t.r.edge_count();
    let m = t.ledger.m_f64();
    let d = t.ledger.d_f64();
    let mut diag = TransversalDiagnostics::default();

    // Preparation: separator and component split.
    let mut mu = plan.mu;
    let cert = loop {
        if let Some(c) = separability_certificate(h, mu) {
            break c;
        }
        mu = (mu * 2.0).min(1.0);
    };
    diag.mu = cert.mu;
    diag.separator = cert.separator.len();
    let (split, attempts) = split_components(h, phi, classes, t, &cert.components, plan, seed)?;
    diag.split_attempts = attempts;
    diag.vertex_counts = split.n.clone();
    diag.edge_counts = split.h.clone();
    let part = &split.part;
    let members = |o: usize| -> Vec<usize> { (0..h.n()).filter(|&x| part[x] == Some(o)).collect() };

    let mut tau: Vec<Option<VertexId>> = vec![None; h.n()];
    let mut sigma: Vec<Option<ColourId>> = vec![None; h.edge_count()];

    // Step 0: the connecting graph.
    let xs = cert.separator.clone();
    let mut in_x = vec![false; h.n()];
    for &x in &xs {
        in_x[x] = true;
    }
    let ys: Vec<usize> = {
        let s: BTreeSet<usize> = xs.iter().flat_map(|&x| h.neighbours(x).iter().copied()).filter(|&y| !in_x[y]).collect();
        s.into_iter().collect()
    };
    let mut t1 = targets.clone();
    if !xs.is_empty() {
        let verts: Vec<usize> = xs.iter().chain(&ys).copied().collect();
        let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut ids = Vec::new();
        for (f, &(a, b)) in h.edges().iter().enumerate() {
            if (in_x[a] || in_x[b]) && local.contains_key(&a) && local.contains_key(&b) {
                edges.push((local[&a], local[&b]));
                ids.push(f);
            }
        }
        let hcon = PatternGraph::new(verts.len(), edges.iter().copied()).map_err(|e| EmbedFailure::precondition(STAGE, e.to_string(), seed))?;
        let phi_con: Vec<usize> = verts.iter().map(|&v| phi[v]).collect();
        let tcon: Targets = verts.iter().enumerate().filter_map(|(i, v)| targets.get(v).map(|s| (i, s.clone()))).collect();
        let order: Vec<usize> = (0..xs.len()).collect();
        let pe = partial_embed(t, &hcon, &phi_con, &order, &tcon, plan, rng::derive(seed, 0)).map_err(|f| f.within(&format!("{STAGE} / step 0")))?;
        for (i, &x) in xs.iter().enumerate() {
            tau[x] = Some(pe.tau[&i]);
        }
        for (i, &f) in ids.iter().enumerate() {
            let (a, b) = hcon.edge(i);
            sigma[h.edge_id(verts[a], verts[b]).expect("edge")] = Some(pe.sigma[i]);
            debug_assert_eq!(h.edge_id(verts[a], verts[b]), Some(f));
        }
        for (i, &y) in ys.iter().enumerate() {
            t1.insert(y, pe.candidates[&(xs.len() + i)].clone());
        }
    }
    for &x in &xs {
        t1.remove(&x);
    }
    let used_v: FixedBitSet = bits(n, tau.iter().flatten().copied());
    let used_c: FixedBitSet = bits(k, sigma.iter().flatten().copied());
    let v1: Vec<Vec<VertexId>> = t.clusters.iter().map(|cl| cl.iter().copied().filter(|&v| !used_v.contains(v)).collect()).collect();
    let c1: Vec<Vec<ColourId>> = t.colour_clusters.iter().map(|cc| cc.iter().copied().filter(|&c| !used_c.contains(c)).collect()).collect();
    let l1 = slice(&t.ledger, near(plan.mu));

    let h_abs = members(ABS);
    let h_col = members(COL);
    let n_colvx: Vec<usize> = (0..rn).map(|i| split.n[COL][i] + split.n[VX][i]).collect();
    let p_colvx = plan.p_col + plan.p_vx;
    let piece_abs = Piece::induced(h, phi, &Targets::new(), &h_abs);
    let ell: Vec<usize> = (0..re).map(|e| (plan.lambda1 * split.h[ABS][e] as f64).floor() as usize).collect();

    // Step 1 and the vertex split for Steps 2 to 4, retried together.
    let mut last_event = String::new();
    let mut placed = None;
    for attempt in 0..plan.retries {
        diag.placement_attempts = attempt + 1;
        let s = rng::derive2(seed, 1, attempt as u64);
        let mut r = rng::rng(s);
        let vabs: Vec<Vec<VertexId>> = (0..rn).map(|i| rng::sample(&v1[i], split.n[ABS][i], &mut r)).collect();
        let vabs_bits: Vec<FixedBitSet> = vabs.iter().map(|c| bits(n, c.iter().copied())).collect();
        let v2: Vec<Vec<VertexId>> = (0..rn).map(|i| v1[i].iter().copied().filter(|&v| !vabs_bits[i].contains(v)).collect()).collect();
        let v2_bits: Vec<FixedBitSet> = v2.iter().map(|c| bits(n, c.iter().copied())).collect();
        let mut abs_targets = Targets::new();
        let mut bad = None;
        for (&y, ty) in &t1 {
            let i = phi[y];
            if part[y] == Some(ABS) {
                let inside: Vec<VertexId> = ty.iter().copied().filter(|&v| vabs_bits[i].contains(v)).collect();
                if (inside.len() as f64) < (plan.nu_prime * vabs[i].len() as f64 / 3.0).max(1.0) - 1e-9 {
                    bad = Some("abs targets");
                }
                let local = h_abs.binary_search(&y).expect("abs vertex");
                abs_targets.insert(local, inside);
            } else if (ty.iter().filter(|&&v| v2_bits[i].contains(v)).count() as f64) < (plan.nu_prime * m / 2.0).max(1.0) - 1e-9 {
                bad = Some("targets outside abs");
            }
        }
        if let Some(b) = bad {
            last_event = b.into();
            continue;
        }

        let f_abs = subtemplate(t, vabs.clone(), c1.clone(), slice(&l1, TemplateSliceRule::Random { alpha: rational_from_f64(plan.p_abs / 3.0), k: 6 }));
        let thick = thick_graph(&f_abs, plan.lambda3);
        let host = ClusterHost::from_thick(&f_abs, &thick);
        let emb_abs = if h_abs.is_empty() {
            Vec::new()
        } else {
            match blowup_embed(&host, &piece_abs.h, &piece_abs.phi, &abs_targets, plan, rng::derive(s, 1)) {
                Ok(e) => e.tau,
                Err(_) => {
                    last_event = "blow-up of H_abs".into();
                    continue;
                }
            }
        };

        // Absorber sizes.
        let mut z: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); re];
        let mut z_ids: Vec<Vec<usize>> = vec![Vec::new(); re];
        for (i, &f) in piece_abs.edge_ids.iter().enumerate() {
            let (a, b) = piece_abs.h.edge(i);
            z[classes[f]].push((emb_abs[a], emb_abs[b]));
            z_ids[classes[f]].push(f);
        }
        let col_forbidden: Vec<usize> = t1.keys().copied().filter(|&y| part[y] == Some(COL)).collect();
        let piece_col_all = Piece::induced(h, phi, &Targets::new(), &h_col);
        let want: Vec<usize> = (0..re).map(|e| (plan.p_abs * c1[e].len() as f64).ceil() as usize).collect();
        let local_forbidden: Vec<usize> = col_forbidden.iter().map(|y| h_col.binary_search(y).expect("col vertex")).collect();
        let surplus = matching_capacity(&piece_col_all.h, &piece_col_all.phi, &t.r, &want, &local_forbidden);
        let mut requests = Vec::new();
        for e in 0..re {
            let b_size = (split.h[COL][e] + split.h[VX][e] + ell[e]).checked_sub(surplus[e]);
            let Some(b_size) = b_size else {
                return Err(fail("step 1", FailureReason::PreconditionViolated { detail: format!("R-edge {e}: negative |B|") }, seed));
            };
            requests.push(AbsorberRequest { edge: e, z: z[e].clone(), pool: c1[e].clone(), ell: ell[e], b_size });
        }
        let absorber = match build_absorber(&f_abs, &requests, plan, rng::derive(s, 2)) {
            Ok(a) => a,
            Err(f) if matches!(f.reason, FailureReason::AbsorberUnverifiable { .. }) => {
                last_event = "absorber".into();
                continue;
            }
            Err(f) => return Err(f.within(&format!("{STAGE} / step 1"))),
        };

        // Low-degree vertices and the app / colvx split.
        let b_sets: Vec<Vec<ColourId>> = absorber.edges.iter().map(|a| a.b.clone()).collect();
        let mut bar: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); rn];
        for e in 0..re {
            let (i, j) = t.r.edge(e);
            for (a, b) in [(i, j), (j, i)] {
                let need = d * (v2[b].len() * b_sets[e].len()) as f64 / 5.0;
                for &v in &v2[a] {
                    if (sum_degree(t, &b_sets[e], v, &v2_bits[b]) as f64) < need - 1e-9 {
                        bar[a].insert(v);
                    }
                }
            }
        }
        let mut bar_used = 0;
        let colvx: Vec<Vec<VertexId>> = (0..rn)
            .map(|i| {
                let good: Vec<VertexId> = v2[i].iter().copied().filter(|&v| !bar[i].contains(v)).collect();
                if good.len() >= n_colvx[i] {
                    rng::sample(&good, n_colvx[i], &mut r)
                } else {
                    let rest: Vec<VertexId> = v2[i].iter().copied().filter(|&v| bar[i].contains(v)).collect();
                    bar_used += n_colvx[i] - good.len();
                    let mut out = good.clone();
                    out.extend(rng::sample(&rest, n_colvx[i] - good.len(), &mut r));
                    out
                }
            })
            .collect();
        let colvx_bits: Vec<FixedBitSet> = colvx.iter().map(|c| bits(n, c.iter().copied())).collect();
        let vapp: Vec<Vec<VertexId>> = (0..rn).map(|i| v2[i].iter().copied().filter(|&v| !colvx_bits[i].contains(v)).collect()).collect();
        let vapp_bits: Vec<FixedBitSet> = vapp.iter().map(|c| bits(n, c.iter().copied())).collect();

        let mut t2 = Targets::new();
        let mut event = None;
        for (&y, ty) in &t1 {
            let i = phi[y];
            let (side, p) = match part[y] {
                Some(APP) => (&vapp_bits[i], plan.p_app()),
                Some(COL) | Some(VX) => (&colvx_bits[i], p_colvx),
                _ => continue,
            };
            let kept: Vec<VertexId> = ty.iter().copied().filter(|&v| side.contains(v)).collect();
            if (kept.len() as f64) < (p * plan.nu_prime * m / 6.0).max(1.0) - 1e-9 {
                event = Some("C1 targets");
            }
            t2.insert(y, kept);
        }
        if event.is_none() {
            'c: for e in 0..re {
                let (i, j) = t.r.edge(e);
                let need = d * (colvx[i].len() * colvx[j].len()) as f64 / 13.0;
                for &c in &c1[e] {
                    let cnt: usize = colvx[i].iter().map(|&v| t.host.neighbours(c, v).intersection_count(&colvx_bits[j])).sum();
                    if (cnt as f64) < need - 1e-9 {
                        event = Some("C2 colour density");
                        break 'c;
                    }
                }
                for (a, b) in [(i, j), (j, i)] {
                    let need = d * (colvx[b].len() * b_sets[e].len()) as f64 / 12.0;
                    if colvx[a].iter().any(|&v| (sum_degree(t, &b_sets[e], v, &colvx_bits[b]) as f64) < need - 1e-9) {
                        event = Some("C3 B-degree");
                        break 'c;
                    }
                }
            }
        }
        if let Some(ev) = event {
            last_event = ev.into();
            continue;
        }
        diag.bar_used = bar_used;
        placed = Some((emb_abs, z_ids, absorber, surplus, vapp, colvx, t2));
        break;
    }
    let Some((emb_abs, z_ids, absorber, surplus, vapp, colvx, t2)) = placed else {
        return Err(fail("step 1", FailureReason::ChernoffRetryExhausted { event: last_event, attempts: plan.retries }, seed));
    };
    for (i, &x) in h_abs.iter().enumerate() {
        tau[x] = Some(emb_abs[i]);
    }
    diag.ell = ell.clone();
    diag.surplus = surplus.clone();
    diag.b_sizes = absorber.edges.iter().map(|a| a.b.len()).collect();
    diag.absorber_checks = absorber.edges.iter().map(|a| a.check.clone()).collect();

    // Step 2.
    let ab: Vec<FixedBitSet> = absorber.edges.iter().map(|a| bits(k, a.a.iter().chain(&a.b).copied())).collect();
    let c_app: Vec<Vec<ColourId>> = (0..re).map(|e| c1[e].iter().copied().filter(|&c| !ab[e].contains(c)).collect()).collect();
    let l2 = slice(&l1, near(2.0 * plan.p_abs));
    let f_app = subtemplate(t, vapp, c_app.clone(), slice(&l2, near(plan.p_vx.sqrt())));
    let piece_app = Piece::induced(h, phi, &t2, &members(APP));
    let (raw, _) = approx_core(&f_app, &piece_app.h, &piece_app.phi, &piece_app.targets, plan, rng::derive(seed, 2)).map_err(|f| f.within(&format!("{STAGE} / step 2")))?;
    piece_app.commit(&raw, &mut tau, &mut sigma);
    let used_app = bits(k, raw.sigma.iter().copied());
    let dsets: Vec<Vec<ColourId>> = (0..re).map(|e| c_app[e].iter().copied().filter(|&c| !used_app.contains(c)).collect()).collect();
    if let Some(e) = (0..re).find(|&e| dsets[e].len() != surplus[e]) {
        return Err(fail("step 2", FailureReason::IdentityViolated { detail: format!("R-edge {e}: {} leftover colours, expected {}", dsets[e].len(), surplus[e]) }, seed));
    }

    // Step 3.
    let c_col: Vec<Vec<ColourId>> = (0..re).map(|e| absorber.edges[e].b.iter().chain(&dsets[e]).copied().collect()).collect();
    let l_col = slice(&l2, TemplateSliceRule::Proportional { alpha: rational_from_f64(plan.p_vx / 4.0), k: 12 });
    let f_col = subtemplate(t, colvx.clone(), c_col, l_col.clone());
    let piece_col = Piece::induced(h, phi, &t2, &h_col);
    let raw = prescribed_core(&f_col, &piece_col.h, &piece_col.phi, &piece_col.targets, &dsets, d / 22.0, plan, rng::derive(seed, 3)).map_err(|f| f.within(&format!("{STAGE} / step 3")))?;
    piece_col.commit(&raw, &mut tau, &mut sigma);
    let used_col = bits(k, raw.sigma.iter().copied());
    let col_v = bits(n, raw.tau.iter().copied());
    let c_vx: Vec<Vec<ColourId>> = (0..re).map(|e| absorber.edges[e].b.iter().copied().filter(|&c| !used_col.contains(c)).collect()).collect();
    let v_vx: Vec<Vec<VertexId>> = colvx.iter().map(|cl| cl.iter().copied().filter(|&v| !col_v.contains(v)).collect()).collect();

    // Step 4.
    let vx = members(VX);
    let vx_bits = bits(n, v_vx.iter().flatten().copied());
    let t3: Targets = vx.iter().filter_map(|y| t2.get(y).map(|ty| (*y, ty.iter().copied().filter(|&v| vx_bits.contains(v)).collect()))).collect();
    let f_vx = subtemplate(t, v_vx, c_vx.clone(), slice(&l_col, near(plan.p_vx)));
    let piece_vx = Piece::induced(h, phi, &t3, &vx);
    let (raw, _) = approx_core(&f_vx, &piece_vx.h, &piece_vx.phi, &piece_vx.targets, plan, rng::derive(seed, 4)).map_err(|f| f.within(&format!("{STAGE} / step 4")))?;
    piece_vx.commit(&raw, &mut tau, &mut sigma);
    let used_vx = bits(k, raw.sigma.iter().copied());

    // Step 5.
    for e in 0..re {
        let leftover: Vec<ColourId> = c_vx[e].iter().copied().filter(|&c| !used_vx.contains(c)).collect();
        diag.leftover_b.push(leftover.len());
        if leftover.len() != ell[e] {
            return Err(fail("step 5", FailureReason::IdentityViolated { detail: format!("R-edge {e}: |C^abs cap B| = {}, l = {}", leftover.len(), ell[e]) }, seed));
        }
        let cols = absorber.edges[e].close(&t.host, &leftover).ok_or_else(|| fail("step 5", FailureReason::AbsorberUnverifiable { edge: e }, seed))?;
        for (&f, c) in z_ids[e].iter().zip(cols) {
            sigma[f] = Some(c);
        }
    }
    let used: Vec<ColourId> = sigma.iter().flatten().copied().collect();
    let distinct: BTreeSet<ColourId> = used.iter().copied().collect();
    if used.len() != h.edge_count() || distinct != t.colours() {
        return Err(fail("step 5", FailureReason::IdentityViolated { detail: "colour conservation".into() }, seed));
    }
    Ok((tau, sigma, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::GraphCollection;
    use crate::regularity::RegularityClass;
    use std::sync::Arc;

    fn template(n: usize, colours: usize) -> Template {
        let gc = GraphCollection::complete(2 * n, colours);
        let ledger = ParameterLedger::from_f64(n as f64, 0.05, 0.5, 0.5, RegularityClass::Super);
        Template::new(PatternGraph::new(2, [(0, 1)]).unwrap(), vec![(0..n).collect(), (n..2 * n).collect()], vec![(0..colours).collect()], Arc::new(gc), ledger, true).unwrap()
    }

    #[test]
    fn perfect_matching_uses_every_colour() {
        let n = 40;
        let t = template(n, n);
        let h = PatternGraph::new(2 * n, (0..n).map(|i| (i, n + i))).unwrap();
        let phi: Vec<usize> = (0..2 * n).map(|v| usize::from(v >= n)).collect();
        let (out, diag) = transversal_blowup_traced(&t, &h, &phi, &Targets::new(), &SplitPlan::default(), 3).unwrap();
        let mut cs = out.embedding().sigma.clone();
        cs.sort_unstable();
        assert_eq!(cs, (0..n).collect::<Vec<_>>());
        assert_eq!(diag.leftover_b, diag.ell);
    }

    #[test]
    fn union_of_paths_with_targets() {
        // 8 paths on 6 vertices alternating between the clusters
        let n = 24;
        let mut edges = Vec::new();
        let mut phi = vec![0; 2 * n];
        let mut next = [0usize, n];
        for _ in 0..8 {
            let mut prev = None;
            for s in 0..6 {
                let side = s % 2;
                let v = next[side];
                next[side] += 1;
                phi[v] = side;
                if let Some(p) = prev {
                    edges.push((p, v));
                }
                prev = Some(v);
            }
        }
        let e = edges.len();
        let t = template(n, e);
        let h = PatternGraph::new(2 * n, edges).unwrap();
        let targets: Targets = [(0, (0..12).collect())].into();
        let out = transversal_blowup(&t, &h, &phi, &targets, &SplitPlan::default(), 11).unwrap();
        assert!(out.report().accepted);
        assert!(out.embedding().tau[0] < 12);
    }

    #[test]
    fn wrong_colour_count_is_rejected() {
        let t = template(6, 7);
        let h = PatternGraph::new(12, (0..6).map(|i| (i, 6 + i))).unwrap();
        let phi: Vec<usize> = (0..12).map(|v| usize::from(v >= 6)).collect();
        let err = transversal_blowup(&t, &h, &phi, &Targets::new(), &SplitPlan::default(), 0).unwrap_err();
        assert!(matches!(err.reason, FailureReason::PreconditionViolated { .. }));
    }
}
