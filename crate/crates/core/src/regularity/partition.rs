//! Regularity partitions of graph collections through the 3-graph on `V ⊎ C`.
//!
//! Clusters start vertex-pure or colour-pure and are refined by intersecting
//! them with irregularity witnesses, so purity is never lost. Leftovers of the
//! re-chunking go to the exceptional sets. The energy counts exceptional
//! elements as singleton parts, which makes every round a refinement and the
//! energy non-decreasing.

use std::collections::BTreeMap;

use serde::Serialize;

use super::partite::PartiteIncidence;
use super::witness::{self, min_size, Objective, SearchOptions, WitnessOutcome};
use super::{DensitySpec, RegularityError};
use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::par;
use crate::rng;

#[derive(Clone, Debug)]
pub struct PartitionConfig {
    pub spec: DensitySpec,
    pub l0: usize,
    /// Each final cluster is cut into this many equal subclusters (`1/alpha`).
    pub subclusters: usize,
    pub seed: u64,
    pub search: SearchOptions,
    /// Defaults to `ceil(eps^-3)`.
    pub max_rounds: Option<usize>,
}

impl PartitionConfig {
    pub fn new(spec: DensitySpec, l0: usize, seed: u64) -> Self {
        Self { spec, l0, subclusters: 1, seed, search: SearchOptions { budget: 300, seed, ..Default::default() }, max_rounds: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PropertyChecks {
    pub cluster_counts_and_exceptional: bool,
    pub equal_cluster_sizes: bool,
    pub degree_loss: bool,
    pub intra_cluster_edges_exceptional: bool,
    pub triples_empty_or_regular: bool,
    pub max_vertex_loss: u64,
    pub max_colour_loss: u64,
    pub loss_bound: f64,
}

impl PropertyChecks {
    pub fn all(&self) -> bool {
        self.cluster_counts_and_exceptional
            && self.equal_cluster_sizes
            && self.degree_loss
            && self.intra_cluster_edges_exceptional
            && self.triples_empty_or_regular
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityPartition {
    pub spec: DensitySpec,
    pub l0: usize,
    pub delta: f64,
    pub m: usize,
    pub exceptional_vertices: Vec<VertexId>,
    pub exceptional_colours: Vec<ColourId>,
    pub vertex_clusters: Vec<Vec<VertexId>>,
    pub colour_clusters: Vec<Vec<ColourId>>,
    /// `G'`: the cleaned collection.
    #[serde(skip)]
    pub pruned: GraphCollection,
    /// `R_j` as edges `(h, i)` with `h < i` on the vertex clusters.
    pub reduced: Vec<Vec<(usize, usize)>>,
    /// Energy after every round, starting with the initial partition.
    pub energy_history: Vec<f64>,
    pub rounds: usize,
    pub irregular_triples: usize,
    pub checks: PropertyChecks,
    pub converged: bool,
    pub diagnostics: String,
}

struct Parts {
    m: usize,
    v: Vec<Vec<usize>>,
    c: Vec<Vec<usize>>,
    v0: Vec<usize>,
    c0: Vec<usize>,
}

/// Mean-square density over triples of distinct parts of `V ⊎ C`, exceptional
/// elements counted as singletons.
pub fn energy(gc: &GraphCollection, vclusters: &[Vec<usize>], cclusters: &[Vec<usize>]) -> f64 {
    let n = gc.n();
    let k = gc.colour_count();
    let total = (n + k) as f64;
    let mut part = vec![usize::MAX; n + k];
    let mut sizes = Vec::new();
    for cl in vclusters {
        for &v in cl {
            part[v] = sizes.len();
        }
        sizes.push(cl.len());
    }
    for cl in cclusters {
        for &c in cl {
            part[n + c] = sizes.len();
        }
        sizes.push(cl.len());
    }
    for p in part.iter_mut() {
        if *p == usize::MAX {
            *p = sizes.len();
            sizes.push(1);
        }
    }
    let mut counts: BTreeMap<[usize; 3], u64> = BTreeMap::new();
    for c in 0..k {
        for (x, y) in gc.edges(c) {
            let (a, b, z) = (part[x], part[y], part[n + c]);
            if a == b {
                continue;
            }
            let mut t = [a, b, z];
            t.sort_unstable();
            *counts.entry(t).or_default() += 1;
        }
    }
    counts
        .iter()
        .map(|(t, &e)| (e * e) as f64 / (sizes[t[0]] * sizes[t[1]] * sizes[t[2]]) as f64)
        .sum::<f64>()
        / (total * total * total)
}

fn triples(l: usize, m: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for h in 0..l {
        for i in h + 1..l {
            for j in 0..m {
                out.push((h, i, j));
            }
        }
    }
    out
}

/// Splits every cluster by its chosen witness set, then cuts all atoms into
/// pieces of one common size; remainders become exceptional.
fn refine(p: &Parts, splits_v: &[Option<Vec<usize>>], splits_c: &[Option<Vec<usize>>], budget: f64) -> Option<Parts> {
    let atoms = |clusters: &[Vec<usize>], splits: &[Option<Vec<usize>>]| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (cl, s) in clusters.iter().zip(splits) {
            match s {
                Some(w) => {
                    let (a, b): (Vec<usize>, Vec<usize>) = cl.iter().partition(|x| w.contains(x));
                    out.extend([a, b].into_iter().filter(|x| !x.is_empty()));
                }
                None => out.push(cl.clone()),
            }
        }
        out
    };
    let va = atoms(&p.v, splits_v);
    let ca = atoms(&p.c, splits_c);
    let base = (p.v0.len() + p.c0.len()) as f64;
    for m1 in (1..=p.m / 2).rev() {
        let left: usize = va.iter().chain(&ca).map(|a| a.len() % m1).sum();
        if base + left as f64 <= budget + 1e-9 {
            let mut next = Parts { m: m1, v: Vec::new(), c: Vec::new(), v0: p.v0.clone(), c0: p.c0.clone() };
            for (src, dst, ex) in [(&va, &mut next.v, &mut next.v0), (&ca, &mut next.c, &mut next.c0)] {
                for a in src {
                    let full = a.len() / m1 * m1;
                    dst.extend(a[..full].chunks(m1).map(<[usize]>::to_vec));
                    ex.extend_from_slice(&a[full..]);
                }
            }
            next.v0.sort_unstable();
            next.c0.sort_unstable();
            return Some(next);
        }
    }
    None
}

fn triple_incidence(gc: &GraphCollection, p: &Parts, h: usize, i: usize, j: usize) -> PartiteIncidence {
    PartiteIncidence::from_collection(gc, &p.v[h], &p.v[i], &p.c[j]).expect("clusters are disjoint and non-empty")
}

/// Applies the partition lemma for collections: vertex clusters `V_1..V_L`,
/// colour clusters `C_1..C_M` of one size `m`, exceptional sets, a cleaned
/// collection `G'` and the reduced collection. All five structural properties
/// are checked before returning; a partition that fails any of them comes
/// back as [`RegularityError::DidNotConverge`].
pub fn partition_collection(gc: &GraphCollection, cfg: &PartitionConfig) -> Result<RegularityPartition, RegularityError> {
    let n = gc.n();
    let k = gc.colour_count();
    let eps = cfg.spec.eps;
    if n < 2 || k == 0 || cfg.l0 == 0 {
        return Err(RegularityError::Precondition("need at least two vertices, one colour and L0 >= 1".into()));
    }
    let delta = (k as f64 / n as f64).min(n as f64 / k as f64);
    let budget = eps * n as f64;

    let m0 = (1..=n.min(k))
        .rev()
        .find(|&m| n / m >= cfg.l0 && k / m >= cfg.l0 && ((n % m) + (k % m)) as f64 <= budget / 2.0 + 1e-9)
        .ok_or_else(|| RegularityError::Precondition(format!("cannot form {} clusters of each kind", cfg.l0)))?;
    let mut r = rng::rng(cfg.seed);
    let vs = rng::shuffled(&(0..n).collect::<Vec<_>>(), &mut r);
    let cs = rng::shuffled(&(0..k).collect::<Vec<_>>(), &mut r);
    let cut = |xs: &[usize]| -> (Vec<Vec<usize>>, Vec<usize>) {
        let full = xs.len() / m0 * m0;
        let mut left = xs[full..].to_vec();
        left.sort_unstable();
        (xs[..full].chunks(m0).map(<[usize]>::to_vec).collect(), left)
    };
    let (v, v0) = cut(&vs);
    let (c, c0) = cut(&cs);
    let mut parts = Parts { m: m0, v, c, v0, c0 };

    let cap = cfg.max_rounds.unwrap_or_else(|| (eps.powi(-3)).ceil() as usize);
    let mut energy_history = vec![energy(gc, &parts.v, &parts.c)];
    let mut rounds = 0;
    let mut irregular;
    let mut weak_converged = false;
    loop {
        let ts = triples(parts.v.len(), parts.c.len());
        let opts = SearchOptions { seed: rng::derive(cfg.seed, rounds as u64 + 1), ..cfg.search };
        let results: Vec<Option<witness::IrregularityWitness>> = par::map(cfg.search.exec, &ts, |&(h, i, j)| {
            let inc = triple_incidence(gc, &parts, h, i, j);
            let o = SearchOptions { force_sampled: parts.m > 5 || opts.force_sampled, exec: crate::par::Exec::Sequential, ..opts };
            witness::irregularity_witness_in(&inc, eps, &o).witness().cloned()
        });
        irregular = results.iter().filter(|w| w.is_some()).count();
        if irregular as f64 <= eps * ts.len() as f64 {
            weak_converged = true;
            break;
        }
        if rounds >= cap {
            break;
        }
        // strongest witness per cluster
        let mut best_v: Vec<Option<(f64, Vec<usize>)>> = vec![None; parts.v.len()];
        let mut best_c: Vec<Option<(f64, Vec<usize>)>> = vec![None; parts.c.len()];
        for (&(h, i, j), w) in ts.iter().zip(&results) {
            let Some(w) = w else { continue };
            let dev = witness::ratio_f64(&w.deviation).abs();
            let offer = |slot: &mut Option<(f64, Vec<usize>)>, set: &Vec<usize>| {
                if slot.as_ref().is_none_or(|(b, _)| dev > *b) {
                    *slot = Some((dev, set.clone()));
                }
            };
            offer(&mut best_v[h], &w.subsets[0]);
            offer(&mut best_v[i], &w.subsets[1]);
            offer(&mut best_c[j], &w.subsets[2]);
        }
        let sv: Vec<_> = best_v.into_iter().map(|b| b.map(|x| x.1)).collect();
        let sc: Vec<_> = best_c.into_iter().map(|b| b.map(|x| x.1)).collect();
        match refine(&parts, &sv, &sc, budget) {
            Some(next) if next.v.len() >= cfg.l0 && next.c.len() >= cfg.l0 => parts = next,
            _ => break,
        }
        rounds += 1;
        energy_history.push(energy(gc, &parts.v, &parts.c));
    }

    // subcluster chunking: pure chunks of size m / subclusters, leftovers exceptional
    if cfg.subclusters > 1 {
        let q = cfg.subclusters;
        let m1 = (parts.m / q).max(1);
        let mut next = Parts { m: m1, v: Vec::new(), c: Vec::new(), v0: parts.v0.clone(), c0: parts.c0.clone() };
        for (src, dst, ex) in [(&parts.v, &mut next.v, &mut next.v0), (&parts.c, &mut next.c, &mut next.c0)] {
            for a in src {
                let full = a.len() / m1 * m1;
                dst.extend(a[..full].chunks(m1).map(<[usize]>::to_vec));
                ex.extend_from_slice(&a[full..]);
            }
        }
        next.v0.sort_unstable();
        next.c0.sort_unstable();
        parts = next;
        energy_history.push(energy(gc, &parts.v, &parts.c));
    }

    let (pruned, reduced) = clean(gc, &parts, cfg);
    let checks = check_properties(gc, &pruned, &parts, &reduced, cfg, delta);
    let converged = weak_converged && checks.all();
    let diagnostics = format!(
        "rounds={rounds} m={} L={} M={} exceptional={}+{} irregular_triples={irregular} weak_converged={weak_converged} checks={checks:?}",
        parts.m,
        parts.v.len(),
        parts.c.len(),
        parts.v0.len(),
        parts.c0.len()
    );
    let out = RegularityPartition {
        spec: cfg.spec,
        l0: cfg.l0,
        delta,
        m: parts.m,
        exceptional_vertices: parts.v0,
        exceptional_colours: parts.c0,
        vertex_clusters: parts.v,
        colour_clusters: parts.c,
        pruned,
        reduced,
        energy_history,
        rounds,
        irregular_triples: irregular,
        checks,
        converged,
        diagnostics,
    };
    if converged {
        Ok(out)
    } else {
        Err(RegularityError::DidNotConverge(Box::new(out)))
    }
}

fn regular_triple(inc: &PartiteIncidence, spec: &DensitySpec, opts: &SearchOptions) -> bool {
    if witness::ratio_f64(&inc.density()) < spec.d - 1e-12 {
        return false;
    }
    let mins: Vec<usize> = inc.sizes().iter().map(|&l| min_size(spec.eps, l)).collect();
    let o = witness::search(inc, &mins, &Objective::Deviation { reference: inc.density(), eps: spec.eps }, opts);
    matches!(o, WitnessOutcome::NoneFound { .. })
}

/// Removes intra-cluster edges of non-exceptional colours and empties every
/// triple that fails the `(eps, d)` test.
fn clean(gc: &GraphCollection, p: &Parts, cfg: &PartitionConfig) -> (GraphCollection, Vec<Vec<(usize, usize)>>) {
    let n = gc.n();
    let mut vcl = vec![usize::MAX; n];
    for (i, cl) in p.v.iter().enumerate() {
        for &v in cl {
            vcl[v] = i;
        }
    }
    let mut ccl = vec![usize::MAX; gc.colour_count()];
    for (j, cl) in p.c.iter().enumerate() {
        for &c in cl {
            ccl[c] = j;
        }
    }
    let ts = triples(p.v.len(), p.c.len());
    let opts = SearchOptions { seed: rng::derive(cfg.seed, 0xC1EA), exec: crate::par::Exec::Sequential, ..cfg.search };
    let ok: Vec<bool> = par::map(cfg.search.exec, &ts, |&(h, i, j)| regular_triple(&triple_incidence(gc, p, h, i, j), &cfg.spec, &opts));
    let mut keep_triple = BTreeMap::new();
    let mut reduced = vec![Vec::new(); p.c.len()];
    for (&(h, i, j), &good) in ts.iter().zip(&ok) {
        keep_triple.insert((h, i, j), good);
        if good {
            reduced[j].push((h, i));
        }
    }
    let pruned = gc.filtered(|c, u, v| {
        let (a, b, j) = (vcl[u], vcl[v], ccl[c]);
        if j == usize::MAX || a == usize::MAX || b == usize::MAX {
            return true;
        }
        if a == b {
            return false;
        }
        keep_triple[&(a.min(b), a.max(b), j)]
    });
    (pruned, reduced)
}

fn check_properties(
    gc: &GraphCollection,
    pruned: &GraphCollection,
    p: &Parts,
    reduced: &[Vec<(usize, usize)>],
    cfg: &PartitionConfig,
    delta: f64,
) -> PropertyChecks {
    let n = gc.n();
    let k = gc.colour_count();
    let eps = cfg.spec.eps;
    let d = cfg.spec.d;
    let mut out = PropertyChecks {
        cluster_counts_and_exceptional: p.v.len() >= cfg.l0 && p.c.len() >= cfg.l0 && (p.v0.len() + p.c0.len()) as f64 <= eps * n as f64 + 1e-9,
        equal_cluster_sizes: p.v.iter().chain(&p.c).all(|cl| cl.len() == p.m),
        ..Default::default()
    };
    let bound = (3.0 * d / (delta * delta) + eps) * (n * n) as f64;
    out.loss_bound = bound;
    let mut ok = true;
    for v in 0..n {
        let loss = (gc.total_degree(v) - pruned.total_degree(v)) as u64;
        out.max_vertex_loss = out.max_vertex_loss.max(loss);
        ok &= (loss as f64) < bound;
    }
    for c in 0..k {
        let loss = (gc.edge_count(c) - pruned.edge_count(c)) as u64;
        out.max_colour_loss = out.max_colour_loss.max(loss);
        ok &= (loss as f64) < bound;
    }
    out.degree_loss = ok;

    let mut exceptional = vec![false; k];
    for &c in &p.c0 {
        exceptional[c] = true;
    }
    out.intra_cluster_edges_exceptional = (0..k).filter(|&c| !exceptional[c]).all(|c| {
        p.v.iter().all(|cl| cl.iter().all(|&u| cl.iter().all(|&v| u == v || !pruned.has_edge(c, u, v))))
    });

    let opts = SearchOptions { seed: rng::derive(cfg.seed, 0xC4EC), exec: crate::par::Exec::Sequential, ..cfg.search };
    let ts = triples(p.v.len(), p.c.len());
    let fine: Vec<bool> = par::map(cfg.search.exec, &ts, |&(h, i, j)| {
        let inc = PartiteIncidence::from_collection(pruned, &p.v[h], &p.v[i], &p.c[j]).expect("valid clusters");
        if inc.total() == 0 {
            return !reduced[j].contains(&(h, i));
        }
        reduced[j].contains(&(h, i)) && regular_triple(&inc, &cfg.spec, &opts)
    });
    out.triples_empty_or_regular = fine.iter().all(|&b| b);
    out
}
