//! R-templates: vertex clusters indexed by the vertices of a small graph `R`,
//! a colour cluster for every edge of `R`, and the host collection restricted
//! to the corresponding cluster pairs.

use std::collections::BTreeSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::pattern::PatternGraph;
use crate::regularity::ledger::{rational_to_f64, ParameterLedger, RegularityClass, TemplateSliceRule};
use crate::regularity::partite::{KGraph, PartiteIncidence};
use crate::regularity::witness::{self, min_size, Objective, SearchMode, SearchOptions, WitnessOutcome};
use crate::regularity::{classify_collection, ledger_template_slice, sparsify_to_superregular, ClassMode, ClassificationReport, DensitySpec, RegularityError};
use crate::{par, rng};

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("invalid template: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Regularity(#[from] RegularityError),
}

/// How much of a template's declared class has been checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stamp {
    Exhaustive,
    Sampled,
    Unchecked,
}

#[derive(Clone, Debug)]
pub struct Template {
    pub r: PatternGraph,
    pub clusters: Vec<Vec<VertexId>>,
    /// `C_e` for every edge id `e` of `R`.
    pub colour_clusters: Vec<Vec<ColourId>>,
    pub host: Arc<GraphCollection>,
    pub ledger: ParameterLedger,
    pub rainbow: bool,
    pub stamp: Stamp,
}

pub fn class_mode(class: RegularityClass) -> ClassMode {
    match class {
        RegularityClass::Regular => ClassMode::Regular,
        RegularityClass::SemiSuper => ClassMode::SemiSuper,
        RegularityClass::Super => ClassMode::Super,
        RegularityClass::HalfSuper => ClassMode::HalfSuper,
    }
}

impl Template {
    /// Checks the shape (cluster count, disjointness, ranges); the regularity
    /// promise is left to [`validate_template`].
    pub fn new(
        r: PatternGraph,
        clusters: Vec<Vec<VertexId>>,
        colour_clusters: Vec<Vec<ColourId>>,
        host: Arc<GraphCollection>,
        ledger: ParameterLedger,
        rainbow: bool,
    ) -> Result<Self, TemplateError> {
        if clusters.len() != r.n() {
            return Err(TemplateError::Invalid(format!("{} clusters for {} vertices of R", clusters.len(), r.n())));
        }
        if colour_clusters.len() != r.edge_count() {
            return Err(TemplateError::Invalid(format!("{} colour clusters for {} edges of R", colour_clusters.len(), r.edge_count())));
        }
        let mut seen = vec![false; host.n()];
        for (i, cl) in clusters.iter().enumerate() {
            for &v in cl {
                if v >= host.n() || seen[v] {
                    return Err(TemplateError::Invalid(format!("vertex {v} of cluster {i} out of range or repeated")));
                }
                seen[v] = true;
            }
        }
        for (e, cc) in colour_clusters.iter().enumerate() {
            let set: BTreeSet<_> = cc.iter().collect();
            if set.len() != cc.len() || cc.iter().any(|&c| c >= host.colour_count()) {
                return Err(TemplateError::Invalid(format!("colour cluster of edge {e} out of range or repeated")));
            }
        }
        Ok(Self { r, clusters, colour_clusters, host, ledger, rainbow, stamp: Stamp::Unchecked })
    }

    pub fn edge_parts(&self, e: usize) -> (&[VertexId], &[VertexId], &[ColourId]) {
        let (i, j) = self.r.edge(e);
        (&self.clusters[i], &self.clusters[j], &self.colour_clusters[e])
    }

    /// Cluster index of every host vertex.
    pub fn cluster_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.host.n()];
        for (i, cl) in self.clusters.iter().enumerate() {
            for &v in cl {
                out[v] = Some(i);
            }
        }
        out
    }

    /// Colours `c` in `C_ij` with `xy` in `G_c`, for `x` in `V_i`, `y` in `V_j`.
    pub fn edge_colours(&self, e: usize, x: VertexId, y: VertexId) -> Vec<ColourId> {
        self.colour_clusters[e].iter().copied().filter(|&c| self.host.has_edge(c, x, y)).collect()
    }

    /// Union of all colour clusters.
    pub fn colours(&self) -> BTreeSet<ColourId> {
        self.colour_clusters.iter().flatten().copied().collect()
    }

    pub fn spec(&self) -> DensitySpec {
        DensitySpec::new(self.ledger.eps_f64(), self.ledger.d_f64(), class_mode(self.ledger.class))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeValidation {
    pub edge: usize,
    pub ends: (usize, usize),
    pub classification: ClassificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TemplateReport {
    pub valid: bool,
    pub stamp: Stamp,
    pub edges: Vec<EdgeValidation>,
    pub size_violations: Vec<String>,
    /// `(e, f, c)`: colour `c` lies in both `C_e` and `C_f`.
    pub rainbow_violations: Vec<(usize, usize, ColourId)>,
}

/// Classifies every `G^e` in the declared class and checks the size bands
/// `m <= |V_i| <= m/delta`, `|C_e| >= delta m` and rainbow disjointness.
pub fn validate_template(t: &Template, opts: &SearchOptions) -> TemplateReport {
    let m = rational_to_f64(&t.ledger.m);
    let delta = t.ledger.delta_f64();
    let tol = 1e-9;
    let mut size_violations = Vec::new();
    for (i, cl) in t.clusters.iter().enumerate() {
        let s = cl.len() as f64;
        if s < m - tol || s > m / delta + tol {
            size_violations.push(format!("|V_{i}| = {s} outside [{m}, {}]", m / delta));
        }
    }
    for (e, cc) in t.colour_clusters.iter().enumerate() {
        if (cc.len() as f64) < delta * m - tol {
            size_violations.push(format!("|C_{e}| = {} below {}", cc.len(), delta * m));
        }
    }
    let mut rainbow_violations = Vec::new();
    if t.rainbow {
        let mut owner: std::collections::BTreeMap<ColourId, usize> = Default::default();
        for (e, cc) in t.colour_clusters.iter().enumerate() {
            for &c in cc {
                if let Some(&f) = owner.get(&c) {
                    rainbow_violations.push((f, e, c));
                } else {
                    owner.insert(c, e);
                }
            }
        }
    }
    let spec = t.spec();
    let ids: Vec<usize> = (0..t.r.edge_count()).collect();
    let results = par::map(opts.exec, &ids, |&e| {
        let (a, b, cc) = t.edge_parts(e);
        let o = SearchOptions { seed: rng::derive(opts.seed, e as u64), exec: par::Exec::Sequential, ..*opts };
        classify_collection(&t.host, a, b, Some(cc), &spec, &o).map(|classification| EdgeValidation { edge: e, ends: t.r.edge(e), classification })
    });
    let mut edges = Vec::new();
    let mut ok = size_violations.is_empty() && rainbow_violations.is_empty();
    for r in results {
        match r {
            Ok(v) => {
                ok &= v.classification.holds;
                edges.push(v);
            }
            Err(e) => {
                ok = false;
                size_violations.push(e.to_string());
            }
        }
    }
    let exhaustive = edges.iter().all(|v| v.classification.search.is_none_or(|m| m.mode == SearchMode::Exhaustive));
    TemplateReport {
        valid: ok,
        stamp: if exhaustive { Stamp::Exhaustive } else { Stamp::Sampled },
        edges,
        size_violations,
        rainbow_violations,
    }
}

/// Which sub-clusters a slice keeps.
#[derive(Clone, Debug)]
pub enum Selection {
    /// Explicit `V_i'` and `C_e'` (subsets of the originals).
    Induced { clusters: Vec<Vec<VertexId>>, colour_clusters: Vec<Vec<ColourId>> },
    /// Uniformly random subsets of the given sizes.
    Random { cluster_sizes: Vec<usize>, colour_sizes: Vec<usize> },
    /// Everything (used by the sparsification case).
    Whole,
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let big: BTreeSet<_> = big.iter().collect();
    small.iter().all(|x| big.contains(x)) && small.iter().collect::<BTreeSet<_>>().len() == small.len()
}

fn fail(msg: String) -> Result<(), TemplateError> {
    Err(TemplateError::PreconditionViolated(msg))
}

/// Template slicing. The rule picks the case and the ledger transformation;
/// the selection must meet that case's size bounds.
pub fn slice_template(t: &Template, selection: &Selection, rule: &TemplateSliceRule, seed: u64) -> Result<Template, TemplateError> {
    let ledger = ledger_template_slice(&t.ledger, rule)?;
    if let TemplateSliceRule::Sparsify { .. } = rule {
        return sparsify_template(t, ledger, seed);
    }
    let (clusters, colour_clusters) = match selection {
        Selection::Induced { clusters, colour_clusters } => (clusters.clone(), colour_clusters.clone()),
        Selection::Random { cluster_sizes, colour_sizes } => {
            if cluster_sizes.len() != t.clusters.len() || colour_sizes.len() != t.colour_clusters.len() {
                return Err(TemplateError::PreconditionViolated("selection sizes do not match the template".into()));
            }
            let mut r = rng::rng(seed);
            let mut pick = |from: &Vec<usize>, k: usize| -> Result<Vec<usize>, TemplateError> {
                if k > from.len() {
                    return Err(TemplateError::PreconditionViolated(format!("cannot pick {k} of {}", from.len())));
                }
                let mut s = rng::sample(from, k, &mut r);
                s.sort_unstable();
                Ok(s)
            };
            let cl = t.clusters.iter().zip(cluster_sizes).map(|(c, &k)| pick(c, k)).collect::<Result<Vec<_>, _>>()?;
            let cc = t.colour_clusters.iter().zip(colour_sizes).map(|(c, &k)| pick(c, k)).collect::<Result<Vec<_>, _>>()?;
            (cl, cc)
        }
        Selection::Whole => (t.clusters.clone(), t.colour_clusters.clone()),
    };
    if clusters.len() != t.clusters.len() || colour_clusters.len() != t.colour_clusters.len() {
        return Err(TemplateError::PreconditionViolated("selection shape does not match the template".into()));
    }
    for (i, (new, old)) in clusters.iter().zip(&t.clusters).enumerate() {
        if !is_subset(new, old) {
            fail(format!("V_{i}' is not a subset of V_{i}"))?;
        }
    }
    for (e, (new, old)) in colour_clusters.iter().zip(&t.colour_clusters).enumerate() {
        if !is_subset(new, old) {
            fail(format!("C_{e}' is not a subset of C_{e}"))?;
        }
    }
    let m = rational_to_f64(&t.ledger.m);
    let tol = 1e-9;
    match rule {
        TemplateSliceRule::Proportional { alpha, k } | TemplateSliceRule::Random { alpha, k } => {
            let (a, k) = (rational_to_f64(alpha), f64::from((*k).max(1)));
            for (i, (new, old)) in clusters.iter().zip(&t.clusters).enumerate() {
                let (s, o) = (new.len() as f64, old.len() as f64);
                if s < a * o - tol || s > k * a * o + tol {
                    fail(format!("|V_{i}'| = {s} outside [{}, {}]", a * o, k * a * o))?;
                }
            }
            for (e, (new, old)) in colour_clusters.iter().zip(&t.colour_clusters).enumerate() {
                if (new.len() as f64) < a * old.len() as f64 / k - tol {
                    fail(format!("|C_{e}'| = {} below {}", new.len(), a * old.len() as f64 / k))?;
                }
            }
        }
        TemplateSliceRule::NearSpanning { alpha } => {
            let bound = rational_to_f64(alpha) * m + tol;
            for (i, (new, old)) in clusters.iter().zip(&t.clusters).enumerate() {
                if (old.len() - new.len()) as f64 > bound {
                    fail(format!("{} vertices removed from V_{i}, at most {bound} allowed", old.len() - new.len()))?;
                }
            }
            for (e, (new, old)) in colour_clusters.iter().zip(&t.colour_clusters).enumerate() {
                if (old.len() - new.len()) as f64 > bound {
                    fail(format!("{} colours removed from C_{e}, at most {bound} allowed", old.len() - new.len()))?;
                }
            }
        }
        TemplateSliceRule::Sparsify { .. } => unreachable!(),
    }
    Ok(Template { r: t.r.clone(), clusters, colour_clusters, host: Arc::clone(&t.host), ledger, rainbow: t.rainbow, stamp: Stamp::Unchecked })
}

/// Case (iv): every `G^e` is replaced by a sparsified spanning subgraph.
fn sparsify_template(t: &Template, ledger: ParameterLedger, seed: u64) -> Result<Template, TemplateError> {
    let n = t.host.n();
    let eps = t.ledger.eps_f64();
    let eps_prime = ledger.eps_f64();
    let d = t.ledger.d_f64();
    let mut host = (*t.host).clone();
    for e in 0..t.r.edge_count() {
        let (a, b, cc) = t.edge_parts(e);
        let mut g = KGraph::new(3, n + t.host.colour_count());
        for &c in cc {
            for &x in a {
                for &y in b {
                    if t.host.has_edge(c, x, y) {
                        g.add_edge(vec![x, y, n + c]);
                    }
                }
            }
        }
        let parts = vec![a.to_vec(), b.to_vec(), cc.iter().map(|&c| n + c).collect()];
        let rep = sparsify_to_superregular(&g, &parts, eps, eps_prime, d, rng::derive(seed, e as u64))?;
        for &c in cc {
            for &x in a {
                for &y in b {
                    if t.host.has_edge(c, x, y) && !rep.graph.contains(&[x, y, n + c]) {
                        host.remove(c, x, y);
                    }
                }
            }
        }
    }
    Ok(Template {
        r: t.r.clone(),
        clusters: t.clusters.clone(),
        colour_clusters: t.colour_clusters.clone(),
        host: Arc::new(host),
        ledger,
        rainbow: t.rainbow,
        stamp: Stamp::Unchecked,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceDegree {
    pub edge: usize,
    /// Smallest `d_T(x, V_j) / |V_j|` over `x` in `V_i`, and the reverse.
    pub min_ratio: (f64, f64),
}

/// The `lambda`-thick graph of a template.
#[derive(Clone, Debug)]
pub struct ThickGraph {
    pub lambda: f64,
    pub adj: Vec<FixedBitSet>,
    pub slices: Vec<SliceDegree>,
    /// Every slice has minimum degree at least `(d/2)|V_j|`; only promised
    /// for semi-super (and super) templates.
    pub degree_bound_holds: bool,
}

impl ThickGraph {
    pub fn has_edge(&self, x: VertexId, y: VertexId) -> bool {
        self.adj[x].contains(y)
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (x, row) in self.adj.iter().enumerate() {
            out.extend(row.ones().filter(|&y| y > x).map(|y| (x, y)));
        }
        out
    }

    /// Sampled check of the subset-density half of half-superregularity
    /// (`d/2` on all `eps`-large pairs) for every slice; the failing edges of `R`.
    pub fn sampled_density_failures(&self, t: &Template, opts: &SearchOptions) -> Vec<usize> {
        let eps = t.ledger.eps_f64();
        let half = t.ledger.d_f64() / 2.0;
        (0..t.r.edge_count())
            .filter(|&e| {
                let (a, b, _) = t.edge_parts(e);
                let g = KGraph::from_graph(self.adj.len(), a.iter().flat_map(|&x| self.adj[x].ones().map(move |y| (x, y))));
                let inc = PartiteIncidence::from_kgraph(&g, &[a.to_vec(), b.to_vec()]).expect("clusters are disjoint");
                let mins = [min_size(eps, a.len()), min_size(eps, b.len())];
                let o = SearchOptions { force_sampled: true, ..*opts };
                matches!(witness::search(&inc, &mins, &Objective::Below { d: half }, &o), WitnessOutcome::Found { .. })
            })
            .collect()
    }
}

pub fn thick_graph(t: &Template, lambda: f64) -> ThickGraph {
    let n = t.host.n();
    let mut adj = vec![FixedBitSet::with_capacity(n); n];
    let mut slices = Vec::new();
    let half = t.ledger.d_f64() / 2.0;
    let mut holds = true;
    for e in 0..t.r.edge_count() {
        let (a, b, cc) = t.edge_parts(e);
        let need = lambda * cc.len() as f64;
        let mut deg_a = vec![0usize; a.len()];
        let mut deg_b = vec![0usize; b.len()];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                let mult = cc.iter().filter(|&&c| t.host.has_edge(c, x, y)).count();
                if mult > 0 && mult as f64 >= need - 1e-9 {
                    adj[x].insert(y);
                    adj[y].insert(x);
                    deg_a[i] += 1;
                    deg_b[j] += 1;
                }
            }
        }
        let ra = deg_a.iter().map(|&d| d as f64 / b.len() as f64).fold(f64::INFINITY, f64::min);
        let rb = deg_b.iter().map(|&d| d as f64 / a.len() as f64).fold(f64::INFINITY, f64::min);
        holds &= ra >= half - 1e-12 && rb >= half - 1e-12;
        slices.push(SliceDegree { edge: e, min_ratio: (ra, rb) });
    }
    ThickGraph { lambda, adj, slices, degree_bound_holds: holds }
}

/// Template JSON. The host collection travels separately and is supplied
/// when the document is turned back into a [`Template`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateDoc {
    /// `R` as `{"n", "edges"}`.
    pub r: crate::io::PatternDoc,
    pub clusters: Vec<Vec<VertexId>>,
    pub colour_clusters: Vec<Vec<ColourId>>,
    pub ledger: ParameterLedger,
    #[serde(default)]
    pub rainbow: bool,
    #[serde(default = "unchecked")]
    pub stamp: Stamp,
}

fn unchecked() -> Stamp {
    Stamp::Unchecked
}

impl From<&Template> for TemplateDoc {
    fn from(t: &Template) -> Self {
        Self {
            r: crate::io::PatternDoc::from(&t.r),
            clusters: t.clusters.clone(),
            colour_clusters: t.colour_clusters.clone(),
            ledger: t.ledger.clone(),
            rainbow: t.rainbow,
            stamp: t.stamp,
        }
    }
}

impl TemplateDoc {
    /// The stamp is kept as declared; [`validate_template`] re-derives it.
    pub fn into_template(self, host: Arc<GraphCollection>) -> Result<Template, TemplateError> {
        let r = PatternGraph::try_from(self.r).map_err(|e| TemplateError::Invalid(e.to_string()))?;
        let mut t = Template::new(r, self.clusters, self.colour_clusters, host, self.ledger, self.rainbow)?;
        t.stamp = self.stamp;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::ledger::parse_rational;

    fn single_edge(m: usize, k: usize) -> Template {
        let n = 2 * m;
        let a: Vec<usize> = (0..m).collect();
        let b: Vec<usize> = (m..n).collect();
        let gc = GraphCollection::complete_bipartite(n, k, &a, &b);
        let r = PatternGraph::new(2, [(0, 1)]).unwrap();
        let ledger = ParameterLedger::from_f64(m as f64, 0.1, 0.5, 0.5, RegularityClass::Super);
        Template::new(r, vec![a, b], vec![(0..k).collect()], Arc::new(gc), ledger, true).unwrap()
    }

    #[test]
    fn template_json_round_trip() {
        let t = single_edge(3, 2);
        let json = serde_json::to_string(&TemplateDoc::from(&t)).unwrap();
        let back = serde_json::from_str::<TemplateDoc>(&json).unwrap().into_template(t.host.clone()).unwrap();
        assert_eq!(back.clusters, t.clusters);
        assert_eq!(back.colour_clusters, t.colour_clusters);
        assert_eq!(back.ledger, t.ledger);
        assert_eq!(back.r.edges(), t.r.edges());
    }

    #[test]
    fn complete_single_edge_is_valid_super() {
        let t = single_edge(6, 4);
        let rep = validate_template(&t, &SearchOptions::default());
        assert!(rep.valid, "{rep:?}");
        assert_eq!(rep.stamp, Stamp::Exhaustive);
    }

    #[test]
    fn overlapping_rainbow_clusters_reported() {
        let m = 4;
        let n = 3 * m;
        let cl: Vec<Vec<usize>> = (0..3).map(|i| (i * m..(i + 1) * m).collect()).collect();
        let gc = GraphCollection::complete(n, 6);
        let r = PatternGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let ledger = ParameterLedger::from_f64(m as f64, 0.1, 0.5, 0.5, RegularityClass::Regular);
        let t = Template::new(r, cl, vec![vec![0, 1, 2], vec![2, 3, 4]], Arc::new(gc), ledger, true).unwrap();
        let rep = validate_template(&t, &SearchOptions::default());
        assert_eq!(rep.rainbow_violations, vec![(0, 1, 2)]);
        assert!(!rep.valid);
    }

    #[test]
    fn near_spanning_with_nothing_removed() {
        let t = single_edge(8, 4);
        let rule = TemplateSliceRule::NearSpanning { alpha: parse_rational("0.1").unwrap() };
        let s = slice_template(&t, &Selection::Whole, &rule, 0).unwrap();
        assert_eq!(s.clusters, t.clusters);
        assert_eq!(s.ledger.m, parse_rational("4").unwrap());
        assert_eq!(s.ledger.eps, parse_rational("0.2").unwrap());
        assert_eq!(s.ledger.d, parse_rational("0.25").unwrap());
        assert_eq!(s.ledger.delta, parse_rational("0.25").unwrap());
    }

    #[test]
    fn proportional_half() {
        let t = single_edge(8, 4);
        let sel = Selection::Induced { clusters: vec![(0..4).collect(), (8..12).collect()], colour_clusters: vec![vec![0, 1]] };
        let rule = TemplateSliceRule::Proportional { alpha: parse_rational("0.5").unwrap(), k: 1 };
        let s = slice_template(&t, &sel, &rule, 0).unwrap();
        assert_eq!(s.ledger.m, parse_rational("4").unwrap());
        assert_eq!(s.ledger.eps, parse_rational("0.2").unwrap());
        assert_eq!(s.ledger.d, parse_rational("0.25").unwrap());
        assert_eq!(s.ledger.delta, parse_rational("0.5").unwrap());
        let bad = Selection::Induced { clusters: vec![(0..2).collect(), (8..12).collect()], colour_clusters: vec![vec![0, 1]] };
        assert!(matches!(slice_template(&t, &bad, &rule, 0), Err(TemplateError::PreconditionViolated(_))));
    }

    #[test]
    fn thick_graph_thresholds() {
        let t = single_edge(4, 3);
        let th = thick_graph(&t, 1.0);
        assert_eq!(th.edges().len(), 16);
        // one colour per edge: nothing reaches a threshold above 1/3
        let n = 8;
        let mut gc = GraphCollection::with_colours(n, 3);
        for x in 0..4 {
            for y in 4..8 {
                gc.add_edge((x + y) % 3, x, y).unwrap();
            }
        }
        let t2 = Template { host: Arc::new(gc), ..t };
        assert!(thick_graph(&t2, 0.5).edges().is_empty());
    }
}
