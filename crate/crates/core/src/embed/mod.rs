//! Embedding procedures: candidate-set partial embedding, prescribed colours
//! through induced matchings, an uncoloured blow-up embedder, the chunked
//! extra-colours embedder, colour absorbers, the transversal blow-up pipeline
//! and the two application pipelines.
//!
//! Every successful run ends in [`verify_transversal_embedding`]; a
//! [`Verified`] value can only be obtained through that check.

pub mod absorber;
pub mod approx;
pub mod blowup;
pub mod equitable;
pub mod expand;
pub mod induced;
pub mod partial;
pub mod prescribed;
pub mod quasi;
pub mod transversal;

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::embedding::{verify_transversal_embedding, TransversalEmbedding, VerificationReport, Violation};
use crate::pattern::PatternGraph;
use crate::regularity::ledger::LineageEntry;
use crate::templates::Template;

pub use absorber::{build_absorber, flexibility_check, Absorber, AbsorberEdge, AbsorberRequest, FlexCheck};
pub use approx::{approx_embed, ApproxDiagnostics};
pub use blowup::{blowup_embed, verify_blowup, BlowupEmbedding, ClusterHost};
pub use equitable::{equitable_colouring, EquitableError};
pub use expand::{expand_embed_3graph, expansion_violations, ExpansionEmbedding};
pub use induced::{find_induced_matching, induced_matching_violations};
pub use partial::{partial_embed, partial_violations, PartialEmbedding};
pub use prescribed::embed_prescribed_colours;
pub use quasi::{quasi_embed, quasi_embed_traced, QuasiDiagnostics};
pub use transversal::{transversal_blowup, transversal_blowup_traced, TransversalDiagnostics};

/// Numeric choices for all pipelines. Every field has a default, so a JSON
/// document may override any subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitPlan {
    pub eps: f64,
    pub mu: f64,
    pub alpha: f64,
    pub lambda1: f64,
    pub lambda3: f64,
    pub nu_prime: f64,
    pub zeta: f64,
    pub p_abs: f64,
    pub p_col: f64,
    pub p_vx: f64,
    pub gamma: f64,
    pub mu_prime: f64,
    /// Thickness used for the blow-up rounds of the chunked embedder.
    pub thick_lambda: f64,
    /// `delta_l = ladder_base * ladder_ratio^l`.
    pub ladder_base: f64,
    pub ladder_ratio: f64,
    pub retries: usize,
    /// Whole-pipeline restarts of the transversal blow-up.
    pub restarts: usize,
    /// Fraction of each cluster's pattern vertices left to the matching phase
    /// of the blow-up embedder.
    pub blowup_buffer: f64,
    pub absorber_exhaustive_limit: u64,
    pub absorber_samples: usize,
}

impl Default for SplitPlan {
    fn default() -> Self {
        Self {
            eps: 0.05,
            mu: 0.1,
            alpha: 0.05,
            lambda1: 0.1,
            lambda3: 0.2,
            nu_prime: 0.1,
            zeta: 0.1,
            p_abs: 0.05,
            p_col: 0.08,
            p_vx: 0.15,
            gamma: 0.1,
            mu_prime: 0.05,
            thick_lambda: 0.1,
            ladder_base: 0.02,
            ladder_ratio: 3.0,
            retries: 20,
            restarts: 3,
            blowup_buffer: 0.2,
            absorber_exhaustive_limit: 100_000,
            absorber_samples: 2000,
        }
    }
}

impl SplitPlan {
    pub fn p_app(&self) -> f64 {
        1.0 - (self.p_vx + self.p_abs + self.p_col)
    }

    /// `delta_l` of the density ladder.
    pub fn ladder(&self, l: usize) -> f64 {
        self.ladder_base * self.ladder_ratio.powi(l as i32)
    }

    pub fn validate(&self) -> Result<(), String> {
        let probs = [("p_abs", self.p_abs), ("p_col", self.p_col), ("p_vx", self.p_vx), ("p_app", self.p_app())];
        for (name, p) in probs {
            if !(p > 0.0 && p < 1.0) {
                return Err(format!("{name} = {p} must lie in (0, 1)"));
            }
        }
        let unit = [
            ("eps", self.eps),
            ("mu", self.mu),
            ("alpha", self.alpha),
            ("lambda1", self.lambda1),
            ("lambda3", self.lambda3),
            ("nu_prime", self.nu_prime),
            ("zeta", self.zeta),
            ("gamma", self.gamma),
            ("mu_prime", self.mu_prime),
            ("thick_lambda", self.thick_lambda),
            ("blowup_buffer", self.blowup_buffer),
        ];
        for (name, x) in unit {
            if !(x > 0.0 && x < 1.0) {
                return Err(format!("{name} = {x} must lie in (0, 1)"));
            }
        }
        if !(self.ladder_base > 0.0 && self.ladder_ratio > 1.0) {
            return Err("ladder must be positive and strictly increasing".into());
        }
        if self.retries == 0 || self.restarts == 0 || self.absorber_samples == 0 {
            return Err("retry budgets must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureReason {
    PreconditionViolated { detail: String },
    CandidateExhausted { element: String, step: String },
    MatchingTooSmall { edge: usize, wanted: usize, found: usize },
    EmbeddingFailed { attempts: usize },
    ChunkingFailed { detail: String },
    ChernoffRetryExhausted { event: String, attempts: usize },
    ColourExhausted { edge: usize },
    AbsorberUnverifiable { edge: usize },
    IdentityViolated { detail: String },
    LadderDegenerate,
    PaddingImpossible { needed: usize, available: usize },
    Unbalanceable,
    VerificationRejected { violations: Vec<Violation> },
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::PreconditionViolated { detail } => write!(f, "precondition violated: {detail}"),
            FailureReason::CandidateExhausted { element, step } => write!(f, "candidate set of {element} exhausted at {step}"),
            FailureReason::MatchingTooSmall { edge, wanted, found } => write!(f, "induced matching for R-edge {edge}: wanted {wanted}, found {found}"),
            FailureReason::EmbeddingFailed { attempts } => write!(f, "blow-up embedding failed after {attempts} attempts"),
            FailureReason::ChunkingFailed { detail } => write!(f, "chunking failed: {detail}"),
            FailureReason::ChernoffRetryExhausted { event, attempts } => write!(f, "concentration event '{event}' failed in all {attempts} attempts"),
            FailureReason::ColourExhausted { edge } => write!(f, "not enough distinct colours on R-edge {edge}"),
            FailureReason::AbsorberUnverifiable { edge } => write!(f, "absorber on R-edge {edge} failed its flexibility check"),
            FailureReason::IdentityViolated { detail } => write!(f, "counting identity violated: {detail}"),
            FailureReason::LadderDegenerate => write!(f, "no gap in the density ladder"),
            FailureReason::PaddingImpossible { needed, available } => write!(f, "padding needs {needed} host vertices, {available} available"),
            FailureReason::Unbalanceable => write!(f, "equitable colouring could not be balanced"),
            FailureReason::VerificationRejected { violations } => write!(f, "verifier rejected the output ({} violations)", violations.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Error)]
#[error("{stage}: {reason} (seed {seed})")]
pub struct EmbedFailure {
    pub stage: String,
    pub reason: FailureReason,
    pub diagnostics: Vec<String>,
    pub seed: u64,
    pub lineage: Vec<LineageEntry>,
}

impl EmbedFailure {
    pub fn new(stage: impl Into<String>, reason: FailureReason, seed: u64) -> Self {
        Self { stage: stage.into(), reason, diagnostics: Vec::new(), seed, lineage: Vec::new() }
    }

    pub(crate) fn precondition(stage: &str, detail: impl Into<String>, seed: u64) -> Self {
        Self::new(stage, FailureReason::PreconditionViolated { detail: detail.into() }, seed)
    }

    pub(crate) fn note(mut self, line: impl Into<String>) -> Self {
        self.diagnostics.push(line.into());
        self
    }

    /// Prefixes the stage, e.g. `step 2` around an inner `approx`.
    pub(crate) fn within(mut self, outer: &str) -> Self {
        self.stage = format!("{outer} / {}", self.stage);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub stages: Vec<(String, String)>,
    pub lineage: Vec<LineageEntry>,
}

impl Trace {
    pub(crate) fn push(&mut self, stage: &str, note: impl Into<String>) {
        self.stages.push((stage.to_string(), note.into()));
    }
}

/// A transversal embedding that passed the verifier, with the report and
/// the stage trace of the run that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Verified {
    embedding: TransversalEmbedding,
    report: VerificationReport,
    trace: Trace,
    seed: u64,
}

impl Verified {
    pub fn embedding(&self) -> &TransversalEmbedding {
        &self.embedding
    }

    pub fn report(&self) -> &VerificationReport {
        &self.report
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn into_embedding(self) -> TransversalEmbedding {
        self.embedding
    }
}

pub type EmbedOutcome = Result<Verified, EmbedFailure>;

/// The only way to build a [`Verified`].
pub(crate) fn certify(gc: &GraphCollection, h: &PatternGraph, embedding: TransversalEmbedding, trace: Trace, stage: &str, seed: u64) -> EmbedOutcome {
    let report = verify_transversal_embedding(gc, h, &embedding);
    if report.accepted {
        Ok(Verified { embedding, report, trace, seed })
    } else {
        let mut f = EmbedFailure::new(stage, FailureReason::VerificationRejected { violations: report.violations }, seed);
        f.lineage = trace.lineage;
        Err(f)
    }
}

/// Local images for a sub-pattern.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Raw {
    pub tau: Vec<VertexId>,
    pub sigma: Vec<ColourId>,
}

pub type Targets = BTreeMap<usize, Vec<VertexId>>;

/// An induced sub-pattern with its cluster map and targets, remembering the
/// original vertex and edge ids.
#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub h: PatternGraph,
    pub phi: Vec<usize>,
    pub targets: Targets,
    pub verts: Vec<usize>,
    pub edge_ids: Vec<usize>,
}

impl Piece {
    pub fn induced(h: &PatternGraph, phi: &[usize], targets: &Targets, verts: &[usize]) -> Self {
        let (sub, edge_ids) = h.induced(verts);
        let phi_l = verts.iter().map(|&v| phi[v]).collect();
        let t = verts.iter().enumerate().filter_map(|(i, v)| targets.get(v).map(|s| (i, s.clone()))).collect();
        Self { h: sub, phi: phi_l, targets: t, verts: verts.to_vec(), edge_ids }
    }

    /// Writes local images into the global maps.
    pub fn commit(&self, raw: &Raw, tau: &mut [Option<VertexId>], sigma: &mut [Option<ColourId>]) {
        for (i, &v) in self.verts.iter().enumerate() {
            tau[v] = Some(raw.tau[i]);
        }
        for (i, &e) in self.edge_ids.iter().enumerate() {
            sigma[e] = Some(raw.sigma[i]);
        }
    }
}

pub(crate) fn bits(n: usize, items: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for i in items {
        b.insert(i);
    }
    b
}

/// R-edge id for every pattern edge, or the first edge that `phi` does not
/// map onto an edge of `R`.
pub(crate) fn edge_classes(r: &PatternGraph, h: &PatternGraph, phi: &[usize]) -> Result<Vec<usize>, String> {
    if phi.len() != h.n() {
        return Err(format!("phi has {} entries for {} vertices", phi.len(), h.n()));
    }
    if let Some(x) = (0..h.n()).find(|&x| phi[x] >= r.n()) {
        return Err(format!("phi({x}) = {} is not a vertex of R", phi[x]));
    }
    h.edges()
        .iter()
        .map(|&(x, y)| r.edge_id(phi[x], phi[y]).ok_or_else(|| format!("edge {x}{y} maps to the non-edge {}{} of R", phi[x], phi[y])))
        .collect()
}

/// The pattern with targets attached, for verification.
pub(crate) fn with_targets(h: &PatternGraph, targets: &Targets) -> PatternGraph {
    let mut hv = h.clone();
    hv.set_targets(targets.clone());
    hv
}

/// A template on the same host with new clusters, colour clusters and ledger.
pub(crate) fn subtemplate(t: &Template, clusters: Vec<Vec<VertexId>>, colour_clusters: Vec<Vec<ColourId>>, ledger: crate::regularity::ParameterLedger) -> Template {
    Template { r: t.r.clone(), clusters, colour_clusters, host: std::sync::Arc::clone(&t.host), ledger, rainbow: t.rainbow, stamp: crate::templates::Stamp::Unchecked }
}

pub(crate) fn assemble(tau: Vec<Option<VertexId>>, sigma: Vec<Option<ColourId>>) -> Option<TransversalEmbedding> {
    Some(TransversalEmbedding { tau: tau.into_iter().collect::<Option<_>>()?, sigma: sigma.into_iter().collect::<Option<_>>()? })
}

/// Random tie-breaking ranks: `rank[i]` orders elements after a seeded shuffle.
pub(crate) fn ranks(n: usize, rng: &mut crate::rng::StdRng) -> Vec<usize> {
    let order = crate::rng::shuffled(&(0..n).collect::<Vec<_>>(), rng);
    let mut rank = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    rank
}
