//! Benchmark suites: every case names a host generator, a pattern and a
//! pipeline, and runs once per seed. A failing case becomes a row with
//! `success = false`; the suite never aborts.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use transversal::embed::{blowup_embed, quasi_embed_traced, transversal_blowup_traced, approx_embed, verify_blowup, EmbedFailure, SplitPlan};
use transversal::generators::{bipartite_host, generate, random_collection, separable_family, Construction, Family, GenSpec};
use transversal::io::{CollectionDoc, PatternDoc};
use transversal::oracle::{exact_transversal_embed, OracleOutcome, SearchBudget};
use transversal::par::{self, Exec};
use transversal::regularity::{ParameterLedger, RegularityClass};
use transversal::templates::Template;
use transversal::{verify_transversal_embedding, GraphCollection, PatternGraph};

use crate::commands::{load_collection, load_pattern, reason_kind};
use crate::report::digest;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub cases: Vec<Case>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub host: HostSpec,
    pub pattern: PatternSpec,
    pub pipeline: BenchPipeline,
    pub seeds: Seeds,
    /// Overrides of the default numeric plan.
    #[serde(default)]
    pub params: Option<SplitPlan>,
    /// Node limit for the oracle pipeline.
    #[serde(default)]
    pub node_limit: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    /// Seeds `0..count`.
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn list(&self) -> Vec<u64> {
        match self {
            Seeds::Count(c) => (0..*c).collect(),
            Seeds::List(l) => l.clone(),
        }
    }
}

fn random_construction() -> Construction {
    Construction::Random
}

/// The host of a case; generated hosts use the row seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HostSpec {
    /// Uncoloured bipartite host for `blowup`, sides `0..side` and `side..2 side`.
    Bipartite { side: usize, density: f64 },
    /// A generated collection for `quasi` and `oracle`.
    Collection {
        n: usize,
        colours: usize,
        #[serde(default)]
        density: f64,
        #[serde(default = "random_construction")]
        construction: Construction,
    },
    /// A random collection on two clusters with a single-edge template of
    /// density `d`, for `transversal` and `approx`.
    BipartiteTemplate { side: usize, colours: usize, density: f64, d: f64 },
    /// A collection file.
    File { path: String },
}

impl HostSpec {
    pub fn construction(&self) -> String {
        match self {
            HostSpec::Bipartite { .. } => "bipartite".into(),
            HostSpec::Collection { construction, .. } => serde_json::to_value(construction).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            HostSpec::BipartiteTemplate { .. } => "bipartite-template".into(),
            HostSpec::File { path } => format!("file:{path}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatternSpec {
    Inline { pattern: PatternDoc },
    File { path: String },
    Family {
        family: Family,
        #[serde(default = "default_mu")]
        mu: f64,
    },
}

fn default_mu() -> f64 {
    0.1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchPipeline {
    Blowup,
    Quasi,
    Transversal,
    Approx,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub construction: String,
    pub pipeline: String,
    pub seed: u64,
    pub instance_digest: String,
    pub success: bool,
    pub verified: bool,
    /// `complete` on success, otherwise the stage that failed.
    pub stage: String,
    pub reason: String,
    pub wall_ms: f64,
    pub attempts: Option<usize>,
}

pub const HEADER: [&str; 11] = ["case", "construction", "pipeline", "seed", "instance_digest", "success", "verified", "stage", "reason", "wall_ms", "attempts"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub construction: String,
    pub pipeline: String,
    pub rows: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_wall_ms: f64,
}

pub const SUMMARY_HEADER: [&str; 6] = ["construction", "pipeline", "rows", "successes", "success_rate", "mean_wall_ms"];

struct Attempt {
    digest: String,
    success: bool,
    verified: bool,
    stage: String,
    reason: String,
    attempts: Option<usize>,
}

impl Attempt {
    fn setup(digest: String, msg: String) -> Self {
        Self { digest, success: false, verified: false, stage: "setup".into(), reason: msg, attempts: None }
    }

    fn failed(digest: String, f: &EmbedFailure) -> Self {
        Self { digest, success: false, verified: false, stage: f.stage.clone(), reason: reason_kind(f), attempts: None }
    }

    fn done(digest: String, verified: bool, attempts: Option<usize>) -> Self {
        let reason = if verified { String::new() } else { "VerificationRejected".into() };
        Self { digest, success: verified, verified, stage: "complete".into(), reason, attempts }
    }
}

fn pattern_of(spec: &PatternSpec) -> Result<PatternGraph, String> {
    match spec {
        PatternSpec::Inline { pattern } => PatternGraph::try_from(pattern.clone()).map_err(|e| e.to_string()),
        PatternSpec::File { path } => load_pattern(Path::new(path)).map(|(h, _)| h),
        PatternSpec::Family { family, mu } => Ok(separable_family(family, *mu).pattern),
    }
}

fn collection_of(host: &HostSpec, seed: u64) -> Result<GraphCollection, String> {
    match host {
        HostSpec::Collection { n, colours, density, construction } => {
            generate(&GenSpec { n: *n, colours: *colours, density: *density, seed, construction: *construction })
        }
        HostSpec::File { path } => load_collection(Path::new(path)).map(|(g, _)| g),
        HostSpec::BipartiteTemplate { side, colours, density, .. } => Ok(random_collection(&GenSpec::random(2 * side, *colours, *density, seed))),
        HostSpec::Bipartite { .. } => Err("a bipartite host has no colours".into()),
    }
}

/// `phi` from the pattern, else a balanced proper 2-colouring.
fn phi_for(h: &PatternGraph, side: usize) -> Result<Vec<usize>, String> {
    match h.phi() {
        Some(p) => Ok(p.to_vec()),
        None => h.balanced_two_colouring(side).ok_or_else(|| format!("pattern has no 2-colouring with {side} vertices on one side")),
    }
}

fn run_one(case: &Case, seed: u64) -> Attempt {
    let plan = case.params.clone().unwrap_or_default();
    let h = match pattern_of(&case.pattern) {
        Ok(h) => h,
        Err(e) => return Attempt::setup(String::new(), e),
    };
    match (case.pipeline, &case.host) {
        (BenchPipeline::Blowup, HostSpec::Bipartite { side, density }) => {
            let host = bipartite_host(*side, *density, seed);
            let dig = digest(&host.adj.iter().map(|a| a.ones().collect::<Vec<_>>()).collect::<Vec<_>>());
            let phi = match phi_for(&h, *side) {
                Ok(p) => p,
                Err(e) => return Attempt::setup(dig, e),
            };
            match blowup_embed(&host, &h, &phi, h.targets(), &plan, seed) {
                Ok(b) => Attempt::done(dig, verify_blowup(&host, &h, &phi, h.targets(), &b.tau).is_empty(), Some(b.attempts)),
                Err(f) => Attempt::failed(dig, &f),
            }
        }
        (BenchPipeline::Blowup, _) => Attempt::setup(String::new(), "blowup needs a bipartite host".into()),
        (_, HostSpec::Bipartite { .. }) => Attempt::setup(String::new(), "this pipeline needs a coloured host".into()),
        (pipeline, host) => {
            let gc = match collection_of(host, seed) {
                Ok(g) => g,
                Err(e) => return Attempt::setup(String::new(), e),
            };
            let dig = digest(&CollectionDoc::from(&gc));
            match pipeline {
                BenchPipeline::Quasi => match quasi_embed_traced(&gc, &h, &plan, seed) {
                    Ok((v, d)) => Attempt::done(dig, verify_transversal_embedding(&gc, &h, v.embedding()).accepted, Some(d.partition_attempts)),
                    Err(f) => Attempt::failed(dig, &f),
                },
                BenchPipeline::Oracle => {
                    let budget = case.node_limit.map_or_else(SearchBudget::default, SearchBudget::nodes);
                    let res = exact_transversal_embed(&gc, &h, h.targets(), &budget);
                    match res.outcome {
                        OracleOutcome::Found(emb) => Attempt::done(dig, verify_transversal_embedding(&gc, &h, &emb).accepted, None),
                        OracleOutcome::Infeasible => Attempt { stage: "search".into(), reason: "Infeasible".into(), ..Attempt::setup(dig, String::new()) },
                        OracleOutcome::BudgetExceeded => Attempt { stage: "search".into(), reason: "BudgetExceeded".into(), ..Attempt::setup(dig, String::new()) },
                    }
                }
                BenchPipeline::Transversal | BenchPipeline::Approx => {
                    let HostSpec::BipartiteTemplate { side, d, .. } = host else {
                        return Attempt::setup(dig, "this pipeline needs a bipartite-template host".into());
                    };
                    let phi = match phi_for(&h, *side) {
                        Ok(p) => p,
                        Err(e) => return Attempt::setup(dig, e),
                    };
                    let k2 = PatternGraph::new(2, [(0, 1)]).expect("one edge");
                    let ledger = ParameterLedger::from_f64(*side as f64, plan.eps, *d, 0.5, RegularityClass::Super);
                    let k = gc.colour_count();
                    let t = match Template::new(k2, vec![(0..*side).collect(), (*side..2 * side).collect()], vec![(0..k).collect()], Arc::new(gc.clone()), ledger, true) {
                        Ok(t) => t,
                        Err(e) => return Attempt::setup(dig, e.to_string()),
                    };
                    let out = if pipeline == BenchPipeline::Transversal {
                        transversal_blowup_traced(&t, &h, &phi, h.targets(), &plan, seed).map(|(v, d)| (v, Some(d.split_attempts)))
                    } else {
                        approx_embed(&t, &h, &phi, h.targets(), &plan, seed).map(|v| (v, None))
                    };
                    match out {
                        Ok((v, att)) => Attempt::done(dig, verify_transversal_embedding(&gc, &h, v.embedding()).accepted, att),
                        Err(f) => Attempt::failed(dig, &f),
                    }
                }
                BenchPipeline::Blowup => unreachable!("matched above"),
            }
        }
    }
}

/// Rows ordered by (case, seed) whatever the execution order.
pub fn run_suite(suite: &Suite, parallel: bool) -> Result<Vec<Row>, String> {
    for c in &suite.cases {
        if let Some(p) = &c.params {
            p.validate().map_err(|e| format!("case {}: {e}", c.name))?;
        }
    }
    let jobs: Vec<(usize, u64)> = suite.cases.iter().enumerate().flat_map(|(i, c)| c.seeds.list().into_iter().map(move |s| (i, s))).collect();
    let exec = if parallel { Exec::Parallel } else { Exec::Sequential };
    Ok(par::map(exec, &jobs, |&(i, seed)| {
        let case = &suite.cases[i];
        let start = Instant::now();
        let a = run_one(case, seed);
        Row {
            case: case.name.clone(),
            construction: case.host.construction(),
            pipeline: serde_json::to_value(case.pipeline).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            seed,
            instance_digest: a.digest,
            success: a.success,
            verified: a.verified,
            stage: a.stage,
            reason: a.reason,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            attempts: a.attempts,
        }
    }))
}

pub fn summarise(rows: &[Row]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String), Vec<&Row>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.construction.clone(), r.pipeline.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((construction, pipeline), rs)| {
            let successes = rs.iter().filter(|r| r.success).count();
            SummaryRow {
                construction,
                pipeline,
                rows: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
                mean_wall_ms: rs.iter().map(|r| r.wall_ms).sum::<f64>() / rs.len() as f64,
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), String> {
    let err = |e: csv::Error| format!("{}: {e}", path.display());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_rows(path: &Path, rows: &[Row]) -> Result<(), String> {
    write_csv(path, &HEADER, rows)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), String> {
    write_csv(path, &SUMMARY_HEADER, rows)
}
