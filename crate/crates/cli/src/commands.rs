//! One function per subcommand. `Err` is a usage error (exit 2); typed
//! failures and infeasibility are reported through the returned report.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use transversal::embed::{
    blowup_embed, embed_prescribed_colours, expand_embed_3graph, expansion_violations, quasi_embed_traced, transversal_blowup_traced, verify_blowup,
    approx_embed, ClusterHost, EmbedFailure, ExpansionEmbedding, SplitPlan, Verified,
};
use transversal::generators::{generate, parity_threegraph, separable_family, Construction, Family, GenSpec};
use transversal::io::{CollectionDoc, EmbeddingDoc, PatternDoc, ThreeGraphDoc};
use transversal::oracle::{count_rainbow_copies, exact_transversal_embed, is_tight_hamilton_cycle, monochromatic_triangles, tight_hamilton_search, OracleOutcome, SearchBudget};
use transversal::regularity::{partition_collection, ClassMode, DensitySpec, PartitionConfig, RegularityError};
use transversal::templates::{thick_graph, Template, TemplateDoc};
use transversal::{separability_certificate, verify_transversal_embedding, GraphCollection, PatternGraph, ThreeGraph, TransversalEmbedding};

use crate::report::{digest, Input, Outcome, RunReport, Status, VerificationStamp};
use crate::{BenchArgs, CheckArgs, Command, EmbedArgs, FileKind, GenKind, GenerateArgs, OracleArgs, OracleMode, PartitionArgs, Pipeline, VerifyArgs};

pub const TRANSVERSAL_VERIFIER: &str = "verify_transversal_embedding";
pub const BLOWUP_VERIFIER: &str = "verify_blowup";
pub const EXPANSION_VERIFIER: &str = "expansion_violations";
pub const HAMILTON_VERIFIER: &str = "is_tight_hamilton_cycle";

pub fn execute(cmd: &Command) -> Result<RunReport, String> {
    let start = Instant::now();
    let mut report = match cmd {
        Command::Generate(a) => generate_cmd(a),
        Command::Check(a) => check_cmd(a),
        Command::Partition(a) => partition_cmd(a),
        Command::Embed(a) => embed_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    }?;
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("plain data");
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn input(path: &Path, dig: String) -> Input {
    Input { path: path.display().to_string(), digest: dig }
}

pub fn load_collection(path: &Path) -> Result<(GraphCollection, Input), String> {
    let doc: CollectionDoc = parse(path)?;
    let gc = GraphCollection::try_from(doc).map_err(|e| format!("{}: {e}", path.display()))?;
    let d = digest(&CollectionDoc::from(&gc));
    Ok((gc, input(path, d)))
}

pub fn load_pattern(path: &Path) -> Result<(PatternGraph, Input), String> {
    let doc: PatternDoc = parse(path)?;
    let h = PatternGraph::try_from(doc).map_err(|e| format!("{}: {e}", path.display()))?;
    let d = digest(&PatternDoc::from(&h));
    Ok((h, input(path, d)))
}

pub fn load_three_graph(path: &Path) -> Result<(ThreeGraph, Input), String> {
    let doc: ThreeGraphDoc = parse(path)?;
    let g = ThreeGraph::try_from(doc).map_err(|e| format!("{}: {e}", path.display()))?;
    let d = digest(&ThreeGraphDoc::from(&g));
    Ok((g, input(path, d)))
}

pub fn load_template(path: &Path, host: Arc<GraphCollection>) -> Result<(Template, Input), String> {
    let doc: TemplateDoc = parse(path)?;
    let d = digest(&doc);
    let t = doc.into_template(host).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((t, input(path, d)))
}

pub fn load_plan(path: Option<&Path>) -> Result<SplitPlan, String> {
    let plan: SplitPlan = match path {
        Some(p) => parse(p)?,
        None => SplitPlan::default(),
    };
    plan.validate()?;
    Ok(plan)
}

/// The serde tag of a failure reason, e.g. `ChernoffRetryExhausted`.
pub fn reason_kind(f: &EmbedFailure) -> String {
    let v = serde_json::to_value(&f.reason).expect("plain data");
    let snake = v["kind"].as_str().unwrap_or("unknown");
    snake.split('_').map(|w| w[..1].to_uppercase() + &w[1..]).collect()
}

fn failure_outcome(f: &EmbedFailure) -> Outcome {
    Outcome::with(Status::Failure, reason_kind(f), Some(serde_json::to_value(f).expect("plain data")))
}

fn stamp_transversal(gc: &GraphCollection, h: &PatternGraph, emb: &TransversalEmbedding) -> VerificationStamp {
    let rep = verify_transversal_embedding(gc, h, emb);
    VerificationStamp {
        verifier: TRANSVERSAL_VERIFIER.into(),
        accepted: rep.accepted,
        violations: rep.violations.iter().map(|v| format!("{v:?}")).collect(),
        output_digest: digest(&EmbeddingDoc::from_embedding(emb, gc)),
    }
}

fn stamp_list<T: Serialize>(verifier: &str, violations: Vec<String>, output: &T) -> VerificationStamp {
    VerificationStamp { verifier: verifier.into(), accepted: violations.is_empty(), violations, output_digest: digest(output) }
}

fn generate_cmd(a: &GenerateArgs) -> Result<RunReport, String> {
    let mut r = RunReport::new("generate");
    r.seed = Some(a.seed);
    let out = &a.out;
    let (dig, result) = match a.construction {
        GenKind::Random | GenKind::CyclicTriangle | GenKind::Mantel => {
            let spec = match &a.spec {
                Some(p) => parse::<GenSpec>(p)?,
                None => {
                    let n = a.n.ok_or("--n is required")?;
                    let construction = match a.construction {
                        GenKind::Random => Construction::Random,
                        GenKind::CyclicTriangle => Construction::CyclicTriangle,
                        _ => Construction::Mantel,
                    };
                    GenSpec { n, colours: a.colours.unwrap_or(n), density: a.density, seed: a.seed, construction }
                }
            };
            let gc = generate(&spec)?;
            let doc = CollectionDoc::from(&gc);
            write_json(out, &doc)?;
            r.seed = Some(spec.seed);
            r.params = serde_json::to_value(&spec).expect("plain data");
            (digest(&doc), json!({"n": gc.n(), "colours": gc.colour_count(), "total_edges": gc.total_edges()}))
        }
        GenKind::Parity => {
            let p = a.part_size.ok_or("--part-size is required")?;
            if p == 0 || a.x.iter().any(|&v| v >= 3 * p) {
                return Err(format!("X must lie in 0..{}", 3 * p));
            }
            let g = parity_threegraph(p, &a.x, a.seed);
            let doc = ThreeGraphDoc::from(&g);
            write_json(out, &doc)?;
            r.params = json!({"construction": "parity", "part_size": p, "x": a.x});
            (digest(&doc), json!({"n": g.n(), "edges": g.edge_count(), "density": g.edge_count() as f64 / (p * p * p) as f64}))
        }
        GenKind::Family => {
            let text = a.family.as_deref().ok_or("--family is required")?;
            let fam: Family = serde_json::from_str(text).map_err(|e| format!("--family: {e}"))?;
            let sf = separable_family(&fam, a.mu);
            let doc = PatternDoc::from(&sf.pattern);
            write_json(out, &doc)?;
            r.params = json!({"family": fam, "mu": a.mu});
            (
                digest(&doc),
                json!({"n": sf.pattern.n(), "edges": sf.pattern.edge_count(), "max_degree": sf.pattern.max_degree(), "certificate": sf.certificate}),
            )
        }
    };
    r.result = json!({"output": {"path": out.display().to_string(), "digest": dig}, "stats": result});
    Ok(r)
}

fn check_cmd(a: &CheckArgs) -> Result<RunReport, String> {
    let mut r = RunReport::new("check");
    r.params = json!({"kind": format!("{:?}", a.kind).to_lowercase(), "mono_triangles": a.mono_triangles, "mu": a.mu});
    match a.kind {
        FileKind::Collection => {
            let (gc, inp) = load_collection(&a.file)?;
            r.inputs.insert("instance".into(), inp);
            let pairs = (gc.n() * gc.n().saturating_sub(1) / 2).max(1) as f64;
            let per: Vec<usize> = (0..gc.colour_count()).map(|c| gc.edge_count(c)).collect();
            let mut res = json!({
                "n": gc.n(),
                "colours": gc.colour_count(),
                "total_edges": gc.total_edges(),
                "min_colour_density": per.iter().min().map_or(0.0, |&e| e as f64 / pairs),
                "max_colour_density": per.iter().max().map_or(0.0, |&e| e as f64 / pairs),
            });
            if a.mono_triangles {
                let mono = monochromatic_triangles(&gc);
                res["mono_triangles"] = json!(mono.iter().sum::<u64>());
                res["mono_triangles_per_colour"] = json!(mono);
            }
            r.result = res;
        }
        FileKind::Pattern => {
            let (h, inp) = load_pattern(&a.file)?;
            r.inputs.insert("pattern".into(), inp);
            let mut res = json!({
                "n": h.n(),
                "edges": h.edge_count(),
                "max_degree": h.max_degree(),
                "components": h.components().len(),
                "bipartite": h.two_colouring().is_some(),
            });
            if let Some(mu) = a.mu {
                res["separability"] = json!(separability_certificate(&h, mu));
            }
            r.result = res;
        }
        FileKind::ThreeGraph => {
            let (g, inp) = load_three_graph(&a.file)?;
            r.inputs.insert("instance".into(), inp);
            let n = g.n() as f64;
            let triples = (n * (n - 1.0) * (n - 2.0) / 6.0).max(1.0);
            let mut res = json!({"n": g.n(), "edges": g.edge_count(), "density": g.edge_count() as f64 / triples});
            if let Some(parts) = g.part_lists() {
                let cells: f64 = parts.iter().map(|p| p.len() as f64).product();
                res["parts"] = json!(parts.iter().map(Vec::len).collect::<Vec<_>>());
                res["partite_density"] = json!(g.edge_count() as f64 / cells.max(1.0));
            }
            r.result = res;
        }
    }
    Ok(r)
}

fn partition_cmd(a: &PartitionArgs) -> Result<RunReport, String> {
    if !(a.eps > 0.0 && a.eps < 1.0 && a.d >= 0.0 && a.d <= 1.0) || a.l0 == 0 || a.subclusters == 0 {
        return Err("need 0 < eps < 1, 0 <= d <= 1, l0 >= 1, subclusters >= 1".into());
    }
    let (gc, inp) = load_collection(&a.instance)?;
    let mut r = RunReport::new("partition");
    r.seed = Some(a.seed);
    r.inputs.insert("instance".into(), inp);
    r.params = json!({"eps": a.eps, "d": a.d, "l0": a.l0, "subclusters": a.subclusters, "max_rounds": a.max_rounds});
    let mut cfg = PartitionConfig::new(DensitySpec::new(a.eps, a.d, ClassMode::Regular), a.l0, a.seed);
    cfg.subclusters = a.subclusters;
    cfg.max_rounds = a.max_rounds;
    let part = match partition_collection(&gc, &cfg) {
        Ok(p) => p,
        Err(RegularityError::DidNotConverge(p)) => {
            r.outcome = Outcome::with(Status::Failure, "DidNotConverge", None);
            *p
        }
        Err(e) => {
            r.outcome = Outcome::with(Status::Failure, "RegularityError", Some(json!(e.to_string())));
            return Ok(r);
        }
    };
    if r.outcome.status == Status::Success && !part.checks.all() {
        r.outcome = Outcome::with(Status::Failure, "PropertyCheckFailed", Some(serde_json::to_value(&part.checks).expect("plain data")));
    }
    let value = serde_json::to_value(&part).expect("plain data");
    if let Some(out) = &a.out {
        write_json(out, &value)?;
    }
    r.result = value;
    Ok(r)
}

fn verified_result(v: &Verified, gc: &GraphCollection, diagnostics: Value) -> Value {
    json!({
        "embedding": EmbeddingDoc::from_embedding(v.embedding(), gc),
        "trace": v.trace(),
        "diagnostics": diagnostics,
    })
}

fn template_for(a: &EmbedArgs, gc: GraphCollection, r: &mut RunReport) -> Result<Template, String> {
    let path = a.template.as_deref().ok_or("this pipeline needs --template")?;
    let (t, inp) = load_template(path, Arc::new(gc))?;
    r.inputs.insert("template".into(), inp);
    Ok(t)
}

fn phi_of(h: &PatternGraph) -> Result<Vec<usize>, String> {
    h.phi().map(<[usize]>::to_vec).ok_or_else(|| "the pattern needs \"phi\" for template pipelines".to_string())
}

fn embed_cmd(a: &EmbedArgs) -> Result<RunReport, String> {
    let plan = load_plan(a.params.as_deref())?;
    let mut r = RunReport::new("embed");
    r.seed = Some(a.seed);
    let pipeline = format!("{:?}", a.pipeline).to_lowercase();
    r.params = json!({"pipeline": pipeline, "plan": plan});
    let (h, pinp) = load_pattern(&a.pattern)?;

    if a.pipeline == Pipeline::Expand {
        let (g, inp) = load_three_graph(&a.instance)?;
        r.inputs.insert("instance".into(), inp);
        r.inputs.insert("pattern".into(), pinp);
        match expand_embed_3graph(&g, &h, &plan, a.seed) {
            Ok(e) => {
                let stamp = stamp_list(EXPANSION_VERIFIER, expansion_violations(&g, &h, &e), &e);
                finish_output(&mut r, stamp, json!({"embedding": e}), a.out.as_deref(), &e)?;
            }
            Err(f) => r.outcome = failure_outcome(&f),
        }
        return Ok(r);
    }

    let (gc, inp) = load_collection(&a.instance)?;
    r.inputs.insert("instance".into(), inp);
    r.inputs.insert("pattern".into(), pinp);
    let targets = h.targets().clone();
    let outcome: Result<(Verified, Value), EmbedFailure> = match a.pipeline {
        Pipeline::Quasi => quasi_embed_traced(&gc, &h, &plan, a.seed).map(|(v, d)| (v, serde_json::to_value(d).expect("plain data"))),
        Pipeline::Transversal | Pipeline::Approx | Pipeline::Prescribed => {
            let phi = phi_of(&h)?;
            let t = template_for(a, gc.clone(), &mut r)?;
            r.params["ledger"] = serde_json::to_value(&t.ledger).expect("plain data");
            match a.pipeline {
                Pipeline::Transversal => transversal_blowup_traced(&t, &h, &phi, &targets, &plan, a.seed).map(|(v, d)| (v, serde_json::to_value(d).expect("plain data"))),
                Pipeline::Approx => approx_embed(&t, &h, &phi, &targets, &plan, a.seed).map(|v| (v, Value::Null)),
                _ => {
                    let path = a.prescribed.as_deref().ok_or("the prescribed pipeline needs --prescribed")?;
                    let labels: Vec<Vec<String>> = parse(path)?;
                    let ids = labels
                        .iter()
                        .map(|l| l.iter().map(|c| gc.colour_index(c).ok_or_else(|| format!("unknown colour {c}"))).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?;
                    r.params["prescribed"] = json!(labels);
                    embed_prescribed_colours(&t, &h, &phi, &targets, &ids, &plan, a.seed).map(|v| (v, Value::Null))
                }
            }
        }
        Pipeline::Blowup => {
            let phi = phi_of(&h)?;
            let t = template_for(a, gc.clone(), &mut r)?;
            let host = ClusterHost::from_thick(&t, &thick_graph(&t, plan.thick_lambda));
            match blowup_embed(&host, &h, &phi, &targets, &plan, a.seed) {
                Ok(b) => {
                    let stamp = stamp_list(BLOWUP_VERIFIER, verify_blowup(&host, &h, &phi, &targets, &b.tau), &b.tau);
                    let out = json!({"tau": b.tau});
                    finish_output(&mut r, stamp, json!({"tau": b.tau, "attempts": b.attempts}), a.out.as_deref(), &out)?;
                }
                Err(f) => r.outcome = failure_outcome(&f),
            }
            return Ok(r);
        }
        Pipeline::Expand => unreachable!("handled above"),
    };
    match outcome {
        Ok((v, diag)) => {
            let stamp = stamp_transversal(&gc, &h, v.embedding());
            let doc = EmbeddingDoc::from_embedding(v.embedding(), &gc);
            finish_output(&mut r, stamp, verified_result(&v, &gc, diag), a.out.as_deref(), &doc)?;
        }
        Err(f) => r.outcome = failure_outcome(&f),
    }
    Ok(r)
}

/// Records a stamped output; a rejected stamp turns the run into a failure.
fn finish_output<T: Serialize>(r: &mut RunReport, stamp: VerificationStamp, result: Value, out: Option<&Path>, output: &T) -> Result<(), String> {
    if !stamp.accepted {
        r.outcome = Outcome::with(Status::Failure, "VerificationRejected", Some(json!(stamp.violations)));
    }
    r.verification = Some(stamp);
    r.result = result;
    if let Some(p) = out {
        write_json(p, output)?;
    }
    Ok(())
}

fn oracle_cmd(a: &OracleArgs) -> Result<RunReport, String> {
    let budget = SearchBudget { node_limit: a.node_limit, time_limit_ms: a.time_limit_ms, symmetry_breaking: a.symmetry_breaking };
    budget.validate()?;
    let mut r = RunReport::new("oracle");
    r.params = json!({"mode": format!("{:?}", a.mode).to_lowercase(), "budget": budget});
    let budget_exceeded = || Outcome::with(Status::Failure, "BudgetExceeded", None);
    match a.mode {
        OracleMode::Hamilton => {
            let (g, inp) = load_three_graph(&a.instance)?;
            r.inputs.insert("instance".into(), inp);
            let res = tight_hamilton_search(&g, &budget);
            r.result = json!({"stats": res.stats});
            match res.outcome {
                OracleOutcome::Found(cycle) => {
                    let bad = if is_tight_hamilton_cycle(&g, &cycle) { vec![] } else { vec!["not a tight Hamilton cycle".to_string()] };
                    let stamp = stamp_list(HAMILTON_VERIFIER, bad, &cycle);
                    r.result["cycle"] = json!(cycle);
                    let res = std::mem::take(&mut r.result);
                    finish_output(&mut r, stamp, res, a.out.as_deref(), &json!({"cycle": cycle}))?;
                }
                OracleOutcome::Infeasible => r.outcome = Outcome::with(Status::Infeasible, "Infeasible", None),
                OracleOutcome::BudgetExceeded => r.outcome = budget_exceeded(),
            }
        }
        OracleMode::Embed | OracleMode::Count => {
            let (gc, inp) = load_collection(&a.instance)?;
            let (h, pinp) = load_pattern(a.pattern.as_deref().ok_or("--pattern is required")?)?;
            r.inputs.insert("instance".into(), inp);
            r.inputs.insert("pattern".into(), pinp);
            if a.mode == OracleMode::Count {
                let res = count_rainbow_copies(&gc, &h, &budget);
                r.result = json!({"stats": res.stats});
                match res.outcome {
                    OracleOutcome::Found(c) => r.result["count"] = json!(c),
                    _ => r.outcome = budget_exceeded(),
                }
                return Ok(r);
            }
            let res = exact_transversal_embed(&gc, &h, h.targets(), &budget);
            r.result = json!({"stats": res.stats});
            match res.outcome {
                OracleOutcome::Found(emb) => {
                    let stamp = stamp_transversal(&gc, &h, &emb);
                    let doc = EmbeddingDoc::from_embedding(&emb, &gc);
                    r.result["embedding"] = json!(doc);
                    let res = std::mem::take(&mut r.result);
                    finish_output(&mut r, stamp, res, a.out.as_deref(), &doc)?;
                }
                OracleOutcome::Infeasible => r.outcome = Outcome::with(Status::Infeasible, "Infeasible", None),
                OracleOutcome::BudgetExceeded => r.outcome = budget_exceeded(),
            }
        }
    }
    Ok(r)
}

fn verify_cmd(a: &VerifyArgs) -> Result<RunReport, String> {
    let mut r = RunReport::new("verify");
    if let Some(path) = &a.from_report {
        return reverify(path, r);
    }
    let (Some(ip), Some(pp), Some(ep)) = (&a.instance, &a.pattern, &a.embedding) else {
        return Err("give --from-report, or all of --instance, --pattern and --embedding".into());
    };
    let (gc, inp) = load_collection(ip)?;
    let (h, pinp) = load_pattern(pp)?;
    let doc: EmbeddingDoc = parse(ep)?;
    let emb = doc.to_embedding(&gc).map_err(|e| format!("{}: {e}", ep.display()))?;
    r.inputs.insert("instance".into(), inp);
    r.inputs.insert("pattern".into(), pinp);
    r.inputs.insert("embedding".into(), input(ep, digest(&doc)));
    let stamp = stamp_transversal(&gc, &h, &emb);
    if !stamp.accepted {
        r.outcome = Outcome::with(Status::Failure, "Rejected", Some(json!(stamp.violations)));
    }
    r.verification = Some(stamp);
    Ok(r)
}

/// Re-reads the inputs of an earlier report, checks their digests and
/// recomputes the verification stamp of its output.
fn reverify(path: &Path, mut r: RunReport) -> Result<RunReport, String> {
    let old: RunReport = parse(path)?;
    let stamp = old.verification.clone().ok_or("the report carries no verification stamp")?;
    let file = |key: &str| old.inputs.get(key).map(|i| Path::new(&i.path).to_path_buf()).ok_or(format!("the report has no {key} input"));
    let field = |key: &str| old.result.get(key).cloned().ok_or(format!("the report result has no {key}"));
    let mut fresh = Vec::new();
    let recomputed = match stamp.verifier.as_str() {
        TRANSVERSAL_VERIFIER => {
            let (gc, i) = load_collection(&file("instance")?)?;
            let (h, p) = load_pattern(&file("pattern")?)?;
            fresh.extend([("instance", i), ("pattern", p)]);
            let doc: EmbeddingDoc = serde_json::from_value(field("embedding")?).map_err(|e| e.to_string())?;
            let emb = doc.to_embedding(&gc).map_err(|e| e.to_string())?;
            stamp_transversal(&gc, &h, &emb)
        }
        BLOWUP_VERIFIER => {
            let (gc, i) = load_collection(&file("instance")?)?;
            let (h, p) = load_pattern(&file("pattern")?)?;
            let (t, ti) = load_template(&file("template")?, Arc::new(gc))?;
            fresh.extend([("instance", i), ("pattern", p), ("template", ti)]);
            let plan: SplitPlan = serde_json::from_value(old.params["plan"].clone()).map_err(|e| e.to_string())?;
            let host = ClusterHost::from_thick(&t, &thick_graph(&t, plan.thick_lambda));
            let tau: Vec<usize> = serde_json::from_value(field("tau")?).map_err(|e| e.to_string())?;
            stamp_list(BLOWUP_VERIFIER, verify_blowup(&host, &h, &phi_of(&h)?, h.targets(), &tau), &tau)
        }
        EXPANSION_VERIFIER => {
            let (g, i) = load_three_graph(&file("instance")?)?;
            let (h, p) = load_pattern(&file("pattern")?)?;
            fresh.extend([("instance", i), ("pattern", p)]);
            let e: ExpansionEmbedding = serde_json::from_value(field("embedding")?).map_err(|e| e.to_string())?;
            stamp_list(EXPANSION_VERIFIER, expansion_violations(&g, &h, &e), &e)
        }
        HAMILTON_VERIFIER => {
            let (g, i) = load_three_graph(&file("instance")?)?;
            fresh.push(("instance", i));
            let cycle: Vec<usize> = serde_json::from_value(field("cycle")?).map_err(|e| e.to_string())?;
            let bad = if is_tight_hamilton_cycle(&g, &cycle) { vec![] } else { vec!["not a tight Hamilton cycle".to_string()] };
            stamp_list(HAMILTON_VERIFIER, bad, &cycle)
        }
        other => return Err(format!("unknown verifier {other}")),
    };
    let mismatched: Vec<&str> = fresh.iter().filter(|(k, i)| old.inputs.get(*k).map(|o| &o.digest) != Some(&i.digest)).map(|(k, _)| *k).collect();
    for (k, i) in fresh {
        r.inputs.insert(k.to_string(), i);
    }
    r.inputs.insert("report".into(), input(path, digest(&old)));
    r.seed = old.seed;
    r.result = json!({"original": stamp, "reproduced": recomputed == stamp, "mismatched_inputs": mismatched});
    r.outcome = if !mismatched.is_empty() {
        Outcome::with(Status::Failure, "DigestMismatch", Some(json!(mismatched)))
    } else if recomputed != stamp {
        Outcome::with(Status::Failure, "StampMismatch", None)
    } else if !recomputed.accepted {
        Outcome::with(Status::Failure, "Rejected", Some(json!(recomputed.violations)))
    } else {
        Outcome::success()
    };
    r.verification = Some(recomputed);
    Ok(r)
}

fn bench_cmd(a: &BenchArgs) -> Result<RunReport, String> {
    let suite: crate::bench::Suite = parse(&a.suite)?;
    let mut r = RunReport::new("bench");
    r.inputs.insert("suite".into(), input(&a.suite, digest(&suite)));
    r.params = json!({"sequential": a.sequential});
    let rows = crate::bench::run_suite(&suite, !a.sequential)?;
    crate::bench::write_rows(&a.out, &rows)?;
    let summary = crate::bench::summarise(&rows);
    if let Some(p) = &a.summary {
        crate::bench::write_summary(p, &summary)?;
    }
    r.result = json!({"rows": rows.len(), "successes": rows.iter().filter(|x| x.success).count(), "summary": summary, "csv": a.out.display().to_string()});
    Ok(r)
}
