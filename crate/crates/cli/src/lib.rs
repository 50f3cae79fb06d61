//! Batch front end for the `transversal` crate. Every run maps to exit code
//! 0 (success or feasible), 1 (verified infeasible or a typed pipeline
//! failure) or 2 (usage error), and produces a JSON [`report::RunReport`].

pub mod bench;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{RunReport, REPORT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "transversal", version, about = "Transversal embeddings in graph collections")]
pub struct Cli {
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Directory for reports named `<command>-<digest>-<seed>.json`.
    #[arg(long, global = true, env = REPORT_DIR_ENV)]
    pub report_dir: Option<PathBuf>,
    /// One-row CSV summary of the run.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a collection, 3-graph or pattern.
    Generate(GenerateArgs),
    /// Statistics of an instance file.
    Check(CheckArgs),
    /// Regularity partition of a collection.
    Partition(PartitionArgs),
    /// Run an embedding pipeline and verify its output.
    Embed(EmbedArgs),
    /// Exact search: embedding, copy count or tight Hamilton cycle.
    Oracle(OracleArgs),
    /// Verify an embedding file or re-verify a report.
    Verify(VerifyArgs),
    /// Run a suite of (instance, pipeline, seed) cases into a CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    CyclicTriangle,
    Mantel,
    Parity,
    Family,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "random")]
    pub construction: GenKind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Colour count; defaults to `n`.
    #[arg(long)]
    pub colours: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generator spec JSON (`{"n", "colours", "density", "seed", "construction"}`); overrides the flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Parity construction: vertices per part.
    #[arg(long)]
    pub part_size: Option<usize>,
    /// Parity construction: comma-separated vertices of `X`.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<usize>,
    /// Pattern family JSON, e.g. `{"kind": "cycle-union", "lengths": [4, 6]}`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FileKind {
    Collection,
    Pattern,
    ThreeGraph,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "collection")]
    pub kind: FileKind,
    /// Count monochromatic triangles per colour.
    #[arg(long)]
    pub mono_triangles: bool,
    /// Separability parameter for patterns.
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub d: f64,
    #[arg(long, default_value_t = 2)]
    pub l0: usize,
    #[arg(long, default_value_t = 1)]
    pub subclusters: usize,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    Quasi,
    Transversal,
    Approx,
    Prescribed,
    Blowup,
    Expand,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    pub pipeline: Pipeline,
    /// Collection JSON (3-graph JSON for `expand`).
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
    /// Template JSON for `transversal`, `approx`, `prescribed` and `blowup`.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Prescribed colour labels per R-edge, `[["a"], []]`.
    #[arg(long)]
    pub prescribed: Option<PathBuf>,
    /// Numeric parameters as a JSON object; missing fields take defaults.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the embedding here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Embed,
    Count,
    Hamilton,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "embed")]
    pub mode: OracleMode,
    /// Collection JSON (3-graph JSON for `hamilton`).
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long, default_value_t = 50_000_000)]
    pub node_limit: u64,
    #[arg(long, default_value_t = 120_000)]
    pub time_limit_ms: u64,
    #[arg(long)]
    pub symmetry_breaking: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A report from `embed` or `oracle`; its inputs are re-read from disk.
    #[arg(long, conflicts_with_all = ["instance", "pattern", "embedding"])]
    pub from_report: Option<PathBuf>,
    #[arg(long, requires_all = ["pattern", "embedding"])]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long)]
    pub embedding: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub suite: PathBuf,
    /// Per-(case, seed) rows.
    #[arg(long)]
    pub out: PathBuf,
    /// Aggregated rows per construction.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Run cases one at a time.
    #[arg(long)]
    pub sequential: bool,
}

/// Parses `args` (program name first) and runs the command; the returned
/// value is the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let report = match commands::execute(&cli.command) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    match emit(&cli, &report) {
        Ok(()) => report.exit_code(),
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn emit(cli: &Cli, report: &RunReport) -> Result<(), String> {
    let path = cli.report.clone().or_else(|| cli.report_dir.as_ref().map(|d| report.default_path(d)));
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            std::fs::write(&p, report.to_json()).map_err(|e| format!("{}: {e}", p.display()))?;
            let reason = report.outcome.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default();
            println!("{:?}{reason}: report {}", report.outcome.status, p.display());
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            // a closed pipe (`| head`) is not an error for the caller
            if let Err(e) = writeln!(out, "{}", report.to_json()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.to_string());
                }
            }
        }
    }
    if let Some(p) = &cli.csv {
        let mut w = csv::Writer::from_path(p).map_err(|e| format!("{}: {e}", p.display()))?;
        let accepted = report.verification.as_ref().map(|v| v.accepted.to_string()).unwrap_or_default();
        w.write_record(["command", "seed", "status", "reason", "verified", "total_ms"]).map_err(|e| e.to_string())?;
        w.write_record([
            report.command.clone(),
            report.seed.map(|s| s.to_string()).unwrap_or_default(),
            format!("{:?}", report.outcome.status).to_lowercase(),
            report.outcome.reason.clone().unwrap_or_default(),
            accepted,
            format!("{:.3}", report.timings.total_ms),
        ])
        .map_err(|e| e.to_string())?;
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok(())
}
