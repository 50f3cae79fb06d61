//! Exact backtracking solvers used as ground truth: transversal embedding,
//! rainbow copy counting, monochromatic triangle counts and tight Hamilton
//! cycles in 3-graphs.

mod count;
mod hamilton;
mod search;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use count::{automorphism_count, count_rainbow_copies, monochromatic_triangles, CopyCount};
pub use hamilton::{is_tight_hamilton_cycle, tight_hamilton_search};
pub use search::exact_transversal_embed;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit_ms: u64,
    /// Fix the image order of a vertex-transitive pattern; off by default.
    pub symmetry_breaking: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { node_limit: 50_000_000, time_limit_ms: 120_000, symmetry_breaking: false }
    }
}

impl SearchBudget {
    pub fn nodes(node_limit: u64) -> Self {
        Self { node_limit, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.node_limit == 0 || self.time_limit_ms == 0 {
            return Err("search limits must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "witness", rename_all = "snake_case")]
pub enum OracleOutcome<T> {
    Found(T),
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult<T> {
    pub outcome: OracleOutcome<T>,
    pub stats: SearchStats,
}

impl<T> OracleResult<T> {
    pub fn found(&self) -> Option<&T> {
        match &self.outcome {
            OracleOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Infeasible)
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Found(_))
    }
}

/// Node and clock accounting shared by the searches.
pub(crate) struct Meter {
    nodes: u64,
    limit: u64,
    start: Instant,
    deadline: Duration,
    pub exceeded: bool,
}

impl Meter {
    pub fn new(b: &SearchBudget) -> Self {
        Self { nodes: 0, limit: b.node_limit, start: Instant::now(), deadline: Duration::from_millis(b.time_limit_ms), exceeded: false }
    }

    /// Counts a node; false once a limit is hit.
    pub fn tick(&mut self) -> bool {
        if self.exceeded {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.limit || (self.nodes % 4096 == 0 && self.start.elapsed() > self.deadline) {
            self.exceeded = true;
        }
        !self.exceeded
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats { nodes: self.nodes, elapsed_ms: self.start.elapsed().as_millis() as u64 }
    }

    pub fn finish<T>(self, found: Option<T>) -> OracleResult<T> {
        let stats = self.stats();
        let outcome = match found {
            Some(t) => OracleOutcome::Found(t),
            None if self.exceeded => OracleOutcome::BudgetExceeded,
            None => OracleOutcome::Infeasible,
        };
        OracleResult { outcome, stats }
    }
}
