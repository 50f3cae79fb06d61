//! Regularity for graph collections and k-partite k-graphs: densities,
//! irregularity witnesses, class checks, typical elements, the parameter
//! ledger, sparsification, the partition lemma and degree inheritance.

pub mod classify;
pub mod density;
pub mod inheritance;
pub mod ledger;
pub mod partite;
pub mod partition;
pub mod sparsify;
pub mod typical;
pub mod witness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify_collection, ClassificationReport};
pub use density::{collection_density, density};
pub use inheritance::{degree_inheritance, InheritanceReport};
pub use ledger::{ledger_slice, ledger_template_slice, ParameterLedger, RegularityClass, SliceRule, TemplateSliceRule};
pub use partite::{KGraph, PartiteIncidence};
pub use partition::{partition_collection, PartitionConfig, RegularityPartition};
pub use sparsify::{sparsify_to_superregular, SparsifyReport};
pub use typical::{typical_elements, TypicalReport};
pub use witness::{irregularity_witness, IrregularityWitness, SearchMeta, SearchMode, SearchOptions, WitnessOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassMode {
    /// Weak regularity only (no density floor).
    Weak,
    Regular,
    SemiSuper,
    Super,
    HalfSuper,
    UniformlyDense,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub eps: f64,
    pub d: f64,
    pub eta: Option<f64>,
    pub mode: ClassMode,
}

impl DensitySpec {
    pub fn new(eps: f64, d: f64, mode: ClassMode) -> Self {
        Self { eps, d, eta: None, mode }
    }
}

#[derive(Debug, Error)]
pub enum RegularityError {
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("vertex {0} lies in two parts")]
    PartsOverlap(usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("expected {expected} parts, got {got}")]
    PartCount { expected: usize, got: usize },
    #[error("rule {rule} needs a {needs} ledger, found {found:?}")]
    RuleInapplicable { rule: &'static str, needs: &'static str, found: RegularityClass },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sparsified graph misses the degree floor after {attempts} attempts (worst vertex {vertex}: {degree} < {required})")]
    PromiseViolated { attempts: usize, vertex: usize, degree: u64, required: f64 },
    #[error("partition did not converge: {}", .0.diagnostics)]
    DidNotConverge(Box<RegularityPartition>),
}
