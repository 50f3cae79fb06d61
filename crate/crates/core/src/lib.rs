//! Transversal embeddings in graph collections.
//!
//! A graph collection is a family of graphs `G_c` on one vertex set, indexed by
//! colours. A transversal (rainbow) copy of a pattern `H` maps its vertices
//! injectively into the host and its edges injectively onto colours, with each
//! edge present in the graph of its colour. The crate provides the regularity
//! tooling, templates, randomized blow-up style embedding pipelines with full
//! output verification, exact backtracking oracles, and instance generators.

pub mod collection;
pub mod edge_colouring;
pub mod embed;
pub mod embedding;
pub mod error;
pub mod generators;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod par;
pub mod pattern;
pub mod regularity;
pub mod rng;
pub mod separability;
pub mod templates;
pub mod three_graph;

pub use collection::{Bipartition, ColourId, GraphCollection, VertexId};
pub use embedding::{verify_transversal_embedding, TransversalEmbedding, VerificationReport, Violation};
pub use error::CoreError;
pub use pattern::PatternGraph;
pub use separability::{separability_certificate, SeparabilityCertificate};
pub use three_graph::{from_three_graph, to_three_graph, ThreeGraph};
