use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("colour {colour} out of range ({count} colours)")]
    ColourOutOfRange { colour: usize, count: usize },
    #[error("unknown colour label {0:?}")]
    UnknownColour(String),
    #[error("duplicate colour label {0:?}")]
    DuplicateColour(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {u}-{v} of colour {colour} crosses no side of its declared bipartition")]
    OutsideBipartition { colour: usize, u: usize, v: usize },
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid three-graph edge {0:?}")]
    InvalidTriple([usize; 3]),
    #[error("sides overlap or leave the vertex range")]
    InvalidSides,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
