//! JSON documents for collections, patterns, embeddings and 3-graphs.
//!
//! Collections: `{"n": 5, "colours": ["a", "b"], "edges": {"a": [[0, 1]]}, "bipartition": {"a": {"left": [0], "right": [1]}}}`.
//! Patterns: `{"n": 3, "edges": [[0, 1]], "phi": [0, 1, 0], "targets": {"0": [2, 3]}}`.
//! Embeddings: `{"tau": {"0": 4}, "sigma": {"0": "a"}}`, with colours by label.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::collection::{Bipartition, GraphCollection, VertexId};
use crate::embedding::TransversalEmbedding;
use crate::error::CoreError;
use crate::pattern::PatternGraph;
use crate::three_graph::ThreeGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitionDoc {
    pub left: Vec<VertexId>,
    pub right: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionDoc {
    pub n: usize,
    pub colours: Vec<String>,
    #[serde(default)]
    pub edges: BTreeMap<String, Vec<[VertexId; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition: Option<BTreeMap<String, BipartitionDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDoc {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<BTreeMap<usize, Vec<VertexId>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub tau: BTreeMap<usize, VertexId>,
    pub sigma: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeGraphDoc {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub edges: Vec<[VertexId; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<usize>>,
}

impl From<&GraphCollection> for CollectionDoc {
    fn from(gc: &GraphCollection) -> Self {
        let mut edges = BTreeMap::new();
        let mut bp = BTreeMap::new();
        for c in 0..gc.colour_count() {
            edges.insert(gc.label(c).to_string(), gc.edges(c).map(|(u, v)| [u, v]).collect());
            if let Some(b) = gc.bipartition(c) {
                bp.insert(gc.label(c).to_string(), BipartitionDoc { left: b.left.clone(), right: b.right.clone() });
            }
        }
        Self { n: gc.n(), colours: gc.labels().to_vec(), edges, bipartition: (!bp.is_empty()).then_some(bp) }
    }
}

impl From<GraphCollection> for CollectionDoc {
    fn from(gc: GraphCollection) -> Self {
        Self::from(&gc)
    }
}

impl TryFrom<CollectionDoc> for GraphCollection {
    type Error = CoreError;

    fn try_from(doc: CollectionDoc) -> Result<Self, CoreError> {
        let mut gc = GraphCollection::new(doc.n, doc.colours)?;
        for (label, list) in &doc.edges {
            let c = gc.colour_index(label).ok_or_else(|| CoreError::UnknownColour(label.clone()))?;
            for &[u, v] in list {
                gc.add_edge(c, u, v)?;
            }
        }
        for (label, b) in doc.bipartition.unwrap_or_default() {
            let c = gc.colour_index(&label).ok_or_else(|| CoreError::UnknownColour(label.clone()))?;
            gc.set_bipartition(c, Bipartition { left: b.left, right: b.right })?;
        }
        Ok(gc)
    }
}

impl From<&PatternGraph> for PatternDoc {
    fn from(h: &PatternGraph) -> Self {
        Self {
            n: h.n(),
            edges: h.edges().iter().map(|&(u, v)| [u, v]).collect(),
            phi: h.phi().map(<[usize]>::to_vec),
            targets: (!h.targets().is_empty()).then(|| h.targets().clone()),
        }
    }
}

impl From<PatternGraph> for PatternDoc {
    fn from(h: PatternGraph) -> Self {
        Self::from(&h)
    }
}

impl TryFrom<PatternDoc> for PatternGraph {
    type Error = CoreError;

    fn try_from(doc: PatternDoc) -> Result<Self, CoreError> {
        let mut h = PatternGraph::new(doc.n, doc.edges.iter().map(|&[u, v]| (u, v)))?;
        if let Some(phi) = doc.phi {
            h = h.with_phi(phi)?;
        }
        if let Some(t) = doc.targets {
            h = h.with_targets(t)?;
        }
        Ok(h)
    }
}

impl EmbeddingDoc {
    pub fn from_embedding(emb: &TransversalEmbedding, gc: &GraphCollection) -> Self {
        Self {
            tau: emb.tau.iter().copied().enumerate().collect(),
            sigma: emb.sigma.iter().enumerate().map(|(e, &c)| (e, gc.labels().get(c).cloned().unwrap_or_else(|| c.to_string()))).collect(),
        }
    }

    /// Needs dense keys `0..v(H)` and `0..e(H)`.
    pub fn to_embedding(&self, gc: &GraphCollection) -> Result<TransversalEmbedding, CoreError> {
        let dense = |keys: Vec<usize>| keys.iter().enumerate().all(|(i, &k)| i == k);
        if !dense(self.tau.keys().copied().collect()) || !dense(self.sigma.keys().copied().collect()) {
            return Err(CoreError::InvalidPattern("embedding keys must be 0..count".into()));
        }
        let sigma = self.sigma.values().map(|l| gc.colour_index(l).ok_or_else(|| CoreError::UnknownColour(l.clone()))).collect::<Result<_, _>>()?;
        Ok(TransversalEmbedding { tau: self.tau.values().copied().collect(), sigma })
    }
}

impl From<&ThreeGraph> for ThreeGraphDoc {
    fn from(g: &ThreeGraph) -> Self {
        let default = g.labels().iter().enumerate().all(|(i, l)| *l == i.to_string());
        Self { n: g.n(), labels: (!default).then(|| g.labels().to_vec()), edges: g.edges().copied().collect(), parts: g.parts().map(<[usize]>::to_vec) }
    }
}

impl TryFrom<ThreeGraphDoc> for ThreeGraph {
    type Error = CoreError;

    fn try_from(doc: ThreeGraphDoc) -> Result<Self, CoreError> {
        let mut g = match doc.labels {
            Some(l) if l.len() == doc.n => ThreeGraph::with_labels(l),
            Some(_) => return Err(CoreError::InvalidSides),
            None => ThreeGraph::new(doc.n),
        };
        for [a, b, c] in doc.edges {
            g.add_edge(a, b, c)?;
        }
        if let Some(p) = doc.parts {
            g.set_parts(p)?;
        }
        Ok(g)
    }
}

pub fn collection_from_json(s: &str) -> Result<GraphCollection, CoreError> {
    GraphCollection::try_from(serde_json::from_str::<CollectionDoc>(s)?)
}

pub fn collection_to_json(gc: &GraphCollection) -> String {
    serde_json::to_string_pretty(&CollectionDoc::from(gc)).expect("plain data")
}

pub fn pattern_from_json(s: &str) -> Result<PatternGraph, CoreError> {
    PatternGraph::try_from(serde_json::from_str::<PatternDoc>(s)?)
}

pub fn pattern_to_json(h: &PatternGraph) -> String {
    serde_json::to_string_pretty(&PatternDoc::from(h)).expect("plain data")
}

pub fn three_graph_from_json(s: &str) -> Result<ThreeGraph, CoreError> {
    ThreeGraph::try_from(serde_json::from_str::<ThreeGraphDoc>(s)?)
}

pub fn three_graph_to_json(g: &ThreeGraph) -> String {
    serde_json::to_string_pretty(&ThreeGraphDoc::from(g)).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collection_round_trip() {
        let mut gc = GraphCollection::new(4, vec!["a".into(), "b".into()]).unwrap();
        gc.add_edge(0, 0, 1).unwrap();
        gc.add_edge(1, 2, 3).unwrap();
        gc.add_edge(1, 0, 3).unwrap();
        gc.set_bipartition(0, Bipartition { left: vec![0], right: vec![1] }).unwrap();
        let back = collection_from_json(&collection_to_json(&gc)).unwrap();
        assert!(back.same_edges(&gc));
        assert_eq!(back.bipartition(0), gc.bipartition(0));
    }

    #[test]
    fn documented_formats_parse() {
        let gc = collection_from_json(r#"{"n": 3, "colours": ["7", "x"], "edges": {"7": [[0, 1]], "x": [[1, 2]]}}"#).unwrap();
        assert!(gc.has_edge(0, 1, 0) && gc.has_edge(1, 2, 1));
        let h = pattern_from_json(r#"{"n": 3, "edges": [[0, 1], [1, 2]], "targets": {"1": [2]}}"#).unwrap();
        assert_eq!(h.target(1), Some(&[2][..]));
        let doc: EmbeddingDoc = serde_json::from_str(r#"{"tau": {"0": 0, "1": 1, "2": 2}, "sigma": {"0": "7", "1": "x"}}"#).unwrap();
        assert_eq!(doc.to_embedding(&gc).unwrap(), TransversalEmbedding { tau: vec![0, 1, 2], sigma: vec![0, 1] });
    }

    #[test]
    fn unknown_colour_is_an_error() {
        assert!(matches!(collection_from_json(r#"{"n": 2, "colours": ["a"], "edges": {"b": [[0, 1]]}}"#), Err(CoreError::UnknownColour(_))));
    }

    #[test]
    fn three_graph_round_trip() {
        let mut g = ThreeGraph::new(5);
        g.add_edge(0, 1, 2).unwrap();
        g.add_edge(2, 3, 4).unwrap();
        g.set_parts(vec![0, 1, 2, 0, 1]).unwrap();
        assert_eq!(three_graph_from_json(&three_graph_to_json(&g)).unwrap(), g);
    }
}
