//! Seeded instance generators: random collections, the cyclic-triangle and
//! parity constructions, Mantel's extremal graph, 1-expansions and families
//! of separable patterns.

pub mod cyclic;
pub mod families;
pub mod parity;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::collection::GraphCollection;
use crate::embed::ClusterHost;
use crate::pattern::PatternGraph;
use crate::rng;

pub use cyclic::{cyclic_triangle_collection, cyclic_triangle_collection_sized, cyclic_triangle_from, Orientation};
pub use families::{bandwidth_of_order, one_expansion, one_expansion_uniform, separable_family, Family, SeparableFamily};
pub use parity::{parity_threegraph, parity_threegraph_from, TripartiteGraph};

/// `(26 - 2 sqrt 7) / 81`, the colour-density threshold of Aharoni et al. for
/// a rainbow triangle in a collection of `n` graphs on `n` vertices. Shipped
/// for threshold experiments; the matching extremal construction is not built.
pub const AHARONI_THRESHOLD: f64 = 0.255_660_461_455_195_33;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Random,
    CyclicTriangle,
    Mantel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub colours: usize,
    pub density: f64,
    pub seed: u64,
    pub construction: Construction,
}

impl GenSpec {
    pub fn random(n: usize, colours: usize, density: f64, seed: u64) -> Self {
        Self { n, colours, density, seed, construction: Construction::Random }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.density) {
            return Err(format!("density {} outside [0, 1]", self.density));
        }
        if self.n == 0 || self.colours == 0 {
            return Err("n and the colour count must be at least 1".into());
        }
        Ok(())
    }
}

/// The collection named by `spec.construction`.
pub fn generate(spec: &GenSpec) -> Result<GraphCollection, String> {
    spec.validate()?;
    Ok(match spec.construction {
        Construction::Random => random_collection(spec),
        Construction::CyclicTriangle => cyclic_triangle_collection_sized(spec.n, spec.colours, spec.seed),
        Construction::Mantel => mantel_extremal(spec.n, spec.colours),
    })
}

/// Clusters `0..side` and `side..2 side` joined by a random bipartite graph
/// of the given density.
pub fn bipartite_host(side: usize, density: f64, seed: u64) -> ClusterHost {
    let mut r = rng::rng(seed);
    let mut edges = Vec::new();
    for u in 0..side {
        for v in side..2 * side {
            if r.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    let k2 = PatternGraph::new(2, [(0, 1)]).expect("one edge");
    ClusterHost::new(k2, vec![(0..side).collect(), (side..2 * side).collect()], 2 * side, edges)
}

/// Every (pair, colour) incidence present independently with probability `density`.
pub fn random_collection(spec: &GenSpec) -> GraphCollection {
    let mut gc = GraphCollection::with_colours(spec.n, spec.colours);
    let mut r = rng::rng(spec.seed);
    let p = spec.density.clamp(0.0, 1.0);
    for c in 0..spec.colours {
        for u in 0..spec.n {
            for v in u + 1..spec.n {
                if r.gen_bool(p) {
                    gc.insert(c, u, v);
                }
            }
        }
    }
    gc
}

/// Complete bipartite graph with sides `0..n/2` and `n/2..n`, in every colour.
pub fn mantel_extremal(n: usize, colours: usize) -> GraphCollection {
    let mut gc = GraphCollection::with_colours(n, colours);
    for c in 0..colours {
        for u in 0..n / 2 {
            for v in n / 2..n {
                gc.insert(c, u, v);
            }
        }
    }
    gc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_host_is_seeded() {
        let a = bipartite_host(10, 0.5, 3);
        let b = bipartite_host(10, 0.5, 3);
        assert_eq!(a.adj, b.adj);
        assert!((0..10).all(|u| a.adj[u].ones().all(|v| v >= 10)));
    }

    #[test]
    fn aharoni_constant() {
        assert!((AHARONI_THRESHOLD - (26.0 - 2.0 * 7f64.sqrt()) / 81.0).abs() < 1e-15);
    }

    #[test]
    fn density_extremes() {
        let full = random_collection(&GenSpec::random(7, 3, 1.0, 1));
        assert!(full.same_edges(&GraphCollection::complete(7, 3)));
        assert_eq!(random_collection(&GenSpec::random(7, 3, 0.0, 1)).total_edges(), 0);
    }

    #[test]
    fn half_density_concentrates() {
        let gc = random_collection(&GenSpec::random(20, 20, 0.5, 9));
        let trials = 190.0 * 20.0;
        let sd = (trials * 0.25f64).sqrt();
        assert!((gc.total_edges() as f64 - trials * 0.5).abs() <= 3.0 * sd);
    }

    #[test]
    fn mantel_edge_counts() {
        assert_eq!(mantel_extremal(6, 1).total_edges(), 9);
        assert_eq!(mantel_extremal(7, 1).total_edges(), 12);
        assert_eq!(crate::oracle::monochromatic_triangles(&mantel_extremal(7, 2)), vec![0, 0]);
    }

    #[test]
    fn spec_validation() {
        assert!(GenSpec::random(0, 1, 0.5, 0).validate().is_err());
        assert!(GenSpec::random(3, 1, 1.5, 0).validate().is_err());
        let s: GenSpec = serde_json::from_str(r#"{"n": 5, "colours": 5, "density": 0.3, "seed": 2, "construction": "cyclic-triangle"}"#).unwrap();
        assert_eq!(generate(&s).unwrap().colour_count(), 5);
    }
}
