use num_rational::Ratio;

use super::partite::{KGraph, PartiteIncidence};
use super::RegularityError;
use crate::collection::{ColourId, GraphCollection, VertexId};

/// `e(V_1, ..., V_k) / prod |V_i|` for pairwise disjoint non-empty parts.
pub fn density(g: &KGraph, parts: &[Vec<usize>]) -> Result<Ratio<i64>, RegularityError> {
    Ok(PartiteIncidence::from_kgraph(g, parts)?.density())
}

/// Density of the 3-graph view `(V1, V2, colours)` of a collection.
pub fn collection_density(gc: &GraphCollection, v1: &[VertexId], v2: &[VertexId], colours: &[ColourId]) -> Result<Ratio<i64>, RegularityError> {
    Ok(PartiteIncidence::from_collection(gc, v1, v2, colours)?.density())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_tripartite_has_density_one() {
        let mut g = KGraph::new(3, 6);
        for a in 0..2 {
            for b in 2..4 {
                for c in 4..6 {
                    g.add_edge(vec![a, b, c]);
                }
            }
        }
        assert_eq!(density(&g, &[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap(), Ratio::from_integer(1));
        assert_eq!(density(&g, &[vec![0], vec![2, 3], vec![4, 5]]).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn rejects_overlap_and_empty_parts() {
        let g = KGraph::new(2, 4);
        assert!(matches!(density(&g, &[vec![0, 1], vec![1, 2]]), Err(RegularityError::PartsOverlap(1))));
        assert!(matches!(density(&g, &[vec![0, 1], vec![]]), Err(RegularityError::EmptyPart(1))));
    }
}
