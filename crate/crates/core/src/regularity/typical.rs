use serde::{Deserialize, Serialize};

use crate::collection::{bitset, ColourId, GraphCollection, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalReport {
    /// Atypical vertices of `V1` and of `V2`.
    pub atypical_vertices: [Vec<VertexId>; 2],
    pub atypical_colours: Vec<ColourId>,
    /// `eps |V1|`, `eps |V2|`, `eps |C|`.
    pub vertex_bounds: [f64; 2],
    pub colour_bound: f64,
    pub within_bounds: bool,
}

/// A vertex of `V_i` is atypical when its colour-summed degree into `V_{3-i}`
/// is below `(d - eps)|V_{3-i}||C|`; a colour is atypical when it has fewer
/// than `(d - eps)|V1||V2|` edges between the sides.
pub fn typical_elements(gc: &GraphCollection, v1: &[VertexId], v2: &[VertexId], d: f64, eps: f64) -> TypicalReport {
    let n = gc.n();
    let s1 = bitset(n, v1);
    let s2 = bitset(n, v2);
    let k = gc.colour_count();
    let floor = d - eps;
    let side = |vs: &[VertexId], other: &fixedbitset::FixedBitSet, other_len: usize| -> Vec<VertexId> {
        vs.iter()
            .copied()
            .filter(|&v| {
                let deg: usize = (0..k).map(|c| gc.degree_into(c, v, other)).sum();
                (deg as f64) < floor * other_len as f64 * k as f64 - 1e-9
            })
            .collect()
    };
    let a1 = side(v1, &s2, v2.len());
    let a2 = side(v2, &s1, v1.len());
    let colours: Vec<ColourId> = (0..k)
        .filter(|&c| {
            let e = gc.edges_between(c, v1, &s2);
            (e as f64) < floor * (v1.len() * v2.len()) as f64 - 1e-9
        })
        .collect();
    let vb = [eps * v1.len() as f64, eps * v2.len() as f64];
    let cb = eps * k as f64;
    let within = a1.len() as f64 <= vb[0] + 1e-9 && a2.len() as f64 <= vb[1] + 1e-9 && colours.len() as f64 <= cb + 1e-9;
    TypicalReport { atypical_vertices: [a1, a2], atypical_colours: colours, vertex_bounds: vb, colour_bound: cb, within_bounds: within }
}
