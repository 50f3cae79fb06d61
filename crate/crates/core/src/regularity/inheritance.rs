use serde::{Deserialize, Serialize};

use super::partition::RegularityPartition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InheritanceReport {
    pub p: f64,
    pub gamma: f64,
    /// Per colour cluster `j`, the vertex clusters `i` with `d_{R_j}(i) >= (p + gamma/2) L`.
    pub good_clusters: Vec<Vec<usize>>,
    /// Per vertex cluster `i`, the colour clusters `j` with the same property.
    pub good_colours: Vec<Vec<usize>>,
    /// Colour clusters in which at least `(1 - d^{1/4}) L` vertex clusters are good
    /// (the bound asks for all of them).
    pub colour_clusters_meeting_bound: usize,
    /// Vertex clusters that are good in at least `(1 - d^{1/4}) M` colour clusters.
    pub vertex_clusters_meeting_bound: usize,
    pub required_colour_clusters: f64,
    pub required_vertex_clusters: f64,
    pub holds: bool,
}

/// Counts how well a minimum-degree condition `delta(G_c) >= (p + gamma) n`
/// survives in the reduced collection of `partition`.
pub fn degree_inheritance(partition: &RegularityPartition, p: f64, gamma: f64) -> InheritanceReport {
    let l = partition.vertex_clusters.len();
    let m = partition.colour_clusters.len();
    let threshold = (p + gamma / 2.0) * l as f64;
    let mut good_clusters = vec![Vec::new(); m];
    let mut good_colours = vec![Vec::new(); l];
    for j in 0..m {
        for i in 0..l {
            let deg = partition.reduced[j].iter().filter(|&&(a, b)| a == i || b == i).count();
            if deg as f64 >= threshold - 1e-9 {
                good_clusters[j].push(i);
                good_colours[i].push(j);
            }
        }
    }
    let q = 1.0 - partition.spec.d.powf(0.25);
    let need_l = q * l as f64;
    let need_m = q * m as f64;
    let cc = good_clusters.iter().filter(|g| g.len() as f64 >= need_l - 1e-9).count();
    let vc = good_colours.iter().filter(|g| g.len() as f64 >= need_m - 1e-9).count();
    let holds = cc == m && vc == l;
    InheritanceReport {
        p,
        gamma,
        good_clusters,
        good_colours,
        colour_clusters_meeting_bound: cc,
        vertex_clusters_meeting_bound: vc,
        required_colour_clusters: need_m,
        required_vertex_clusters: need_l,
        holds,
    }
}
