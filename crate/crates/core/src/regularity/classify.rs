use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::partite::PartiteIncidence;
use super::witness::{self, min_size, IrregularityWitness, Objective, SearchMeta, SearchOptions, WitnessOutcome};
use super::{ClassMode, DensitySpec, RegularityError};
use crate::collection::{ColourId, GraphCollection, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub mode: ClassMode,
    pub holds: bool,
    pub density: Ratio<i64>,
    pub density_ok: bool,
    pub witness: Option<IrregularityWitness>,
    pub search: Option<SearchMeta>,
    /// Vertices below the degree floor, with their colour-summed degree.
    pub low_vertices: Vec<(VertexId, u64)>,
    /// Colours below the edge floor, with their edge count.
    pub sparse_colours: Vec<(ColourId, u64)>,
}

/// Checks the collection on `(v1, v2, colours)` (all colours by default) against
/// the class named in `spec.mode`.
pub fn classify_collection(
    gc: &GraphCollection,
    v1: &[VertexId],
    v2: &[VertexId],
    colours: Option<&[ColourId]>,
    spec: &DensitySpec,
    opts: &SearchOptions,
) -> Result<ClassificationReport, RegularityError> {
    let all: Vec<ColourId> = (0..gc.colour_count()).collect();
    let colours = colours.unwrap_or(&all);
    let inc = PartiteIncidence::from_collection(gc, v1, v2, colours)?;
    let density = inc.density();
    let dens = witness::ratio_f64(&density);
    let (n1, n2, k) = (v1.len() as f64, v2.len() as f64, colours.len() as f64);

    let mut report = ClassificationReport {
        mode: spec.mode,
        holds: true,
        density,
        density_ok: true,
        witness: None,
        search: None,
        low_vertices: Vec::new(),
        sparse_colours: Vec::new(),
    };

    let outcome = match spec.mode {
        ClassMode::Weak | ClassMode::Regular | ClassMode::SemiSuper | ClassMode::Super => {
            Some(witness::irregularity_witness_in(&inc, spec.eps, opts))
        }
        ClassMode::HalfSuper => {
            let mins: Vec<usize> = inc.sizes().iter().map(|&l| min_size(spec.eps, l)).collect();
            Some(witness::search(&inc, &mins, &Objective::Below { d: spec.d }, opts))
        }
        ClassMode::UniformlyDense => {
            let eta = spec.eta.ok_or_else(|| RegularityError::InvalidParameter("uniformly-dense needs eta".into()))?;
            let n = gc.n() as f64;
            Some(witness::search(&inc, &[1, 1, 1], &Objective::Deficit { d: spec.d, slack: eta * n * n * n }, opts))
        }
    };
    if let Some(o) = outcome {
        report.search = Some(o.meta());
        if let WitnessOutcome::Found { witness, .. } = o {
            report.witness = Some(witness);
            report.holds = false;
        }
    }

    if matches!(spec.mode, ClassMode::Regular | ClassMode::SemiSuper | ClassMode::Super) && dens < spec.d - 1e-12 {
        report.density_ok = false;
        report.holds = false;
    }

    if matches!(spec.mode, ClassMode::SemiSuper | ClassMode::Super | ClassMode::HalfSuper) {
        let deg1 = inc.degrees(0);
        let deg2 = inc.degrees(1);
        for (i, &v) in v1.iter().enumerate() {
            if (deg1[i] as f64) < spec.d * n2 * k - 1e-9 {
                report.low_vertices.push((v, deg1[i]));
            }
        }
        for (i, &v) in v2.iter().enumerate() {
            if (deg2[i] as f64) < spec.d * n1 * k - 1e-9 {
                report.low_vertices.push((v, deg2[i]));
            }
        }
    }
    if matches!(spec.mode, ClassMode::Super | ClassMode::HalfSuper) {
        let degc = inc.degrees(2);
        for (i, &c) in colours.iter().enumerate() {
            if (degc[i] as f64) < spec.d * n1 * n2 - 1e-9 {
                report.sparse_colours.push((c, degc[i]));
            }
        }
    }
    if !report.low_vertices.is_empty() || !report.sparse_colours.is_empty() {
        report.holds = false;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_collection_is_super() {
        let v1: Vec<usize> = (0..4).collect();
        let v2: Vec<usize> = (4..8).collect();
        let gc = GraphCollection::complete_bipartite(8, 4, &v1, &v2);
        let r = classify_collection(&gc, &v1, &v2, None, &DensitySpec::new(0.1, 0.9, ClassMode::Super), &SearchOptions::default()).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn missing_colour_fails_super_only() {
        let v1: Vec<usize> = (0..4).collect();
        let v2: Vec<usize> = (4..8).collect();
        let mut gc = GraphCollection::complete_bipartite(8, 4, &v1, &v2);
        gc = gc.filtered(|c, _, _| c != 3);
        let semi = classify_collection(&gc, &v1, &v2, None, &DensitySpec::new(0.3, 0.5, ClassMode::SemiSuper), &SearchOptions::default()).unwrap();
        let sup = classify_collection(&gc, &v1, &v2, None, &DensitySpec::new(0.3, 0.5, ClassMode::Super), &SearchOptions::default()).unwrap();
        assert!(semi.witness.is_none());
        assert_eq!(sup.sparse_colours, vec![(3, 0)]);
        assert!(!sup.holds);
    }
}
