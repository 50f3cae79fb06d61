//! Searching for sub-tuples whose density strays from the whole.
//!
//! For fixed subsets of all parts but the last, the density of a sub-tuple is
//! linear in the choice of last-part subset, so for each size the extremes are
//! attained by the lightest or heaviest elements. The search therefore only
//! enumerates (or samples) the first `k - 1` subsets.

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::partite::{KGraph, PartiteIncidence};
use super::RegularityError;
use crate::par::{self, Exec};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchMeta {
    pub mode: SearchMode,
    /// Sub-tuple families examined (prefix choices).
    pub evaluated: u64,
    /// Sampled mode only: with 95% confidence, at most this fraction of random
    /// minimum-size prefixes extend to a witness (Hoeffding).
    pub hoeffding_upper: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Number of random prefixes drawn in sampled mode.
    pub budget: usize,
    pub seed: u64,
    pub exec: Exec,
    pub force_sampled: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { budget: 2000, seed: 0, exec: Exec::default(), force_sampled: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrregularityWitness {
    /// One vertex list per part (global ids).
    pub subsets: Vec<Vec<usize>>,
    pub density: Ratio<i64>,
    pub reference: Ratio<i64>,
    /// `density - reference`.
    pub deviation: Ratio<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Found { witness: IrregularityWitness, meta: SearchMeta },
    NoneFound { meta: SearchMeta },
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&IrregularityWitness> {
        match self {
            WitnessOutcome::Found { witness, .. } => Some(witness),
            WitnessOutcome::NoneFound { .. } => None,
        }
    }

    pub fn meta(&self) -> SearchMeta {
        match self {
            WitnessOutcome::Found { meta, .. } | WitnessOutcome::NoneFound { meta } => *meta,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Objective {
    /// `|d' - reference| >= eps`.
    Deviation { reference: Ratio<i64>, eps: f64 },
    /// `d' < d`.
    Below { d: f64 },
    /// `e < d * cells - slack`.
    Deficit { d: f64, slack: f64 },
}

impl Objective {
    fn violated(&self, sum: u64, cells: u64) -> bool {
        if cells == 0 {
            return false;
        }
        match self {
            Objective::Deviation { reference, eps } => {
                let dev = Ratio::new(sum as i64, cells as i64) - reference;
                ratio_f64(&dev).abs() >= eps - 1e-12
            }
            Objective::Below { d } => (sum as f64) < d * cells as f64 - 1e-9,
            Objective::Deficit { d, slack } => (sum as f64) < d * cells as f64 - slack - 1e-9,
        }
    }

    fn reference(&self) -> Ratio<i64> {
        match self {
            Objective::Deviation { reference, .. } => *reference,
            Objective::Below { d } | Objective::Deficit { d, .. } => f64_ratio(*d),
        }
    }
}

pub fn ratio_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn f64_ratio(x: f64) -> Ratio<i64> {
    Ratio::approximate_float(x).unwrap_or_else(|| Ratio::from_integer(0))
}

/// Smallest admissible subset size: `ceil(eps |V_i|)`, at least one.
pub fn min_size(eps: f64, len: usize) -> usize {
    ((eps * len as f64) - 1e-9).ceil().max(1.0) as usize
}

pub(crate) fn exhaustive_ok(inc: &PartiteIncidence) -> bool {
    let s = inc.sizes();
    match inc.k() {
        2 => s.iter().all(|&x| x <= 12),
        3 => s.iter().all(|&x| x <= 8),
        _ => false,
    }
}

/// Witness to `eps`-irregularity of the k-partite graph on `parts`, or none.
/// Exhaustive (and then a proof of regularity) for bipartite parts of at most
/// 12 or tripartite parts of at most 8; sampled otherwise.
pub fn irregularity_witness(g: &KGraph, parts: &[Vec<usize>], eps: f64, opts: &SearchOptions) -> Result<WitnessOutcome, RegularityError> {
    let inc = PartiteIncidence::from_kgraph(g, parts)?;
    Ok(irregularity_witness_in(&inc, eps, opts))
}

pub fn irregularity_witness_in(inc: &PartiteIncidence, eps: f64, opts: &SearchOptions) -> WitnessOutcome {
    let mins: Vec<usize> = inc.sizes().iter().map(|&l| min_size(eps, l)).collect();
    search(inc, &mins, &Objective::Deviation { reference: inc.density(), eps }, opts)
}

fn best_last(inc: &PartiteIncidence, prefix: &[Vec<usize>], min_last: usize, obj: &Objective) -> Option<Vec<usize>> {
    let w = inc.last_weights(prefix);
    let prod: u64 = prefix.iter().map(|p| p.len() as u64).product();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by_key(|&i| (w[i], i));
    let mut low = 0u64;
    let mut high = 0u64;
    let l = w.len();
    for t in 1..=l {
        low += w[order[t - 1]];
        high += w[order[l - t]];
        if t < min_last {
            continue;
        }
        let cells = prod * t as u64;
        if obj.violated(low, cells) {
            return Some(order[..t].to_vec());
        }
        if obj.violated(high, cells) {
            return Some(order[l - t..].to_vec());
        }
    }
    None
}

fn mask_list(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| mask >> i & 1 == 1).collect()
}

pub(crate) fn search(inc: &PartiteIncidence, mins: &[usize], obj: &Objective, opts: &SearchOptions) -> WitnessOutcome {
    let k = inc.k();
    let sizes = inc.sizes();
    if exhaustive_ok(inc) && !opts.force_sampled {
        let first = 1u64 << sizes[0];
        let hit = par::find_first(opts.exec, first as usize, |m0| {
            let m0 = m0 as u64;
            if (m0.count_ones() as usize) < mins[0] {
                return None;
            }
            let mut prefix = vec![mask_list(m0, sizes[0])];
            if k == 2 {
                return best_last(inc, &prefix, mins[1], obj).map(|last| {
                    prefix.push(last);
                    prefix
                });
            }
            prefix.push(Vec::new());
            for m1 in 1u64..(1u64 << sizes[1]) {
                if (m1.count_ones() as usize) < mins[1] {
                    continue;
                }
                prefix[1] = mask_list(m1, sizes[1]);
                if let Some(last) = best_last(inc, &prefix, mins[2], obj) {
                    prefix.push(last);
                    return Some(prefix);
                }
            }
            None
        });
        let evaluated = sizes[..k - 1].iter().map(|&s| 1u64 << s).product();
        let meta = SearchMeta { mode: SearchMode::Exhaustive, evaluated, hoeffding_upper: None };
        return match hit {
            Some(locals) => WitnessOutcome::Found { witness: finish(inc, shrink(inc, locals, mins, obj), obj), meta },
            None => WitnessOutcome::NoneFound { meta },
        };
    }
    let budget = opts.budget.max(1);
    let hit = par::find_first(opts.exec, budget, |s| {
        let mut r = rng::rng(rng::derive(opts.seed, s as u64));
        let prefix: Vec<Vec<usize>> = (0..k - 1)
            .map(|p| {
                let all: Vec<usize> = (0..sizes[p]).collect();
                let size = if s % 2 == 0 { mins[p] } else { r.gen_range(mins[p]..=sizes[p]) };
                let mut v = rng::sample(&all, size, &mut r);
                v.sort_unstable();
                v
            })
            .collect();
        best_last(inc, &prefix, mins[k - 1], obj).map(|last| {
            let mut out = prefix;
            out.push(last);
            (s, out)
        })
    });
    match hit {
        Some((s, locals)) => {
            let meta = SearchMeta { mode: SearchMode::Sampled, evaluated: s as u64 + 1, hoeffding_upper: None };
            WitnessOutcome::Found { witness: finish(inc, shrink(inc, locals, mins, obj), obj), meta }
        }
        None => {
            let h = ((20f64).ln() / (2.0 * budget as f64)).sqrt();
            WitnessOutcome::NoneFound { meta: SearchMeta { mode: SearchMode::Sampled, evaluated: budget as u64, hoeffding_upper: Some(h) } }
        }
    }
}

/// Drops single elements while the tuple still violates the objective.
fn shrink(inc: &PartiteIncidence, mut locals: Vec<Vec<usize>>, mins: &[usize], obj: &Objective) -> Vec<Vec<usize>> {
    let cells = |l: &Vec<Vec<usize>>| l.iter().map(|s| s.len() as u64).product::<u64>();
    loop {
        let mut changed = false;
        for p in 0..locals.len() {
            let mut i = 0;
            while i < locals[p].len() {
                if locals[p].len() <= mins[p] {
                    break;
                }
                let removed = locals[p].remove(i);
                if obj.violated(inc.count(&locals), cells(&locals)) {
                    changed = true;
                } else {
                    locals[p].insert(i, removed);
                    i += 1;
                }
            }
        }
        if !changed {
            return locals;
        }
    }
}

fn finish(inc: &PartiteIncidence, mut locals: Vec<Vec<usize>>, obj: &Objective) -> IrregularityWitness {
    for l in &mut locals {
        l.sort_unstable();
    }
    let density = inc.count_density(&locals);
    let reference = obj.reference();
    IrregularityWitness { subsets: inc.to_global(&locals), density, reference, deviation: density - reference }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blocks() -> (KGraph, Vec<Vec<usize>>) {
        // V1 = {0..8}, V2 = {8..16}; complete between first halves and between second halves
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in 8..12 {
                edges.push((a, b));
                edges.push((a + 4, b + 4));
            }
        }
        (KGraph::from_graph(16, edges), vec![(0..8).collect(), (8..16).collect()])
    }

    #[test]
    fn split_pair_has_witness() {
        let (g, parts) = two_blocks();
        let out = irregularity_witness(&g, &parts, 0.3, &SearchOptions::default()).unwrap();
        let w = out.witness().expect("irregular");
        assert!(ratio_f64(&w.deviation).abs() >= 0.3);
        assert_eq!(super::super::density::density(&g, &w.subsets).unwrap(), w.density);
        assert_eq!(out.meta().mode, SearchMode::Exhaustive);
    }

    #[test]
    fn complete_pair_is_regular() {
        let g = KGraph::from_graph(10, (0..5).flat_map(|a| (5..10).map(move |b| (a, b))));
        let out = irregularity_witness(&g, &[(0..5).collect(), (5..10).collect()], 0.1, &SearchOptions::default()).unwrap();
        assert!(out.witness().is_none());
    }

    #[test]
    fn sampled_mode_finds_block_witness() {
        let (g, parts) = two_blocks();
        let opts = SearchOptions { force_sampled: true, ..Default::default() };
        let out = irregularity_witness(&g, &parts, 0.3, &opts).unwrap();
        assert_eq!(out.meta().mode, SearchMode::Sampled);
        let w = out.witness().expect("sampling finds the block");
        assert!(ratio_f64(&w.deviation).abs() >= 0.3);
    }
}
