//! Colour absorbers: for embedded host edges `Z`, disjoint colour sets `A`
//! and `B` such that `A` plus any `l` colours of `B` colour `Z` perfectly.

use serde::{Deserialize, Serialize};

use super::{EmbedFailure, FailureReason, SplitPlan};
use crate::collection::{ColourId, GraphCollection, VertexId};
use crate::matching::max_bipartite_matching;
use crate::rng;
use crate::templates::Template;

const STAGE: &str = "build_absorber";

/// One absorber to build: host edges `z` on `R`-edge `edge`, colours drawn
/// from `pool`, `ell` flexible slots and `|B| = b_size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberRequest {
    pub edge: usize,
    pub z: Vec<(VertexId, VertexId)>,
    pub pool: Vec<ColourId>,
    pub ell: usize,
    pub b_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlexCheck {
    pub exhaustive: bool,
    pub subsets_checked: u64,
    pub all_passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberEdge {
    pub edge: usize,
    pub z: Vec<(VertexId, VertexId)>,
    pub a: Vec<ColourId>,
    pub b: Vec<ColourId>,
    pub ell: usize,
    pub check: FlexCheck,
    pub attempts: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorber {
    pub edges: Vec<AbsorberEdge>,
}

impl AbsorberEdge {
    /// Colours `A` plus `leftover` onto `z` bijectively, one per host edge, if
    /// `leftover` has `ell` colours of `B` and a perfect matching exists.
    pub fn close(&self, host: &GraphCollection, leftover: &[ColourId]) -> Option<Vec<ColourId>> {
        if leftover.len() != self.ell || leftover.iter().any(|c| !self.b.contains(c)) {
            return None;
        }
        let colours: Vec<ColourId> = self.a.iter().chain(leftover).copied().collect();
        perfect(host, &self.z, &colours)
    }
}

fn perfect(host: &GraphCollection, z: &[(VertexId, VertexId)], colours: &[ColourId]) -> Option<Vec<ColourId>> {
    if colours.len() != z.len() {
        return None;
    }
    let adj: Vec<Vec<usize>> = z.iter().map(|&(u, v)| (0..colours.len()).filter(|&i| host.has_edge(colours[i], u, v)).collect()).collect();
    let m = max_bipartite_matching(colours.len(), &adj);
    m.is_left_perfect().then(|| m.left.iter().map(|i| colours[i.expect("perfect")]).collect())
}

/// `C(n, k)`, saturating.
fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Tests that `a` plus every `ell`-subset of `b` (all of them when there are at
/// most `limit`, else `samples` random ones) perfectly colours `z`.
pub fn flexibility_check(host: &GraphCollection, z: &[(VertexId, VertexId)], a: &[ColourId], b: &[ColourId], ell: usize, limit: u64, samples: usize, seed: u64) -> FlexCheck {
    let total = binomial(b.len(), ell);
    let test = |sub: &[ColourId]| {
        let colours: Vec<ColourId> = a.iter().chain(sub).copied().collect();
        perfect(host, z, &colours).is_some()
    };
    if total <= limit {
        let mut idx: Vec<usize> = (0..ell).collect();
        let mut checked = 0;
        loop {
            checked += 1;
            let sub: Vec<ColourId> = idx.iter().map(|&i| b[i]).collect();
            if !test(&sub) {
                return FlexCheck { exhaustive: true, subsets_checked: checked, all_passed: false };
            }
            if !next_combination(&mut idx, b.len()) {
                return FlexCheck { exhaustive: true, subsets_checked: checked, all_passed: true };
            }
        }
    }
    let mut r = rng::rng(seed);
    for s in 0..samples {
        let sub = rng::sample(b, ell, &mut r);
        if !test(&sub) {
            return FlexCheck { exhaustive: false, subsets_checked: s as u64 + 1, all_passed: false };
        }
    }
    FlexCheck { exhaustive: false, subsets_checked: samples as u64, all_passed: true }
}

/// One absorber per request: `B` uniformly random in the pool, the `ell`
/// elements of `z` with most colours in `B` left flexible, the rest matched
/// into the pool outside `B` to give `A`, then the flexibility check. A
/// failed check reseeds, up to `plan.retries` times.
pub fn build_absorber(t: &Template, requests: &[AbsorberRequest], plan: &SplitPlan, seed: u64) -> Result<Absorber, EmbedFailure> {
    let host = &t.host;
    let mut out = Absorber::default();
    for (q, req) in requests.iter().enumerate() {
        if req.ell > req.z.len() || req.z.len() - req.ell + req.b_size > req.pool.len() || req.ell > req.b_size {
            return Err(EmbedFailure::precondition(
                STAGE,
                format!("R-edge {}: |Z| = {}, l = {}, |B| = {} do not fit a pool of {}", req.edge, req.z.len(), req.ell, req.b_size, req.pool.len()),
                seed,
            ));
        }
        let thin = req.z.iter().position(|&(u, v)| (req.pool.iter().filter(|&&c| host.has_edge(c, u, v)).count() as f64) < plan.lambda3 * req.pool.len() as f64 - 1e-9);
        if let Some(i) = thin {
            return Err(EmbedFailure::precondition(STAGE, format!("R-edge {}: host edge {:?} lies in fewer than lambda3 |pool| colours", req.edge, req.z[i]), seed));
        }
        let mut done = None;
        for attempt in 0..plan.retries {
            let s = rng::derive2(seed, q as u64, attempt as u64);
            let mut r = rng::rng(s);
            let b = rng::sample(&req.pool, req.b_size, &mut r);
            let rest: Vec<ColourId> = req.pool.iter().copied().filter(|c| !b.contains(c)).collect();
            let rank = super::ranks(req.z.len(), &mut r);
            let mut order: Vec<usize> = (0..req.z.len()).collect();
            let bdeg = |i: usize| b.iter().filter(|&&c| host.has_edge(c, req.z[i].0, req.z[i].1)).count();
            order.sort_by_key(|&i| (std::cmp::Reverse(bdeg(i)), rank[i]));
            let fixed: Vec<usize> = order[req.ell..].to_vec();
            let adj: Vec<Vec<usize>> = fixed.iter().map(|&i| (0..rest.len()).filter(|&c| host.has_edge(rest[c], req.z[i].0, req.z[i].1)).collect()).collect();
            let m = max_bipartite_matching(rest.len(), &adj);
            if !m.is_left_perfect() {
                continue;
            }
            let a: Vec<ColourId> = m.left.iter().map(|c| rest[c.expect("perfect")]).collect();
            let check = flexibility_check(host, &req.z, &a, &b, req.ell, plan.absorber_exhaustive_limit, plan.absorber_samples, rng::derive(s, 1));
            if check.all_passed {
                done = Some(AbsorberEdge { edge: req.edge, z: req.z.clone(), a, b, ell: req.ell, check, attempts: attempt + 1 });
                break;
            }
        }
        match done {
            Some(e) => out.edges.push(e),
            None => return Err(EmbedFailure::new(STAGE, FailureReason::AbsorberUnverifiable { edge: req.edge }, seed).note(format!("{} attempts", plan.retries))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternGraph;
    use crate::regularity::{ParameterLedger, RegularityClass};
    use rand::Rng;
    use std::sync::Arc;

    fn template(gc: GraphCollection) -> Template {
        let n = gc.n() / 2;
        let k = gc.colour_count();
        let ledger = ParameterLedger::from_f64(n as f64, 0.05, 0.5, 0.5, RegularityClass::Super);
        Template::new(PatternGraph::new(2, [(0, 1)]).unwrap(), vec![(0..n).collect(), (n..2 * n).collect()], vec![(0..k).collect()], Arc::new(gc), ledger, true).unwrap()
    }

    fn matching_z(n: usize, count: usize) -> Vec<(usize, usize)> {
        (0..count).map(|i| (i, n + i)).collect()
    }

    #[test]
    fn binomials_and_combinations() {
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(5, 0), 1);
        let mut idx = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut idx, 5) {
            n += 1;
        }
        assert_eq!(n, 10);
    }

    #[test]
    fn complete_incidence_passes_exhaustively() {
        let t = template(GraphCollection::complete(12, 20));
        let req = AbsorberRequest { edge: 0, z: matching_z(6, 6), pool: (0..20).collect(), ell: 2, b_size: 8 };
        let abs = build_absorber(&t, &[req], &SplitPlan::default(), 4).unwrap();
        let e = &abs.edges[0];
        assert_eq!(e.a.len(), 4);
        assert!(e.a.iter().all(|c| !e.b.contains(c)));
        assert!(e.check.exhaustive && e.check.all_passed);
        assert_eq!(e.check.subsets_checked, 28);
        let colours = e.close(&t.host, &e.b[3..5]).unwrap();
        assert_eq!(colours.len(), 6);
    }

    #[test]
    fn zero_flexibility_is_a_system_of_distinct_colours() {
        let t = template(GraphCollection::complete(8, 6));
        let req = AbsorberRequest { edge: 0, z: matching_z(4, 4), pool: (0..6).collect(), ell: 0, b_size: 2 };
        let abs = build_absorber(&t, &[req], &SplitPlan::default(), 0).unwrap();
        let e = &abs.edges[0];
        assert_eq!(e.a.len(), 4);
        assert_eq!(e.check.subsets_checked, 1);
        assert!(e.close(&t.host, &[]).is_some());
    }

    #[test]
    fn random_dense_incidence_all_subsets() {
        for seed in 0..10 {
            let mut r = rng::rng(seed);
            let mut gc = GraphCollection::with_colours(12, 24);
            for c in 0..24 {
                for i in 0..6 {
                    if r.gen_bool(0.7) {
                        gc.add_edge(c, i, 6 + i).unwrap();
                    }
                }
            }
            let t = template(gc);
            let plan = SplitPlan { lambda3: 0.3, ..SplitPlan::default() };
            let req = AbsorberRequest { edge: 0, z: matching_z(6, 6), pool: (0..24).collect(), ell: 2, b_size: 8 };
            let abs = build_absorber(&t, &[req], &plan, seed).unwrap();
            let e = &abs.edges[0];
            // independent recheck of every subset
            let mut idx = vec![0, 1];
            loop {
                let sub: Vec<usize> = idx.iter().map(|&i| e.b[i]).collect();
                assert!(e.close(&t.host, &sub).is_some());
                if !next_combination(&mut idx, 8) {
                    break;
                }
            }
        }
    }

    #[test]
    fn sampled_mode_records_count() {
        let gc = GraphCollection::complete(4, 40);
        let f = flexibility_check(&gc, &[(0, 2), (1, 3), (0, 3), (1, 2)], &[0], &(1..40).collect::<Vec<_>>(), 3, 100, 50, 1);
        assert!(!f.exhaustive);
        assert_eq!(f.subsets_checked, 50);
        assert!(f.all_passed);
    }
}
