//! Invariants as property tests.

use std::collections::BTreeMap;

use proptest::prelude::*;
use transversal::edge_colouring::{is_proper, vizing_colouring, vizing_matching};
use transversal::embed::{blowup_embed, SplitPlan, Targets};
use transversal::generators::{bipartite_host, cyclic_triangle_collection_sized, one_expansion, random_collection, GenSpec};
use transversal::matching::max_bipartite_matching;
use transversal::oracle::{exact_transversal_embed, monochromatic_triangles, SearchBudget};
use transversal::regularity::ledger::{int, rational_from_f64};
use transversal::regularity::{ledger_slice, ParameterLedger, RegularityClass, SliceRule};
use transversal::{separability_certificate, verify_transversal_embedding, GraphCollection, PatternGraph, TransversalEmbedding};

fn graph(max_n: usize) -> impl Strategy<Value = PatternGraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let mut edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort_unstable();
            edges.dedup();
            PatternGraph::new(n, edges).unwrap()
        })
    })
}

/// Brute-force check, written independently of the library verifier.
fn valid(gc: &GraphCollection, h: &PatternGraph, e: &TransversalEmbedding) -> bool {
    let distinct = |xs: &[usize], bound: usize| {
        let mut s = xs.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == xs.len() && xs.iter().all(|&x| x < bound)
    };
    e.tau.len() == h.n()
        && e.sigma.len() == h.edge_count()
        && distinct(&e.tau, gc.n())
        && distinct(&e.sigma, gc.colour_count())
        && h.edges().iter().zip(&e.sigma).all(|(&(x, y), &c)| gc.has_edge(c, e.tau[x], e.tau[y]))
}

fn brute_matching(n_right: usize, adj: &[Vec<usize>]) -> usize {
    // best over all ways to leave left vertices unmatched, by recursion
    fn go(i: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = go(i + 1, adj, used);
        for &r in &adj[i] {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + go(i + 1, adj, used));
                used[r] = false;
            }
        }
        best
    }
    go(0, adj, &mut vec![false; n_right])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verifier_agrees_with_brute_force(
        n in 3usize..7, k in 1usize..6, density in 0.2f64..1.0, seed in any::<u64>(),
        tau in proptest::collection::vec(0usize..7, 3), sigma in proptest::collection::vec(0usize..6, 2),
    ) {
        let gc = random_collection(&GenSpec::random(n, k, density, seed));
        let h = PatternGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let e = TransversalEmbedding { tau, sigma };
        prop_assert_eq!(verify_transversal_embedding(&gc, &h, &e).accepted, valid(&gc, &h, &e));
    }

    #[test]
    fn oracle_witnesses_are_valid_and_budget_monotone(n in 3usize..7, density in 0.3f64..1.0, seed in any::<u64>(), h in graph(4)) {
        let gc = random_collection(&GenSpec::random(n, h.edge_count().max(1), density, seed));
        let small = exact_transversal_embed(&gc, &h, &BTreeMap::new(), &SearchBudget::nodes(50));
        let big = exact_transversal_embed(&gc, &h, &BTreeMap::new(), &SearchBudget::default());
        if let Some(e) = big.found() {
            prop_assert!(valid(&gc, &h, e));
        }
        if small.is_feasible() {
            prop_assert!(big.is_feasible());
        }
        if small.is_infeasible() {
            prop_assert!(big.is_infeasible());
        }
    }

    #[test]
    fn generators_are_seeded(n in 2usize..12, k in 1usize..6, density in 0.0f64..1.0, seed in any::<u64>()) {
        let a = random_collection(&GenSpec::random(n, k, density, seed));
        let b = random_collection(&GenSpec::random(n, k, density, seed));
        prop_assert!(a.same_edges(&b));
        let c = cyclic_triangle_collection_sized(n, k, seed);
        let d = cyclic_triangle_collection_sized(n, k, seed);
        prop_assert!(c.same_edges(&d));
    }

    #[test]
    fn cyclic_collections_have_no_monochromatic_triangle(n in 3usize..14, k in 1usize..8, seed in any::<u64>()) {
        let gc = cyclic_triangle_collection_sized(n, k, seed);
        prop_assert!(monochromatic_triangles(&gc).iter().all(|&t| t == 0));
    }

    #[test]
    fn one_expansion_counts(h in graph(8), t in 0usize..4) {
        let g = one_expansion(&h, &vec![t; h.edge_count()]);
        prop_assert_eq!(g.n(), h.n() + t * h.edge_count());
        prop_assert_eq!(g.edge_count(), t * h.edge_count());
        // with one new vertex per edge the result is linear: two edges share at most one vertex
        let edges: Vec<[usize; 3]> = g.edges().copied().collect();
        for (i, a) in edges.iter().enumerate() {
            for b in &edges[i + 1..] {
                let shared = a.iter().filter(|v| b.contains(v)).count();
                let limit = if t <= 1 { 1 } else { 2 };
                prop_assert!(shared <= limit);
            }
        }
    }

    #[test]
    fn balanced_colouring_is_proper_and_balanced(h in graph(10), left in 0usize..10) {
        if let Some(side) = h.balanced_two_colouring(left) {
            prop_assert_eq!(side.iter().filter(|&&s| s == 0).count(), left);
            prop_assert!(h.edges().iter().all(|&(u, v)| side[u] != side[v]));
        }
    }

    #[test]
    fn vizing_is_proper_with_delta_plus_one_colours(h in graph(12)) {
        let col = vizing_colouring(&h);
        prop_assert!(is_proper(&h, &col));
        prop_assert!(col.iter().all(|&c| c <= h.max_degree()));
        let m = vizing_matching(&h);
        prop_assert!(m.len() >= h.edge_count().div_ceil(h.max_degree() + 1));
    }

    #[test]
    fn hopcroft_karp_is_maximum(n_left in 0usize..7, n_right in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 49)) {
        let adj: Vec<Vec<usize>> = (0..n_left).map(|l| (0..n_right).filter(|&r| bits[l * 7 + r]).collect()).collect();
        let m = max_bipartite_matching(n_right, &adj);
        prop_assert_eq!(m.size, brute_matching(n_right, &adj));
        for (l, r) in m.left.iter().enumerate() {
            if let Some(r) = r {
                prop_assert!(adj[l].contains(r));
                prop_assert_eq!(m.right[*r], Some(l));
            }
        }
    }

    #[test]
    fn proportional_slice_scales_exactly(num in 1i64..20, den in 1i64..20) {
        let alpha = num_rational::BigRational::new(num.min(den).into(), den.into());
        let l = ParameterLedger::from_f64(64.0, 0.01, 0.3, 0.5, RegularityClass::Super);
        let s = ledger_slice(&l, &SliceRule::Proportional { alpha: alpha.clone() }).unwrap();
        prop_assert_eq!(&s.eps * &alpha, rational_from_f64(0.01));
        prop_assert_eq!(&s.d * int(2), rational_from_f64(0.3));
        prop_assert_eq!(s.lineage.len(), 1);
    }

    #[test]
    fn separability_certificates_are_valid(h in graph(12), mu in 0.1f64..0.9) {
        if let Some(c) = separability_certificate(&h, mu) {
            prop_assert!(c.is_valid_for(&h));
        }
    }

    #[test]
    fn blowup_successes_are_structurally_valid(seed in 0u64..1000, density in 0.5f64..1.0) {
        let side = 8;
        let host = bipartite_host(side, density, seed);
        let h = PatternGraph::new(2 * side, (0..2 * side).map(|i| (i, (i + 1) % (2 * side)))).unwrap();
        let phi: Vec<usize> = (0..2 * side).map(|v| v % 2).collect();
        if let Ok(out) = blowup_embed(&host, &h, &phi, &Targets::new(), &SplitPlan::default(), seed) {
            let mut seen = out.tau.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), 2 * side);
            for (x, &v) in out.tau.iter().enumerate() {
                prop_assert!(host.clusters[phi[x]].contains(&v));
            }
            for &(x, y) in h.edges() {
                prop_assert!(host.adj[out.tau[x]].contains(out.tau[y]));
            }
        }
    }
}
