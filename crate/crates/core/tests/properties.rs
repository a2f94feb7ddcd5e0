mod common;

use dsn_core::classify::{decompose_or_obstruct, in_c_lambda_delta, in_c_star, Classification};
use dsn_core::dp::{oracle_cost, solve_dp};
use dsn_core::graph::{feasible, minimalize, scc_condensation, Layout, LocalDigraph, Pattern, SolutionNetwork};
use dsn_core::io::{parse_instance, to_json, InstanceDocument};
use dsn_core::structure::{cutwidth_exact, cutwidth_of_layout, treewidth_exact};
use dsn_core::DsnError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn local_graph(n: usize, arcs: Vec<(usize, usize)>) -> LocalDigraph {
    let arcs = arcs.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
    LocalDigraph::unlabelled(n, arcs).unwrap()
}

fn arcs_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=max_m)))
}

/// Successors of `v` by search over the demands of `h`.
fn reach(h: &Pattern, v: usize) -> Vec<bool> {
    let mut seen = vec![false; h.terminal_count()];
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &(a, b) in h.demands() {
            if a == x && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn closure_is_reachability_and_idempotent(seed in any::<u64>(), k in 2usize..7, d in 1usize..10, cyclic in any::<bool>()) {
        let h = random_pattern(&mut rng(seed), k, d, cyclic);
        let c = h.transitive_closure();
        for v in 0..h.terminal_count() {
            let seen = reach(&h, v);
            for (w, &reached) in seen.iter().enumerate() {
                if v != w {
                    prop_assert_eq!(c.has_demand(v, w), reached);
                }
            }
        }
        prop_assert_eq!(c.transitive_closure().demand_names(), c.demand_names());
    }

    #[test]
    fn condensation_is_acyclic_and_ordered((n, arcs) in arcs_strategy(10, 25)) {
        let g = local_graph(n, arcs);
        let cond = scc_condensation(&g);
        prop_assert!(cond.as_multigraph().is_acyclic());
        let mut covered = vec![0; n];
        for comp in &cond.components {
            for &v in comp {
                covered[v] += 1;
            }
        }
        prop_assert!(covered.iter().all(|&c| c == 1));
        for &(a, b) in &g.arcs {
            prop_assert!(cond.component_of[a] <= cond.component_of[b]);
        }
    }

    #[test]
    fn minimalize_is_feasible_and_tight(seed in any::<u64>(), n in 4usize..9, k in 2usize..5, d in 1usize..6) {
        let mut r = rng(seed);
        let m = r.random_range(n..=2 * n + 4);
        let g = random_host(&mut r, n, m, 0..=5);
        let h = random_pattern(&mut r, k.min(n), d, seed % 2 == 0);
        let full = SolutionNetwork::full(&g);
        prop_assume!(feasible(&full, &h).unwrap());
        let min = minimalize(&full, &h).unwrap();
        prop_assert!(feasible(&min, &h).unwrap());
        for &e in min.edges() {
            prop_assert!(!feasible(&min.without_edge(e), &h).unwrap());
        }
    }

    #[test]
    fn caterpillar_class_is_inside_star_class(seed in any::<u64>(), k in 2usize..7, d in 1usize..8, lambda in 1usize..3, delta in 0usize..3) {
        let h = random_pattern(&mut rng(seed), k, d, seed % 3 == 0);
        let plain = in_c_lambda_delta(&h, lambda, delta).unwrap();
        let star = in_c_star(&h, lambda, delta).unwrap();
        if plain.is_some() {
            prop_assert!(star.is_some());
        }
        prop_assert_eq!(in_c_lambda_delta(&h, lambda, delta).unwrap(), plain);
        prop_assert_eq!(in_c_star(&h, lambda, delta).unwrap(), star);
    }

    #[test]
    fn certified_patterns_have_no_large_obstruction(seed in any::<u64>(), k in 2usize..7, d in 1usize..8) {
        let h = random_pattern(&mut rng(seed), k, d, seed % 2 == 0);
        for (lambda, delta) in [(1, 0), (2, 0), (1, 1)] {
            if in_c_star(&h, lambda, delta).unwrap().is_none() {
                continue;
            }
            for alpha in (2 * delta + lambda + 1)..=3 {
                let c = decompose_or_obstruct(&h, alpha).unwrap();
                prop_assert!(!matches!(c, Classification::Obstruction(_)), "α = {} for ({}, {})", alpha, lambda, delta);
            }
        }
    }

    #[test]
    fn cutwidth_dominates_treewidth((n, arcs) in arcs_strategy(9, 20)) {
        let g = local_graph(n, arcs);
        let cw = cutwidth_exact(&g).unwrap();
        let (tw, td) = treewidth_exact(&g).unwrap();
        td.validate(&g).unwrap();
        prop_assert!(cw.value >= tw);
        prop_assert_eq!(cutwidth_of_layout(&g, &cw.layout).unwrap(), cw.value);
        prop_assert!(cutwidth_of_layout(&g, &Layout::identity(n)).unwrap() >= cw.value);
    }

    #[test]
    fn dp_is_exact_at_full_width_and_monotone(seed in any::<u64>(), n in 3usize..7, k in 2usize..4) {
        let mut r = rng(seed);
        let m = r.random_range(n..=(2 * n).min(12));
        let g = random_host(&mut r, n, m, 0..=9);
        let h = random_caterpillar(&mut r, n, k.min(n), 2, 1);
        let oracle = oracle_cost(&g, &h).unwrap();
        // Widths close to n - 1 (but below it) can exhaust the candidate budget.
        let mut costs = Vec::new();
        for w in [1, 2, n - 1] {
            match solve_dp(&g, &h, w) {
                Ok(s) => costs.push(s.map(|s| s.cost)),
                Err(DsnError::SearchBudget(_)) => return Err(TestCaseError::reject("budget")),
                Err(e) => panic!("{e}"),
            }
        }
        prop_assert_eq!(*costs.last().unwrap(), oracle);
        for pair in costs.windows(2) {
            if let (Some(a), Some(b)) = (pair[0], pair[1]) {
                prop_assert!(b <= a);
            }
            prop_assert!(pair[0].is_none() || pair[1].is_some());
        }
    }

    #[test]
    fn instance_documents_round_trip(seed in any::<u64>(), n in 2usize..8, k in 2usize..5) {
        let mut r = rng(seed);
        let m = r.random_range(1..=n * (n - 1));
        let g = random_host(&mut r, n, m, 0..=20);
        let h = random_pattern(&mut r, k.min(n), 4, true);
        let text = to_json(&InstanceDocument::from_instance(&g, &h));
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
        let (g2, h2) = back.to_instance().unwrap();
        prop_assert_eq!(g2.names(), g.names());
        prop_assert_eq!(h2.demand_names(), h.demand_names());
    }
}
