mod common;

use std::collections::BTreeSet;

use dsn_core::classify::{in_c_lambda_delta, Orientation};
use dsn_core::dp::{brute_force_solve, build_table, check_entry, entry_type, fixed_path_family, DpOptions};
use dsn_core::graph::{minimalize, EdgeId, LocalDigraph, SolutionNetwork, VertexId};
use dsn_core::structure::{core_decomposition, treewidth_exact, TreeDecomposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Pairs `(w, nodes)` where `nodes` is a subtree attached to the rest only via `w`:
/// the whole tree for every `w`, and both sides of every tree edge.
fn attached_subtrees(td: &TreeDecomposition) -> Vec<(usize, Vec<usize>)> {
    let k = td.bags.len();
    let mut out: Vec<(usize, Vec<usize>)> = (0..k).map(|w| (w, (0..k).collect())).collect();
    for &(a, b) in &td.edges {
        for (w, cut) in [(a, b), (b, a)] {
            let mut seen = vec![false; k];
            seen[w] = true;
            seen[cut] = true;
            let mut stack = vec![w];
            let mut nodes = vec![w];
            while let Some(x) = stack.pop() {
                for &(p, q) in &td.edges {
                    let y = if p == x {
                        q
                    } else if q == x {
                        p
                    } else {
                        continue;
                    };
                    if !seen[y] {
                        seen[y] = true;
                        nodes.push(y);
                        stack.push(y);
                    }
                }
            }
            out.push((w, nodes));
        }
    }
    out
}

#[test]
fn attached_subnetworks_are_matched_by_table_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut instances, mut checked) = (0, 0);
    while instances < 40 {
        let n = rng.random_range(4..=7);
        let m = rng.random_range(n..=12);
        let k = rng.random_range(2..=n.min(4));
        let g = random_host(&mut rng, n, m, 0..=6);
        let h = random_caterpillar(&mut rng, n, k, 2, 1);
        let Some((opt, _)) = brute_force_solve(&g, &h).unwrap() else {
            continue;
        };
        let sol = minimalize(&opt, &h).unwrap();
        let verts = sol.vertices();
        let (tw, td) = treewidth_exact(&LocalDigraph::from_network(&sol)).unwrap();
        let omega = tw.max(1);
        if verts.len() < omega + 1 {
            continue;
        }
        let td = td.smooth(omega, verts.len()).unwrap();
        assert!(td.is_smooth(omega));
        let table = build_table(&g, &h, omega, &DpOptions::default()).unwrap();
        let stars = table.decomposition().clone();
        let paths = fixed_path_family(&sol, &h).unwrap();
        for (w, nodes) in attached_subtrees(&td) {
            let mut keep = vec![false; g.vertex_count()];
            for &x in nodes.iter().flat_map(|&node| &td.bags[node]) {
                keep[verts[x].index()] = true;
            }
            let part = sol.induced(&keep);
            let u: Vec<VertexId> = td.bags[w].iter().map(|&x| verts[x]).collect();
            let key = entry_type(&part, &u, &h, &stars, &paths)
                .unwrap()
                .expect("attached subnetwork has a valid type");
            assert!(check_entry(&part, &key, &h, &stars).unwrap());
            let best = table.best_for(&key).unwrap().expect("entry is filled");
            assert!(check_entry(&best, &key, &h, &stars).unwrap());
            assert!(
                best.cost() <= part.cost(),
                "entry costs {} > {}",
                best.cost(),
                part.cost()
            );
            checked += 1;
        }
        instances += 1;
    }
    assert!(checked >= 200, "{checked}");
}

fn in_degree_claim(sol: &SolutionNetwork<'_>, core: &SolutionNetwork<'_>, o: Orientation) {
    let host = sol.host();
    let mut by_end: Vec<Vec<EdgeId>> = vec![Vec::new(); host.vertex_count()];
    for &e in sol.edges() {
        let edge = host.edge(e);
        let v = match o {
            Orientation::Out => edge.head,
            Orientation::In => edge.tail,
        };
        by_end[v.index()].push(e);
    }
    for (v, es) in by_end.iter().enumerate() {
        if es.len() >= 2 {
            for &e in es {
                assert!(
                    core.contains_edge(e),
                    "edge {e:?} at {} is outside the core",
                    host.name(VertexId::new(v))
                );
            }
        }
    }
}

#[test]
fn shared_heads_lie_in_the_core() {
    let mut rng = ChaCha8Rng::seed_from_u64(312);
    let mut checked = 0;
    while checked < 150 {
        let n = rng.random_range(5..=10);
        let m = rng.random_range(n..=20);
        let k = rng.random_range(3..=n.min(6));
        let g = random_host(&mut rng, n, m, 0..=8);
        let h = random_caterpillar(&mut rng, n, k, 2, 1);
        let Some(cert) = in_c_lambda_delta(&h, 2, 1).unwrap() else {
            continue;
        };
        let Some((opt, _)) = brute_force_solve(&g, &h).unwrap() else {
            continue;
        };
        let sol = minimalize(&opt, &h).unwrap();
        let split = core_decomposition(&sol, &h, &cert).unwrap();
        split.validate(&sol, 2, 1).unwrap();
        in_degree_claim(&sol, &split.core, cert.orientation);
        checked += 1;
    }
}

#[test]
fn minimal_star_solutions_are_arborescences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.random_range(4..=10);
        let m = rng.random_range(n..=22);
        let g = random_host(&mut rng, n, m, 0..=5);
        let leaves = rng.random_range(1..n.min(6));
        let out = rng.random_bool(0.5);
        let star = out_star(leaves);
        let h = if out { star } else { star.reversed() };
        let Some((opt, _)) = brute_force_solve(&g, &h).unwrap() else {
            continue;
        };
        let sol = minimalize(&opt, &h).unwrap();
        let host = sol.host();
        let root = g.vertex("v0").unwrap();
        let terminals: BTreeSet<VertexId> = h.bind(&g).unwrap().into_iter().collect();
        let (mut indeg, mut outdeg) = (vec![0; n], vec![0; n]);
        for &e in sol.edges() {
            let edge = host.edge(e);
            if out {
                indeg[edge.head.index()] += 1;
                outdeg[edge.tail.index()] += 1;
            } else {
                indeg[edge.tail.index()] += 1;
                outdeg[edge.head.index()] += 1;
            }
        }
        for v in sol.vertices() {
            let i = v.index();
            if v == root {
                assert_eq!(indeg[i], 0);
            } else {
                assert_eq!(indeg[i], 1, "vertex {} of a minimal star solution", host.name(v));
                if outdeg[i] == 0 {
                    assert!(terminals.contains(&v), "leaf {} is not a terminal", host.name(v));
                }
            }
        }
        checked += 1;
    }
}
