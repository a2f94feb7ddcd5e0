#![allow(dead_code)]

use std::collections::BTreeSet;

use dsn_core::graph::{Cost, LocalDigraph, Pattern, WeightedDigraph};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Simple digraph with exactly `m` random edges and costs in `costs`.
pub fn random_host(rng: &mut ChaCha8Rng, n: usize, m: usize, costs: std::ops::RangeInclusive<Cost>) -> WeightedDigraph {
    let m = m.min(n * (n - 1));
    let mut pairs = BTreeSet::new();
    while pairs.len() < m {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            pairs.insert((a, b));
        }
    }
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(a, b)| (a, b, rng.random_range(costs.clone())))
        .collect();
    WeightedDigraph::from_indexed(names(n), &edges).unwrap()
}

/// Random `λ₀`-caterpillar with `λ₀ ≤ lambda` on `k` terminals, plus up to `delta`
/// extra demands, placed on random distinct host vertices `0..n`.
pub fn random_caterpillar(rng: &mut ChaCha8Rng, n: usize, k: usize, lambda: usize, delta: usize) -> Pattern {
    let mut hosts: Vec<usize> = (0..n).collect();
    hosts.shuffle(rng);
    let terms: Vec<String> = hosts[..k].iter().map(|v| format!("v{v}")).collect();
    let lambda0 = rng.random_range(1..=lambda.min(k - 1).max(1));
    let out = rng.random_bool(0.5);
    let mut demands = BTreeSet::new();
    for i in 1..lambda0 {
        demands.insert((i - 1, i));
    }
    for leaf in lambda0..k {
        let root = rng.random_range(0..lambda0);
        demands.insert(if out { (root, leaf) } else { (leaf, root) });
    }
    for _ in 0..rng.random_range(0..=delta) {
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        if a != b {
            demands.insert((a, b));
        }
    }
    let demands: Vec<_> = demands.into_iter().collect();
    Pattern::from_indexed(terms, &demands).unwrap()
}

/// Random pattern with `k` terminals on host vertices `0..k` and up to `d` demands;
/// with `cyclic`, every demand is also added in reverse with probability one half.
pub fn random_pattern(rng: &mut ChaCha8Rng, k: usize, d: usize, cyclic: bool) -> Pattern {
    let mut demands = BTreeSet::new();
    let count = rng.random_range(1..=d.min(k * (k - 1)));
    while demands.len() < count {
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        if a != b {
            demands.insert((a, b));
            if cyclic && demands.len() < d && rng.random_bool(0.5) {
                demands.insert((b, a));
            }
        }
    }
    let demands: Vec<_> = demands.into_iter().collect();
    Pattern::from_indexed(names(k), &demands).unwrap()
}

pub fn directed_cycle(len: usize) -> Pattern {
    let arcs: Vec<_> = (0..len).map(|i| (i, (i + 1) % len)).collect();
    Pattern::from_indexed(names(len), &arcs).unwrap()
}

pub fn out_star(leaves: usize) -> Pattern {
    let arcs: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
    Pattern::from_indexed(names(leaves + 1), &arcs).unwrap()
}

/// Out-star with `leaves` leaves, the first `q - 1` of them joined back to the root.
pub fn q_rst(q: usize, leaves: usize) -> Pattern {
    let mut arcs: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
    arcs.extend((1..q).map(|l| (l, 0)));
    Pattern::from_indexed(names(leaves + 1), &arcs).unwrap()
}

/// Union of `d` random paths that all follow one hidden vertex order, with repeated
/// arcs kept.
pub fn random_path_union(rng: &mut ChaCha8Rng, n: usize, d: usize) -> LocalDigraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for _ in 0..d {
        let len = rng.random_range(2..=n);
        let mut picks: Vec<usize> = (0..n).collect();
        picks.shuffle(rng);
        picks.truncate(len);
        picks.sort_unstable();
        arcs.extend(picks.windows(2).map(|w| (order[w[0]], order[w[1]])));
    }
    LocalDigraph::unlabelled(n, arcs).unwrap()
}

/// Random strongly connected blobs (a cycle plus chords each) joined by forward arcs
/// and stray backward arcs that merge some blobs.
pub fn random_scc_rich(rng: &mut ChaCha8Rng, max_n: usize) -> LocalDigraph {
    let blobs = rng.random_range(2..=4);
    let mut ranges = Vec::new();
    let mut n = 0;
    for _ in 0..blobs {
        let size = rng.random_range(1..=4).min(max_n.saturating_sub(n)).max(1);
        ranges.push(n..n + size);
        n += size;
    }
    let mut arcs = Vec::new();
    for r in &ranges {
        let vs: Vec<usize> = r.clone().collect();
        if vs.len() > 1 {
            for i in 0..vs.len() {
                arcs.push((vs[i], vs[(i + 1) % vs.len()]));
            }
            for _ in 0..rng.random_range(0..=vs.len()) {
                let (a, b) = (*vs.choose(rng).unwrap(), *vs.choose(rng).unwrap());
                if a != b {
                    arcs.push((a, b));
                }
            }
        }
    }
    for _ in 0..rng.random_range(blobs..=2 * blobs + 2) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a < b || (a > b && rng.random_bool(0.1)) {
            arcs.push((a, b));
        }
    }
    LocalDigraph::unlabelled(n, arcs).unwrap()
}
