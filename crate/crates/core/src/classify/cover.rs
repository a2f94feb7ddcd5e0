use std::collections::HashMap;

use super::Orientation;
use crate::error::{DsnError, Result};
use crate::graph::bits::{bit, ones, BitDigraph};
use crate::graph::Pattern;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Star {
    pub root: usize,
    pub leaves: Vec<usize>,
    pub orientation: Orientation,
}

/// Cover of the demands by in- and out-stars rooted in a minimum vertex cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    pub vertex_cover: Vec<usize>,
    pub tau: usize,
}

impl StarDecomposition {
    pub fn c(&self) -> usize {
        self.stars.len()
    }
}

/// Smallest vertex set touching every demand; the lexicographically least among the
/// smallest ones.
pub fn vertex_cover_number(h: &Pattern) -> Result<(usize, Vec<usize>)> {
    let n = h.terminal_count();
    DsnError::guard("pattern vertex count for vertex cover", 64, n)?;
    let demands = h.demands();
    for size in 0..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mask = combo.iter().fold(0u64, |m, &v| m | bit(v));
            if demands.iter().all(|&(s, t)| mask & (bit(s) | bit(t)) != 0) {
                return Ok((size, combo));
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("the full vertex set is always a cover")
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// One out-star and one in-star per cover vertex; edges inside the cover go to the
/// star of the endpoint that comes first in cover order.
pub fn star_decomposition(h: &Pattern) -> Result<StarDecomposition> {
    let (tau, cover) = vertex_cover_number(h)?;
    let mut rank = vec![usize::MAX; h.terminal_count()];
    for (i, &x) in cover.iter().enumerate() {
        rank[x] = i;
    }
    let mut stars = Vec::new();
    for &x in &cover {
        let mut out_leaves = Vec::new();
        let mut in_leaves = Vec::new();
        for &(s, t) in h.demands() {
            if s == x && (rank[t] == usize::MAX || rank[x] < rank[t]) {
                out_leaves.push(t);
            }
            if t == x && (rank[s] == usize::MAX || rank[x] < rank[s]) {
                in_leaves.push(s);
            }
        }
        if !out_leaves.is_empty() {
            stars.push(Star {
                root: x,
                leaves: out_leaves,
                orientation: Orientation::Out,
            });
        }
        if !in_leaves.is_empty() {
            in_leaves.sort_unstable();
            stars.push(Star {
                root: x,
                leaves: in_leaves,
                orientation: Orientation::In,
            });
        }
    }
    Ok(StarDecomposition {
        stars,
        vertex_cover: cover,
        tau,
    })
}

/// Maximum matching of the underlying undirected graph, exact by memoised search.
pub fn max_matching(h: &Pattern) -> Result<(usize, Vec<(usize, usize)>)> {
    let n = h.terminal_count();
    DsnError::guard("pattern vertex count for matching", 64, n)?;
    let mut adj = vec![0u64; n];
    for &(s, t) in h.demands() {
        adj[s] |= bit(t);
        adj[t] |= bit(s);
    }
    let full = if n == 64 { u64::MAX } else { bit(n) - 1 };
    let mut memo = HashMap::new();
    let size = matching_rec(&adj, full, &mut memo);
    let mut edges = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !bit(v);
        let here = matching_rec(&adj, mask, &mut memo);
        if matching_rec(&adj, rest, &mut memo) == here {
            mask = rest;
            continue;
        }
        let w = ones(adj[v] & rest)
            .find(|&w| 1 + matching_rec(&adj, rest & !bit(w), &mut memo) == here)
            .expect("matching reconstruction");
        edges.push(if h.has_demand(v, w) { (v, w) } else { (w, v) });
        mask = rest & !bit(w);
    }
    Ok((size, edges))
}

fn matching_rec(adj: &[u64], mask: u64, memo: &mut HashMap<u64, usize>) -> usize {
    // Drop vertices with no neighbour left; they never matter.
    let mut m = mask;
    for v in ones(mask) {
        if adj[v] & mask == 0 {
            m &= !bit(v);
        }
    }
    if m == 0 {
        return 0;
    }
    if let Some(&r) = memo.get(&m) {
        return r;
    }
    let v = m.trailing_zeros() as usize;
    let rest = m & !bit(v);
    let mut best = matching_rec(adj, rest, memo);
    for w in ones(adj[v] & rest) {
        best = best.max(1 + matching_rec(adj, rest & !bit(w), memo));
    }
    memo.insert(m, best);
    best
}

/// Hamiltonian path of a semicomplete digraph by repeated insertion.
pub fn hamiltonian_path_semicomplete(d: &BitDigraph, vertices: &[usize]) -> Result<Vec<usize>> {
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            if !d.has(u, v) && !d.has(v, u) {
                return Err(DsnError::InvalidArgument(format!(
                    "digraph is not semicomplete: no arc between {u} and {v}"
                )));
            }
        }
    }
    let mut path: Vec<usize> = Vec::with_capacity(vertices.len());
    for &v in vertices {
        if path.is_empty() || d.has(v, path[0]) {
            path.insert(0, v);
        } else if d.has(*path.last().unwrap(), v) {
            path.push(v);
        } else {
            let i = (0..path.len() - 1)
                .find(|&i| d.has(path[i], v) && d.has(v, path[i + 1]))
                .expect("semicomplete digraphs admit an insertion point");
            path.insert(i + 1, v);
        }
    }
    Ok(path)
}
