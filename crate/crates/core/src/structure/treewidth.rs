use std::collections::BTreeSet;

use crate::error::{DsnError, Result};
use crate::graph::LocalDigraph;

pub const TREEWIDTH_MAX_VERTICES: usize = 16;

/// Tree decomposition of the underlying undirected graph: `bags[w]` is the bag of
/// node `w` and `edges` are the tree edges between nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Checks that the nodes form a tree, every arc lies in a bag and the nodes whose
    /// bags contain a vertex form a non-empty connected subtree.
    pub fn validate(&self, g: &LocalDigraph) -> Result<()> {
        let bad = |msg: String| Err(DsnError::InvalidArgument(msg));
        let k = self.bags.len();
        if k == 0 {
            return if g.n() == 0 {
                Ok(())
            } else {
                bad("decomposition has no bags".into())
            };
        }
        if self.edges.len() + 1 != k || self.edges.iter().any(|&(a, b)| a >= k || b >= k || a == b) {
            return bad("node graph is not a tree".into());
        }
        let adj = self.neighbours();
        let connected = |keep: &dyn Fn(usize) -> bool| {
            let Some(start) = (0..k).find(|&w| keep(w)) else {
                return false;
            };
            let mut seen = vec![false; k];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(w) = stack.pop() {
                for &x in &adj[w] {
                    if keep(x) && !seen[x] {
                        seen[x] = true;
                        stack.push(x);
                    }
                }
            }
            (0..k).all(|w| !keep(w) || seen[w])
        };
        if !connected(&|_| true) {
            return bad("node graph is not a tree".into());
        }
        if self.bags.iter().flatten().any(|&v| v >= g.n()) {
            return bad("bag holds a vertex outside the graph".into());
        }
        for &(u, v) in &g.arcs {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return bad(format!("arc ({u}, {v}) lies in no bag"));
            }
        }
        for v in 0..g.n() {
            if !connected(&|w| self.bags[w].contains(&v)) {
                return bad(format!("bags holding vertex {v} are empty or disconnected"));
            }
        }
        Ok(())
    }

    /// An equivalent decomposition in which every bag has `width + 1` vertices and
    /// adjacent bags share exactly `width` of them. Vertices `0..universe` that occur
    /// in no bag may be added when the decomposition is a single small bag.
    pub fn smooth(&self, width: usize, universe: usize) -> Result<TreeDecomposition> {
        if width < self.width() {
            return Err(DsnError::InvalidArgument(format!(
                "cannot smooth a width-{} decomposition to width {width}",
                self.width()
            )));
        }
        if universe < width + 1 {
            return Err(DsnError::InvalidArgument(format!(
                "{universe} vertices cannot fill bags of size {}",
                width + 1
            )));
        }
        let mut bags: Vec<Option<BTreeSet<usize>>> =
            self.bags.iter().map(|b| Some(b.iter().copied().collect())).collect();
        if bags.is_empty() {
            bags.push(Some(BTreeSet::new()));
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); bags.len()];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        loop {
            let live: Vec<usize> = (0..bags.len()).filter(|&w| bags[w].is_some()).collect();
            let bag = |w: usize| bags[w].as_ref().expect("live node");
            let contract = live
                .iter()
                .find_map(|&x| adj[x].iter().find(|&&y| bag(x).is_subset(bag(y))).map(|&y| (x, y)));
            if let Some((x, y)) = contract {
                for z in std::mem::take(&mut adj[x]) {
                    adj[z].remove(&x);
                    if z != y {
                        adj[z].insert(y);
                        adj[y].insert(z);
                    }
                }
                bags[x] = None;
                continue;
            }
            let Some(&x) = live.iter().find(|&&x| bag(x).len() < width + 1) else {
                break;
            };
            let add = match adj[x].iter().next() {
                Some(&y) => *bag(y).difference(bag(x)).next().expect("neighbour is not a subset"),
                None => (0..universe)
                    .find(|v| !bag(x).contains(v))
                    .expect("universe is large enough"),
            };
            bags[x].as_mut().expect("live node").insert(add);
        }

        let live: Vec<usize> = (0..bags.len()).filter(|&w| bags[w].is_some()).collect();
        let mut index = vec![usize::MAX; bags.len()];
        let mut out_bags: Vec<BTreeSet<usize>> = Vec::new();
        for &w in &live {
            index[w] = out_bags.len();
            out_bags.push(bags[w].clone().expect("live node"));
        }
        let mut out_edges = Vec::new();
        for &x in &live {
            for &y in adj[x].iter().filter(|&&y| x < y) {
                let (a, b) = (&out_bags[index[x]], &out_bags[index[y]]);
                let gone: Vec<usize> = a.difference(b).copied().collect();
                let came: Vec<usize> = b.difference(a).copied().collect();
                let mut prev = index[x];
                let mut cur = a.clone();
                for (&r, &c) in gone.iter().zip(&came).take(gone.len() - 1) {
                    cur.remove(&r);
                    cur.insert(c);
                    out_bags.push(cur.clone());
                    let id = out_bags.len() - 1;
                    out_edges.push((prev, id));
                    prev = id;
                }
                out_edges.push((prev, index[y]));
            }
        }
        Ok(TreeDecomposition {
            bags: out_bags.into_iter().map(|b| b.into_iter().collect()).collect(),
            edges: out_edges,
        })
    }

    /// Whether all bags have `width + 1` vertices and adjacent bags share `width`.
    pub fn is_smooth(&self, width: usize) -> bool {
        self.bags.iter().all(|b| b.len() == width + 1)
            && self
                .edges
                .iter()
                .all(|&(a, b)| self.bags[a].iter().filter(|v| self.bags[b].contains(v)).count() == width)
    }
}

/// Exact treewidth of the underlying undirected graph with a decomposition of that width.
pub fn treewidth_exact(g: &LocalDigraph) -> Result<(usize, TreeDecomposition)> {
    let n = g.n();
    DsnError::guard("treewidth vertex count", TREEWIDTH_MAX_VERTICES, n)?;
    if n == 0 {
        return Ok((
            0,
            TreeDecomposition {
                bags: Vec::new(),
                edges: Vec::new(),
            },
        ));
    }
    let mut nb = vec![0u32; n];
    for &(u, v) in &g.arcs {
        if u != v {
            nb[u] |= 1 << v;
            nb[v] |= 1 << u;
        }
    }
    // Vertices outside `s ∪ {v}` reachable from `v` through `s`.
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut found = 0u32;
        while let Some(x) = stack.pop() {
            let mut m = nb[x] & !seen;
            seen |= m;
            found |= m & !s;
            m &= s;
            while m != 0 {
                let y = m.trailing_zeros() as usize;
                m &= m - 1;
                stack.push(y);
            }
        }
        found
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![i32::MAX; 1 << n];
    let mut pick = vec![usize::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        for v in (0..n).filter(|&v| s >> v & 1 == 1) {
            let rest = s & !(1 << v);
            let cand = tw[rest as usize].max(q(rest, v).count_ones() as i32);
            if cand < tw[s as usize] {
                tw[s as usize] = cand;
                pick[s as usize] = v;
            }
        }
    }
    // `pick[s]` is eliminated last among `s`; unwind to an elimination order.
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = pick[s as usize];
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();

    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags = Vec::with_capacity(n);
    let mut higher = Vec::with_capacity(n);
    let mut before = 0u32;
    for &v in &order {
        let later = q(before, v);
        let mut bag = vec![v];
        bag.extend((0..n).filter(|&w| later >> w & 1 == 1));
        bag.sort_unstable();
        bags.push(bag);
        higher.push(later);
        before |= 1 << v;
    }
    let mut edges = Vec::new();
    for (i, &later) in higher.iter().enumerate().take(n.saturating_sub(1)) {
        let parent = if later == 0 {
            i + 1
        } else {
            (0..n)
                .filter(|&w| later >> w & 1 == 1)
                .map(|w| pos[w])
                .min()
                .expect("non-empty")
        };
        edges.push((i, parent));
    }
    let width = tw[full as usize].max(0) as usize;
    let td = TreeDecomposition { bags, edges };
    debug_assert_eq!(td.width(), width);
    Ok((width, td))
}
