use crate::error::{DsnError, Result};
use crate::graph::{scc_condensation, Layout, LocalDigraph};

pub const CUTWIDTH_MAX_VERTICES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutwidthResult {
    pub value: usize,
    pub layout: Layout,
}

/// Largest number of arcs crossing a prefix cut of `layout`.
pub fn cutwidth_of_layout(g: &LocalDigraph, layout: &Layout) -> Result<usize> {
    if layout.len() != g.n() {
        return Err(DsnError::InvalidLayout(format!(
            "layout has {} positions for {} vertices",
            layout.len(),
            g.n()
        )));
    }
    let layout = Layout::from_order(g.n(), layout.order().to_vec())?;
    let pos = layout.positions();
    // delta[p] changes the cut between positions p and p + 1.
    let mut delta = vec![0i64; g.n() + 2];
    for &(u, v) in &g.arcs {
        let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        if a != b {
            delta[a] += 1;
            delta[b] -= 1;
        }
    }
    let mut cut = 0i64;
    let mut best = 0i64;
    for d in delta {
        cut += d;
        best = best.max(cut);
    }
    Ok(best as usize)
}

/// Exact cutwidth by dynamic programming over vertex subsets (the layout prefixes).
pub fn cutwidth_exact(g: &LocalDigraph) -> Result<CutwidthResult> {
    exact_pinned(g, None, None)
}

/// Exact cutwidth over layouts that put `first` first and `last` last.
fn exact_pinned(g: &LocalDigraph, first: Option<usize>, last_vertex: Option<usize>) -> Result<CutwidthResult> {
    let n = g.n();
    DsnError::guard("cutwidth vertex count", CUTWIDTH_MAX_VERTICES, n)?;
    let mut adj = vec![vec![0i32; n]; n];
    let mut degree = vec![0i32; n];
    for &(u, v) in &g.arcs {
        if u != v {
            adj[u][v] += 1;
            adj[v][u] += 1;
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let full = (1usize << n) - 1;
    let mut cut = vec![0i32; 1 << n];
    let mut best = vec![i32::MAX; 1 << n];
    let mut last = vec![usize::MAX; 1 << n];
    best[0] = 0;
    let admissible = |s: usize| {
        s == 0 || (first.is_none_or(|f| s >> f & 1 == 1) && (s == full || last_vertex.is_none_or(|l| s >> l & 1 == 0)))
    };
    for s in 1..=full {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let inside: i32 = (0..n).filter(|&w| rest >> w & 1 == 1).map(|w| adj[v][w]).sum();
        cut[s] = cut[rest] + degree[v] - 2 * inside;
        if !admissible(s) {
            continue;
        }
        for w in (0..n).filter(|&w| s >> w & 1 == 1) {
            let prev = best[s & !(1 << w)];
            if prev < best[s] {
                best[s] = prev;
                last[s] = w;
            }
        }
        best[s] = best[s].max(cut[s]);
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        order.push(last[s]);
        s &= !(1 << last[s]);
    }
    order.reverse();
    Ok(CutwidthResult {
        value: best[full] as usize,
        layout: Layout::from_order(n, order)?,
    })
}

/// Smallest-index-first topological order as a layout.
pub fn topological_layout(g: &LocalDigraph) -> Result<Layout> {
    let order = g
        .topological_order()
        .ok_or_else(|| DsnError::InvalidArgument("graph has a directed cycle".into()))?;
    Layout::from_order(g.n(), order)
}

/// Components of the condensation in topological order. Each component is laid out
/// optimally together with the arcs that enter it, leave it or pass over it, modelled
/// as arcs to a pinned left and right end; components too large for that fall back to
/// an optimal layout of the component alone.
pub fn composed_layout(g: &LocalDigraph) -> Result<Layout> {
    let cond = scc_condensation(g);
    let mut order = Vec::with_capacity(g.n());
    for (c, comp) in cond.components.iter().enumerate() {
        let inner = if comp.len() + 2 <= CUTWIDTH_MAX_VERTICES {
            let (left, right) = (comp.len(), comp.len() + 1);
            let local = |v: usize| comp.iter().position(|&w| w == v).expect("vertex of the component");
            let mut arcs = g.induced(comp).arcs;
            for &(u, v) in &g.arcs {
                let (cu, cv) = (cond.component_of[u], cond.component_of[v]);
                if cu < c && cv > c {
                    arcs.push((left, right));
                } else if cu < c && cv == c {
                    arcs.push((left, local(v)));
                } else if cu == c && cv > c {
                    arcs.push((local(u), right));
                }
            }
            let framed = LocalDigraph::unlabelled(comp.len() + 2, arcs)?;
            let r = exact_pinned(&framed, Some(left), Some(right))?;
            r.layout.order()[1..=comp.len()].to_vec()
        } else {
            cutwidth_exact(&g.induced(comp))?.layout.order().to_vec()
        };
        order.extend(inner.into_iter().map(|i| comp[i]));
    }
    Layout::from_order(g.n(), order)
}

/// `(x, y)`: cutwidth of the condensation under its topological layout and the
/// largest exact cutwidth of a strongly connected component.
pub fn composition_bound(g: &LocalDigraph) -> Result<(usize, usize)> {
    let cond = scc_condensation(g);
    let d = cond.as_multigraph();
    let x = cutwidth_of_layout(&d, &Layout::identity(d.n()))?;
    let mut y = 0;
    for comp in &cond.components {
        y = y.max(cutwidth_exact(&g.induced(comp))?.value);
    }
    Ok((x, y))
}
