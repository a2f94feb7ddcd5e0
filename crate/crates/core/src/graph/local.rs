use std::collections::BTreeMap;

use super::digraph::WeightedDigraph;
use super::network::SolutionNetwork;
use crate::error::{DsnError, Result};

/// Compact directed multigraph on vertices `0..n`, used by the structural analyses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDigraph {
    pub labels: Vec<String>,
    pub arcs: Vec<(usize, usize)>,
}

impl LocalDigraph {
    pub fn new(labels: Vec<String>, arcs: Vec<(usize, usize)>) -> Result<Self> {
        let n = labels.len();
        if let Some(&(u, v)) = arcs.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(DsnError::InvalidArgument(format!(
                "arc ({u}, {v}) leaves the vertex range 0..{n}"
            )));
        }
        Ok(LocalDigraph { labels, arcs })
    }

    /// Unlabelled graph; vertices are named by index.
    pub fn unlabelled(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), arcs)
    }

    pub fn from_graph(g: &WeightedDigraph) -> Self {
        LocalDigraph {
            labels: g.names().to_vec(),
            arcs: g.edges().iter().map(|e| (e.tail.index(), e.head.index())).collect(),
        }
    }

    /// Restriction to the vertices of the network, in host id order.
    pub fn from_network(n: &SolutionNetwork<'_>) -> Self {
        let host = n.host();
        let verts = n.vertices();
        let mut pos = vec![usize::MAX; host.vertex_count()];
        for (i, v) in verts.iter().enumerate() {
            pos[v.index()] = i;
        }
        LocalDigraph {
            labels: verts.iter().map(|&v| host.name(v).to_string()).collect(),
            arcs: n
                .edges()
                .iter()
                .map(|&e| {
                    let edge = host.edge(e);
                    (pos[edge.tail.index()], pos[edge.head.index()])
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for &(u, v) in &self.arcs {
            adj[u].push(v);
        }
        adj
    }

    /// Induced subgraph on `keep` (listed order becomes the new order).
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        LocalDigraph {
            labels: keep.iter().map(|&v| self.labels[v].clone()).collect(),
            arcs: self
                .arcs
                .iter()
                .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
                .map(|&(u, v)| (pos[u], pos[v]))
                .collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        LocalDigraph {
            labels: self.labels.clone(),
            arcs: self.arcs.iter().map(|&(u, v)| (v, u)).collect(),
        }
    }

    /// A topological order, or `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut indeg = vec![0usize; n];
        for &(u, v) in &self.arcs {
            if u == v {
                return None;
            }
            indeg[v] += 1;
        }
        let adj = self.out_adjacency();
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

/// Strongly connected components contracted to single vertices.
///
/// Components are numbered in topological order, so every arc goes from a lower to a
/// higher id. Arcs keep their multiplicity; arcs inside a component are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condensation {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub arcs: BTreeMap<(usize, usize), usize>,
}

impl Condensation {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.arcs.get(&(a, b)).copied().unwrap_or(0)
    }

    /// The condensation as a multigraph (one arc per multiplicity unit).
    pub fn as_multigraph(&self) -> LocalDigraph {
        let mut arcs = Vec::new();
        for (&(a, b), &m) in &self.arcs {
            arcs.extend(std::iter::repeat_n((a, b), m));
        }
        LocalDigraph {
            labels: (0..self.components.len()).map(|c| format!("C{c}")).collect(),
            arcs,
        }
    }
}

pub fn scc_condensation(g: &LocalDigraph) -> Condensation {
    let n = g.n();
    let adj = g.out_adjacency();
    // Iterative Tarjan; components come out in reverse topological order.
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    raw.push(comp);
                }
            }
        }
    }
    raw.reverse();
    let mut component_of = vec![0; n];
    for (c, comp) in raw.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let mut arcs = BTreeMap::new();
    for &(u, v) in &g.arcs {
        let (a, b) = (component_of[u], component_of[v]);
        if a != b {
            *arcs.entry((a, b)).or_insert(0) += 1;
        }
    }
    Condensation {
        component_of,
        components: raw,
        arcs,
    }
}

/// Vertex order of a linear layout: `order[p]` is the vertex at position `p + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    order: Vec<usize>,
}

impl Layout {
    pub fn from_order(n: usize, order: Vec<usize>) -> Result<Self> {
        if order.len() != n {
            return Err(DsnError::InvalidLayout(format!(
                "layout has {} positions for {n} vertices",
                order.len()
            )));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(DsnError::InvalidLayout(format!(
                    "vertex {v} placed twice or out of range"
                )));
            }
            seen[v] = true;
        }
        Ok(Layout { order })
    }

    pub fn identity(n: usize) -> Self {
        Layout {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based position of every vertex.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &v) in self.order.iter().enumerate() {
            pos[v] = p + 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condensation_of_dag_is_identity() {
        let g = LocalDigraph::unlabelled(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = scc_condensation(&g);
        assert_eq!(c.component_count(), 3);
        assert_eq!(c.arcs.values().sum::<usize>(), 3);
        assert!(c.arcs.values().all(|&m| m == 1));
        assert!(c.as_multigraph().is_acyclic());
    }

    #[test]
    fn condensation_of_cycle_is_single_vertex() {
        let g = LocalDigraph::unlabelled(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = scc_condensation(&g);
        assert_eq!(c.component_count(), 1);
        assert!(c.arcs.is_empty());
    }

    #[test]
    fn two_two_cycles_with_parallel_links() {
        // {0,1} and {2,3} are 2-cycles; 0->2 and 1->3 both go from the first to the second.
        let g = LocalDigraph::unlabelled(4, vec![(0, 1), (1, 0), (2, 3), (3, 2), (0, 2), (1, 3)]).unwrap();
        let c = scc_condensation(&g);
        assert_eq!(c.component_count(), 2);
        assert_eq!(c.arcs.len(), 1);
        let (&(a, b), &m) = c.arcs.iter().next().unwrap();
        assert_eq!(m, 2);
        assert_eq!(c.component_of[0], a);
        assert_eq!(c.component_of[2], b);
    }

    #[test]
    fn layout_validation() {
        assert!(Layout::from_order(3, vec![2, 0, 1]).is_ok());
        assert!(Layout::from_order(3, vec![2, 2, 1]).is_err());
        assert!(Layout::from_order(3, vec![0, 1]).is_err());
        assert_eq!(Layout::from_order(3, vec![2, 0, 1]).unwrap().positions(), vec![2, 3, 1]);
    }
}
