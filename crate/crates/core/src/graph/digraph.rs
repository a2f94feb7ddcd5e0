use std::collections::HashMap;
use std::fmt;

use crate::error::{DsnError, Result};

pub type Cost = u64;

/// Largest admissible edge cost.
pub const MAX_COST: Cost = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(index: usize) -> Self {
        VertexId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Edge ids follow the (tail-id, head-id) lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(u32);

impl EdgeId {
    pub fn new(index: usize) -> Self {
        EdgeId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: Cost,
}

/// Host graph with nonnegative integer edge costs, no loops and no parallel edges.
#[derive(Clone, Debug)]
pub struct WeightedDigraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    lookup: HashMap<(VertexId, VertexId), EdgeId>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl PartialEq for WeightedDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for WeightedDigraph {}

impl WeightedDigraph {
    /// Builds a graph from named vertices and `(tail, head, cost)` triples.
    pub fn new<V, S, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (S, S, Cost)>,
    {
        let names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), VertexId::new(i)).is_some() {
                return Err(DsnError::DuplicateVertex(name.clone()));
            }
        }
        let mut indexed = Vec::new();
        for (t, h, c) in edges {
            let (t, h): (String, String) = (t.into(), h.into());
            let ti = *index.get(&t).ok_or_else(|| DsnError::UnknownVertex(t.clone()))?;
            let hi = *index.get(&h).ok_or_else(|| DsnError::UnknownVertex(h.clone()))?;
            indexed.push((ti.index(), hi.index(), c));
        }
        Self::assemble(names, index, indexed)
    }

    /// Builds a graph from vertex names and index-based edges.
    pub fn from_indexed(names: Vec<String>, edges: &[(usize, usize, Cost)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), VertexId::new(i)).is_some() {
                return Err(DsnError::DuplicateVertex(name.clone()));
            }
        }
        for &(t, h, _) in edges {
            for v in [t, h] {
                if v >= names.len() {
                    return Err(DsnError::UnknownVertex(format!("#{v}")));
                }
            }
        }
        Self::assemble(names, index, edges.to_vec())
    }

    fn assemble(
        names: Vec<String>,
        index: HashMap<String, VertexId>,
        mut raw: Vec<(usize, usize, Cost)>,
    ) -> Result<Self> {
        raw.sort_by_key(|&(t, h, _)| (t, h));
        let n = names.len();
        let mut edges = Vec::with_capacity(raw.len());
        let mut lookup = HashMap::with_capacity(raw.len());
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (t, h, cost) in raw {
            if t == h {
                return Err(DsnError::SelfLoop(names[t].clone()));
            }
            if cost > MAX_COST {
                return Err(DsnError::CostOutOfRange {
                    tail: names[t].clone(),
                    head: names[h].clone(),
                    cost,
                });
            }
            let (tail, head) = (VertexId::new(t), VertexId::new(h));
            let id = EdgeId::new(edges.len());
            if lookup.insert((tail, head), id).is_some() {
                return Err(DsnError::DuplicateEdge(names[t].clone(), names[h].clone()));
            }
            edges.push(Edge { tail, head, cost });
            out_edges[t].push(id);
            in_edges[h].push(id);
        }
        Ok(WeightedDigraph {
            names,
            index,
            edges,
            lookup,
            out_edges,
            in_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId::new)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn require_vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex(name)
            .ok_or_else(|| DsnError::UnknownVertex(name.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId::new)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn find_edge(&self, tail: VertexId, head: VertexId) -> Option<EdgeId> {
        self.lookup.get(&(tail, head)).copied()
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.index()]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.index()]
    }

    pub fn total_cost(&self) -> Cost {
        self.edges.iter().map(|e| e.cost).sum()
    }

    /// Same vertices, every edge reversed.
    pub fn reversed(&self) -> Self {
        let raw: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.head.index(), e.tail.index(), e.cost))
            .collect();
        Self::assemble(self.names.clone(), self.index.clone(), raw).expect("reversal preserves graph invariants")
    }

    /// All vertices reachable from `s`, including `s`.
    pub fn reachable(&self, s: VertexId) -> Result<Vec<VertexId>> {
        if s.index() >= self.vertex_count() {
            return Err(DsnError::UnknownVertex(s.to_string()));
        }
        let seen = self.reach_filtered(s, |_| true);
        Ok(collect_marked(&seen))
    }

    pub(crate) fn reach_filtered(&self, s: VertexId, keep: impl Fn(EdgeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![s];
        seen[s.index()] = true;
        while let Some(v) = stack.pop() {
            for &e in self.out_edges(v) {
                let h = self.edges[e.index()].head;
                if !seen[h.index()] && keep(e) {
                    seen[h.index()] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }
}

pub(crate) fn collect_marked(marks: &[bool]) -> Vec<VertexId> {
    marks
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| VertexId::new(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> WeightedDigraph {
        WeightedDigraph::new(["s", "a", "t"], [("s", "a", 1), ("a", "t", 1)]).unwrap()
    }

    #[test]
    fn edges_sorted_by_endpoint_ids() {
        let g = WeightedDigraph::new(["a", "b", "c"], [("c", "a", 1), ("a", "c", 2), ("a", "b", 3)]).unwrap();
        let order: Vec<_> = g.edges().iter().map(|e| (g.name(e.tail), g.name(e.head))).collect();
        assert_eq!(order, vec![("a", "b"), ("a", "c"), ("c", "a")]);
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(matches!(
            WeightedDigraph::new(["a", "a"], Vec::<(&str, &str, Cost)>::new()),
            Err(DsnError::DuplicateVertex(_))
        ));
        assert!(matches!(
            WeightedDigraph::new(["a"], [("a", "a", 1)]),
            Err(DsnError::SelfLoop(_))
        ));
        assert!(matches!(
            WeightedDigraph::new(["a", "b"], [("a", "b", 1), ("a", "b", 2)]),
            Err(DsnError::DuplicateEdge(..))
        ));
        assert!(matches!(
            WeightedDigraph::new(["a", "b"], [("a", "x", 1)]),
            Err(DsnError::UnknownVertex(_))
        ));
        assert!(matches!(
            WeightedDigraph::new(["a", "b"], [("a", "b", MAX_COST + 1)]),
            Err(DsnError::CostOutOfRange { .. })
        ));
        assert!(WeightedDigraph::new(["a", "b"], [("a", "b", MAX_COST)]).is_ok());
    }

    #[test]
    fn reachability() {
        let g = path();
        let s = g.vertex("s").unwrap();
        assert_eq!(g.reachable(s).unwrap().len(), 3);
        let t = g.vertex("t").unwrap();
        assert_eq!(g.reachable(t).unwrap(), vec![t]);
        assert!(g.reachable(VertexId::new(7)).is_err());

        let cyc = WeightedDigraph::new(["a", "b", "c"], [("a", "b", 1), ("b", "c", 1), ("c", "a", 1)]).unwrap();
        for v in cyc.vertices() {
            assert_eq!(cyc.reachable(v).unwrap().len(), 3);
        }
    }

    #[test]
    fn reversal_flips_edges() {
        let g = path().reversed();
        let t = g.vertex("t").unwrap();
        assert_eq!(g.reachable(t).unwrap().len(), 3);
        assert_eq!(g.total_cost(), 2);
    }
}
