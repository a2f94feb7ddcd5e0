use std::collections::BTreeSet;

use super::digraph::{collect_marked, Cost, EdgeId, VertexId, WeightedDigraph};
use super::pattern::Pattern;
use crate::error::{DsnError, Result};

/// A subgraph of a host graph given by an edge subset (plus optional isolated vertices).
#[derive(Clone, Debug)]
pub struct SolutionNetwork<'g> {
    host: &'g WeightedDigraph,
    edges: Vec<EdgeId>,
    extra: Vec<VertexId>,
}

impl PartialEq for SolutionNetwork<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.host, other.host) && self.edges == other.edges && self.vertices() == other.vertices()
    }
}

impl<'g> SolutionNetwork<'g> {
    pub fn new(host: &'g WeightedDigraph, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let set: BTreeSet<EdgeId> = edges.into_iter().collect();
        if let Some(e) = set.iter().find(|e| e.index() >= host.edge_count()) {
            return Err(DsnError::InvalidArgument(format!(
                "edge #{} is not in the host graph",
                e.index()
            )));
        }
        Ok(SolutionNetwork {
            host,
            edges: set.into_iter().collect(),
            extra: Vec::new(),
        })
    }

    pub fn empty(host: &'g WeightedDigraph) -> Self {
        SolutionNetwork {
            host,
            edges: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn full(host: &'g WeightedDigraph) -> Self {
        SolutionNetwork {
            host,
            edges: host.edge_ids().collect(),
            extra: Vec::new(),
        }
    }

    /// Builds a network from named `(tail, head)` pairs that must be host edges.
    pub fn from_named_edges<S: AsRef<str>>(
        host: &'g WeightedDigraph,
        pairs: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self> {
        let mut ids = Vec::new();
        for (t, h) in pairs {
            let (t, h) = (t.as_ref(), h.as_ref());
            let (tv, hv) = (host.require_vertex(t)?, host.require_vertex(h)?);
            let e = host
                .find_edge(tv, hv)
                .ok_or_else(|| DsnError::InvalidArgument(format!("`{t}` -> `{h}` is not an edge of the host graph")))?;
            ids.push(e);
        }
        Self::new(host, ids)
    }

    /// Adds vertices that need not be incident to any edge.
    pub fn with_vertices(mut self, vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut set: BTreeSet<VertexId> = self.extra.iter().copied().collect();
        set.extend(vertices);
        self.extra = set.into_iter().collect();
        self
    }

    pub(crate) fn from_mask(host: &'g WeightedDigraph, mask: &[bool]) -> Self {
        SolutionNetwork {
            host,
            edges: mask
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| EdgeId::new(i))
                .collect(),
            extra: Vec::new(),
        }
    }

    pub fn host(&self) -> &'g WeightedDigraph {
        self.host
    }

    /// Member edges in ascending id order.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn edge_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.host.edge_count()];
        for e in &self.edges {
            m[e.index()] = true;
        }
        m
    }

    pub fn vertex_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.host.vertex_count()];
        for &e in &self.edges {
            let edge = self.host.edge(e);
            m[edge.tail.index()] = true;
            m[edge.head.index()] = true;
        }
        for v in &self.extra {
            m[v.index()] = true;
        }
        m
    }

    /// Sorted vertex set: edge endpoints plus explicitly added vertices.
    pub fn vertices(&self) -> Vec<VertexId> {
        collect_marked(&self.vertex_mask())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_mask().iter().filter(|&&b| b).count()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertex_mask().get(v.index()).copied().unwrap_or(false)
    }

    pub fn cost(&self) -> Cost {
        self.edges.iter().map(|&e| self.host.edge(e).cost).sum()
    }

    pub fn without_edge(&self, e: EdgeId) -> Self {
        SolutionNetwork {
            host: self.host,
            edges: self.edges.iter().copied().filter(|&f| f != e).collect(),
            extra: self.extra.clone(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut set: BTreeSet<EdgeId> = self.edges.iter().copied().collect();
        set.extend(other.edges.iter().copied());
        let mut extra: BTreeSet<VertexId> = self.extra.iter().copied().collect();
        extra.extend(other.extra.iter().copied());
        SolutionNetwork {
            host: self.host,
            edges: set.into_iter().collect(),
            extra: extra.into_iter().collect(),
        }
    }

    /// Vertices reachable from `s` inside the network (including `s`).
    pub fn reachable(&self, s: VertexId) -> Result<Vec<VertexId>> {
        if s.index() >= self.host.vertex_count() {
            return Err(DsnError::UnknownVertex(s.to_string()));
        }
        let mask = self.edge_mask();
        Ok(collect_marked(&self.host.reach_filtered(s, |e| mask[e.index()])))
    }

    /// `(tail, head, cost)` with vertex names, in edge-id order.
    pub fn named_edges(&self) -> Vec<(String, String, Cost)> {
        self.edges
            .iter()
            .map(|&e| {
                let edge = self.host.edge(e);
                (
                    self.host.name(edge.tail).to_string(),
                    self.host.name(edge.head).to_string(),
                    edge.cost,
                )
            })
            .collect()
    }

    /// Edges with both endpoints in `keep`.
    pub fn induced(&self, keep: &[bool]) -> Self {
        SolutionNetwork {
            host: self.host,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&e| {
                    let edge = self.host.edge(e);
                    keep[edge.tail.index()] && keep[edge.head.index()]
                })
                .collect(),
            extra: collect_marked(keep),
        }
    }
}

fn demands_met(host: &WeightedDigraph, mask: &[bool], demands: &[(VertexId, VertexId)]) -> bool {
    let mut i = 0;
    while i < demands.len() {
        let s = demands[i].0;
        let seen = host.reach_filtered(s, |e| mask[e.index()]);
        while i < demands.len() && demands[i].0 == s {
            if !seen[demands[i].1.index()] {
                return false;
            }
            i += 1;
        }
    }
    true
}

/// Whether the network contains an `s -> t` path for every demand.
pub fn feasible(n: &SolutionNetwork<'_>, h: &Pattern) -> Result<bool> {
    let mut demands = h.bound_demands(n.host())?;
    demands.sort();
    Ok(demands_met(n.host(), &n.edge_mask(), &demands))
}

/// Removes edges one at a time (most expensive first, ties by id) while feasibility holds.
pub fn minimalize<'g>(n: &SolutionNetwork<'g>, h: &Pattern) -> Result<SolutionNetwork<'g>> {
    let host = n.host();
    let mut demands = h.bound_demands(host)?;
    demands.sort();
    let mut mask = n.edge_mask();
    if !demands_met(host, &mask, &demands) {
        return Err(DsnError::Infeasible("network does not satisfy every demand".into()));
    }
    let mut order = n.edges().to_vec();
    order.sort_by_key(|&e| (std::cmp::Reverse(host.edge(e).cost), e));
    for e in order {
        mask[e.index()] = false;
        if !demands_met(host, &mask, &demands) {
            mask[e.index()] = true;
        }
    }
    Ok(SolutionNetwork::from_mask(host, &mask))
}

/// Feasible, and no single edge can be dropped.
pub fn is_minimal(n: &SolutionNetwork<'_>, h: &Pattern) -> Result<bool> {
    let host = n.host();
    let mut demands = h.bound_demands(host)?;
    demands.sort();
    let mut mask = n.edge_mask();
    if !demands_met(host, &mask, &demands) {
        return Ok(false);
    }
    for &e in n.edges() {
        mask[e.index()] = false;
        let still = demands_met(host, &mask, &demands);
        mask[e.index()] = true;
        if still {
            return Ok(false);
        }
    }
    Ok(true)
}
