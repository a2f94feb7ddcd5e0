use std::collections::BTreeSet;

use super::cutwidth::{cutwidth_exact, cutwidth_of_layout, topological_layout};
use crate::dp::fixed_path_family;
use crate::error::{DsnError, Result};
use crate::graph::{
    feasible, is_minimal, minimalize, scc_condensation, EdgeId, LocalDigraph, Pattern, SolutionNetwork, VertexId,
};

/// Pattern on the endpoints of `pairs` (loops and repeats dropped).
pub(crate) fn named_pattern(pairs: &[(String, String)]) -> Result<Pattern> {
    let set: BTreeSet<(String, String)> = pairs.iter().filter(|(a, b)| a != b).cloned().collect();
    let terminals: BTreeSet<String> = set.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    Pattern::new(terminals, set)
}

fn require_minimal(m: &SolutionNetwork<'_>, h: &Pattern) -> Result<()> {
    if !is_minimal(m, h)? {
        return Err(DsnError::InvalidArgument("network is not a minimal solution".into()));
    }
    Ok(())
}

/// Whether the exact cutwidth of minimal solution `m` is at most `7 |E(H)|`.
pub fn verify_cutwidth_bound(m: &SolutionNetwork<'_>, h: &Pattern) -> Result<bool> {
    require_minimal(m, h)?;
    let cw = cutwidth_exact(&LocalDigraph::from_network(m))?.value;
    Ok(cw <= 7 * h.demand_count())
}

/// One non-trivial strongly connected component of a minimal solution.
#[derive(Clone, Debug)]
pub struct SccReport<'g> {
    pub vertices: Vec<VertexId>,
    /// Edges of the solution inside the component.
    pub network: SolutionNetwork<'g>,
    /// First and last component vertex of every fixed demand path that meets it.
    pub pattern: Pattern,
    pub is_minimal: bool,
    /// Root of the in- and out-arborescences (least terminal name of `pattern`).
    pub root: String,
    pub a_in: SolutionNetwork<'g>,
    pub a_out: SolutionNetwork<'g>,
    /// The component is exactly `A_in ∪ A_out`.
    pub covered_by_arborescences: bool,
    /// `A_out` plus the reversal of `E(A_in) \ E(A_out)` has no directed cycle.
    pub reversal_acyclic: bool,
    /// Cutwidth of the component under a topological order of that acyclic graph.
    pub layout_cutwidth: Option<usize>,
}

/// The components with at least two vertices, with the pattern and arborescence
/// constructions used to bound their cutwidth.
pub fn scc_reports<'g>(m: &SolutionNetwork<'g>, h: &Pattern) -> Result<Vec<SccReport<'g>>> {
    require_minimal(m, h)?;
    let host = m.host();
    let local = LocalDigraph::from_network(m);
    let verts = m.vertices();
    let paths = fixed_path_family(m, h)?;
    let cond = scc_condensation(&local);
    let mut reports = Vec::new();
    for comp in cond.components.iter().filter(|c| c.len() >= 2) {
        let members: Vec<VertexId> = comp.iter().map(|&i| verts[i]).collect();
        let inside = |v: VertexId| members.contains(&v);
        let mut pairs = Vec::new();
        for p in &paths.paths {
            let hits: Vec<VertexId> = p.vertices.iter().copied().filter(|&v| inside(v)).collect();
            if let (Some(&a), Some(&b)) = (hits.first(), hits.last()) {
                if a != b {
                    pairs.push((host.name(a).to_string(), host.name(b).to_string()));
                }
            }
        }
        let pattern = named_pattern(&pairs)?;
        let mut keep = vec![false; host.vertex_count()];
        for &v in &members {
            keep[v.index()] = true;
        }
        let network = SolutionNetwork::new(host, m.induced(&keep).edges().iter().copied())?;
        let minimal = !pattern.is_empty() && is_minimal(&network, &pattern)?;

        let root = pattern.terminals().iter().min().cloned().unwrap_or_default();
        let others: Vec<String> = pattern.terminals().iter().filter(|&t| *t != root).cloned().collect();
        let star = |inward: bool| -> Result<Pattern> {
            let pairs: Vec<(String, String)> = others
                .iter()
                .map(|o| {
                    if inward {
                        (o.clone(), root.clone())
                    } else {
                        (root.clone(), o.clone())
                    }
                })
                .collect();
            named_pattern(&pairs)
        };
        let (a_in, a_out) = if pattern.is_empty() || !feasible(&network, &star(true)?)? {
            (SolutionNetwork::empty(host), SolutionNetwork::empty(host))
        } else {
            (
                minimalize(&network, &star(true)?)?,
                minimalize(&network, &star(false)?)?,
            )
        };
        let union: BTreeSet<EdgeId> = a_in.edges().iter().chain(a_out.edges()).copied().collect();
        let covered = union.iter().copied().eq(network.edges().iter().copied());

        let mut pos = vec![usize::MAX; host.vertex_count()];
        for (i, v) in members.iter().enumerate() {
            pos[v.index()] = i;
        }
        let arc = |e: EdgeId| {
            let edge = host.edge(e);
            (pos[edge.tail.index()], pos[edge.head.index()])
        };
        let mut arcs: Vec<(usize, usize)> = a_out.edges().iter().map(|&e| arc(e)).collect();
        arcs.extend(
            a_in.edges()
                .iter()
                .filter(|e| !a_out.contains_edge(**e))
                .map(|&e| arc(e))
                .map(|(a, b)| (b, a)),
        );
        let labels: Vec<String> = members.iter().map(|&v| host.name(v).to_string()).collect();
        let dag = LocalDigraph::new(labels.clone(), arcs)?;
        let reversal_acyclic = dag.is_acyclic();
        let layout_cutwidth = if reversal_acyclic {
            let layout = topological_layout(&dag)?;
            let arcs = network.edges().iter().map(|&e| arc(e)).collect();
            Some(cutwidth_of_layout(&LocalDigraph::new(labels, arcs)?, &layout)?)
        } else {
            None
        };
        reports.push(SccReport {
            vertices: members,
            network,
            pattern,
            is_minimal: minimal,
            root,
            a_in,
            a_out,
            covered_by_arborescences: covered,
            reversal_acyclic,
            layout_cutwidth,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedDigraph;

    #[test]
    fn single_path_meets_bound() {
        let g = WeightedDigraph::new(["s", "a", "t"], [("s", "a", 1), ("a", "t", 1)]).unwrap();
        let h = Pattern::new(["s", "t"], [("s", "t")]).unwrap();
        let m = SolutionNetwork::full(&g);
        assert!(verify_cutwidth_bound(&m, &h).unwrap());
        assert!(scc_reports(&m, &h).unwrap().is_empty());
        let g = WeightedDigraph::new(["s", "t"], [("s", "t", 1), ("t", "s", 1)]).unwrap();
        assert!(verify_cutwidth_bound(&SolutionNetwork::full(&g), &h).is_err());
    }

    #[test]
    fn cycle_component() {
        // Demands a->c and c->a force the whole 4-cycle a->b->c->d->a.
        let g = WeightedDigraph::new(
            ["a", "b", "c", "d"],
            [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("d", "a", 1)],
        )
        .unwrap();
        let h = Pattern::new(["a", "c"], [("a", "c"), ("c", "a")]).unwrap();
        let m = SolutionNetwork::full(&g);
        let r = scc_reports(&m, &h).unwrap();
        assert_eq!(r.len(), 1);
        let r = &r[0];
        assert_eq!(r.pattern.demand_count(), 2);
        assert!(r.is_minimal && r.covered_by_arborescences && r.reversal_acyclic);
        assert_eq!(r.root, "a");
        assert!(r.layout_cutwidth.unwrap() <= 6 * 2);
    }
}
