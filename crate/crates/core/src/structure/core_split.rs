use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::scc::named_pattern;
use crate::classify::{validate_certificate, CaterpillarCertificate, Orientation};
use crate::dp::fixed_path_family;
use crate::error::{DsnError, Result};
use crate::graph::{feasible, is_minimal, minimalize, EdgeId, Pattern, SolutionNetwork, VertexId};

/// Arborescence of the forest part: out-arborescence for out-caterpillars and
/// in-arborescence for in-caterpillars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arborescence {
    pub root: VertexId,
    pub edges: Vec<EdgeId>,
}

/// A minimal solution split into a core and arborescences hanging off it.
#[derive(Clone, Debug)]
pub struct CoreDecomposition<'g> {
    pub core: SolutionNetwork<'g>,
    pub core_pattern: Pattern,
    pub forest: Vec<Arborescence>,
    pub orientation: Orientation,
    pub lambda0: usize,
    pub delta: usize,
}

fn mismatch(msg: impl Into<String>) -> DsnError {
    DsnError::CertificateMismatch(msg.into())
}

fn star_demand(o: Orientation, root: VertexId, leaf: VertexId) -> (VertexId, VertexId) {
    match o {
        Orientation::Out => (root, leaf),
        Orientation::In => (leaf, root),
    }
}

fn has_path(n: &SolutionNetwork<'_>, (s, t): (VertexId, VertexId)) -> Result<bool> {
    Ok(n.reachable(s)?.contains(&t))
}

struct Bound {
    roots: Vec<VertexId>,
    leaves: Vec<Vec<VertexId>>,
}

fn bind(m: &SolutionNetwork<'_>, cert: &CaterpillarCertificate) -> Result<Bound> {
    let host = m.host();
    let roots = cert
        .spine
        .iter()
        .map(|v| host.require_vertex(v))
        .collect::<Result<Vec<_>>>()?;
    let leaves = cert
        .stars
        .iter()
        .map(|s| s.iter().skip(1).map(|v| host.require_vertex(v)).collect())
        .collect::<Result<Vec<_>>>()?;
    Ok(Bound { roots, leaves })
}

fn necessary(
    m: &SolutionNetwork<'_>,
    o: Orientation,
    root: VertexId,
    leaves: &[VertexId],
) -> Result<Vec<BTreeSet<EdgeId>>> {
    let mut out = vec![BTreeSet::new(); leaves.len()];
    for &e in m.edges() {
        let rest = m.without_edge(e);
        for (k, &l) in leaves.iter().enumerate() {
            if !has_path(&rest, star_demand(o, root, l))? {
                out[k].insert(e);
            }
        }
    }
    Ok(out)
}

/// For every leaf `ℓ` of star `i`, the edges of `m` whose removal destroys the
/// root-to-`ℓ` path (`ℓ`-to-root for in-stars).
pub fn necessary_edges(
    m: &SolutionNetwork<'_>,
    cert: &CaterpillarCertificate,
    i: usize,
) -> Result<BTreeMap<String, BTreeSet<EdgeId>>> {
    if i >= cert.spine.len() {
        return Err(DsnError::InvalidArgument(format!(
            "spine index {i} out of range 0..{}",
            cert.spine.len()
        )));
    }
    let b = bind(m, cert)?;
    let sets = necessary(m, cert.orientation, b.roots[i], &b.leaves[i])?;
    Ok(cert.stars[i][1..].iter().cloned().zip(sets).collect())
}

/// The edges that are necessary for star `i`, not on `path`, and enter `path`
/// (leave it, for in-stars), together with a leaf for which all of them are
/// necessary. `None` when there are no such edges.
pub fn common_witness_leaf(
    m: &SolutionNetwork<'_>,
    cert: &CaterpillarCertificate,
    i: usize,
    path: &[VertexId],
) -> Result<Option<(String, BTreeSet<EdgeId>)>> {
    let nec = necessary_edges(m, cert, i)?;
    let w = entering_edges(m, cert.orientation, path, &nec.values().cloned().collect::<Vec<_>>());
    if w.is_empty() {
        return Ok(None);
    }
    nec.into_iter()
        .find(|(_, set)| w.is_subset(set))
        .map(|(l, _)| Some((l, w)))
        .ok_or_else(|| {
            mismatch(format!(
                "no single leaf of star {i} witnesses every edge entering the path"
            ))
        })
}

fn entering_edges(
    m: &SolutionNetwork<'_>,
    o: Orientation,
    path: &[VertexId],
    nec: &[BTreeSet<EdgeId>],
) -> BTreeSet<EdgeId> {
    let host = m.host();
    let on_path: BTreeSet<EdgeId> = path.windows(2).filter_map(|w| host.find_edge(w[0], w[1])).collect();
    nec.iter()
        .flatten()
        .copied()
        .filter(|e| !on_path.contains(e))
        .filter(|&e| {
            let edge = host.edge(e);
            let end = match o {
                Orientation::Out => edge.head,
                Orientation::In => edge.tail,
            };
            path.contains(&end)
        })
        .collect()
}

/// Shortest `s -> t` path in `n` as an edge list.
fn bfs_path(n: &SolutionNetwork<'_>, s: VertexId, t: VertexId) -> Option<Vec<EdgeId>> {
    let host = n.host();
    let mut prev: BTreeMap<VertexId, EdgeId> = BTreeMap::new();
    let mut queue = VecDeque::from([s]);
    let mut seen = BTreeSet::from([s]);
    while let Some(v) = queue.pop_front() {
        if v == t {
            let mut edges = Vec::new();
            let mut cur = t;
            while cur != s {
                let e = prev[&cur];
                edges.push(e);
                cur = host.edge(e).tail;
            }
            edges.reverse();
            return Some(edges);
        }
        for &e in host.out_edges(v) {
            let w = host.edge(e).head;
            if n.contains_edge(e) && seen.insert(w) {
                prev.insert(w, e);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Splits minimal solution `m` into a core solving a sub-pattern with at most
/// `(1+λ)(λ+δ)` demands and a forest of arborescences attached at their roots.
pub fn core_decomposition<'g>(
    m: &SolutionNetwork<'g>,
    h: &Pattern,
    cert: &CaterpillarCertificate,
) -> Result<CoreDecomposition<'g>> {
    let (lambda0, delta) = (cert.lambda0, cert.extra_edges.len());
    validate_certificate(h, cert, lambda0, delta)?;
    let target = cert.equivalent_pattern.clone().unwrap_or_else(|| h.clone());
    if !is_minimal(m, &target)? {
        return Err(DsnError::InvalidArgument("network is not a minimal solution".into()));
    }
    let host = m.host();
    let o = cert.orientation;
    let b = bind(m, cert)?;
    let name = |v: VertexId| host.name(v).to_string();

    let star_pairs: BTreeSet<(VertexId, VertexId)> = b
        .roots
        .iter()
        .zip(&b.leaves)
        .flat_map(|(&r, ls)| ls.iter().map(move |&l| star_demand(o, r, l)))
        .collect();
    let rest: Vec<(String, String)> = target
        .bound_demands(host)?
        .into_iter()
        .filter(|d| !star_pairs.contains(d))
        .map(|(s, t)| (name(s), name(t)))
        .collect();

    let mut core_edges: BTreeSet<EdgeId> = BTreeSet::new();
    let mut core_pairs = rest.clone();
    if !rest.is_empty() {
        let sub = named_pattern(&rest)?;
        let m_i = minimalize(m, &sub)?;
        core_edges.extend(m_i.edges().iter().copied());
        let paths = fixed_path_family(&m_i, &sub)?;
        let nec: Vec<Vec<BTreeSet<EdgeId>>> = b
            .roots
            .iter()
            .zip(&b.leaves)
            .map(|(&r, ls)| necessary(m, o, r, ls))
            .collect::<Result<_>>()?;
        for p in &paths.paths {
            for (i, nec_i) in nec.iter().enumerate() {
                let w = entering_edges(m, o, &p.vertices, nec_i);
                if w.is_empty() {
                    continue;
                }
                let k = nec_i.iter().position(|set| w.is_subset(set)).ok_or_else(|| {
                    mismatch(format!(
                        "no single leaf of star {i} witnesses the edges entering a path"
                    ))
                })?;
                let (s, t) = star_demand(o, b.roots[i], b.leaves[i][k]);
                let path = bfs_path(m, s, t).ok_or_else(|| mismatch("star demand is not satisfied"))?;
                core_edges.extend(path);
                core_pairs.push((name(s), name(t)));
            }
        }
    }

    let (core, core_pattern) = if core_pairs.is_empty() {
        (SolutionNetwork::empty(host), Pattern::empty())
    } else {
        let pattern = named_pattern(&core_pairs)?;
        let net = SolutionNetwork::new(host, core_edges)?;
        (minimalize(&net, &pattern)?, pattern)
    };

    let forest = split_forest(m, &core, o);
    Ok(CoreDecomposition {
        core,
        core_pattern,
        forest,
        orientation: o,
        lambda0,
        delta,
    })
}

/// Weakly connected components of `m - E(core)`, each with its source (target for
/// in-arborescences) as root.
fn split_forest(m: &SolutionNetwork<'_>, core: &SolutionNetwork<'_>, o: Orientation) -> Vec<Arborescence> {
    let host = m.host();
    let rest: Vec<EdgeId> = m.edges().iter().copied().filter(|&e| !core.contains_edge(e)).collect();
    let mut parent: Vec<usize> = (0..host.vertex_count()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let next = p[x];
            p[x] = r;
            x = next;
        }
        r
    }
    for &e in &rest {
        let edge = host.edge(e);
        let (a, b) = (
            find(&mut parent, edge.tail.index()),
            find(&mut parent, edge.head.index()),
        );
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for &e in &rest {
        let r = find(&mut parent, host.edge(e).tail.index());
        groups.entry(r).or_default().push(e);
    }
    groups
        .into_values()
        .map(|edges| {
            let heads: BTreeSet<VertexId> = edges
                .iter()
                .map(|&e| match o {
                    Orientation::Out => host.edge(e).head,
                    Orientation::In => host.edge(e).tail,
                })
                .collect();
            let root = edges
                .iter()
                .map(|&e| match o {
                    Orientation::Out => host.edge(e).tail,
                    Orientation::In => host.edge(e).head,
                })
                .filter(|v| !heads.contains(v))
                .min()
                .unwrap_or_else(|| host.edge(edges[0]).tail);
            Arborescence { root, edges }
        })
        .collect()
}

impl CoreDecomposition<'_> {
    /// Checks the three structural properties against the original solution `m`:
    /// the core minimally solves its pattern, the pattern has at most
    /// `(1+λ)(λ+δ)` demands, and the rest of `m` is a forest of arborescences that
    /// meet the core only at their roots.
    pub fn validate(&self, m: &SolutionNetwork<'_>, lambda: usize, delta: usize) -> Result<()> {
        let host = m.host();
        if self.core_pattern.is_empty() {
            if self.core.edge_count() != 0 {
                return Err(mismatch("core has edges but its pattern is empty"));
            }
        } else if !feasible(&self.core, &self.core_pattern)? || !is_minimal(&self.core, &self.core_pattern)? {
            return Err(mismatch("core is not a minimal solution to the core pattern"));
        }
        let bound = (1 + lambda) * (lambda + delta);
        if self.core_pattern.demand_count() > bound {
            return Err(mismatch(format!(
                "core pattern has {} demands, above (1+λ)(λ+δ) = {bound}",
                self.core_pattern.demand_count()
            )));
        }
        let mut all: Vec<EdgeId> = self.core.edges().to_vec();
        for a in &self.forest {
            all.extend(&a.edges);
        }
        all.sort_unstable();
        if all != m.edges() {
            return Err(mismatch("core and forest do not partition the solution"));
        }
        let core_vertices: BTreeSet<VertexId> = self.core.vertices().into_iter().collect();
        for a in &self.forest {
            let (mut indeg, mut verts) = (BTreeMap::new(), BTreeSet::new());
            for &e in &a.edges {
                let edge = host.edge(e);
                let (from, to) = match self.orientation {
                    Orientation::Out => (edge.tail, edge.head),
                    Orientation::In => (edge.head, edge.tail),
                };
                *indeg.entry(to).or_insert(0) += 1;
                verts.insert(from);
                verts.insert(to);
            }
            let tree = verts.len() == a.edges.len() + 1
                && !indeg.contains_key(&a.root)
                && verts.iter().all(|v| *v == a.root || indeg.get(v) == Some(&1));
            if !tree {
                return Err(mismatch(format!(
                    "forest component rooted at `{}` is not an arborescence",
                    host.name(a.root)
                )));
            }
            if verts.iter().any(|v| *v != a.root && core_vertices.contains(v)) {
                return Err(mismatch(format!(
                    "arborescence rooted at `{}` meets the core away from its root",
                    host.name(a.root)
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::in_c_lambda_delta;
    use crate::graph::WeightedDigraph;

    #[test]
    fn out_star_has_empty_core() {
        let g = WeightedDigraph::new(["r", "x", "a", "b"], [("r", "x", 1), ("x", "a", 1), ("x", "b", 1)]).unwrap();
        let h = Pattern::new(["r", "a", "b"], [("r", "a"), ("r", "b")]).unwrap();
        let cert = in_c_lambda_delta(&h, 1, 0).unwrap().unwrap();
        let m = SolutionNetwork::full(&g);
        let d = core_decomposition(&m, &h, &cert).unwrap();
        assert_eq!(d.core.edge_count(), 0);
        assert_eq!(d.forest.len(), 1);
        assert_eq!(d.forest[0].root, g.vertex("r").unwrap());
        d.validate(&m, 1, 0).unwrap();

        let nec = necessary_edges(&m, &cert, 0).unwrap();
        let id = |a: &str, b: &str| g.find_edge(g.vertex(a).unwrap(), g.vertex(b).unwrap()).unwrap();
        assert_eq!(nec["a"], BTreeSet::from([id("r", "x"), id("x", "a")]));
        assert_eq!(nec["b"], BTreeSet::from([id("r", "x"), id("x", "b")]));
    }

    #[test]
    fn bypassed_edge_is_not_necessary() {
        let g = WeightedDigraph::new(["r", "x", "a"], [("r", "x", 1), ("x", "a", 1), ("r", "a", 1)]).unwrap();
        let h = Pattern::new(["r", "a", "x"], [("r", "a"), ("r", "x")]).unwrap();
        let cert = in_c_lambda_delta(&h, 1, 0).unwrap().unwrap();
        let m = SolutionNetwork::full(&g);
        let nec = necessary_edges(&m, &cert, 0).unwrap();
        let id = |a: &str, b: &str| g.find_edge(g.vertex(a).unwrap(), g.vertex(b).unwrap()).unwrap();
        assert!(!nec["a"].contains(&id("x", "a")));
        assert!(nec["x"].contains(&id("r", "x")));
        assert!(necessary_edges(&m, &cert, 1).is_err());
    }

    #[test]
    fn two_caterpillar_core_is_small() {
        // Spine u -> v, u has leaves a, b and v has leaf c.
        let g = WeightedDigraph::new(
            ["u", "v", "a", "b", "c", "x", "y"],
            [
                ("u", "x", 1),
                ("x", "v", 1),
                ("x", "a", 1),
                ("u", "b", 1),
                ("v", "y", 1),
                ("y", "c", 1),
            ],
        )
        .unwrap();
        let h = Pattern::new(
            ["u", "v", "a", "b", "c"],
            [("u", "v"), ("u", "a"), ("u", "b"), ("v", "c")],
        )
        .unwrap();
        let cert = in_c_lambda_delta(&h, 2, 0).unwrap().unwrap();
        let m = SolutionNetwork::full(&g);
        let d = core_decomposition(&m, &h, &cert).unwrap();
        d.validate(&m, 2, 0).unwrap();
        assert!(d.core_pattern.demand_count() <= 6);
        assert!(d.core.edge_count() >= 2);
    }
}
