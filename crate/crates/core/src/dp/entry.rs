use std::collections::{BTreeSet, VecDeque};

use crate::classify::{Orientation, StarDecomposition};
use crate::error::{DsnError, Result};
use crate::graph::{feasible, EdgeId, Pattern, SolutionNetwork, VertexId};

/// Key of a table entry: vertex budget `i`, terminals `Q`, separator `U`, induced
/// edges `I`, required connections `B` and per-star attachment sets `A_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DpEntryKey {
    pub i: usize,
    pub q: BTreeSet<VertexId>,
    pub u: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
    pub b: BTreeSet<(VertexId, VertexId)>,
    pub a: Vec<BTreeSet<VertexId>>,
}

/// A star of the decomposition with its vertices bound to host ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BoundStar {
    pub root: VertexId,
    pub leaves: Vec<VertexId>,
    pub orientation: Orientation,
}

pub(crate) fn bind_stars(h: &Pattern, stars: &StarDecomposition, ids: &[VertexId]) -> Vec<BoundStar> {
    debug_assert_eq!(ids.len(), h.terminal_count());
    stars
        .stars
        .iter()
        .map(|s| BoundStar {
            root: ids[s.root],
            leaves: s.leaves.iter().map(|&l| ids[l]).collect(),
            orientation: s.orientation,
        })
        .collect()
}

/// Whether `n` satisfies properties (i) to (iv) of `key`.
pub fn check_entry(n: &SolutionNetwork<'_>, key: &DpEntryKey, h: &Pattern, stars: &StarDecomposition) -> Result<bool> {
    let host = n.host();
    let ids = h.bind(host)?;
    let bound = bind_stars(h, stars, &ids);
    if key.a.len() != bound.len() {
        return Err(DsnError::InvalidArgument(format!(
            "key has {} attachment sets for {} stars",
            key.a.len(),
            bound.len()
        )));
    }
    let vmask = n.vertex_mask();
    let in_n = |v: VertexId| vmask[v.index()];
    // (i)
    if n.vertex_count() > key.i || !key.u.iter().all(|&v| in_n(v)) {
        return Ok(false);
    }
    let q: BTreeSet<VertexId> = ids.iter().copied().filter(|&v| in_n(v)).collect();
    if q != key.q {
        return Ok(false);
    }
    // (ii)
    let induced: BTreeSet<EdgeId> = n
        .edges()
        .iter()
        .copied()
        .filter(|&e| {
            let edge = host.edge(e);
            key.u.contains(&edge.tail) && key.u.contains(&edge.head)
        })
        .collect();
    if induced != key.edges {
        return Ok(false);
    }
    // (iii)
    for &(u, v) in &key.b {
        if !n.reachable(u)?.contains(&v) {
            return Ok(false);
        }
    }
    // (iv)
    for (star, a) in bound.iter().zip(&key.a) {
        for &l in star.leaves.iter().filter(|&&l| in_n(l)) {
            let ok = match star.orientation {
                Orientation::Out => {
                    a.contains(&l)
                        || std::iter::once(star.root)
                            .chain(a.iter().copied())
                            .filter(|&w| in_n(w))
                            .any(|w| n.reachable(w).map(|r| r.contains(&l)).unwrap_or(false))
                }
                Orientation::In => {
                    let from = n.reachable(l)?;
                    a.contains(&l) || from.contains(&star.root) || a.iter().any(|w| from.contains(w))
                }
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One fixed `s -> t` path per demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPath {
    pub demand: (VertexId, VertexId),
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathFamily {
    pub paths: Vec<FixedPath>,
}

impl PathFamily {
    pub fn path(&self, s: VertexId, t: VertexId) -> Option<&[VertexId]> {
        self.paths
            .iter()
            .find(|p| p.demand == (s, t))
            .map(|p| p.vertices.as_slice())
    }
}

/// The lexicographically least shortest path in `m` for every demand. `m` must be
/// minimal, which makes the chosen paths cover every edge of `m`.
pub fn fixed_path_family(m: &SolutionNetwork<'_>, h: &Pattern) -> Result<PathFamily> {
    if !feasible(m, h)? {
        return Err(DsnError::Infeasible("network does not satisfy every demand".into()));
    }
    let host = m.host();
    let nv = host.vertex_count();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut inn: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for &e in m.edges() {
        let edge = host.edge(e);
        out[edge.tail.index()].push(edge.head.index());
        inn[edge.head.index()].push(edge.tail.index());
    }
    for list in &mut out {
        list.sort_unstable();
    }
    let mut paths = Vec::new();
    let mut used = BTreeSet::new();
    for (s, t) in h.bound_demands(host)? {
        let mut dist = vec![usize::MAX; nv];
        dist[t.index()] = 0;
        let mut queue = VecDeque::from([t.index()]);
        while let Some(v) = queue.pop_front() {
            for &w in &inn[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut vertices = vec![s];
        let mut v = s.index();
        while v != t.index() {
            let w = *out[v]
                .iter()
                .find(|&&w| dist[w] != usize::MAX && dist[w] + 1 == dist[v])
                .expect("feasible demand has a shortest path");
            used.insert(
                host.find_edge(VertexId::new(v), VertexId::new(w))
                    .expect("network edge"),
            );
            vertices.push(VertexId::new(w));
            v = w;
        }
        paths.push(FixedPath {
            demand: (s, t),
            vertices,
        });
    }
    if used.len() != m.edge_count() {
        return Err(DsnError::InvalidArgument(
            "network is not minimal: some edge lies on no fixed path".into(),
        ));
    }
    Ok(PathFamily { paths })
}

/// Pairs `(u, v)` of `U` joined by a subpath of a fixed path that lies inside `n` and
/// has no internal vertex in `U`.
pub fn u_projection(n: &SolutionNetwork<'_>, u: &[VertexId], paths: &PathFamily) -> BTreeSet<(VertexId, VertexId)> {
    let host = n.host();
    let in_u = |v: VertexId| u.contains(&v);
    let has = |a: VertexId, b: VertexId| host.find_edge(a, b).is_some_and(|e| n.contains_edge(e));
    let mut proj = BTreeSet::new();
    for p in &paths.paths {
        let vs = &p.vertices;
        for i in 0..vs.len() {
            if !in_u(vs[i]) {
                continue;
            }
            for j in i + 1..vs.len() {
                if !has(vs[j - 1], vs[j]) {
                    break;
                }
                if in_u(vs[j]) {
                    proj.insert((vs[i], vs[j]));
                    break;
                }
            }
        }
    }
    proj
}

/// The type `(i, Q, U, I, B, A)` of `n` with respect to the fixed paths, or `None` when
/// the type is invalid (a leaf whose path suffix in `n` starts outside `U`).
pub fn entry_type(
    n: &SolutionNetwork<'_>,
    u: &[VertexId],
    h: &Pattern,
    stars: &StarDecomposition,
    paths: &PathFamily,
) -> Result<Option<DpEntryKey>> {
    let host = n.host();
    let ids = h.bind(host)?;
    let bound = bind_stars(h, stars, &ids);
    let vmask = n.vertex_mask();
    let in_n = |v: VertexId| vmask[v.index()];
    let uset: BTreeSet<VertexId> = u.iter().copied().collect();
    let has = |a: VertexId, b: VertexId| host.find_edge(a, b).is_some_and(|e| n.contains_edge(e));
    let r_in: BTreeSet<VertexId> = bound
        .iter()
        .filter(|s| s.orientation == Orientation::In)
        .map(|s| s.root)
        .collect();
    let r_out: BTreeSet<VertexId> = bound
        .iter()
        .filter(|s| s.orientation == Orientation::Out)
        .map(|s| s.root)
        .collect();

    let mut b = u_projection(n, u, paths);
    for p in &paths.paths {
        let vs = &p.vertices;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !has(vs[j - 1], vs[j]) {
                    break;
                }
                let (x, y) = (vs[i], vs[j]);
                if (uset.contains(&x) && r_in.contains(&y)) || (r_out.contains(&x) && uset.contains(&y)) {
                    b.insert((x, y));
                }
            }
        }
    }

    let mut a = Vec::with_capacity(bound.len());
    for star in &bound {
        let mut aj = BTreeSet::new();
        for &l in star.leaves.iter().filter(|&&l| in_n(l)) {
            let (s, t) = match star.orientation {
                Orientation::Out => (star.root, l),
                Orientation::In => (l, star.root),
            };
            let path = paths
                .path(s, t)
                .ok_or_else(|| DsnError::InvalidArgument("path family misses a demand".into()))?;
            let inside: Vec<bool> = path.windows(2).map(|w| has(w[0], w[1])).collect();
            if inside.iter().all(|&x| x) {
                continue;
            }
            let w = match star.orientation {
                // First vertex from which the rest of the path lies in `n`.
                Orientation::Out => {
                    let k = inside.iter().rposition(|&x| !x).expect("some edge is missing");
                    path[k + 1]
                }
                // Last vertex up to which the path lies in `n`.
                Orientation::In => {
                    let k = inside.iter().position(|&x| !x).expect("some edge is missing");
                    path[k]
                }
            };
            if !uset.contains(&w) {
                return Ok(None);
            }
            aj.insert(w);
        }
        a.push(aj);
    }

    Ok(Some(DpEntryKey {
        i: n.vertex_count(),
        q: ids.iter().copied().filter(|&v| in_n(v)).collect(),
        u: uset.clone(),
        edges: n
            .edges()
            .iter()
            .copied()
            .filter(|&e| {
                let edge = host.edge(e);
                uset.contains(&edge.tail) && uset.contains(&edge.head)
            })
            .collect(),
        b,
        a,
    }))
}
