use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::Orientation;
use crate::error::{DsnError, Result};
use crate::graph::{Cost, Pattern, WeightedDigraph};

pub const CLIQUE_MAX_PARTS: usize = 4;

/// Multicoloured clique instance: vertices `0..n` split into parts, undirected edges
/// only between different parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MccInstance {
    parts: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    part_of: Vec<usize>,
}

impl MccInstance {
    pub fn new(parts: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(DsnError::InvalidArgument(format!(
                "need at least 2 parts, got {}",
                parts.len()
            )));
        }
        let n = parts.iter().map(|p| p.len()).sum::<usize>();
        let mut part_of = vec![usize::MAX; n];
        for (i, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(DsnError::InvalidArgument(format!("part {i} is empty")));
            }
            for &v in p {
                if v >= n || part_of[v] != usize::MAX {
                    return Err(DsnError::InvalidArgument(format!(
                        "vertex {v} is repeated or outside 0..{n}"
                    )));
                }
                part_of[v] = i;
            }
        }
        let mut set = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(DsnError::InvalidArgument(format!("edge ({a}, {b}) leaves 0..{n}")));
            }
            if part_of[a] == part_of[b] {
                return Err(DsnError::InvalidArgument(format!("edge ({a}, {b}) lies inside a part")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let parts = parts
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        Ok(MccInstance {
            parts,
            edges: set.into_iter().collect(),
            part_of,
        })
    }

    /// Parts of sizes drawn from `1..=max_part`; each cross pair is an edge with
    /// probability `p`.
    pub fn random(k: usize, max_part: usize, p: f64, seed: u64) -> Result<Self> {
        if max_part == 0 || !(0.0..=1.0).contains(&p) {
            return Err(DsnError::InvalidArgument(
                "part size must be positive and p in [0, 1]".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut parts = Vec::with_capacity(k);
        let mut next = 0;
        for _ in 0..k {
            let size = rng.random_range(1..=max_part);
            parts.push((next..next + size).collect::<Vec<_>>());
            next += size;
        }
        let mut edges = Vec::new();
        for a in 0..next {
            for b in a + 1..next {
                let (pa, pb) = (
                    parts.iter().position(|q| q.contains(&a)),
                    parts.iter().position(|q| q.contains(&b)),
                );
                if pa != pb && rng.random_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        Self::new(parts, edges)
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges between parts `i < j`, oriented as (vertex of `V_i`, vertex of `V_j`).
    fn between(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (self.part_of[a], self.part_of[b]) {
                (x, y) if x == i && y == j => Some((a, b)),
                (x, y) if x == j && y == i => Some((b, a)),
                _ => None,
            })
            .collect()
    }

    /// A clique with one vertex per part, by exhaustive search.
    pub fn find_clique(&self) -> Result<Option<Vec<usize>>> {
        DsnError::guard("clique search part count", CLIQUE_MAX_PARTS, self.k())?;
        let adj: BTreeSet<(usize, usize)> = self.edges.iter().copied().collect();
        let adjacent = |a: usize, b: usize| adj.contains(&(a.min(b), a.max(b)));
        fn rec(parts: &[Vec<usize>], adjacent: &dyn Fn(usize, usize) -> bool, chosen: &mut Vec<usize>) -> bool {
            let i = chosen.len();
            if i == parts.len() {
                return true;
            }
            for &v in &parts[i] {
                if chosen.iter().all(|&w| adjacent(v, w)) {
                    chosen.push(v);
                    if rec(parts, adjacent, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::new();
        Ok(rec(&self.parts, &adjacent, &mut chosen).then_some(chosen))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    PureDiamond,
    FlawedDiamond,
    Cycle,
    ClosureLift,
    Expander,
}

impl ReductionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReductionKind::PureDiamond => "pure-diamond",
            ReductionKind::FlawedDiamond => "flawed-diamond",
            ReductionKind::Cycle => "cycle",
            ReductionKind::ClosureLift => "closure-lift",
            ReductionKind::Expander => "expander",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub graph: WeightedDigraph,
    pub pattern: Pattern,
    /// Cost a solution reaches exactly when the source instance is a yes-instance.
    pub target_cost: Option<Cost>,
    pub kind: ReductionKind,
}

/// Pure `k(k-1)`-diamond instance whose optimum is `4k²-2k` iff `mcc` has a clique.
pub fn mcc_to_pure_diamond(mcc: &MccInstance, orientation: Orientation) -> Result<ReductionOutput> {
    diamond(mcc, orientation, false)
}

/// The pure construction plus apex `x` with unit edges to both roots; the optimum
/// is `4k²-2k+2` iff `mcc` has a clique.
pub fn mcc_to_flawed_diamond(mcc: &MccInstance, orientation: Orientation) -> Result<ReductionOutput> {
    diamond(mcc, orientation, true)
}

fn diamond(mcc: &MccInstance, orientation: Orientation, flawed: bool) -> Result<ReductionOutput> {
    let k = mcc.k();
    if k < 2 {
        return Err(DsnError::InvalidArgument("need at least 2 parts".into()));
    }
    // Parts and copies are numbered from 1 in vertex names.
    let leaf = |i: usize, j: usize| format!("l{}_{}", i + 1, j + 1);
    let y = |i: usize| format!("y{}", i + 1);
    let copy = |w: usize, j: usize| format!("w{w}_{j}");
    let z = |i: usize, j: usize| format!("z{}_{}", i + 1, j + 1);
    let ze = |a: usize, b: usize| format!("ze{a}_{b}");

    let mut names = vec!["r1".to_string(), "r2".to_string()];
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut leaves = Vec::new();
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            leaves.push(leaf(i, j));
        }
    }
    names.extend(leaves.iter().cloned());
    if flawed {
        names.push("x".into());
        edges.push(("x".into(), "r1".into()));
        edges.push(("x".into(), "r2".into()));
    }
    for (i, part) in mcc.parts().iter().enumerate() {
        names.push(y(i));
        edges.push(("r1".into(), y(i)));
        for &w in part {
            names.push(copy(w, 0));
            edges.push((y(i), copy(w, 0)));
            for j in (0..k).filter(|&j| j != i) {
                names.push(copy(w, j + 1));
                edges.push((copy(w, 0), copy(w, j + 1)));
                edges.push((copy(w, j + 1), leaf(i, j)));
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            names.push(z(i, j));
            edges.push(("r2".into(), z(i, j)));
            for (a, b) in mcc.between(i, j) {
                names.push(ze(a, b));
                edges.push((z(i, j), ze(a, b)));
                // `a ∈ V_i` reaches `ℓ_ij` through copy j; `b ∈ V_j` reaches `ℓ_ji` through copy i.
                edges.push((ze(a, b), copy(a, j + 1)));
                edges.push((ze(a, b), copy(b, i + 1)));
            }
        }
    }

    let mut demands: Vec<(String, String)> = Vec::new();
    for l in &leaves {
        demands.push(("r1".into(), l.clone()));
        demands.push(("r2".into(), l.clone()));
    }
    if flawed {
        demands.push(("x".into(), "r1".into()));
        demands.push(("x".into(), "r2".into()));
    }
    let mut terminals = vec!["r1".to_string(), "r2".to_string()];
    terminals.extend(leaves);
    if flawed {
        terminals.push("x".into());
    }

    let reverse = orientation == Orientation::In;
    let orient = |(a, b): (String, String)| if reverse { (b, a) } else { (a, b) };
    let graph = WeightedDigraph::new(names, edges.into_iter().map(orient).map(|(a, b)| (a, b, 1)))?;
    let pattern = Pattern::new(terminals, demands.into_iter().map(orient))?;
    let k = k as Cost;
    Ok(ReductionOutput {
        graph,
        pattern,
        target_cost: Some(4 * k * k - 2 * k + if flawed { 2 } else { 0 }),
        kind: if flawed {
            ReductionKind::FlawedDiamond
        } else {
            ReductionKind::PureDiamond
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{diamond_shape, ObstructionKind};
    use crate::dp::oracle_cost;
    use crate::graph::{feasible, SolutionNetwork};

    fn triangle() -> MccInstance {
        MccInstance::new(vec![vec![0], vec![1], vec![2]], vec![(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(MccInstance::new(vec![vec![0]], vec![]).is_err());
        assert!(MccInstance::new(vec![vec![0, 1], vec![2]], vec![(0, 1)]).is_err());
        assert!(MccInstance::new(vec![vec![0], vec![0]], vec![]).is_err());
        assert!(MccInstance::new(vec![vec![0], vec![1]], vec![(0, 5)]).is_err());
        let m = MccInstance::random(3, 3, 0.5, 9).unwrap();
        assert_eq!(m, MccInstance::random(3, 3, 0.5, 9).unwrap());
        assert_eq!(triangle().find_clique().unwrap(), Some(vec![0, 1, 2]));
        let five = MccInstance::new((0..5).map(|i| vec![i]).collect(), vec![]).unwrap();
        assert!(matches!(five.find_clique(), Err(DsnError::SizeGuard { .. })));
    }

    #[test]
    fn pure_triangle_counts_and_cost() {
        for o in [Orientation::Out, Orientation::In] {
            let r = mcc_to_pure_diamond(&triangle(), o).unwrap();
            assert_eq!(r.graph.vertex_count(), 26);
            assert_eq!(r.graph.edge_count(), 30);
            assert_eq!(r.target_cost, Some(30));
            assert_eq!(oracle_cost(&r.graph, &r.pattern).unwrap(), Some(30));
            let kind = if o == Orientation::Out {
                ObstructionKind::PureOutDiamond
            } else {
                ObstructionKind::PureInDiamond
            };
            assert_eq!(diamond_shape(&r.pattern), Some((kind, 6)));
        }
    }

    #[test]
    fn missing_edge_set_is_infeasible() {
        let m = MccInstance::new(vec![vec![0], vec![1], vec![2]], vec![(0, 2), (1, 2)]).unwrap();
        let r = mcc_to_pure_diamond(&m, Orientation::Out).unwrap();
        assert_eq!(oracle_cost(&r.graph, &r.pattern).unwrap(), None);
        let full = SolutionNetwork::full(&r.graph);
        assert!(!feasible(&full, &r.pattern).unwrap());
    }

    #[test]
    fn one_triangle_among_pairs() {
        // Parts {0,1}, {2,3}, {4,5}; only 0-2-4 is a triangle, 1 and 3 hang off it.
        let edges = vec![(0, 2), (0, 4), (2, 4), (1, 3), (3, 5), (1, 2)];
        let m = MccInstance::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]], edges.clone()).unwrap();
        assert!(m.find_clique().unwrap().is_some());
        let r = mcc_to_pure_diamond(&m, Orientation::Out).unwrap();
        assert_eq!(oracle_cost(&r.graph, &r.pattern).unwrap(), Some(30));
        let broken: Vec<_> = edges.into_iter().filter(|&e| e != (2, 4)).collect();
        let m = MccInstance::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]], broken).unwrap();
        assert!(m.find_clique().unwrap().is_none());
        let r = mcc_to_pure_diamond(&m, Orientation::Out).unwrap();
        assert!(oracle_cost(&r.graph, &r.pattern).unwrap().is_none_or(|c| c > 30));
    }

    #[test]
    fn flawed_triangle() {
        for o in [Orientation::Out, Orientation::In] {
            let r = mcc_to_flawed_diamond(&triangle(), o).unwrap();
            assert_eq!(r.target_cost, Some(32));
            assert_eq!(oracle_cost(&r.graph, &r.pattern).unwrap(), Some(32));
            let kind = if o == Orientation::Out {
                ObstructionKind::FlawedOutDiamond
            } else {
                ObstructionKind::FlawedInDiamond
            };
            assert_eq!(diamond_shape(&r.pattern), Some((kind, 6)));
            // Both apex edges are forced: dropping either leaves the pattern unsatisfiable.
            let full = SolutionNetwork::full(&r.graph);
            for root in ["r1", "r2"] {
                let (a, b) = if o == Orientation::Out {
                    ("x", root)
                } else {
                    (root, "x")
                };
                let e = r
                    .graph
                    .find_edge(r.graph.vertex(a).unwrap(), r.graph.vertex(b).unwrap())
                    .unwrap();
                assert!(!feasible(&full.without_edge(e), &r.pattern).unwrap());
            }
        }
    }

    #[test]
    fn generated_graphs_are_simple() {
        for seed in 0..10 {
            let m = MccInstance::random(3, 2, 0.6, seed).unwrap();
            for r in [
                mcc_to_pure_diamond(&m, Orientation::Out).unwrap(),
                mcc_to_flawed_diamond(&m, Orientation::In).unwrap(),
            ] {
                let mut pairs: Vec<_> = r.graph.edges().iter().map(|e| (e.tail, e.head)).collect();
                assert!(pairs.iter().all(|(a, b)| a != b));
                let n = pairs.len();
                pairs.sort_unstable();
                pairs.dedup();
                assert_eq!(pairs.len(), n);
            }
        }
    }
}
