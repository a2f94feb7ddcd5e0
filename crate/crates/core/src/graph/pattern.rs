use std::collections::{BTreeSet, HashMap};

use super::bits::{bit, ones, BitDigraph};
use super::digraph::{VertexId, WeightedDigraph};
use crate::error::{DsnError, Result};

/// Default vertex limit for exact isomorphism and membership searches.
pub const DEFAULT_PATTERN_GUARD: usize = 12;

/// Unweighted demand graph on named terminals.
///
/// Terminals keep their given order; demands are stored as terminal-index pairs in
/// lexicographic order. Terminals without any demand are dropped on construction and
/// remembered in [`Pattern::stripped`].
#[derive(Clone, Debug)]
pub struct Pattern {
    terminals: Vec<String>,
    index: HashMap<String, usize>,
    demands: Vec<(usize, usize)>,
    stripped: Vec<String>,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.terminals == other.terminals && self.demands == other.demands
    }
}

impl Eq for Pattern {}

impl Pattern {
    pub fn empty() -> Self {
        Pattern {
            terminals: Vec::new(),
            index: HashMap::new(),
            demands: Vec::new(),
            stripped: Vec::new(),
        }
    }

    pub fn new<S, T, D>(terminals: T, demands: D) -> Result<Self>
    where
        S: Into<String>,
        T: IntoIterator<Item = S>,
        D: IntoIterator<Item = (S, S)>,
    {
        let names: Vec<String> = terminals.into_iter().map(Into::into).collect();
        let index = name_index(&names)?;
        let mut pairs = Vec::new();
        for (s, t) in demands {
            let (s, t): (String, String) = (s.into(), t.into());
            let si = *index
                .get(&s)
                .ok_or_else(|| DsnError::InvalidPattern(format!("demand endpoint `{s}` is not a terminal")))?;
            let ti = *index
                .get(&t)
                .ok_or_else(|| DsnError::InvalidPattern(format!("demand endpoint `{t}` is not a terminal")))?;
            pairs.push((si, ti));
        }
        Self::strict(names, pairs)
    }

    /// Index-based constructor with the same validation as [`Pattern::new`].
    pub fn from_indexed(terminals: Vec<String>, demands: &[(usize, usize)]) -> Result<Self> {
        for &(s, t) in demands {
            if s >= terminals.len() || t >= terminals.len() {
                return Err(DsnError::InvalidPattern(format!(
                    "demand ({s}, {t}) refers to a missing terminal"
                )));
            }
        }
        name_index(&terminals)?;
        Self::strict(terminals, demands.to_vec())
    }

    /// Drops loops and repeated demands instead of rejecting them.
    pub(crate) fn from_indexed_lossy(terminals: Vec<String>, demands: &[(usize, usize)]) -> Self {
        let set: BTreeSet<(usize, usize)> = demands.iter().copied().filter(|(s, t)| s != t).collect();
        let pairs: Vec<_> = set.into_iter().collect();
        Self::strict(terminals, pairs).expect("lossy construction is always valid")
    }

    fn strict(names: Vec<String>, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        for &(s, t) in &pairs {
            if s == t {
                return Err(DsnError::InvalidPattern(format!("self-loop demand on `{}`", names[s])));
            }
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0] == w[1] {
                return Err(DsnError::InvalidPattern(format!(
                    "duplicate demand `{}` -> `{}`",
                    names[w[0].0], names[w[0].1]
                )));
            }
        }
        let mut used = vec![false; names.len()];
        for &(s, t) in &pairs {
            used[s] = true;
            used[t] = true;
        }
        let mut remap = vec![usize::MAX; names.len()];
        let mut terminals = Vec::new();
        let mut stripped = Vec::new();
        for (i, name) in names.into_iter().enumerate() {
            if used[i] {
                remap[i] = terminals.len();
                terminals.push(name);
            } else {
                stripped.push(name);
            }
        }
        let mut demands: Vec<_> = pairs.iter().map(|&(s, t)| (remap[s], remap[t])).collect();
        demands.sort_unstable();
        let index = name_index(&terminals)?;
        Ok(Pattern {
            terminals,
            index,
            demands,
            stripped,
        })
    }

    pub fn terminal_count(&self) -> usize {
        self.terminals.len()
    }

    pub fn demand_count(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn name(&self, i: usize) -> &str {
        &self.terminals[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn demands(&self) -> &[(usize, usize)] {
        &self.demands
    }

    pub fn demand_names(&self) -> Vec<(String, String)> {
        self.demands
            .iter()
            .map(|&(s, t)| (self.terminals[s].clone(), self.terminals[t].clone()))
            .collect()
    }

    /// Terminals that were dropped because no demand touches them.
    pub fn stripped(&self) -> &[String] {
        &self.stripped
    }

    pub fn has_demand(&self, s: usize, t: usize) -> bool {
        self.demands.binary_search(&(s, t)).is_ok()
    }

    pub fn reversed(&self) -> Self {
        let flipped: Vec<_> = self.demands.iter().map(|&(s, t)| (t, s)).collect();
        Self::from_indexed_lossy(self.terminals.clone(), &flipped)
    }

    /// Host vertex of every terminal, in terminal order.
    pub fn bind(&self, g: &WeightedDigraph) -> Result<Vec<VertexId>> {
        self.terminals.iter().map(|t| g.require_vertex(t)).collect()
    }

    /// Bound demands as host vertex pairs.
    pub fn bound_demands(&self, g: &WeightedDigraph) -> Result<Vec<(VertexId, VertexId)>> {
        let r = self.bind(g)?;
        Ok(self.demands.iter().map(|&(s, t)| (r[s], r[t])).collect())
    }

    pub fn to_bits(&self) -> Result<BitDigraph> {
        BitDigraph::from_arcs(self.terminal_count(), self.demands.iter().copied())
    }

    pub(crate) fn from_bits(terminals: Vec<String>, g: &BitDigraph) -> Self {
        Self::from_indexed_lossy(terminals, &g.arcs())
    }

    /// The same terminal names with demands `s -> t` for every nontrivial path.
    pub fn transitive_closure(&self) -> Self {
        let n = self.terminal_count();
        let mut seen = vec![false; n];
        let mut pairs = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for &(s, t) in &self.demands {
            adj[s].push(t);
        }
        for s in 0..n {
            seen.iter_mut().for_each(|x| *x = false);
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                        pairs.push((s, w));
                    }
                }
            }
        }
        Self::from_indexed_lossy(self.terminals.clone(), &pairs)
    }
}

fn name_index(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(DsnError::InvalidPattern(format!("duplicate terminal `{n}`")));
        }
    }
    Ok(index)
}

pub fn transitive_closure(h: &Pattern) -> Pattern {
    h.transitive_closure()
}

/// Isomorphism of transitive closures, with the default 12-vertex guard.
pub fn transitively_equivalent(h1: &Pattern, h2: &Pattern) -> Result<bool> {
    transitively_equivalent_with_guard(h1, h2, DEFAULT_PATTERN_GUARD)
}

pub fn transitively_equivalent_with_guard(h1: &Pattern, h2: &Pattern, guard: usize) -> Result<bool> {
    DsnError::guard("pattern vertex count", guard, h1.terminal_count())?;
    DsnError::guard("pattern vertex count", guard, h2.terminal_count())?;
    let a = h1.to_bits()?.closure();
    let b = h2.to_bits()?.closure();
    Ok(isomorphic(&a, &b))
}

/// Exact isomorphism test by backtracking with degree pruning.
pub(crate) fn isomorphic(a: &BitDigraph, b: &BitDigraph) -> bool {
    let n = a.n();
    if n != b.n() || a.arc_count() != b.arc_count() {
        return false;
    }
    let (ain, bin) = (a.in_masks(), b.in_masks());
    let deg = |out: &[u64], inn: &[u64], v: usize| (out[v].count_ones(), inn[v].count_ones());
    let mut da: Vec<_> = (0..n).map(|v| deg(&a.out, &ain, v)).collect();
    let mut db: Vec<_> = (0..n).map(|v| deg(&b.out, &bin, v)).collect();
    let (sa, sb) = (da.clone(), db.clone());
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    // Map vertices of `a` with rare degree classes first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (sa.iter().filter(|&&d| d == sa[v]).count(), v));
    let mut map = vec![usize::MAX; n];
    let mut used = 0u64;
    iso_extend(a, b, &sa, &sb, &order, 0, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn iso_extend(
    a: &BitDigraph,
    b: &BitDigraph,
    sa: &[(u32, u32)],
    sb: &[(u32, u32)],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut u64,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for w in 0..b.n() {
        if *used & bit(w) != 0 || sa[v] != sb[w] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&u| {
            let mu = map[u];
            a.has(u, v) == b.has(mu, w) && a.has(v, u) == b.has(w, mu)
        });
        if !consistent {
            continue;
        }
        map[v] = w;
        *used |= bit(w);
        if iso_extend(a, b, sa, sb, order, depth + 1, map, used) {
            return true;
        }
        *used &= !bit(w);
        map[v] = usize::MAX;
    }
    false
}

/// Collapses each class to its first member; drops loops, repeats and isolated vertices.
pub fn identify_terminals(h: &Pattern, partition: &[Vec<String>]) -> Result<Pattern> {
    let n = h.terminal_count();
    let mut class_of = vec![usize::MAX; n];
    for (c, class) in partition.iter().enumerate() {
        if class.is_empty() {
            return Err(DsnError::InvalidPartition(format!("class {c} is empty")));
        }
        for name in class {
            let v = h
                .index_of(name)
                .ok_or_else(|| DsnError::InvalidPartition(format!("`{name}` is not a terminal")))?;
            if class_of[v] != usize::MAX {
                return Err(DsnError::InvalidPartition(format!("`{name}` appears twice")));
            }
            class_of[v] = c;
        }
    }
    if let Some(v) = class_of.iter().position(|&c| c == usize::MAX) {
        return Err(DsnError::InvalidPartition(format!("`{}` is not covered", h.name(v))));
    }
    let names: Vec<String> = partition.iter().map(|c| c[0].clone()).collect();
    let pairs: Vec<_> = h.demands().iter().map(|&(s, t)| (class_of[s], class_of[t])).collect();
    Ok(Pattern::from_indexed_lossy(names, &pairs))
}

/// Convenience for building test and generator patterns.
pub fn pattern_from_arcs(names: &[&str], arcs: &[(usize, usize)]) -> Pattern {
    Pattern::from_indexed_lossy(names.iter().map(|s| s.to_string()).collect(), arcs)
}

pub(crate) fn mask_names(p: &Pattern, mask: u64) -> Vec<String> {
    ones(mask).map(|i| p.name(i).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(names: &[&str], arcs: &[(&str, &str)]) -> Pattern {
        Pattern::new(names.iter().copied(), arcs.iter().copied()).unwrap()
    }

    #[test]
    fn strips_isolated_terminals() {
        let h = p(&["a", "b", "c"], &[("a", "b")]);
        assert_eq!(h.terminals(), ["a", "b"]);
        assert_eq!(h.stripped(), ["c"]);
    }

    #[test]
    fn rejects_bad_demands() {
        assert!(Pattern::new(["a"], [("a", "a")]).is_err());
        assert!(Pattern::new(["a", "b"], [("a", "b"), ("a", "b")]).is_err());
        assert!(Pattern::new(["a", "b"], [("a", "z")]).is_err());
        assert!(Pattern::new(["a", "a"], Vec::<(&str, &str)>::new()).is_err());
    }

    #[test]
    fn closure_examples() {
        let star = p(&["r", "a", "b"], &[("r", "a"), ("r", "b")]);
        assert_eq!(star.transitive_closure(), star);
        let path = p(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert!(path.transitive_closure().has_demand(0, 2));
        let cyc = p(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(cyc.transitive_closure().demand_count(), 6);
    }

    #[test]
    fn equivalence_examples() {
        let cyc = p(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]);
        let k3 = cyc.transitive_closure();
        assert!(transitively_equivalent(&cyc, &k3).unwrap());
        let out = p(&["r", "a", "b", "c"], &[("r", "a"), ("r", "b"), ("r", "c")]);
        let inn = p(&["r", "a", "b", "c"], &[("a", "r"), ("b", "r"), ("c", "r")]);
        assert!(!transitively_equivalent(&out, &inn).unwrap());
        let bistar = p(&["x", "y", "z"], &[("x", "y"), ("y", "x"), ("x", "z"), ("z", "x")]);
        assert!(transitively_equivalent(&k3, &bistar).unwrap());
        let big: Vec<String> = (0..13).map(|i| format!("v{i}")).collect();
        let arcs: Vec<_> = (0..12).map(|i| (i, i + 1)).collect();
        let long = Pattern::from_indexed(big, &arcs).unwrap();
        assert!(matches!(
            transitively_equivalent(&long, &long),
            Err(DsnError::SizeGuard { .. })
        ));
    }

    #[test]
    fn identification_examples() {
        let m = p(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]);
        let single: Vec<Vec<String>> = m.terminals().iter().map(|t| vec![t.clone()]).collect();
        assert_eq!(identify_terminals(&m, &single).unwrap(), m);
        let cyc = identify_terminals(&m, &[vec!["b".into(), "c".into()], vec!["d".into(), "a".into()]]).unwrap();
        assert_eq!(cyc.demand_count(), 2);
        assert!(cyc.has_demand(0, 1) && cyc.has_demand(1, 0));
        let all = identify_terminals(&m, &[vec!["a".into(), "b".into(), "c".into(), "d".into()]]).unwrap();
        assert!(all.is_empty());
        assert!(identify_terminals(&m, &[vec!["a".into()]]).is_err());
        assert!(identify_terminals(&m, &[vec!["a".into(), "a".into()]]).is_err());
    }
}
