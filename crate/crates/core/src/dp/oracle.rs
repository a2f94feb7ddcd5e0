use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{DsnError, Result};
use crate::graph::{minimalize, Cost, EdgeId, Pattern, SolutionNetwork, WeightedDigraph};

const WORDS: usize = 4;
/// Largest host graph the oracle accepts (capacity of its edge bitsets).
pub const ORACLE_MAX_EDGES: usize = 64 * WORDS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub max_edges: usize,
    pub node_budget: u64,
    /// Also determine the lexicographically smallest optimum (costs extra searches).
    pub canonical: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_edges: ORACLE_MAX_EDGES,
            node_budget: 20_000_000,
            canonical: true,
        }
    }
}

type EdgeSet = [u64; WORDS];

fn has(s: &EdgeSet, e: usize) -> bool {
    s[e / 64] >> (e % 64) & 1 == 1
}

fn set(s: &mut EdgeSet, e: usize) {
    s[e / 64] |= 1 << (e % 64);
}

fn subset(a: &EdgeSet, b: &EdgeSet) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct Search<'a> {
    g: &'a WeightedDigraph,
    demands: Vec<(usize, usize)>,
    out: Vec<Vec<(usize, usize)>>,
    inn: Vec<Vec<(usize, usize)>>,
    budget: u64,
    budget_total: u64,
}

enum Goal {
    /// Find a solution cheaper than `best`, improving it in place.
    Improve,
    /// Any solution of cost at most the bound.
    Within(Cost),
}

impl Goal {
    /// Largest admissible cost, or `None` when nothing can qualify.
    fn bound(&self, best: &Option<(Cost, EdgeSet)>) -> Option<Cost> {
        match self {
            Goal::Improve => best.as_ref().map_or(Some(Cost::MAX), |b| b.0.checked_sub(1)),
            Goal::Within(b) => Some(*b),
        }
    }
}

impl<'a> Search<'a> {
    fn new(g: &'a WeightedDigraph, demands: Vec<(usize, usize)>, allowed: EdgeSet, budget: u64) -> Self {
        let n = g.vertex_count();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for e in g.edge_ids() {
            if has(&allowed, e.index()) {
                let edge = g.edge(e);
                out[edge.tail.index()].push((edge.head.index(), e.index()));
                inn[edge.head.index()].push((edge.tail.index(), e.index()));
            }
        }
        Search {
            g,
            demands,
            out,
            inn,
            budget,
            budget_total: budget,
        }
    }

    fn cost_of(&self, e: usize) -> Cost {
        self.g.edge(EdgeId::new(e)).cost
    }

    fn tick(&mut self) -> Result<()> {
        if self.budget == 0 {
            return Err(DsnError::SearchBudget(self.budget_total));
        }
        self.budget -= 1;
        Ok(())
    }

    /// Distances with the edges of `cur` free, forward from `s` or backward to `s`.
    fn dijkstra(&self, s: usize, cur: &EdgeSet, backward: bool) -> Vec<Cost> {
        let adj = if backward { &self.inn } else { &self.out };
        let mut dist = vec![Cost::MAX; adj.len()];
        dist[s] = 0;
        let mut heap = BinaryHeap::from([Reverse((0, s))]);
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &adj[v] {
                let c = if has(cur, e) { 0 } else { self.cost_of(e) };
                if d + c < dist[w] {
                    dist[w] = d + c;
                    heap.push(Reverse((d + c, w)));
                }
            }
        }
        dist
    }

    fn reach(&self, s: usize, cur: &EdgeSet) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(w, e) in &self.out[v] {
                if has(cur, e) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    fn unsatisfied(&self, cur: &EdgeSet) -> Vec<(usize, usize)> {
        let mut res = Vec::new();
        let mut last = usize::MAX;
        let mut seen = Vec::new();
        for &(s, t) in &self.demands {
            if s != last {
                seen = self.reach(s, cur);
                last = s;
            }
            if !seen[t] {
                res.push((s, t));
            }
        }
        res
    }

    /// Inclusion-minimal sets of new edges that complete an `s -> t` path, each with its
    /// cost, restricted to cost at most `limit`.
    fn completions(&mut self, s: usize, t: usize, cur: &EdgeSet, limit: Cost) -> Result<Vec<(Cost, EdgeSet)>> {
        let to_t = self.dijkstra(t, cur, true);
        let mut found: Vec<(Cost, EdgeSet)> = Vec::new();
        let mut on_path = vec![false; self.out.len()];
        let mut new = [0u64; WORDS];
        on_path[s] = true;
        self.extend_path(s, t, 0, limit, &to_t, cur, &mut on_path, &mut new, &mut found)?;
        let size = |f: &EdgeSet| f.iter().map(|w| w.count_ones()).sum::<u32>();
        found.sort_by_key(|a| (a.0, size(&a.1), a.1));
        let mut minimal: Vec<(Cost, EdgeSet)> = Vec::new();
        for (c, f) in found {
            if !minimal.iter().any(|(_, m)| subset(m, &f)) {
                minimal.push((c, f));
            }
        }
        Ok(minimal)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_path(
        &mut self,
        v: usize,
        t: usize,
        spent: Cost,
        limit: Cost,
        to_t: &[Cost],
        cur: &EdgeSet,
        on_path: &mut Vec<bool>,
        new: &mut EdgeSet,
        found: &mut Vec<(Cost, EdgeSet)>,
    ) -> Result<()> {
        self.tick()?;
        if v == t {
            found.push((spent, *new));
            return Ok(());
        }
        for i in 0..self.out[v].len() {
            let (w, e) = self.out[v][i];
            if on_path[w] || to_t[w] == Cost::MAX {
                continue;
            }
            let free = has(cur, e);
            let c = if free { 0 } else { self.cost_of(e) };
            if spent + c + to_t[w] > limit {
                continue;
            }
            on_path[w] = true;
            if !free {
                set(new, e);
            }
            self.extend_path(w, t, spent + c, limit, to_t, cur, on_path, new, found)?;
            if !free {
                new[e / 64] &= !(1 << (e % 64));
            }
            on_path[w] = false;
        }
        Ok(())
    }

    /// Depth-first branch and bound over growing edge sets.
    fn run(
        &mut self,
        cur: EdgeSet,
        cost: Cost,
        goal: &Goal,
        best: &mut Option<(Cost, EdgeSet)>,
        seen: &mut HashSet<EdgeSet>,
    ) -> Result<bool> {
        self.tick()?;
        if !seen.insert(cur) {
            return Ok(false);
        }
        let open = self.unsatisfied(&cur);
        let Some(bound) = goal.bound(best) else {
            return Ok(false);
        };
        if open.is_empty() {
            if cost <= bound {
                *best = Some((cost, cur));
                return Ok(matches!(goal, Goal::Within(_)));
            }
            return Ok(false);
        }
        let mut lb = 0;
        for &(s, t) in &open {
            let d = self.dijkstra(s, &cur, false)[t];
            if d == Cost::MAX {
                return Ok(false);
            }
            lb = lb.max(d);
        }
        if cost.saturating_add(lb) > bound {
            return Ok(false);
        }
        let (s, t) = open[0];
        let options = self.completions(s, t, &cur, bound - cost)?;
        for (c, f) in options {
            let Some(bound) = goal.bound(best) else {
                return Ok(false);
            };
            if cost + c > bound {
                continue;
            }
            let mut next = cur;
            for (w, x) in next.iter_mut().zip(&f) {
                *w |= x;
            }
            if self.run(next, cost + c, goal, best, seen)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn to_ids(s: &EdgeSet, m: usize) -> Vec<EdgeId> {
    (0..m).filter(|&e| has(s, e)).map(EdgeId::new).collect()
}

/// Exact optimum by branch and bound. Returns `None` when some demand is unreachable.
pub fn brute_force_solve<'g>(g: &'g WeightedDigraph, h: &Pattern) -> Result<Option<(SolutionNetwork<'g>, Cost)>> {
    brute_force_solve_with(g, h, &OracleOptions::default())
}

/// Exact optimum. Among optima of equal cost the lexicographically smallest sorted edge
/// list is returned when `canonical` is set.
pub fn brute_force_solve_with<'g>(
    g: &'g WeightedDigraph,
    h: &Pattern,
    opts: &OracleOptions,
) -> Result<Option<(SolutionNetwork<'g>, Cost)>> {
    let m = g.edge_count();
    DsnError::guard("host edge count", opts.max_edges.min(ORACLE_MAX_EDGES), m)?;
    let mut demands: Vec<(usize, usize)> = h
        .bound_demands(g)?
        .into_iter()
        .map(|(s, t)| (s.index(), t.index()))
        .collect();
    demands.sort_unstable();
    if demands.is_empty() {
        return Ok(Some((SolutionNetwork::empty(g), 0)));
    }
    let full = SolutionNetwork::full(g);
    let upper = match minimalize(&full, h) {
        Ok(n) => n,
        Err(DsnError::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut all = [0u64; WORDS];
    for e in 0..m {
        set(&mut all, e);
    }
    let mut search = Search::new(g, demands.clone(), all, opts.node_budget);

    // Start from the union of shortest paths; it is feasible and usually tight.
    let mut start = [0u64; WORDS];
    let empty = [0u64; WORDS];
    for &(s, t) in &demands {
        // Parent pointers change only on strict improvement, so zero-cost cycles cannot
        // trap the walk back from `t`.
        let n = g.vertex_count();
        let mut dist = vec![Cost::MAX; n];
        let mut parent = vec![None; n];
        dist[s] = 0;
        let mut heap = BinaryHeap::from([Reverse((0, s))]);
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &search.out[v] {
                let nd = d + search.cost_of(e);
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = Some((v, e));
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        let mut v = t;
        while v != s {
            let (u, e) = parent[v].expect("feasible demand");
            set(&mut start, e);
            v = u;
        }
    }
    let shortest = minimalize(&SolutionNetwork::new(g, to_ids(&start, m))?, h)?;
    let seed = if shortest.cost() <= upper.cost() {
        shortest
    } else {
        upper
    };
    let mut seed_set = [0u64; WORDS];
    for e in seed.edges() {
        set(&mut seed_set, e.index());
    }
    let mut best = Some((seed.cost(), seed_set));
    let mut seen = HashSet::new();
    search.run(empty, 0, &Goal::Improve, &mut best, &mut seen)?;
    let (opt, found) = best.expect("seeded with a feasible network");
    if !opts.canonical {
        return Ok(Some((SolutionNetwork::new(g, to_ids(&found, m))?, opt)));
    }

    // Greedy lexicographic refinement: decide edge ids in increasing order.
    let mut prefix = [0u64; WORDS];
    let mut budget = search.budget;
    for i in 0..m {
        if search.unsatisfied(&prefix).is_empty() {
            break;
        }
        let mut forced = prefix;
        set(&mut forced, i);
        let fcost: Cost = (0..m).filter(|&e| has(&forced, e)).map(|e| search.cost_of(e)).sum();
        if fcost > opt {
            continue;
        }
        let mut allowed = forced;
        for j in i + 1..m {
            set(&mut allowed, j);
        }
        let mut within = Search::new(g, demands.clone(), allowed, budget);
        let ok = within.run(forced, fcost, &Goal::Within(opt), &mut None, &mut HashSet::new())?;
        budget = within.budget;
        if ok {
            prefix = forced;
        }
    }
    let net = SolutionNetwork::new(g, to_ids(&prefix, m))?;
    debug_assert_eq!(net.cost(), opt);
    Ok(Some((net, opt)))
}

/// Convenience: only the optimum cost.
pub fn oracle_cost(g: &WeightedDigraph, h: &Pattern) -> Result<Option<Cost>> {
    let opts = OracleOptions {
        canonical: false,
        ..OracleOptions::default()
    };
    Ok(brute_force_solve_with(g, h, &opts)?.map(|(_, c)| c))
}
