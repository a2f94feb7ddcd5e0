use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use super::entry::{bind_stars, check_entry, BoundStar, DpEntryKey};
use crate::classify::{best_caterpillar_parameters, star_decomposition, Orientation, SearchLimits, StarDecomposition};
use crate::error::{DsnError, Result};
use crate::graph::bits::{bit, ones};
use crate::graph::{feasible, Cost, EdgeId, Pattern, SolutionNetwork, VertexId, WeightedDigraph};

pub const DP_MAX_VERTICES: usize = 64;
pub const DP_MAX_EDGES: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpOptions {
    /// Re-derive a key for every stored network and run `check_entry` on it.
    pub self_check: bool,
    /// Number of candidate networks that may be evaluated before giving up.
    pub max_candidates: u64,
    /// Number of networks that may be stored before giving up.
    pub max_entries: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            self_check: false,
            max_candidates: 20_000_000,
            max_entries: 2_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DpSolution<'g> {
    pub network: SolutionNetwork<'g>,
    pub cost: Cost,
    pub omega: usize,
    pub entries: usize,
}

/// `7(1+λ)(λ+δ)` for the cheapest caterpillar parameters of `h`, capped at `n-1`.
pub fn default_omega(g: &WeightedDigraph, h: &Pattern) -> Result<usize> {
    let (lambda, delta, _) = best_caterpillar_parameters(h, h.terminal_count(), &SearchLimits::default())?;
    let omega = 7 * (1 + lambda) * (lambda + delta);
    Ok(omega.min(g.vertex_count().saturating_sub(1)).max(1))
}

pub fn solve_dp<'g>(g: &'g WeightedDigraph, h: &Pattern, omega: usize) -> Result<Option<DpSolution<'g>>> {
    solve_dp_with(g, h, omega, &DpOptions::default())
}

pub fn solve_dp_with<'g>(
    g: &'g WeightedDigraph,
    h: &Pattern,
    omega: usize,
    opts: &DpOptions,
) -> Result<Option<DpSolution<'g>>> {
    validate_args(h, omega)?;
    if !feasible(&SolutionNetwork::full(g), h)? {
        return Ok(None);
    }
    let table = build_table(g, h, omega, opts)?;
    if opts.self_check {
        table.self_check()?;
    }
    table.answer()
}

fn validate_args(h: &Pattern, omega: usize) -> Result<()> {
    if omega < 1 {
        return Err(DsnError::InvalidArgument("treewidth bound must be at least 1".into()));
    }
    if h.is_empty() {
        return Err(DsnError::InvalidArgument("pattern has no demands".into()));
    }
    Ok(())
}

struct Ctx<'g> {
    g: &'g WeightedDigraph,
    n: usize,
    tails: Vec<usize>,
    heads: Vec<usize>,
    costs: Vec<Cost>,
    stars: Vec<BoundStar>,
    rmask: u64,
    r_out: u64,
    r_in: u64,
    omega: usize,
    cap: usize,
    evaluated: u64,
    max_candidates: u64,
    max_entries: usize,
}

#[derive(Clone, Debug)]
struct Entry {
    u: u64,
    q: u64,
    i: u128,
    vmask: u64,
    emask: u128,
    cost: Cost,
    vcount: u32,
    /// Reach masks for sources `U` ascending, then `R_out \ U` ascending.
    rows: Box<[u64]>,
    /// Per star, a minimal antichain of sets of which `A_j` must hit each one.
    cons: Box<[Vec<u64>]>,
    alive: bool,
}

impl Ctx<'_> {
    fn tick(&mut self) -> Result<()> {
        self.evaluated += 1;
        if self.evaluated > self.max_candidates {
            return Err(DsnError::SearchBudget(self.max_candidates));
        }
        Ok(())
    }

    /// The entry stored for network `emask` (plus vertices `extra`) at bag `u`, or
    /// `None` when no attachment sets inside `u` can satisfy property (iv).
    fn evaluate(&mut self, u: u64, emask: u128, extra: u64) -> Result<Option<Entry>> {
        self.tick()?;
        let mut vmask = u | extra;
        let mut out = vec![0u64; self.n];
        let mut i = 0u128;
        let mut cost: Cost = 0;
        for e in ones128(emask) {
            let (t, h) = (self.tails[e], self.heads[e]);
            vmask |= bit(t) | bit(h);
            out[t] |= bit(h);
            cost += self.costs[e];
            if u & bit(t) != 0 && u & bit(h) != 0 {
                i |= 1u128 << e;
            }
        }
        let mut reach = vec![0u64; self.n];
        for v in ones(vmask) {
            let mut seen = bit(v);
            let mut frontier = seen;
            while frontier != 0 {
                let mut next = 0;
                for w in ones(frontier) {
                    next |= out[w];
                }
                frontier = next & !seen;
                seen |= next;
            }
            reach[v] = seen;
        }

        let mut rows = Vec::with_capacity(u.count_ones() as usize);
        for s in ones(u) {
            rows.push(reach[s] & (u | self.r_in) & !bit(s));
        }
        for s in ones(self.r_out & !u) {
            rows.push(reach[s] & u & !bit(s));
        }

        let mut cons = Vec::with_capacity(self.stars.len());
        for star in &self.stars {
            let root = star.root.index();
            let mut sets: Vec<u64> = Vec::new();
            for l in star.leaves.iter().map(|l| l.index()).filter(|&l| vmask & bit(l) != 0) {
                let need = match star.orientation {
                    Orientation::Out => {
                        if reach[root] & bit(l) != 0 {
                            continue;
                        }
                        ones(u).filter(|&w| reach[w] & bit(l) != 0).fold(0, |m, w| m | bit(w))
                    }
                    Orientation::In => {
                        if reach[l] & bit(root) != 0 {
                            continue;
                        }
                        reach[l] & u
                    }
                };
                if need == 0 {
                    return Ok(None);
                }
                sets.push(need);
            }
            cons.push(antichain(sets));
        }

        Ok(Some(Entry {
            u,
            q: vmask & self.rmask,
            i,
            vmask,
            emask,
            cost,
            vcount: vmask.count_ones(),
            rows: rows.into_boxed_slice(),
            cons: cons.into_boxed_slice(),
            alive: true,
        }))
    }

    fn network(&self, e: &Entry) -> SolutionNetwork<'_> {
        let edges: Vec<EdgeId> = ones128(e.emask).map(EdgeId::new).collect();
        SolutionNetwork::new(self.g, edges)
            .expect("edge ids come from the host")
            .with_vertices(ones(e.vmask).map(VertexId::new))
    }
}

fn ones128(mask: u128) -> impl Iterator<Item = usize> {
    let (lo, hi) = (mask as u64, (mask >> 64) as u64);
    ones(lo).chain(ones(hi).map(|i| i + 64))
}

/// Inclusion-minimal members of `sets`, sorted and deduplicated.
fn antichain(mut sets: Vec<u64>) -> Vec<u64> {
    sets.sort_unstable_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for s in sets {
        if !kept.iter().any(|&t| t & !s == 0) {
            kept.push(s);
        }
    }
    kept.sort_unstable();
    kept
}

/// Order of sorted edge lists for edge sets given as bitmasks.
fn lex_cmp(a: u128, b: u128) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let d = (a ^ b).trailing_zeros();
    let above = |m: u128| d < 127 && m >> (d + 1) != 0;
    if a & (1u128 << d) != 0 {
        if above(b) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    } else if above(a) {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn tie_cmp(a: &Entry, b: &Entry) -> Ordering {
    a.cost
        .cmp(&b.cost)
        .then_with(|| lex_cmp(a.emask, b.emask))
        .then_with(|| a.vmask.cmp(&b.vmask))
}

/// `a` is at least as good as `b` for every later use.
fn covers(a: &Entry, b: &Entry) -> bool {
    a.cost <= b.cost
        && a.vcount <= b.vcount
        && a.rows.iter().zip(b.rows.iter()).all(|(x, y)| y & !x == 0)
        && a.cons
            .iter()
            .zip(b.cons.iter())
            .all(|(ca, cb)| ca.iter().all(|&s| cb.iter().any(|&t| t & !s == 0)))
}

fn beats(a: &Entry, b: &Entry) -> bool {
    covers(a, b) && (!covers(b, a) || tie_cmp(a, b) != Ordering::Greater)
}

/// Pareto table of partial networks, keyed by bag `U`, terminals `Q` and induced edges `I`.
pub struct DpTable<'g> {
    ctx: Ctx<'g>,
    h: Pattern,
    stars: StarDecomposition,
    entries: Vec<Entry>,
    buckets: HashMap<(u64, u64, u128), Vec<usize>>,
    bags: HashMap<u64, Vec<usize>>,
}

pub fn build_table<'g>(g: &'g WeightedDigraph, h: &Pattern, omega: usize, opts: &DpOptions) -> Result<DpTable<'g>> {
    validate_args(h, omega)?;
    DsnError::guard("host vertex count", DP_MAX_VERTICES, g.vertex_count())?;
    DsnError::guard("host edge count", DP_MAX_EDGES, g.edge_count())?;
    let n = g.vertex_count();
    let ids = h.bind(g)?;
    let stars = star_decomposition(h)?;
    let bound = bind_stars(h, &stars, &ids);
    let mask_of = |o: Orientation| {
        bound
            .iter()
            .filter(|s| s.orientation == o)
            .fold(0u64, |m, s| m | bit(s.root.index()))
    };
    let omega = omega.min(n - 1);
    let ctx = Ctx {
        g,
        n,
        tails: g.edges().iter().map(|e| e.tail.index()).collect(),
        heads: g.edges().iter().map(|e| e.head.index()).collect(),
        costs: g.edges().iter().map(|e| e.cost).collect(),
        rmask: ids.iter().fold(0, |m, v| m | bit(v.index())),
        r_out: mask_of(Orientation::Out),
        r_in: mask_of(Orientation::In),
        cap: bound.len() * omega,
        stars: bound,
        omega,
        evaluated: 0,
        max_candidates: opts.max_candidates,
        max_entries: opts.max_entries,
    };
    let mut table = DpTable {
        ctx,
        h: h.clone(),
        stars,
        entries: Vec::new(),
        buckets: HashMap::new(),
        bags: HashMap::new(),
    };
    table.fill()?;
    Ok(table)
}

impl<'g> DpTable<'g> {
    fn insert(&mut self, e: Entry) -> Option<usize> {
        let bucket = self.buckets.entry((e.u, e.q, e.i)).or_default();
        if bucket.iter().any(|&j| beats(&self.entries[j], &e)) {
            return None;
        }
        for &j in bucket.iter() {
            if beats(&e, &self.entries[j]) {
                self.entries[j].alive = false;
            }
        }
        let entries = &self.entries;
        bucket.retain(|&j| entries[j].alive);
        let idx = self.entries.len();
        bucket.push(idx);
        self.bags.entry(e.u).or_default().push(idx);
        self.entries.push(e);
        Some(idx)
    }

    fn offer(&mut self, heap: &mut BinaryHeap<Reverse<(u32, Cost, usize)>>, e: Option<Entry>) -> Result<()> {
        if let Some(idx) = e.and_then(|e| self.insert(e)) {
            if self.entries.len() > self.ctx.max_entries {
                return Err(DsnError::SearchBudget(self.ctx.max_entries as u64));
            }
            let e = &self.entries[idx];
            heap.push(Reverse((e.vcount, e.cost, idx)));
        }
        Ok(())
    }

    /// Base entries: every subset of the edges inside `u` with at most `cap` members.
    fn base(
        &mut self,
        heap: &mut BinaryHeap<Reverse<(u32, Cost, usize)>>,
        u: u64,
        inside: &[usize],
        chosen: u128,
        size: usize,
    ) -> Result<()> {
        let e = self.ctx.evaluate(u, chosen, 0)?;
        self.offer(heap, e)?;
        if size == self.ctx.cap {
            return Ok(());
        }
        for (k, &edge) in inside.iter().enumerate() {
            self.base(heap, u, &inside[k + 1..], chosen | (1u128 << edge), size + 1)?;
        }
        Ok(())
    }

    fn fill(&mut self) -> Result<()> {
        let n = self.ctx.n;
        let mut heap = BinaryHeap::new();
        for u in subsets_of_size(n, self.ctx.omega + 1) {
            let inside: Vec<usize> = (0..self.ctx.tails.len())
                .filter(|&e| u & bit(self.ctx.tails[e]) != 0 && u & bit(self.ctx.heads[e]) != 0)
                .collect();
            self.base(&mut heap, u, &inside, 0, 0)?;
        }

        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        while let Some(Reverse((_, _, idx))) = heap.pop() {
            if !self.entries[idx].alive {
                continue;
            }
            let (u, emask, vmask) = {
                let e = &self.entries[idx];
                (e.u, e.emask, e.vmask)
            };
            for a in ones(u) {
                for b in ones(full & !u) {
                    let u2 = (u & !bit(a)) | bit(b);
                    let Some(list) = self.bags.get(&u2) else {
                        continue;
                    };
                    let list = list.clone();
                    for j in list {
                        if !self.entries[j].alive {
                            continue;
                        }
                        let (ye, yv) = (self.entries[j].emask, self.entries[j].vmask);
                        let (ue, uv) = (emask | ye, vmask | yv);
                        if (ue, uv) != (emask, vmask) {
                            let e = self.ctx.evaluate(u, ue, uv)?;
                            self.offer(&mut heap, e)?;
                        }
                        if (ue, uv) != (ye, yv) {
                            let e = self.ctx.evaluate(u2, ue, uv)?;
                            self.offer(&mut heap, e)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn alive(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.alive)
    }

    /// Effective treewidth bound (the requested one capped at `n-1`).
    pub fn omega(&self) -> usize {
        self.ctx.omega
    }

    pub fn decomposition(&self) -> &StarDecomposition {
        &self.stars
    }

    /// Number of stored (non-dominated) entries.
    pub fn len(&self) -> usize {
        self.alive().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of candidate networks evaluated while filling the table.
    pub fn candidates(&self) -> u64 {
        self.ctx.evaluated
    }

    fn key_of(&self, e: &Entry) -> DpEntryKey {
        let vs = |m: u64| -> BTreeSet<VertexId> { ones(m).map(VertexId::new).collect() };
        let sources = ones(e.u).chain(ones(self.ctx.r_out & !e.u));
        let mut b = BTreeSet::new();
        for (s, &row) in sources.zip(e.rows.iter()) {
            for t in ones(row) {
                b.insert((VertexId::new(s), VertexId::new(t)));
            }
        }
        DpEntryKey {
            i: e.vcount as usize,
            q: vs(e.q),
            u: vs(e.u),
            edges: ones128(e.i).map(EdgeId::new).collect(),
            b,
            a: e.cons.iter().map(|c| vs(hitting_set(c))).collect(),
        }
    }

    /// Every stored network with the strongest key it satisfies.
    pub fn stored_entries(&self) -> Vec<(DpEntryKey, SolutionNetwork<'g>)> {
        self.alive()
            .map(|e| (self.key_of(e), network_of(self.ctx.g, e)))
            .collect()
    }

    /// Runs `check_entry` on every stored network against its own key.
    pub fn self_check(&self) -> Result<()> {
        for e in self.alive() {
            let key = self.key_of(e);
            if !check_entry(&self.ctx.network(e), &key, &self.h, &self.stars)? {
                return Err(DsnError::CertificateMismatch(format!(
                    "stored network with {} edges violates its entry",
                    e.emask.count_ones()
                )));
            }
        }
        Ok(())
    }

    /// The cheapest stored network satisfying `key`, if any.
    pub fn best_for(&self, key: &DpEntryKey) -> Result<Option<SolutionNetwork<'g>>> {
        let mask = |s: &BTreeSet<VertexId>| s.iter().fold(0u64, |m, v| m | bit(v.index()));
        let imask = key.edges.iter().fold(0u128, |m, e| m | (1u128 << e.index()));
        let Some(bucket) = self.buckets.get(&(mask(&key.u), mask(&key.q), imask)) else {
            return Ok(None);
        };
        let mut best: Option<&Entry> = None;
        for e in bucket.iter().map(|&j| &self.entries[j]).filter(|e| e.alive) {
            if best.is_some_and(|b| tie_cmp(b, e) != Ordering::Greater) {
                continue;
            }
            if check_entry(&self.ctx.network(e), key, &self.h, &self.stars)? {
                best = Some(e);
            }
        }
        Ok(best.map(|e| network_of(self.ctx.g, e)))
    }

    /// The cheapest stored network with `Q = R` and no pending attachment, verified feasible.
    pub fn answer(&self) -> Result<Option<DpSolution<'g>>> {
        let best = self
            .alive()
            .filter(|e| e.q == self.ctx.rmask && e.cons.iter().all(|c| c.is_empty()))
            .min_by(|a, b| tie_cmp(a, b));
        let Some(e) = best else {
            return Ok(None);
        };
        let edges: Vec<EdgeId> = ones128(e.emask).map(EdgeId::new).collect();
        let network = SolutionNetwork::new(self.ctx.g, edges)?;
        if !feasible(&network, &self.h)? {
            return Err(DsnError::CertificateMismatch(
                "table answer does not satisfy every demand".into(),
            ));
        }
        Ok(Some(DpSolution {
            cost: network.cost(),
            network,
            omega: self.ctx.omega,
            entries: self.len(),
        }))
    }
}

fn network_of<'g>(g: &'g WeightedDigraph, e: &Entry) -> SolutionNetwork<'g> {
    let edges: Vec<EdgeId> = ones128(e.emask).map(EdgeId::new).collect();
    SolutionNetwork::new(g, edges)
        .expect("edge ids come from the host")
        .with_vertices(ones(e.vmask).map(VertexId::new))
}

/// Greedy hitting set of an antichain: repeatedly take the vertex in most unhit sets.
fn hitting_set(sets: &[u64]) -> u64 {
    let mut open: Vec<u64> = sets.to_vec();
    let mut chosen = 0u64;
    while !open.is_empty() {
        let all = open.iter().fold(0u64, |m, s| m | s);
        let v = ones(all)
            .max_by_key(|&v| (open.iter().filter(|&&s| s & bit(v) != 0).count(), Reverse(v)))
            .expect("sets are non-empty");
        chosen |= bit(v);
        open.retain(|&s| s & bit(v) == 0);
    }
    chosen
}

/// All `k`-subsets of `0..n` as masks, in increasing colexicographic order.
fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let first = if k == 0 {
        Some(0u64)
    } else if k <= n {
        Some(u64::MAX >> (64 - k))
    } else {
        None
    };
    let limit = if n == 64 { None } else { Some(1u64 << n) };
    std::iter::successors(first, move |&m| {
        if m == 0 {
            return None;
        }
        // Gosper's hack.
        let c = m & m.wrapping_neg();
        let r = m.checked_add(c)?;
        let next = (((r ^ m) >> 2) / c) | r;
        match limit {
            Some(l) if next >= l => None,
            _ => Some(next),
        }
    })
}
