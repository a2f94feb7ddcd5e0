use std::collections::{BTreeSet, HashSet};

use super::{CaterpillarCertificate, Orientation};
use crate::error::{DsnError, Result};
use crate::graph::bits::{bit, ones, BitDigraph};
use crate::graph::{transitively_equivalent_with_guard, Pattern, DEFAULT_PATTERN_GUARD};

/// Size guard and node budget for the exponential membership searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub guard: usize,
    pub node_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            guard: DEFAULT_PATTERN_GUARD,
            node_budget: 50_000_000,
        }
    }
}

pub(crate) struct Budget {
    left: u64,
    total: u64,
}

impl Budget {
    pub(crate) fn new(total: u64) -> Self {
        Budget { left: total, total }
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(DsnError::SearchBudget(self.total));
        }
        self.left -= 1;
        Ok(())
    }
}

/// Certificate in index form, always about an out-caterpillar of the working graph.
pub(crate) struct Raw {
    pub(crate) spine: Vec<usize>,
    pub(crate) leaves: Vec<Vec<usize>>,
    pub(crate) extra: Vec<(usize, usize)>,
    pub(crate) equivalent: Option<BitDigraph>,
}

impl Raw {
    pub(crate) fn into_certificate(self, h: &Pattern, orientation: Orientation) -> CaterpillarCertificate {
        let name = |i: usize| h.name(i).to_string();
        let flip = orientation == Orientation::In;
        let (mut spine, mut leaves) = (self.spine, self.leaves);
        let mut extra = self.extra;
        let mut equivalent = self.equivalent;
        if flip {
            spine.reverse();
            leaves.reverse();
            extra = extra.into_iter().map(|(a, b)| (b, a)).collect();
            equivalent = equivalent.map(|g| g.reversed());
        }
        extra.sort_unstable();
        CaterpillarCertificate {
            lambda0: spine.len(),
            orientation,
            spine: spine.iter().map(|&v| name(v)).collect(),
            stars: spine
                .iter()
                .zip(&leaves)
                .map(|(&v, ls)| std::iter::once(v).chain(ls.iter().copied()).map(name).collect())
                .collect(),
            extra_edges: extra.into_iter().map(|(a, b)| (name(a), name(b))).collect(),
            equivalent_pattern: equivalent.map(|g| Pattern::from_bits(h.terminals().to_vec(), &g)),
        }
    }
}

/// Calls `f` on every simple path of `g` with 1..=max_len vertices, shorter paths first
/// and lexicographically within a length. Stops early when `f` returns `true`.
fn visit_spines(
    g: &BitDigraph,
    max_len: usize,
    budget: &mut Budget,
    f: &mut dyn FnMut(&[usize], &mut Budget) -> Result<bool>,
) -> Result<()> {
    fn extend(
        g: &BitDigraph,
        len: usize,
        path: &mut Vec<usize>,
        used: u64,
        budget: &mut Budget,
        f: &mut dyn FnMut(&[usize], &mut Budget) -> Result<bool>,
    ) -> Result<bool> {
        budget.tick()?;
        if path.len() == len {
            return f(path, budget);
        }
        let last = *path.last().expect("non-empty path");
        for w in ones(g.out[last] & !used) {
            path.push(w);
            let stop = extend(g, len, path, used | bit(w), budget, f)?;
            path.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
    for len in 1..=max_len.min(g.n()) {
        for start in 0..g.n() {
            let mut path = vec![start];
            if extend(g, len, &mut path, bit(start), budget, f)? {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// The caterpillar with the given spine that uses every available leaf. A leaf with
/// several possible roots goes to the last one on the spine.
fn maximal_caterpillar(g: &BitDigraph, spine: &[usize]) -> (Vec<Vec<usize>>, BitDigraph) {
    let n = g.n();
    let on_spine = spine.iter().fold(0u64, |m, &v| m | bit(v));
    let mut leaves = vec![Vec::new(); spine.len()];
    let mut c = BitDigraph { out: vec![0; n] };
    for w in spine.windows(2) {
        c.add(w[0], w[1]);
    }
    for w in (0..n).filter(|&w| on_spine & bit(w) == 0) {
        if let Some(i) = (0..spine.len()).rev().find(|&i| g.has(spine[i], w)) {
            leaves[i].push(w);
            c.add(spine[i], w);
        }
    }
    (leaves, c)
}

fn difference(g: &BitDigraph, c: &BitDigraph) -> Vec<(usize, usize)> {
    g.arcs().into_iter().filter(|&(a, b)| !c.has(a, b)).collect()
}

fn prepared(h: &Pattern, limits: &SearchLimits) -> Result<BitDigraph> {
    DsnError::guard("pattern vertex count", limits.guard, h.terminal_count())?;
    h.to_bits()
}

/// Certificate with `F = ∅` when the pattern is a λ₀-caterpillar for some `λ₀ ≤ λ`.
pub fn is_caterpillar(h: &Pattern, lambda: usize) -> Result<Option<CaterpillarCertificate>> {
    in_c_lambda_delta(h, lambda, 0)
}

pub fn in_c_lambda_delta(h: &Pattern, lambda: usize, delta: usize) -> Result<Option<CaterpillarCertificate>> {
    in_c_lambda_delta_with(h, lambda, delta, &SearchLimits::default())
}

/// Membership in `C_{λ,δ}` with a certificate of minimum `|F|`.
pub fn in_c_lambda_delta_with(
    h: &Pattern,
    lambda: usize,
    delta: usize,
    limits: &SearchLimits,
) -> Result<Option<CaterpillarCertificate>> {
    let g = prepared(h, limits)?;
    let mut budget = Budget::new(limits.node_budget);
    let mut best: Option<(Raw, Orientation)> = None;
    if g.arc_count() <= delta {
        best = Some((
            Raw {
                spine: Vec::new(),
                leaves: Vec::new(),
                extra: g.arcs(),
                equivalent: None,
            },
            Orientation::Out,
        ));
    }
    for orientation in [Orientation::Out, Orientation::In] {
        let work = match orientation {
            Orientation::Out => g.clone(),
            Orientation::In => g.reversed(),
        };
        visit_spines(&work, lambda, &mut budget, &mut |spine, _| {
            let (leaves, c) = maximal_caterpillar(&work, spine);
            let extra = difference(&work, &c);
            let limit = best.as_ref().map_or(delta + 1, |(r, _)| r.extra.len().min(delta + 1));
            if extra.len() < limit {
                let done = extra.is_empty();
                best = Some((
                    Raw {
                        spine: spine.to_vec(),
                        leaves,
                        extra,
                        equivalent: None,
                    },
                    orientation,
                ));
                return Ok(done);
            }
            Ok(false)
        })?;
        if best.as_ref().is_some_and(|(r, _)| r.extra.is_empty()) {
            break;
        }
    }
    Ok(best.map(|(raw, o)| raw.into_certificate(h, o)))
}

pub fn in_c_star(h: &Pattern, lambda: usize, delta: usize) -> Result<Option<CaterpillarCertificate>> {
    in_c_star_with(h, lambda, delta, &SearchLimits::default())
}

/// Membership in `C*_{λ,δ}`: some pattern with the same transitive closure lies in
/// `C_{λ,δ}`. The witness is built inside the closure `T` as a caterpillar `C` plus a
/// smallest set `F ⊆ T - C` with `closure(C ∪ F) = T`.
pub fn in_c_star_with(
    h: &Pattern,
    lambda: usize,
    delta: usize,
    limits: &SearchLimits,
) -> Result<Option<CaterpillarCertificate>> {
    let t = prepared(h, limits)?.closure();
    let mut budget = Budget::new(limits.node_budget);
    let mut best: Option<(Raw, Orientation)> = None;
    let empty = BitDigraph { out: vec![0; t.n()] };
    if let Some(f) = min_completion(&t, &empty, delta, &mut budget)? {
        let mut eq = empty.clone();
        for &(a, b) in &f {
            eq.add(a, b);
        }
        best = Some((
            Raw {
                spine: Vec::new(),
                leaves: Vec::new(),
                extra: f,
                equivalent: Some(eq),
            },
            Orientation::Out,
        ));
    }
    for orientation in [Orientation::Out, Orientation::In] {
        if best.as_ref().is_some_and(|(r, _)| r.extra.is_empty()) {
            break;
        }
        let work = match orientation {
            Orientation::Out => t.clone(),
            Orientation::In => t.reversed(),
        };
        visit_spines(&work, lambda, &mut budget, &mut |spine, budget| {
            let limit = match &best {
                None => delta,
                Some((r, _)) if r.extra.is_empty() => return Ok(true),
                Some((r, _)) => delta.min(r.extra.len() - 1),
            };
            let (leaves, c) = maximal_caterpillar(&work, spine);
            if let Some(f) = min_completion(&work, &c, limit, budget)? {
                let mut eq = c;
                for &(a, b) in &f {
                    eq.add(a, b);
                }
                let done = f.is_empty();
                best = Some((
                    Raw {
                        spine: spine.to_vec(),
                        leaves,
                        extra: f,
                        equivalent: Some(eq),
                    },
                    orientation,
                ));
                return Ok(done);
            }
            Ok(false)
        })?;
    }
    Ok(best.map(|(raw, o)| raw.into_certificate(h, o)))
}

/// Smallest `F ⊆ T - C`, `|F| ≤ limit`, with `closure(C ∪ F) = T`, by iterative deepening.
fn min_completion(
    t: &BitDigraph,
    c: &BitDigraph,
    limit: usize,
    budget: &mut Budget,
) -> Result<Option<Vec<(usize, usize)>>> {
    for depth in 0..=limit {
        let mut cur = c.clone();
        let mut f = Vec::new();
        let mut memo = HashSet::new();
        if completion_dfs(t, &mut cur, &mut f, depth, &mut memo, budget)? {
            f.sort_unstable();
            return Ok(Some(f));
        }
    }
    Ok(None)
}

fn completion_dfs(
    t: &BitDigraph,
    cur: &mut BitDigraph,
    f: &mut Vec<(usize, usize)>,
    left: usize,
    memo: &mut HashSet<Vec<(usize, usize)>>,
    budget: &mut Budget,
) -> Result<bool> {
    budget.tick()?;
    let cl = cur.closure();
    if cl == *t {
        return Ok(true);
    }
    if left == 0 {
        return Ok(false);
    }
    // Every vertex with an out-edge (in-edge) in T needs one in the completed graph.
    let ins = cur.in_masks();
    let t_ins = t.in_masks();
    let need_out = (0..t.n()).filter(|&v| t.out[v] != 0 && cur.out[v] == 0).count();
    let need_in = (0..t.n()).filter(|&v| t_ins[v] != 0 && ins[v] == 0).count();
    if need_out.max(need_in) > left {
        return Ok(false);
    }
    let u = (0..t.n()).find(|&u| cl.out[u] != t.out[u]).expect("closure differs");
    let reach = cl.out[u] | bit(u);
    for a in ones(reach) {
        for b in ones(t.out[a] & !reach) {
            let mut key = f.clone();
            key.push((a, b));
            key.sort_unstable();
            if !memo.insert(key) {
                continue;
            }
            cur.add(a, b);
            f.push((a, b));
            if completion_dfs(t, cur, f, left - 1, memo, budget)? {
                return Ok(true);
            }
            f.pop();
            cur.remove(a, b);
        }
    }
    Ok(false)
}

/// The `λ ≤ max_lambda` minimising `7(1+λ)(λ+δ)`, where `δ` is the smallest `|F|` for
/// that `λ`. Ties prefer the smaller `λ`.
pub fn best_caterpillar_parameters(
    h: &Pattern,
    max_lambda: usize,
    limits: &SearchLimits,
) -> Result<(usize, usize, CaterpillarCertificate)> {
    let m = h.demand_count();
    let mut best: Option<(usize, usize, usize, CaterpillarCertificate)> = None;
    for lambda in 0..=max_lambda.min(h.terminal_count()) {
        let cert =
            in_c_lambda_delta_with(h, lambda, m, limits)?.expect("the empty caterpillar with F = E always qualifies");
        let delta = cert.extra_edges.len();
        let score = 7 * (1 + lambda) * (lambda + delta);
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, lambda, delta, cert));
        }
    }
    let (_, lambda, delta, cert) = best.expect("λ = 0 is always tried");
    Ok((lambda, delta, cert))
}

fn mismatch(msg: impl Into<String>) -> DsnError {
    DsnError::CertificateMismatch(msg.into())
}

fn named_closure(p: &Pattern) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
    let c = p.transitive_closure();
    (
        c.terminals().iter().cloned().collect(),
        c.demand_names().into_iter().collect(),
    )
}

/// Independent check of every certificate invariant against `h`, `λ` and `δ`.
pub fn validate_certificate(h: &Pattern, cert: &CaterpillarCertificate, lambda: usize, delta: usize) -> Result<()> {
    let target = match &cert.equivalent_pattern {
        None => h,
        Some(hp) => {
            if named_closure(h) != named_closure(hp)
                && !transitively_equivalent_with_guard(h, hp, DEFAULT_PATTERN_GUARD)?
            {
                return Err(mismatch("equivalent pattern has a different transitive closure"));
            }
            hp
        }
    };
    if cert.lambda0 != cert.spine.len() || cert.stars.len() != cert.spine.len() {
        return Err(mismatch("spine length, star count and λ₀ disagree"));
    }
    if cert.lambda0 > lambda {
        return Err(mismatch(format!("λ₀ = {} exceeds λ = {lambda}", cert.lambda0)));
    }
    if cert.extra_edges.len() > delta {
        return Err(mismatch(format!(
            "|F| = {} exceeds δ = {delta}",
            cert.extra_edges.len()
        )));
    }
    let mut seen = HashSet::new();
    let mut cat: BTreeSet<(String, String)> = BTreeSet::new();
    for (i, (v, star)) in cert.spine.iter().zip(&cert.stars).enumerate() {
        if star.first() != Some(v) {
            return Err(mismatch(format!("star {i} does not start with its spine vertex")));
        }
        for w in star {
            if target.index_of(w).is_none() {
                return Err(mismatch(format!("`{w}` is not a terminal")));
            }
            if !seen.insert(w.as_str()) {
                return Err(mismatch(format!("`{w}` appears in two stars")));
            }
        }
        for w in &star[1..] {
            cat.insert(match cert.orientation {
                Orientation::Out => (v.clone(), w.clone()),
                Orientation::In => (w.clone(), v.clone()),
            });
        }
    }
    for w in cert.spine.windows(2) {
        cat.insert((w[0].clone(), w[1].clone()));
    }
    let extra: BTreeSet<(String, String)> = cert.extra_edges.iter().cloned().collect();
    if extra.len() != cert.extra_edges.len() {
        return Err(mismatch("F lists an edge twice"));
    }
    if let Some(e) = extra.intersection(&cat).next() {
        return Err(mismatch(format!(
            "`{}` -> `{}` is both in F and the caterpillar",
            e.0, e.1
        )));
    }
    let edges: BTreeSet<(String, String)> = target.demand_names().into_iter().collect();
    let claimed: BTreeSet<(String, String)> = cat.union(&extra).cloned().collect();
    if let Some(e) = claimed.difference(&edges).next() {
        return Err(mismatch(format!("`{}` -> `{}` is not a demand", e.0, e.1)));
    }
    if let Some(e) = edges.difference(&claimed).next() {
        return Err(mismatch(format!(
            "demand `{}` -> `{}` is neither in F nor the caterpillar",
            e.0, e.1
        )));
    }
    Ok(())
}
