use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DsnError, Result};
use crate::graph::{Cost, LocalDigraph, Pattern, WeightedDigraph};

/// `g` with the directed cycle over `r` (in the given order) as pattern. A solution
/// puts all of `r` in one strongly connected component.
pub fn cycle_pattern_instance(g: &WeightedDigraph, r: &[String]) -> Result<(WeightedDigraph, Pattern)> {
    if r.len() < 2 {
        return Err(DsnError::InvalidArgument(format!(
            "cycle pattern needs at least 2 terminals, got {}",
            r.len()
        )));
    }
    for t in r {
        g.require_vertex(t)?;
    }
    let demands: Vec<(String, String)> = (0..r.len())
        .map(|i| (r[i].clone(), r[(i + 1) % r.len()].clone()))
        .collect();
    Ok((g.clone(), Pattern::new(r.to_vec(), demands)?))
}

/// Random simple digraph on `v0..v{n-1}`: each ordered pair is an edge with
/// probability `p` and cost uniform in `1..=max_cost`.
pub fn random_digraph(n: usize, p: f64, max_cost: Cost, seed: u64) -> Result<WeightedDigraph> {
    if !(0.0..=1.0).contains(&p) || max_cost == 0 {
        return Err(DsnError::InvalidArgument(
            "need p in [0, 1] and a positive maximum cost".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            if rng.random_bool(p) {
                edges.push((a, b, rng.random_range(1..=max_cost)));
            }
        }
    }
    WeightedDigraph::from_indexed((0..n).map(|i| format!("v{i}")).collect(), &edges)
}

/// Lifts a solution-equivalent instance `(g2, h2)` to pattern `h`. Every terminal of
/// `h` maps to a vertex of `g2`; the class `W_t` of terminals mapping to `t` is tied
/// together by a zero-cost cycle through `t` and the members of `W_t` in the order of
/// `h`'s terminals. Members named `t` are `t` itself, others become new vertices.
pub fn closure_lift(
    g2: &WeightedDigraph,
    h2: &Pattern,
    h: &Pattern,
    identification: &BTreeMap<String, String>,
) -> Result<(WeightedDigraph, Pattern)> {
    let bad = |msg: String| Err(DsnError::InvalidPartition(msg));
    let mut classes: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for t in h.terminals() {
        let Some(image) = identification.get(t) else {
            return bad(format!("terminal `{t}` has no image"));
        };
        if g2.vertex(image).is_none() {
            return bad(format!("image `{image}` of `{t}` is not a vertex"));
        }
        if t != image && g2.vertex(t).is_some() {
            return bad(format!("terminal `{t}` collides with an existing vertex"));
        }
        classes.entry(image.as_str()).or_default().push(t.as_str());
    }
    if let Some(extra) = identification.keys().find(|k| h.index_of(k).is_none()) {
        return bad(format!("`{extra}` is not a terminal of the pattern"));
    }

    // The identified pattern must have the same closure as `h2`, vertex by vertex.
    let image = |i: usize| identification[h.name(i)].clone();
    let pairs: BTreeSet<(String, String)> = h
        .demands()
        .iter()
        .map(|&(s, t)| (image(s), image(t)))
        .filter(|(a, b)| a != b)
        .collect();
    let terminals: BTreeSet<String> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let identified = Pattern::new(terminals, pairs)?;
    let closure =
        |p: &Pattern| -> BTreeSet<(String, String)> { p.transitive_closure().demand_names().into_iter().collect() };
    if closure(&identified) != closure(h2) {
        return bad("identified pattern is not transitively equivalent to the target pattern".into());
    }

    let mut names: Vec<String> = g2.names().to_vec();
    let mut edges: Vec<(String, String, Cost)> = g2
        .edges()
        .iter()
        .map(|e| (g2.name(e.tail).to_string(), g2.name(e.head).to_string(), e.cost))
        .collect();
    for (&t, members) in &classes {
        let mut cycle = vec![t];
        for &w in members.iter().filter(|&&w| w != t) {
            names.push(w.to_string());
            cycle.push(w);
        }
        if cycle.len() < 2 {
            continue;
        }
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            edges.push((a.to_string(), b.to_string(), 0));
        }
    }
    Ok((WeightedDigraph::new(names, edges)?, h.clone()))
}

/// Random connected 3-regular simple graph on `d` vertices (configuration model with
/// rejection), as a list of undirected edges `(u, v)` with `u < v`.
fn random_cubic(d: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    loop {
        let mut points: Vec<usize> = (0..3 * d).map(|p| p / 3).collect();
        points.shuffle(rng);
        let mut set = BTreeSet::new();
        let simple = points.chunks(2).all(|c| {
            let (a, b) = (c[0].min(c[1]), c[0].max(c[1]));
            a != b && set.insert((a, b))
        });
        if !simple {
            continue;
        }
        let mut comp: Vec<usize> = (0..d).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            if c[x] != x {
                c[x] = find(c, c[x]);
            }
            c[x]
        }
        for &(a, b) in &set {
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            comp[ra] = rb;
        }
        let root = find(&mut comp, 0);
        if (0..d).all(|v| find(&mut comp, v) == root) {
            return set.into_iter().collect();
        }
    }
}

fn check_expander_size(d: usize) -> Result<()> {
    if d < 4 || d % 2 == 1 {
        return Err(DsnError::InvalidArgument(format!(
            "expander size must be even and at least 4, got {d}"
        )));
    }
    Ok(())
}

/// The bidirected cubic graph behind `expander_like_instance(d, seed)`, as a
/// `d`-vertex multigraph with both arcs of every edge. Subdividing arcs does not
/// change cutwidth, so this has the cutwidth of the instance graph.
pub fn expander_base(d: usize, seed: u64) -> Result<LocalDigraph> {
    check_expander_size(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arcs = random_cubic(d, &mut rng)
        .into_iter()
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .collect();
    LocalDigraph::new((0..d).map(|i| format!("v{i}")).collect(), arcs)
}

/// Random cubic graph on `d` vertices, bidirected, every arc `uv` subdivided by a
/// terminal `t{u}_{v}`; the pattern is a cycle through all terminals. Each terminal
/// has one in- and one out-edge, so the only solution is the whole graph.
pub fn expander_like_instance(d: usize, seed: u64) -> Result<(WeightedDigraph, Pattern)> {
    let base = expander_base(d, seed)?;
    let mut arcs = base.arcs.clone();
    arcs.sort_unstable();
    let mut names = base.labels.clone();
    let mut edges = Vec::with_capacity(2 * arcs.len());
    let mut terminals = Vec::with_capacity(arcs.len());
    for &(u, v) in &arcs {
        let t = format!("t{u}_{v}");
        edges.push((format!("v{u}"), t.clone(), 1));
        edges.push((t.clone(), format!("v{v}"), 1));
        names.push(t.clone());
        terminals.push(t);
    }
    let g = WeightedDigraph::new(names, edges)?;
    let (g, h) = cycle_pattern_instance(&g, &terminals)?;
    Ok((g, h))
}
