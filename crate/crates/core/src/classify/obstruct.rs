use std::collections::BTreeSet;

use super::caterpillar::Raw;
use super::cover::hamiltonian_path_semicomplete;
use super::{Classification, Obstruction, ObstructionKind, ObstructionWitness, Orientation};
use crate::error::{DsnError, Result};
use crate::graph::bits::{bit, ones, BitDigraph, MAX_BIT_VERTICES};
use crate::graph::{identify_terminals, mask_names, Pattern};

/// Either a certificate for `C*_{2α, 4α³+6α²}` or an obstruction of size `α`.
///
/// Follows the constructive dichotomy: a greedy maximal matching with `α` edges gives a
/// cycle; otherwise its endpoints `X` form a small vertex cover, the pattern is
/// normalised around `X`, and either the edges between `X` and the rest decompose
/// into a caterpillar or two large stars yield a cycle or a diamond.
pub fn decompose_or_obstruct(h: &Pattern, alpha: usize) -> Result<Classification> {
    if alpha < 1 {
        return Err(DsnError::InvalidArgument("α must be at least 1".into()));
    }
    let n = h.terminal_count();
    DsnError::guard("pattern vertex count", MAX_BIT_VERTICES, n)?;
    let g = h.to_bits()?;

    let mut matched = 0u64;
    let mut matching = Vec::new();
    for &(s, t) in h.demands() {
        if matched & (bit(s) | bit(t)) == 0 {
            matched |= bit(s) | bit(t);
            matching.push((s, t));
        }
    }
    if matching.len() >= alpha {
        return Ok(Classification::Obstruction(matching_cycle(h, &matching[..alpha])));
    }
    let x = matched;
    let in_x = |v: usize| x & bit(v) != 0;

    // Closure inside X, every edge touching the rest, then strip redundant outer edges.
    let mut hp = BitDigraph { out: vec![0; n] };
    for u in ones(x) {
        hp.out[u] = g.reach(u) & x & !bit(u);
    }
    for (a, b) in g.arcs() {
        if !in_x(a) || !in_x(b) {
            hp.add(a, b);
        }
    }
    for (a, b) in hp.arcs() {
        if in_x(a) && in_x(b) {
            continue;
        }
        hp.remove(a, b);
        if hp.reach(a) & bit(b) == 0 {
            hp.add(a, b);
        }
    }

    let outer: Vec<(usize, usize)> = hp.arcs().into_iter().filter(|&(a, b)| !in_x(a) || !in_x(b)).collect();
    let c_in = outer.iter().filter(|&&(_, b)| in_x(b)).count();
    let c_out = outer.iter().filter(|&&(a, _)| in_x(a)).count();
    let threshold = 2 * alpha * alpha;
    if c_in < threshold {
        out_case(h, &hp, x, alpha, Orientation::Out)
    } else if c_out < threshold {
        out_case(h, &hp.reversed(), x, alpha, Orientation::In)
    } else {
        Ok(Classification::Obstruction(star_cycle(h, &hp, x, alpha)))
    }
}

/// Picks `m` leaves from each list so that shared leaves sit at equal positions.
fn paired_leaves(a: &[usize], b: &[usize], m: usize) -> (Vec<usize>, Vec<usize>) {
    let common: Vec<usize> = a.iter().copied().filter(|v| b.contains(v)).take(m).collect();
    let fill = |list: &[usize]| {
        let mut out = common.clone();
        out.extend(list.iter().copied().filter(|v| !b.contains(v) || !a.contains(v)));
        out.truncate(m);
        out
    };
    (fill(a), fill(b))
}

fn names(h: &Pattern, vs: impl IntoIterator<Item = usize>) -> Vec<String> {
    vs.into_iter().map(|v| h.name(v).to_string()).collect()
}

fn matching_cycle(h: &Pattern, edges: &[(usize, usize)]) -> Obstruction {
    let alpha = edges.len();
    let mut classes: Vec<Vec<usize>> = if alpha == 1 {
        vec![vec![edges[0].1, edges[0].0]]
    } else {
        (0..alpha).map(|i| vec![edges[i].1, edges[(i + 1) % alpha].0]).collect()
    };
    let used: BTreeSet<usize> = classes.iter().flatten().copied().collect();
    classes[0].extend((0..h.terminal_count()).filter(|v| !used.contains(v)));
    Obstruction {
        kind: ObstructionKind::Cycle,
        size: alpha,
        partition: classes.iter().map(|c| names(h, c.iter().copied())).collect(),
        witness: ObstructionWitness::Matching {
            edges: edges
                .iter()
                .map(|&(s, t)| (h.name(s).to_string(), h.name(t).to_string()))
                .collect(),
            cycle: names(h, classes.iter().map(|c| c[0])),
        },
    }
}

/// Both orientations have many edges between `X` and the rest: an in-star and an
/// out-star with `α - 1` leaves each merge into a strongly connected graph.
fn star_cycle(h: &Pattern, hp: &BitDigraph, x: u64, alpha: usize) -> Obstruction {
    let ins = hp.in_masks();
    let m = alpha - 1;
    let in_root = ones(x)
        .find(|&v| (ins[v] & !x).count_ones() as usize >= m)
        .expect("pigeonhole gives a large in-star");
    let out_root = ones(x)
        .find(|&v| (hp.out[v] & !x).count_ones() as usize >= m)
        .expect("pigeonhole gives a large out-star");
    let in_all: Vec<usize> = ones(ins[in_root] & !x).collect();
    let out_all: Vec<usize> = ones(hp.out[out_root] & !x).collect();
    let (s, t) = paired_leaves(&in_all, &out_all, m);
    let mut root = vec![in_root];
    if out_root != in_root {
        root.push(out_root);
    }
    let mut classes = vec![root];
    for i in 0..m {
        let mut c = vec![s[i]];
        if t[i] != s[i] {
            c.push(t[i]);
        }
        classes.push(c);
    }
    let used: BTreeSet<usize> = classes.iter().flatten().copied().collect();
    classes[0].extend((0..h.terminal_count()).filter(|v| !used.contains(v)));
    Obstruction {
        kind: ObstructionKind::Cycle,
        size: alpha,
        partition: classes.iter().map(|c| names(h, c.iter().copied())).collect(),
        witness: ObstructionWitness::Stars {
            in_root: h.name(in_root).to_string(),
            in_leaves: names(h, s),
            out_root: h.name(out_root).to_string(),
            out_leaves: names(h, t),
            cycle: names(h, classes.iter().map(|c| c[0])),
        },
    }
}

/// The out-star case on the working graph `g` (the normalised pattern, reversed for
/// the in-star case).
fn out_case(h: &Pattern, g: &BitDigraph, x: u64, alpha: usize, orientation: Orientation) -> Result<Classification> {
    let n = g.n();
    // Outer vertices with an edge into X lose all their edges to F.
    let bad = (0..n)
        .filter(|&u| x & bit(u) == 0 && g.out[u] & x != 0)
        .fold(0u64, |m, u| m | bit(u));
    let star = |v: usize| g.out[v] & !x & !bad;
    let big: Vec<usize> = ones(x).filter(|&v| star(v).count_ones() as usize >= alpha).collect();
    for (i, &u) in big.iter().enumerate() {
        for &v in &big[i + 1..] {
            if !g.has(u, v) && !g.has(v, u) {
                let s1: Vec<usize> = ones(star(u)).collect();
                let s2: Vec<usize> = ones(star(v)).collect();
                return Ok(Classification::Obstruction(diamond(
                    h,
                    g,
                    (u, &s1),
                    (v, &s2),
                    alpha,
                    orientation,
                )));
            }
        }
    }
    let spine = hamiltonian_path_semicomplete(g, &big)?;
    let leaves: Vec<Vec<usize>> = spine.iter().map(|&v| ones(star(v)).collect()).collect();
    let mut cat = BitDigraph { out: vec![0; n] };
    for w in spine.windows(2) {
        cat.add(w[0], w[1]);
    }
    for (&v, ls) in spine.iter().zip(&leaves) {
        for &l in ls {
            cat.add(v, l);
        }
    }
    let extra = g.arcs().into_iter().filter(|&(a, b)| !cat.has(a, b)).collect();
    let raw = Raw {
        spine,
        leaves,
        extra,
        equivalent: Some(g.clone()),
    };
    Ok(Classification::Certificate(raw.into_certificate(h, orientation)))
}

fn diamond(
    h: &Pattern,
    g: &BitDigraph,
    (r1, s1): (usize, &[usize]),
    (r2, s2): (usize, &[usize]),
    alpha: usize,
    orientation: Orientation,
) -> Obstruction {
    let n = g.n();
    let (s, t) = paired_leaves(s1, s2, alpha);
    let stars = s.iter().chain(&t).fold(bit(r1) | bit(r2), |m, &v| m | bit(v));
    let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
    let y1 = g.reach(r1) & !stars;
    let y2 = g.reach(r2) & !stars;
    let (w1, w2, w) = (y1 & !y2, y2 & !y1, y1 & y2);
    let u = all & !(y1 | y2 | stars);
    let hits = |target: u64| ones(u).find(|&v| g.reach(v) & target != 0);
    let to1 = hits(w1 | bit(r1));
    let to2 = hits(w2 | bit(r2));

    let mut c1: Vec<usize> = std::iter::once(r1).chain(ones(w1)).collect();
    let mut c2: Vec<usize> = std::iter::once(r2).chain(ones(w2)).collect();
    let mut leaf_classes: Vec<Vec<usize>> = (0..alpha)
        .map(|i| if s[i] == t[i] { vec![s[i]] } else { vec![s[i], t[i]] })
        .collect();
    leaf_classes[0].extend(ones(w));
    let mut apex = None;
    match (to1, to2) {
        (Some(x), Some(_)) => {
            let mut c: Vec<usize> = vec![x];
            c.extend(ones(u & !bit(x)));
            apex = Some(c);
        }
        (Some(_), None) => c1.extend(ones(u)),
        _ => c2.extend(ones(u)),
    }
    let kind = match (apex.is_some(), orientation) {
        (false, Orientation::Out) => ObstructionKind::PureOutDiamond,
        (false, Orientation::In) => ObstructionKind::PureInDiamond,
        (true, Orientation::Out) => ObstructionKind::FlawedOutDiamond,
        (true, Orientation::In) => ObstructionKind::FlawedInDiamond,
    };
    let mut partition = vec![names(h, c1), names(h, c2)];
    partition.extend(leaf_classes.iter().map(|c| names(h, c.iter().copied())));
    if let Some(c) = &apex {
        partition.push(names(h, c.iter().copied()));
    }
    Obstruction {
        kind,
        size: alpha,
        partition,
        witness: ObstructionWitness::Diamond {
            r1: h.name(r1).to_string(),
            r2: h.name(r2).to_string(),
            leaves: names(h, leaf_classes.iter().map(|c| c[0])),
            apex: apex.map(|c| h.name(c[0]).to_string()),
            star1: names(h, s),
            star2: names(h, t),
            y1: mask_names(h, y1),
            y2: mask_names(h, y2),
            w1: mask_names(h, w1),
            w2: mask_names(h, w2),
            w: mask_names(h, w),
            u: mask_names(h, u),
        },
    }
}

fn reject(msg: impl Into<String>) -> DsnError {
    DsnError::CertificateMismatch(msg.into())
}

/// Identifies the witness partition in `h` and checks that the transitive closure is
/// exactly the claimed cycle or diamond on the class representatives.
pub fn validate_obstruction(h: &Pattern, obs: &Obstruction) -> Result<()> {
    let alpha = obs.size;
    let mut expected: BTreeSet<(String, String)> = BTreeSet::new();
    let mut vertices: BTreeSet<String> = BTreeSet::new();
    match (&obs.witness, obs.kind) {
        (ObstructionWitness::Matching { cycle, .. }, ObstructionKind::Cycle)
        | (ObstructionWitness::Stars { cycle, .. }, ObstructionKind::Cycle) => {
            if cycle.len() != alpha {
                return Err(reject(format!("cycle has {} vertices, expected {alpha}", cycle.len())));
            }
            if alpha >= 2 {
                for a in cycle {
                    for b in cycle {
                        if a != b {
                            expected.insert((a.clone(), b.clone()));
                        }
                    }
                }
                vertices.extend(cycle.iter().cloned());
            }
        }
        (
            ObstructionWitness::Diamond {
                r1, r2, leaves, apex, ..
            },
            kind,
        ) => {
            let flawed = matches!(
                kind,
                ObstructionKind::FlawedOutDiamond | ObstructionKind::FlawedInDiamond
            );
            let reverse = matches!(kind, ObstructionKind::PureInDiamond | ObstructionKind::FlawedInDiamond);
            if kind == ObstructionKind::Cycle || flawed != apex.is_some() {
                return Err(reject("diamond witness does not match the obstruction kind"));
            }
            if leaves.len() != alpha {
                return Err(reject(format!("diamond has {} leaves, expected {alpha}", leaves.len())));
            }
            let mut arcs = Vec::new();
            for l in leaves {
                arcs.push((r1.clone(), l.clone()));
                arcs.push((r2.clone(), l.clone()));
                if let Some(x) = apex {
                    arcs.push((x.clone(), l.clone()));
                }
            }
            if let Some(x) = apex {
                arcs.push((x.clone(), r1.clone()));
                arcs.push((x.clone(), r2.clone()));
            }
            for (a, b) in arcs {
                vertices.insert(a.clone());
                vertices.insert(b.clone());
                expected.insert(if reverse { (b, a) } else { (a, b) });
            }
        }
        _ => return Err(reject("witness does not match the obstruction kind")),
    }
    let quotient = identify_terminals(h, &obs.partition)?.transitive_closure();
    let got_vertices: BTreeSet<String> = quotient.terminals().iter().cloned().collect();
    let got: BTreeSet<(String, String)> = quotient.demand_names().into_iter().collect();
    if got_vertices != vertices || got != expected {
        return Err(reject(format!(
            "identified pattern has {} vertices and {} closure edges; expected {} and {}",
            got_vertices.len(),
            got.len(),
            vertices.len(),
            expected.len()
        )));
    }
    Ok(())
}

/// The kind and size of `h` if it is exactly a pure or flawed diamond (no closure
/// taken): two roots sharing a leaf set, plus an apex joined to both roots when flawed.
pub fn diamond_shape(h: &Pattern) -> Option<(ObstructionKind, usize)> {
    let g = h.to_bits().ok()?;
    let out = |g: &BitDigraph| -> Option<(bool, usize)> {
        let n = g.n();
        let ins = g.in_masks();
        let sources: Vec<usize> = (0..n).filter(|&v| g.out[v] != 0).collect();
        let (apex, roots) = match sources.len() {
            2 => (None, [sources[0], sources[1]]),
            3 => {
                let x = *sources.iter().find(|&&v| g.out[v].count_ones() == 2 && ins[v] == 0)?;
                let rs: Vec<usize> = sources.iter().copied().filter(|&v| v != x).collect();
                if g.out[x] != bit(rs[0]) | bit(rs[1]) {
                    return None;
                }
                (Some(x), [rs[0], rs[1]])
            }
            _ => return None,
        };
        let leaves = g.out[roots[0]];
        if leaves == 0 || g.out[roots[1]] != leaves || leaves & (bit(roots[0]) | bit(roots[1])) != 0 {
            return None;
        }
        let root_in = apex.map_or(0, bit);
        if ins[roots[0]] != root_in || ins[roots[1]] != root_in {
            return None;
        }
        let expected = leaves.count_ones() as usize + 2 + apex.is_some() as usize;
        if n != expected || ones(leaves).any(|l| ins[l] != bit(roots[0]) | bit(roots[1])) {
            return None;
        }
        Some((apex.is_some(), leaves.count_ones() as usize))
    };
    if let Some((flawed, a)) = out(&g) {
        let kind = if flawed {
            ObstructionKind::FlawedOutDiamond
        } else {
            ObstructionKind::PureOutDiamond
        };
        return Some((kind, a));
    }
    let (flawed, a) = out(&g.reversed())?;
    let kind = if flawed {
        ObstructionKind::FlawedInDiamond
    } else {
        ObstructionKind::PureInDiamond
    };
    Some((kind, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::validate_certificate;

    fn cycle(len: usize) -> Pattern {
        let names: Vec<String> = (0..len).map(|i| format!("c{i}")).collect();
        let arcs: Vec<_> = (0..len).map(|i| (i, (i + 1) % len)).collect();
        Pattern::from_indexed(names, &arcs).unwrap()
    }

    fn diamond_pattern(alpha: usize, flawed: bool, reverse: bool) -> Pattern {
        let mut names = vec!["r1".to_string(), "r2".to_string()];
        let mut arcs = Vec::new();
        for i in 0..alpha {
            names.push(format!("l{i}"));
            arcs.push((0, 2 + i));
            arcs.push((1, 2 + i));
        }
        if flawed {
            names.push("x".into());
            let x = names.len() - 1;
            arcs.push((x, 0));
            arcs.push((x, 1));
        }
        if reverse {
            arcs = arcs.into_iter().map(|(a, b)| (b, a)).collect();
        }
        Pattern::from_indexed(names, &arcs).unwrap()
    }

    fn certificate_ok(h: &Pattern, alpha: usize) {
        match decompose_or_obstruct(h, alpha).unwrap() {
            Classification::Certificate(c) => {
                validate_certificate(h, &c, 2 * alpha, 4 * alpha.pow(3) + 6 * alpha * alpha).unwrap()
            }
            Classification::Obstruction(o) => panic!("unexpected obstruction {o:?}"),
        }
    }

    fn obstruction(h: &Pattern, alpha: usize) -> Obstruction {
        match decompose_or_obstruct(h, alpha).unwrap() {
            Classification::Obstruction(o) => {
                validate_obstruction(h, &o).unwrap();
                o
            }
            Classification::Certificate(c) => panic!("unexpected certificate {c:?}"),
        }
    }

    #[test]
    fn out_star_gets_certificate() {
        let names: Vec<String> = (0..6).map(|i| format!("s{i}")).collect();
        let arcs: Vec<_> = (1..6).map(|i| (0, i)).collect();
        let star = Pattern::from_indexed(names, &arcs).unwrap();
        certificate_ok(&star, 2);
        certificate_ok(&star.reversed(), 2);
    }

    #[test]
    fn even_cycles_give_cycle_obstructions() {
        for alpha in 1..=4 {
            let h = cycle(2 * alpha);
            let o = obstruction(&h, alpha);
            assert_eq!((o.kind, o.size), (ObstructionKind::Cycle, alpha));
        }
    }

    #[test]
    fn large_diamonds_are_found() {
        // The greedy matching puts two leaves into the cover, so α + 2 leaves are needed.
        for alpha in 3..=4 {
            for (flawed, reverse, kind) in [
                (false, false, ObstructionKind::PureOutDiamond),
                (false, true, ObstructionKind::PureInDiamond),
                (true, false, ObstructionKind::FlawedOutDiamond),
                (true, true, ObstructionKind::FlawedInDiamond),
            ] {
                // In-diamonds also need 2α² edges into the cover before the in-case is used.
                let leaves = if reverse { alpha * alpha + 2 } else { alpha + 2 };
                let h = diamond_pattern(leaves, flawed, reverse);
                let o = obstruction(&h, alpha);
                assert_eq!(o.kind, kind, "α={alpha} flawed={flawed} reverse={reverse}");
            }
        }
    }

    #[test]
    fn bidirected_star_gives_star_cycle() {
        // Centre 0 with many bidirected leaves plus a disjoint edge so the cover is small.
        let q = 20;
        let mut names: Vec<String> = (0..=q).map(|i| format!("v{i}")).collect();
        names.push("a".into());
        names.push("b".into());
        let mut arcs = Vec::new();
        for i in 1..=q {
            arcs.push((0, i));
            arcs.push((i, 0));
        }
        arcs.push((q + 1, q + 2));
        let h = Pattern::from_indexed(names, &arcs).unwrap();
        let o = obstruction(&h, 3);
        assert!(matches!(o.witness, ObstructionWitness::Stars { .. }));
    }

    #[test]
    fn tampered_obstruction_is_rejected() {
        let h = cycle(6);
        let mut o = obstruction(&h, 3);
        o.partition.swap(0, 1);
        let first = o.partition[0].remove(0);
        o.partition[1].push(first);
        assert!(validate_obstruction(&h, &o).is_err());
    }

    #[test]
    fn alpha_zero_is_rejected() {
        assert!(decompose_or_obstruct(&cycle(3), 0).is_err());
    }

    #[test]
    fn diamond_shapes_are_recognised() {
        for alpha in 1..=4 {
            for (flawed, reverse, kind) in [
                (false, false, ObstructionKind::PureOutDiamond),
                (true, false, ObstructionKind::FlawedOutDiamond),
                (false, true, ObstructionKind::PureInDiamond),
                (true, true, ObstructionKind::FlawedInDiamond),
            ] {
                let got = diamond_shape(&diamond_pattern(alpha, flawed, reverse));
                if (flawed && alpha == 1) || (!flawed && alpha == 2) {
                    // Symmetric shapes: reversal swaps roots with leaves (or apex).
                    assert_eq!(got.map(|g| g.1), Some(alpha));
                } else {
                    assert_eq!(got, Some((kind, alpha)));
                }
            }
        }
        assert_eq!(diamond_shape(&cycle(4)), None);
        let mut extra = diamond_pattern(3, false, false).demand_names();
        extra.push(("l0".into(), "l1".into()));
        let names = ["r1", "r2", "l0", "l1", "l2"];
        let p = Pattern::new(names, extra.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
        assert_eq!(diamond_shape(&p), None);
    }
}
