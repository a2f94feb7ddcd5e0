//! Small dense digraphs on at most 64 vertices, stored as adjacency bitmasks.

use crate::error::{DsnError, Result};

pub const MAX_BIT_VERTICES: usize = 64;

#[inline]
pub fn bit(i: usize) -> u64 {
    1u64 << i
}

pub fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitDigraph {
    pub out: Vec<u64>,
}

impl BitDigraph {
    pub fn new(n: usize) -> Result<Self> {
        DsnError::guard("bitmask digraph vertex count", MAX_BIT_VERTICES, n)?;
        Ok(BitDigraph { out: vec![0; n] })
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n)?;
        for (u, v) in arcs {
            if u != v {
                g.out[u] |= bit(v);
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn has(&self, u: usize, v: usize) -> bool {
        self.out[u] & bit(v) != 0
    }

    pub fn add(&mut self, u: usize, v: usize) {
        self.out[u] |= bit(v);
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.out[u] &= !bit(v);
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Arcs in (tail, head) lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(self.arc_count());
        for (u, &m) in self.out.iter().enumerate() {
            v.extend(ones(m).map(|w| (u, w)));
        }
        v
    }

    pub fn in_masks(&self) -> Vec<u64> {
        let mut inn = vec![0u64; self.n()];
        for (u, &m) in self.out.iter().enumerate() {
            for w in ones(m) {
                inn[w] |= bit(u);
            }
        }
        inn
    }

    pub fn reversed(&self) -> Self {
        BitDigraph { out: self.in_masks() }
    }

    /// Vertices reachable from `s` (including `s`).
    pub fn reach(&self, s: usize) -> u64 {
        let mut seen = bit(s);
        let mut frontier = bit(s);
        while frontier != 0 {
            let mut next = 0;
            for v in ones(frontier) {
                next |= self.out[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    /// Transitive closure without loops.
    pub fn closure(&self) -> Self {
        let n = self.n();
        let mut out = self.out.clone();
        for k in 0..n {
            for i in 0..n {
                if out[i] & bit(k) != 0 {
                    out[i] |= out[k];
                }
            }
        }
        for (i, m) in out.iter_mut().enumerate() {
            *m &= !bit(i);
        }
        BitDigraph { out }
    }

    pub fn induced(&self, keep: u64) -> Self {
        let out = self
            .out
            .iter()
            .enumerate()
            .map(|(u, &m)| if keep & bit(u) != 0 { m & keep } else { 0 })
            .collect();
        BitDigraph { out }
    }

    pub fn is_acyclic(&self) -> bool {
        let c = self.closure();
        (0..self.n()).all(|v| ones(c.out[v]).all(|w| c.out[w] & bit(v) == 0))
    }
}
