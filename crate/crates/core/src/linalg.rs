//! Small numerical kernels: a banded LU solve and closed-class detection on
//! the nonzero pattern of a stochastic matrix.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

/// Square matrix stored by rows with room for pivoting fill-in.
///
/// Row `r` keeps columns `r - kl ..= r + kl + ku`; entries outside the band
/// are structurally zero.
#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Assembles from `(row, col, value)` triplets; repeated positions are summed.
    pub(crate) fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let (mut kl, mut ku) = (0, 0);
        for &(r, c, _) in entries {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
        let width = 2 * kl + ku + 1;
        let mut m = BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        };
        for &(r, c, v) in entries {
            let idx = m.pos(r, c);
            m.data[idx] += v;
        }
        m
    }

    #[inline]
    fn pos(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c + self.kl - r < self.width);
        r * self.width + (c + self.kl - r)
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.data[self.pos(r, c)]
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting,
    /// consuming the matrix.
    pub(crate) fn solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let span = self.kl + self.ku;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + span).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last_row {
                let v = self.get(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            if p != k {
                for c in k..=last_col {
                    let (a, bb) = (self.pos(k, c), self.pos(p, c));
                    self.data.swap(a, bb);
                }
                b.swap(k, p);
            }
            let pivot = self.get(k, k);
            for r in k + 1..=last_row {
                let f = self.get(r, k) / pivot;
                if f == 0.0 {
                    continue;
                }
                for c in k..=last_col {
                    let src = self.get(k, c);
                    if src != 0.0 {
                        let idx = self.pos(r, c);
                        self.data[idx] -= f * src;
                    }
                }
                b[r] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let last_col = (k + span).min(n - 1);
            let mut acc = b[k];
            for (c, xc) in x.iter().enumerate().take(last_col + 1).skip(k + 1) {
                acc -= self.get(k, c) * xc;
            }
            x[k] = acc / self.get(k, k);
        }
        Ok(x)
    }
}

/// Partition of a chain's states into closed communicating classes and
/// transient states, read off the nonzero pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ClassStructure {
    /// Each closed class as sorted state indices; classes sorted by first state.
    pub closed: Vec<Vec<usize>>,
    /// States outside every closed class, sorted.
    pub transient: Vec<usize>,
}

/// Finds the closed classes of the directed graph with edges `r -> c` for
/// every listed `(r, c)` pair.
pub(crate) fn closed_classes(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> ClassStructure {
    let mut g = DiGraph::<(), ()>::with_capacity(n, 5 * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (r, c) in edges {
        if r != c {
            g.add_edge(nodes[r], nodes[c], ());
        }
    }
    let sccs = tarjan_scc(&g);
    let mut component = vec![0usize; n];
    for (ci, comp) in sccs.iter().enumerate() {
        for v in comp {
            component[v.index()] = ci;
        }
    }
    let mut is_closed = vec![true; sccs.len()];
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        if component[a.index()] != component[b.index()] {
            is_closed[component[a.index()]] = false;
        }
    }
    let mut closed = Vec::new();
    let mut transient = Vec::new();
    for (ci, comp) in sccs.into_iter().enumerate() {
        let mut states: Vec<usize> = comp.into_iter().map(|v| v.index()).collect();
        states.sort_unstable();
        if is_closed[ci] {
            closed.push(states);
        } else {
            transient.extend(states);
        }
    }
    closed.sort_by_key(|c| c[0]);
    transient.sort_unstable();
    ClassStructure { closed, transient }
}
