//! Weighted undirected graphs and cut evaluation.
//!
//! Edges are stored canonically as `(i, j, w)` with `i < j`, strictly
//! positive weights, no duplicates and no self-loops. Cuts are ±1
//! assignments with vertex 0 fixed to +1, so a graph on `n` vertices has
//! `2^(n-1)` distinct cuts.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A problem instance: `n` vertices and positively weighted undirected edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Build a graph from an edge list, normalizing each edge to `i < j`.
    ///
    /// Rejects vertex counts below 2, out-of-range indices, self-loops,
    /// non-positive or non-finite weights, and duplicate edges.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("vertex count {n} < 2")));
        }
        let mut canonical = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) outside vertex range 0..{n}"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            canonical.push((a, b, w));
        }
        let mut seen: Vec<(usize, usize)> = canonical.iter().map(|&(a, b, _)| (a, b)).collect();
        seen.sort_unstable();
        for pair in seen.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        Ok(Self {
            n,
            edges: canonical,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all edge weights; the maximum any cut can attain.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    /// Cut cost of `cut`: the total weight of edges whose endpoints get
    /// opposite signs.
    pub fn cut_value(&self, cut: &Cut) -> Result<f64> {
        if cut.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: cut.len(),
            });
        }
        let signs = cut.signs();
        let mut value = 0.0;
        for &(i, j, w) in &self.edges {
            if signs[i] != signs[j] {
                value += w;
            }
        }
        Ok(value)
    }

    /// Cut cost of the assignment encoded in `bits` (bit `i` set puts
    /// vertex `i` on the −1 side). Used by the enumeration and simulation
    /// paths where cuts are indexed rather than materialized.
    pub fn cut_value_bits(&self, bits: u64) -> f64 {
        let mut value = 0.0;
        for &(i, j, w) in &self.edges {
            if (bits >> i) & 1 != (bits >> j) & 1 {
                value += w;
            }
        }
        value
    }

    /// Neighbor lists `(other endpoint, weight)` indexed by vertex.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = alloc::vec![Vec::new(); self.n];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    /// Whether every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = alloc::vec![false; self.n];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }
}

/// A ±1 vertex assignment in canonical form: entry 0 is always +1, since a
/// cut and its complement are the same partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    signs: Vec<i8>,
}

impl Cut {
    /// Canonicalize a sign sequence; entries must be ±1.
    pub fn new(mut signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidParam("empty cut assignment".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParam("cut entries must be +1 or -1".into()));
        }
        if signs[0] == -1 {
            for s in &mut signs {
                *s = -*s;
            }
        }
        Ok(Self { signs })
    }

    /// Decode `bits` over `n` vertices: bit `i` set means vertex `i` starts
    /// on the −1 side; the result is canonicalized.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        let flip = bits & 1 == 1;
        let signs = (0..n)
            .map(|i| {
                let b = ((bits >> i) & 1 == 1) != flip;
                if b {
                    -1
                } else {
                    1
                }
            })
            .collect();
        Self { signs }
    }

    /// Canonical bit encoding (bit 0 is always clear).
    pub fn to_bits(&self) -> u64 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}
