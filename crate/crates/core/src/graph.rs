//! Immutable, edge-indexed undirected graph with nonnegative weights.
//!
//! Every algorithm in this crate consumes a [`WeightedGraph`] and every
//! spanner edge refers back into its edge list through an [`EdgeId`].
//! Construction normalizes the input: self-loops are dropped, parallel
//! edges collapse to the single lightest one, and edges are stored in
//! canonical `(min endpoint, max endpoint)` order.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Index of an edge in the original input graph.
///
/// Stable across contraction: quotient edges always resolve to the
/// original edge they stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for EdgeId {
    fn from(i: usize) -> Self {
        EdgeId(i as u32)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    /// The endpoint opposite `x`. `x` must be one of the endpoints.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Total order on `(weight, id)` pairs used for every minimum-edge choice.
#[inline]
pub fn lighter(a: (f64, EdgeId), b: (f64, EdgeId)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
}

impl WeightedGraph {
    /// Builds a normalized graph on `n` vertices.
    ///
    /// Self-loops are dropped and parallel edges collapse to their minimum
    /// weight. Endpoints must be `< n` and weights finite and nonnegative.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut raw: Vec<Edge> = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight { u, v });
            }
            if w < 0.0 {
                return Err(GraphError::NegativeWeight { u, v, w });
            }
            if u == v {
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            raw.push(Edge { u: a, v: b, w });
        }
        raw.sort_by(|x, y| (x.u, x.v).cmp(&(y.u, y.v)).then(x.w.total_cmp(&y.w)));
        raw.dedup_by(|later, kept| later.u == kept.u && later.v == kept.v);

        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in raw.iter().enumerate() {
            adjacency[e.u].push(EdgeId::from(i));
            adjacency[e.v].push(EdgeId::from(i));
        }
        Ok(Self {
            n,
            edges: raw,
            adjacency,
        })
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, core::iter::empty())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId::from)
    }

    #[inline]
    pub fn incident(&self, v: usize) -> &[EdgeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Looks up the edge between `u` and `v`, if any.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<EdgeId> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(EdgeId::from)
    }

    /// True when every edge has weight exactly 1.
    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::Empty);
        }
        if self.adjacency.len() != self.n {
            return Err(GraphError::Inconsistent("adjacency length differs from n"));
        }
        let mut seen = vec![0u8; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= self.n || e.v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    u: e.u,
                    v: e.v,
                    n: self.n,
                });
            }
            if e.u >= e.v {
                return Err(GraphError::Inconsistent("edge not in canonical order"));
            }
            if !e.w.is_finite() {
                return Err(GraphError::NonFiniteWeight { u: e.u, v: e.v });
            }
            if e.w < 0.0 {
                return Err(GraphError::NegativeWeight {
                    u: e.u,
                    v: e.v,
                    w: e.w,
                });
            }
            if i > 0 {
                let p = &self.edges[i - 1];
                if (p.u, p.v) >= (e.u, e.v) {
                    return Err(GraphError::Inconsistent("parallel or unsorted edges"));
                }
            }
        }
        for (v, list) in self.adjacency.iter().enumerate() {
            for id in list {
                let e = self
                    .edges
                    .get(id.index())
                    .ok_or(GraphError::Inconsistent("adjacency refers to missing edge"))?;
                if e.u != v && e.v != v {
                    return Err(GraphError::Inconsistent("adjacency entry not incident"));
                }
                seen[id.index()] += 1;
            }
        }
        if seen.iter().any(|&c| c != 2) {
            return Err(GraphError::Inconsistent(
                "edge does not appear in exactly two adjacency lists",
            ));
        }
        Ok(())
    }

    /// Subgraph on the same vertex set keeping the listed edges.
    ///
    /// Edge ids are renumbered; use [`EdgeMask`] when ids must be kept.
    pub fn subgraph(&self, keep: &[EdgeId]) -> Self {
        let edges = keep.iter().map(|&id| {
            let e = self.edge(id);
            (e.u, e.v, e.w)
        });
        Self::from_edges(self.n, edges).expect("subgraph of a valid graph is valid")
    }
}

/// A set of edges of one graph, addressed by [`EdgeId`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    bits: Vec<bool>,
    count: usize,
}

impl EdgeMask {
    pub fn none(m: usize) -> Self {
        Self {
            bits: vec![false; m],
            count: 0,
        }
    }

    pub fn all(m: usize) -> Self {
        Self {
            bits: vec![true; m],
            count: m,
        }
    }

    pub fn from_ids(m: usize, ids: &[EdgeId]) -> Self {
        let mut mask = Self::none(m);
        for &id in ids {
            mask.insert(id);
        }
        mask
    }

    pub fn insert(&mut self, id: EdgeId) {
        let slot = &mut self.bits[id.index()];
        if !*slot {
            *slot = true;
            self.count += 1;
        }
    }

    pub fn remove(&mut self, id: EdgeId) {
        let slot = &mut self.bits[id.index()];
        if *slot {
            *slot = false;
            self.count -= 1;
        }
    }

    #[inline]
    pub fn contains(&self, id: EdgeId) -> bool {
        self.bits[id.index()]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| EdgeId::from(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_path() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        g.validate().unwrap();
    }

    #[test]
    fn drops_self_loops() {
        let g = WeightedGraph::from_edges(1, [(0, 0, 1.0)]).unwrap();
        assert_eq!(g.m(), 0);
    }

    #[test]
    fn collapses_parallel_edges_to_min() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 5.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edge(EdgeId(0)).w, 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 1, -1.0)]),
            Err(GraphError::NegativeWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 2, 1.0)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 1, f64::NAN)]),
            Err(GraphError::NonFiniteWeight { .. })
        ));
        assert!(matches!(WeightedGraph::empty(0), Err(GraphError::Empty)));
    }

    #[test]
    fn find_edge_either_orientation() {
        let g = WeightedGraph::from_edges(4, [(3, 1, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(g.find_edge(1, 3), g.find_edge(3, 1));
        assert!(g.find_edge(0, 1).is_none());
    }

    #[test]
    fn mask_counts() {
        let mut m = EdgeMask::none(4);
        m.insert(EdgeId(1));
        m.insert(EdgeId(1));
        m.insert(EdgeId(3));
        assert_eq!(m.len(), 2);
        m.remove(EdgeId(1));
        assert_eq!(m.ids().collect::<Vec<_>>(), vec![EdgeId(3)]);
    }
}
