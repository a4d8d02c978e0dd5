//! Immutable simple undirected graphs on at most [`MAX_VERTICES`] labeled vertices.
//!
//! Adjacency is stored as one `u64` bit row per vertex, so neighbourhood
//! operations (traversal, colouring, cut checks) are word-parallel.

use std::fmt;

use thiserror::Error;

/// Largest vertex count a [`Graph`] can hold.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("{n} vertices exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices { n: usize },
    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("({0}, {1}) is not an edge")]
    MissingEdge(usize, usize),
    #[error("invalid joined-cliques parameters n={n}, k={k}, i={i}")]
    InvalidCliqueJoin { n: usize, k: usize, i: usize },
    #[error("adjacency rows are not a symmetric loop-free relation on {n} vertices")]
    InvalidAdjacency { n: usize },
    #[error("a cycle needs at least 3 vertices, got {0}")]
    CycleTooShort(usize),
    #[error("graph is disconnected, so its bipartition is ambiguous")]
    Disconnected,
}

/// Bit mask with the low `n` bits set.
#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the set bit positions of a word, lowest first.
#[inline]
pub(crate) fn bits(mut word: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let b = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(b)
        }
    })
}

/// Vertices reachable from `start` using only vertices in `allowed`.
#[inline]
pub(crate) fn reach(rows: &[u64], start: usize, allowed: u64) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for v in bits(frontier) {
            next |= rows[v];
        }
        next &= allowed & !seen;
        seen |= next;
        frontier = next;
    }
    seen
}

/// True when the subgraph induced on `allowed` (non-empty) is connected.
#[inline]
pub(crate) fn induced_connected(rows: &[u64], allowed: u64) -> bool {
    if allowed == 0 {
        return true;
    }
    let start = allowed.trailing_zeros() as usize;
    reach(rows, start, allowed) == allowed
}

/// Even-distance side of a proper 2-colouring of the component containing
/// the lowest vertex of `component`, or `None` when that component has an odd cycle.
pub(crate) fn two_colour(rows: &[u64], component: u64) -> Option<u64> {
    let start = component.trailing_zeros() as usize;
    let mut even = 1u64 << start;
    let mut odd = 0u64;
    let mut frontier = even;
    let mut parity_even = true;
    while frontier != 0 {
        let mut next = 0;
        for v in bits(frontier) {
            next |= rows[v];
        }
        next &= component;
        let (same, other) = if parity_even {
            (even, odd)
        } else {
            (odd, even)
        };
        // Neighbours of this layer may not share its colour.
        if next & same != 0 {
            return None;
        }
        let fresh = next & !other;
        if parity_even {
            odd |= fresh;
        } else {
            even |= fresh;
        }
        frontier = fresh;
        parity_even = !parity_even;
    }
    Some(even)
}

/// A simple undirected graph with vertices `0..n`.
///
/// Values are immutable: every editing operation returns a new graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Builds a graph from an edge list; duplicate pairs in either orientation collapse.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            g.check_pair(u, v)?;
            g.rows[u] |= 1 << v;
            g.rows[v] |= 1 << u;
        }
        Ok(g)
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n });
        }
        Ok(Self {
            n,
            rows: vec![0; n],
        })
    }

    /// Builds a graph from raw adjacency rows, validating symmetry and the absence of loops.
    pub fn from_adjacency_rows(rows: &[u64]) -> Result<Self, GraphError> {
        let n = rows.len();
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n });
        }
        let mask = low_mask(n);
        for (v, &row) in rows.iter().enumerate() {
            if row & !mask != 0 || row & (1 << v) != 0 {
                return Err(GraphError::InvalidAdjacency { n });
            }
            for u in bits(row) {
                if rows[u] & (1 << v) == 0 {
                    return Err(GraphError::InvalidAdjacency { n });
                }
            }
        }
        Ok(Self::from_rows_unchecked(rows))
    }

    /// Rows must already satisfy every graph invariant.
    pub(crate) fn from_rows_unchecked(rows: &[u64]) -> Self {
        debug_assert!(!rows.is_empty() && rows.len() <= MAX_VERTICES);
        Self {
            n: rows.len(),
            rows: rows.to_vec(),
        }
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        let mask = low_mask(n);
        for (v, row) in g.rows.iter_mut().enumerate() {
            *row = mask & !(1 << v);
        }
        Ok(g)
    }

    /// The complete bipartite graph `K_{r,s}` with parts `0..r` and `r..r+s`.
    pub fn complete_bipartite(r: usize, s: usize) -> Result<Self, GraphError> {
        if r == 0 || s == 0 {
            return Err(GraphError::NoVertices);
        }
        Self::empty(r)?.join(&Self::empty(s)?)
    }

    /// The path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..n).map(|v| (v - 1, v)))
    }

    /// The cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::CycleTooShort(n));
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Disjoint union plus every edge between the two sides; `other` is relabeled by offset `self.n()`.
    pub fn join(&self, other: &Graph) -> Result<Self, GraphError> {
        let mut g = self.disjoint_union(other)?;
        let left = low_mask(self.n);
        let right = low_mask(g.n) & !left;
        for v in 0..self.n {
            g.rows[v] |= right;
        }
        for v in self.n..g.n {
            g.rows[v] |= left;
        }
        Ok(g)
    }

    /// Side-by-side copy of both graphs; `other` is relabeled by offset `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Self, GraphError> {
        let n = self.n + other.n;
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().map(|&r| r << self.n));
        Ok(Self { n, rows })
    }

    /// `K_k ∨ (K_i ∪ K_{n-k-i})`: a `k`-clique joined to two disjoint cliques.
    ///
    /// Valid for `1 <= k <= n-1` and `1 <= i <= (n-k)/2`, plus the degenerate
    /// `k = n-1, i = 1` which is `K_n`. Vertices `0..k` form the joined clique,
    /// `k..k+i` the first side clique.
    pub fn joined_cliques(n: usize, k: usize, i: usize) -> Result<Self, GraphError> {
        let invalid = GraphError::InvalidCliqueJoin { n, k, i };
        if k == 0 || k >= n || i == 0 {
            return Err(invalid);
        }
        let rest = n - k;
        if rest == 1 {
            if i != 1 {
                return Err(invalid);
            }
            return Self::complete(n);
        }
        if i > rest / 2 {
            return Err(invalid);
        }
        let sides = Self::complete(i)?.disjoint_union(&Self::complete(rest - i)?)?;
        Self::complete(k)?.join(&sides)
    }

    /// Vertex count.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count.
    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Raw adjacency rows: bit `u` of row `v` is set iff `uv` is an edge.
    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.rows[u] & (1 << v) != 0
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> {
        bits(self.rows[v])
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| bits(self.rows[u] & !low_mask(u + 1)).map(move |v| (u, v)))
    }

    /// Degrees `d_0, ..., d_{n-1}` in vertex order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * (self.n - 1) / 2
    }

    /// Returns `G - uv`; fails if `uv` is not an edge.
    pub fn delete_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        let mut g = self.clone();
        g.rows[u] &= !(1 << v);
        g.rows[v] &= !(1 << u);
        Ok(g)
    }

    /// Returns `G + uv`; adding an existing edge is a no-op.
    pub fn add_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        self.check_pair(u, v)?;
        let mut g = self.clone();
        g.rows[u] |= 1 << v;
        g.rows[v] |= 1 << u;
        Ok(g)
    }

    /// Subgraph induced on the vertices not in `removed`, relabeled in increasing order.
    pub fn remove_vertices(&self, removed: &[usize]) -> Result<Self, GraphError> {
        let mut gone = 0u64;
        for &v in removed {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            gone |= 1 << v;
        }
        let kept: Vec<usize> = bits(low_mask(self.n) & !gone).collect();
        let mut g = Self::empty(kept.len())?;
        for (a, &u) in kept.iter().enumerate() {
            for (b, &v) in kept.iter().enumerate() {
                if self.rows[u] & (1 << v) != 0 {
                    g.rows[a] |= 1 << b;
                }
            }
        }
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        induced_connected(&self.rows, low_mask(self.n))
    }

    /// Vertex masks of the connected components, ordered by lowest vertex.
    pub fn components(&self) -> Vec<u64> {
        let mut left = low_mask(self.n);
        let mut out = Vec::new();
        while left != 0 {
            let c = reach(&self.rows, left.trailing_zeros() as usize, left);
            out.push(c);
            left &= !c;
        }
        out
    }

    /// True when the graph has no odd cycle.
    pub fn is_bipartite(&self) -> bool {
        self.components()
            .into_iter()
            .all(|c| two_colour(&self.rows, c).is_some())
    }

    /// Part sizes `(r, s)` with `r <= s` of the unique 2-colouring of a connected graph.
    ///
    /// `Ok(None)` means the graph has an odd cycle. Disconnected graphs are an
    /// error since their parts are not determined.
    pub fn bipartition(&self) -> Result<Option<(usize, usize)>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let all = low_mask(self.n);
        Ok(two_colour(&self.rows, all).map(|even| {
            let a = even.count_ones() as usize;
            let b = self.n - a;
            (a.min(b), a.max(b))
        }))
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_odd_cycle(g: &Graph) -> bool {
        // An odd closed walk exists iff an odd cycle exists; search walks of odd
        // length up to n from every vertex via boolean matrix powers.
        let n = g.n();
        let mut reach_odd: Vec<u64> = g.rows().to_vec();
        for _ in 0..n {
            for v in 0..n {
                if reach_odd[v] & (1 << v) != 0 {
                    return true;
                }
            }
            // Two more steps.
            let mut next = vec![0u64; n];
            for v in 0..n {
                for u in bits(reach_odd[v]) {
                    for w in bits(g.rows()[u]) {
                        next[v] |= g.rows()[w];
                    }
                }
            }
            reach_odd = next;
        }
        false
    }

    #[test]
    fn constructors_have_expected_edge_counts() {
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.edge_count(), 2);
        assert_eq!(Graph::new(1, []).unwrap().edge_count(), 0);
        let dup = Graph::new(4, [(0, 1), (1, 0), (2, 3)]).unwrap();
        assert_eq!(dup.edge_count(), 2);
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
        let k23 = Graph::complete_bipartite(2, 3).unwrap();
        assert_eq!(k23.edge_count(), 6);
        assert_eq!(k23.bipartition().unwrap(), Some((2, 3)));
        assert_eq!(
            Graph::complete_bipartite(1, 1).unwrap(),
            Graph::complete(2).unwrap()
        );
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Graph::new(0, []), Err(GraphError::NoVertices));
        assert_eq!(
            Graph::new(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        );
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(Graph::empty(65).is_err());
        assert!(Graph::complete_bipartite(0, 2).is_err());
        assert!(Graph::from_adjacency_rows(&[0b10, 0b00]).is_err());
        assert!(Graph::from_adjacency_rows(&[0b01]).is_err());
    }

    #[test]
    fn edge_deletion() {
        let k3 = Graph::complete(3).unwrap();
        let p = k3.delete_edge(0, 1).unwrap();
        assert_eq!(p.edge_count(), 2);
        assert_eq!(k3.edge_count(), 3);
        assert!(p.is_connected());
        let p3 = Graph::path(3).unwrap();
        let split = p3.delete_edge(1, 0).unwrap();
        assert_eq!(split.edge_count(), 1);
        assert!(!split.is_connected());
        for (u, v) in Graph::complete(4).unwrap().edges() {
            assert_eq!(
                Graph::complete(4)
                    .unwrap()
                    .delete_edge(u, v)
                    .unwrap()
                    .edge_count(),
                5
            );
        }
        assert_eq!(p3.delete_edge(0, 2), Err(GraphError::MissingEdge(0, 2)));
    }

    #[test]
    fn join_and_union() {
        let k1 = Graph::complete(1).unwrap();
        assert_eq!(k1.join(&k1).unwrap(), Graph::complete(2).unwrap());
        let j = Graph::empty(2)
            .unwrap()
            .join(&Graph::empty(3).unwrap())
            .unwrap();
        assert_eq!(j, Graph::complete_bipartite(2, 3).unwrap());
        let u = Graph::complete(3)
            .unwrap()
            .disjoint_union(&Graph::complete(2).unwrap())
            .unwrap();
        assert_eq!(u.edge_count(), 4);
        assert!(!u.is_connected());
        assert!(u.has_edge(3, 4));
    }

    #[test]
    fn joined_cliques_examples() {
        let paw = Graph::joined_cliques(4, 1, 1).unwrap();
        assert_eq!(paw.edge_count(), 4);
        let mut degrees = paw.degree_sequence();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 2, 2, 3]);
        assert_eq!(Graph::joined_cliques(5, 2, 1).unwrap().edge_count(), 8);
        for n in 2..=10 {
            assert_eq!(
                Graph::joined_cliques(n, n - 1, 1).unwrap(),
                Graph::complete(n).unwrap()
            );
        }
        assert!(Graph::joined_cliques(5, 2, 2).is_err());
        assert!(Graph::joined_cliques(5, 0, 1).is_err());
        assert!(Graph::joined_cliques(5, 5, 1).is_err());
        assert!(Graph::joined_cliques(5, 4, 2).is_err());
    }

    #[test]
    fn joined_cliques_edge_count_formula() {
        let c2 = |x: usize| x * x.saturating_sub(1) / 2;
        for n in 2..=12 {
            for k in 1..n {
                for i in 1..=((n - k) / 2).max(1) {
                    let Ok(g) = Graph::joined_cliques(n, k, i) else {
                        continue;
                    };
                    let expected = c2(k) + k * (n - k) + c2(i) + c2(n - k - i);
                    assert_eq!(g.edge_count(), expected, "n={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn degrees_and_bipartition() {
        let c4 = Graph::cycle(4).unwrap();
        assert!(c4.is_connected());
        assert_eq!(c4.bipartition().unwrap(), Some((2, 2)));
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(k3.bipartition().unwrap(), None);
        let k23 = Graph::complete_bipartite(2, 3).unwrap();
        assert_eq!(k23.degree_sequence(), vec![3, 3, 2, 2, 2]);
        let two = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.bipartition(), Err(GraphError::Disconnected));
        assert!(two.is_bipartite());
    }

    #[test]
    fn remove_vertices_relabels() {
        let g = Graph::path(4).unwrap().remove_vertices(&[1]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn bipartite_iff_no_odd_cycle_exhaustive() {
        for n in 1..=6usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            for mask in 0u64..(1 << pairs.len()) {
                let g = Graph::new(n, bits(mask).map(|b| pairs[b])).unwrap();
                let degree_sum: usize = g.degree_sequence().iter().sum();
                assert_eq!(degree_sum, 2 * g.edge_count());
                assert_eq!(g.is_bipartite(), !brute_odd_cycle(&g), "{g:?}");
            }
        }
    }
}
