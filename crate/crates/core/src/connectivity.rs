//! Vertex and edge connectivity.
//!
//! Both are computed exactly with unit-capacity max-flow. Vertex
//! connectivity uses the split-vertex network and the Esfahanian–Hakimi
//! choice of source/sink pairs around a minimum-degree vertex; edge
//! connectivity uses flows from vertex 0 to every other vertex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bits, induced_connected, low_mask, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectivityError {
    #[error("connectivity threshold k={k} is outside 1..={max}")]
    ThresholdOutOfRange { k: usize, max: usize },
    #[error("exhaustive cut search is limited to {max} vertices, graph has {n}")]
    TooLargeForExhaustive { n: usize, max: usize },
}

/// A minimum vertex cut; for `K_n` the witness is every vertex but vertex 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCut {
    pub kappa: usize,
    pub cut: Vec<usize>,
}

/// A minimum edge cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCut {
    pub epsilon: usize,
    pub cut: Vec<(usize, usize)>,
}

/// `κ(G)` and `ε(G)` with their witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityProfile {
    pub kappa: usize,
    pub epsilon: usize,
    pub witness_vertex_cut: Vec<usize>,
    pub witness_edge_cut: Vec<(usize, usize)>,
}

/// Dense residual network for small unit-capacity flow problems.
struct FlowNetwork {
    size: usize,
    cap: Vec<u32>,
    parent: Vec<usize>,
    queue: Vec<usize>,
}

impl FlowNetwork {
    fn new(size: usize) -> Self {
        Self {
            size,
            cap: vec![0; size * size],
            parent: vec![usize::MAX; size],
            queue: Vec::with_capacity(size),
        }
    }

    fn reset(&mut self) {
        self.cap.fill(0);
    }

    #[inline]
    fn set(&mut self, from: usize, to: usize, c: u32) {
        self.cap[from * self.size + to] = c;
    }

    /// BFS over positive residual arcs; fills `parent` and returns whether `sink` was reached.
    fn search(&mut self, source: usize, sink: Option<usize>) -> bool {
        self.parent.fill(usize::MAX);
        self.parent[source] = source;
        self.queue.clear();
        self.queue.push(source);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            let row = &self.cap[u * self.size..(u + 1) * self.size];
            for (w, &c) in row.iter().enumerate() {
                if c > 0 && self.parent[w] == usize::MAX {
                    self.parent[w] = u;
                    if Some(w) == sink {
                        return true;
                    }
                    self.queue.push(w);
                }
            }
        }
        false
    }

    /// Augments until no path remains or the flow reaches `limit`.
    fn max_flow(&mut self, source: usize, sink: usize, limit: usize) -> usize {
        let mut flow = 0;
        while flow < limit && self.search(source, Some(sink)) {
            let mut bottleneck = u32::MAX;
            let mut w = sink;
            while w != source {
                let u = self.parent[w];
                bottleneck = bottleneck.min(self.cap[u * self.size + w]);
                w = u;
            }
            let mut w = sink;
            while w != source {
                let u = self.parent[w];
                self.cap[u * self.size + w] -= bottleneck;
                self.cap[w * self.size + u] += bottleneck;
                w = u;
            }
            flow += bottleneck as usize;
        }
        flow
    }

    /// Residual-reachable side after a completed max-flow.
    fn source_side(&mut self, source: usize) -> Vec<bool> {
        self.search(source, None);
        self.parent.iter().map(|&p| p != usize::MAX).collect()
    }
}

/// Split-vertex network: `v_in = 2v`, `v_out = 2v + 1`.
fn build_split_network(net: &mut FlowNetwork, g: &Graph) {
    net.reset();
    let big = g.n() as u32;
    for v in 0..g.n() {
        net.set(2 * v, 2 * v + 1, 1);
        for u in g.neighbors(v) {
            net.set(2 * v + 1, 2 * u, big);
        }
    }
}

/// Minimum number of vertices separating non-adjacent `s` and `t`, capped at `limit`.
/// Returns the cut only when the flow stayed below `limit`.
fn local_vertex_cut(
    net: &mut FlowNetwork,
    g: &Graph,
    s: usize,
    t: usize,
    limit: usize,
) -> Option<(usize, Vec<usize>)> {
    build_split_network(net, g);
    let flow = net.max_flow(2 * s + 1, 2 * t, limit);
    if flow >= limit {
        return None;
    }
    let side = net.source_side(2 * s + 1);
    let cut = (0..g.n())
        .filter(|&v| side[2 * v] && !side[2 * v + 1])
        .collect::<Vec<_>>();
    debug_assert_eq!(cut.len(), flow);
    Some((flow, cut))
}

/// Local vertex connectivity between two distinct non-adjacent vertices.
pub fn local_vertex_connectivity(g: &Graph, s: usize, t: usize) -> Option<VertexCut> {
    if s == t || s >= g.n() || t >= g.n() || g.has_edge(s, t) {
        return None;
    }
    let mut net = FlowNetwork::new(2 * g.n());
    local_vertex_cut(&mut net, g, s, t, usize::MAX).map(|(kappa, cut)| VertexCut { kappa, cut })
}

/// `κ(G)`: 0 for disconnected graphs, `n - 1` for `K_n`.
pub fn vertex_connectivity(g: &Graph) -> VertexCut {
    let n = g.n();
    if !g.is_connected() {
        return VertexCut {
            kappa: 0,
            cut: vec![],
        };
    }
    if g.is_complete() {
        return VertexCut {
            kappa: n - 1,
            cut: (1..n).collect(),
        };
    }
    let v = (0..n).min_by_key(|&v| g.degree(v)).unwrap();
    // A non-complete graph's minimum-degree neighbourhood always separates v
    // from some vertex, which caps every later flow.
    let mut best = g.degree(v);
    let mut witness: Vec<usize> = g.neighbors(v).collect();
    let mut net = FlowNetwork::new(2 * n);

    let outside = low_mask(n) & !g.rows()[v] & !(1u64 << v);
    for w in bits(outside) {
        if let Some((k, cut)) = local_vertex_cut(&mut net, g, v, w, best) {
            best = k;
            witness = cut;
        }
    }
    let nbrs: Vec<usize> = g.neighbors(v).collect();
    for (a, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[a + 1..] {
            if g.has_edge(x, y) {
                continue;
            }
            if let Some((k, cut)) = local_vertex_cut(&mut net, g, x, y, best) {
                best = k;
                witness = cut;
            }
        }
    }
    VertexCut {
        kappa: best,
        cut: witness,
    }
}

/// `ε(G)`: 0 for disconnected graphs and `K_1`.
pub fn edge_connectivity(g: &Graph) -> EdgeCut {
    let n = g.n();
    if n == 1 || !g.is_connected() {
        return EdgeCut {
            epsilon: 0,
            cut: vec![],
        };
    }
    let mut net = FlowNetwork::new(n);
    let mut best = usize::MAX;
    let mut witness = vec![];
    for t in 1..n {
        net.reset();
        for (u, w) in g.edges() {
            net.set(u, w, 1);
            net.set(w, u, 1);
        }
        let flow = net.max_flow(0, t, best);
        if flow < best {
            let side = net.source_side(0);
            best = flow;
            witness = g.edges().filter(|&(u, w)| side[u] != side[w]).collect();
        }
    }
    EdgeCut {
        epsilon: best,
        cut: witness,
    }
}

pub fn connectivity_profile(g: &Graph) -> ConnectivityProfile {
    let v = vertex_connectivity(g);
    let e = edge_connectivity(g);
    ConnectivityProfile {
        kappa: v.kappa,
        epsilon: e.epsilon,
        witness_vertex_cut: v.cut,
        witness_edge_cut: e.cut,
    }
}

/// Membership in the family of connected graphs with `κ(G) <= k`.
pub fn kappa_at_most(g: &Graph, k: usize) -> Result<bool, ConnectivityError> {
    let max = g.n().saturating_sub(1);
    if k == 0 || k > max {
        return Err(ConnectivityError::ThresholdOutOfRange { k, max });
    }
    Ok(g.is_connected() && vertex_connectivity(g).kappa <= k)
}

/// Largest order accepted by [`exhaustive_vertex_connectivity`].
pub const EXHAUSTIVE_MAX_VERTICES: usize = 20;

/// `κ(G)` by testing vertex subsets in increasing size; independent of the flow code.
pub fn exhaustive_vertex_connectivity(g: &Graph) -> Result<VertexCut, ConnectivityError> {
    let n = g.n();
    if n > EXHAUSTIVE_MAX_VERTICES {
        return Err(ConnectivityError::TooLargeForExhaustive {
            n,
            max: EXHAUSTIVE_MAX_VERTICES,
        });
    }
    let all = low_mask(n);
    if !induced_connected(g.rows(), all) {
        return Ok(VertexCut {
            kappa: 0,
            cut: vec![],
        });
    }
    for size in 1..n.saturating_sub(1) {
        // Gosper's hack over all `size`-subsets of `n` bits.
        let mut subset: u64 = (1 << size) - 1;
        while subset <= all {
            if !induced_connected(g.rows(), all & !subset) {
                return Ok(VertexCut {
                    kappa: size,
                    cut: bits(subset).collect(),
                });
            }
            let c = subset & subset.wrapping_neg();
            let r = subset + c;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
    }
    Ok(VertexCut {
        kappa: n - 1,
        cut: (1..n).collect(),
    })
}
