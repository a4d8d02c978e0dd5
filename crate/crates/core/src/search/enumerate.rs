//! Labeled enumeration of small graphs.
//!
//! Unrestricted and connected populations walk every edge subset in Gray-code
//! order, so consecutive candidates differ by one edge. Connected bipartite
//! graphs are generated directly, vertex by vertex, without visiting
//! non-bipartite candidates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::vertex_connectivity;
use crate::graph::{bits, induced_connected, low_mask, reach, two_colour, Graph};

/// Largest order accepted by the internal enumerators.
pub const ENUMERATION_MAX_VERTICES: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("enumeration needs at least one vertex")]
    NoVertices,
    #[error("internal enumeration is limited to {max} vertices, got {n}; supply a graph6 stream instead")]
    TooManyVertices { n: usize, max: usize },
    #[error("unknown graph filter {0:?}")]
    UnknownFilter(String),
}

/// Which labeled graphs an enumeration yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFilter {
    All,
    Connected,
    ConnectedBipartite,
    /// Connected with vertex connectivity at most `k`.
    KappaAtMost(usize),
}

impl GraphFilter {
    pub fn accepts(&self, g: &Graph) -> bool {
        match *self {
            GraphFilter::All => true,
            GraphFilter::Connected => g.is_connected(),
            GraphFilter::ConnectedBipartite => g.is_connected() && g.is_bipartite(),
            GraphFilter::KappaAtMost(k) => g.is_connected() && vertex_connectivity(g).kappa <= k,
        }
    }
}

impl fmt::Display for GraphFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFilter::All => f.write_str("all"),
            GraphFilter::Connected => f.write_str("connected"),
            GraphFilter::ConnectedBipartite => f.write_str("connected-bipartite"),
            GraphFilter::KappaAtMost(k) => write!(f, "kappa-at-most-{k}"),
        }
    }
}

impl FromStr for GraphFilter {
    type Err = EnumerationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(GraphFilter::All),
            "connected" => Ok(GraphFilter::Connected),
            "connected-bipartite" => Ok(GraphFilter::ConnectedBipartite),
            _ => s
                .strip_prefix("kappa-at-most-")
                .and_then(|k| k.parse().ok())
                .map(GraphFilter::KappaAtMost)
                .ok_or_else(|| EnumerationError::UnknownFilter(s.to_string())),
        }
    }
}

fn check_order(n: usize) -> Result<(), EnumerationError> {
    if n == 0 {
        return Err(EnumerationError::NoVertices);
    }
    if n > ENUMERATION_MAX_VERTICES {
        return Err(EnumerationError::TooManyVertices {
            n,
            max: ENUMERATION_MAX_VERTICES,
        });
    }
    Ok(())
}

/// Every edge subset, one edge flip per step.
struct GrayWalk {
    rows: Vec<u64>,
    pairs: Vec<(usize, usize)>,
    step: u64,
    total: u64,
    started: bool,
}

impl GrayWalk {
    fn new(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
        Self {
            rows: vec![0; n],
            total: 1u64 << pairs.len(),
            pairs,
            step: 0,
            started: false,
        }
    }

    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        self.step += 1;
        if self.step >= self.total {
            return false;
        }
        let (u, v) = self.pairs[self.step.trailing_zeros() as usize];
        self.rows[u] ^= 1 << v;
        self.rows[v] ^= 1 << u;
        true
    }
}

/// Depth-first construction of connected bipartite graphs.
///
/// Vertex `v` attaches to each component of the graph on `0..v` through
/// nothing, a non-empty subset of one colour class, or (for the last
/// vertex) necessarily something, which makes the result connected.
struct BipartiteWalk {
    n: usize,
    rows: Vec<u64>,
    choices: Vec<Vec<u64>>,
    pos: Vec<usize>,
    depth: usize,
    started: bool,
    done: bool,
}

impl BipartiteWalk {
    fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![0; n],
            choices: vec![Vec::new(); n],
            pos: vec![0; n],
            depth: 1,
            started: false,
            done: false,
        }
    }

    fn attachments(&self, v: usize) -> Vec<u64> {
        let last = v + 1 == self.n;
        let mut out = vec![0u64];
        let mut left = low_mask(v);
        while left != 0 {
            let comp = reach(&self.rows, left.trailing_zeros() as usize, low_mask(v));
            left &= !comp;
            let even = two_colour(&self.rows, comp).expect("prefix graphs stay bipartite");
            let mut options = Vec::new();
            if !last {
                options.push(0);
            }
            for side in [even, comp & !even] {
                let mut sub = side;
                while sub != 0 {
                    options.push(sub);
                    sub = (sub - 1) & side;
                }
            }
            out = out
                .iter()
                .flat_map(|&acc| options.iter().map(move |&o| acc | o))
                .collect();
        }
        out
    }

    fn attach(&mut self, v: usize, mask: u64) {
        self.rows[v] = mask;
        for u in bits(mask) {
            self.rows[u] |= 1 << v;
        }
    }

    fn detach(&mut self, v: usize) {
        for u in bits(self.rows[v]) {
            self.rows[u] &= !(1 << v);
        }
        self.rows[v] = 0;
    }

    fn descend(&mut self) {
        while self.depth < self.n {
            let v = self.depth;
            self.choices[v] = self.attachments(v);
            self.pos[v] = 0;
            let mask = self.choices[v][0];
            self.attach(v, mask);
            self.depth += 1;
        }
    }

    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            self.descend();
            return true;
        }
        while self.depth > 1 {
            let v = self.depth - 1;
            self.detach(v);
            self.pos[v] += 1;
            if self.pos[v] < self.choices[v].len() {
                let mask = self.choices[v][self.pos[v]];
                self.attach(v, mask);
                self.descend();
                return true;
            }
            self.depth -= 1;
        }
        self.done = true;
        false
    }
}

enum Walk {
    Gray(GrayWalk),
    Bipartite(BipartiteWalk),
}

/// Allocation-free enumeration yielding adjacency rows.
pub struct RowsEnumerator {
    filter: GraphFilter,
    walk: Walk,
}

impl RowsEnumerator {
    pub fn new(n: usize, filter: GraphFilter) -> Result<Self, EnumerationError> {
        check_order(n)?;
        let walk = match filter {
            GraphFilter::ConnectedBipartite => Walk::Bipartite(BipartiteWalk::new(n)),
            _ => Walk::Gray(GrayWalk::new(n)),
        };
        Ok(Self { filter, walk })
    }

    /// Rows of the next accepted graph.
    pub fn next_rows(&mut self) -> Option<&[u64]> {
        match &mut self.walk {
            Walk::Bipartite(w) => w.advance().then_some(&w.rows[..]),
            Walk::Gray(w) => loop {
                if !w.advance() {
                    return None;
                }
                let all = low_mask(w.rows.len());
                let ok = match self.filter {
                    GraphFilter::All => true,
                    GraphFilter::Connected => induced_connected(&w.rows, all),
                    GraphFilter::KappaAtMost(k) => {
                        induced_connected(&w.rows, all)
                            && vertex_connectivity(&Graph::from_rows_unchecked(&w.rows)).kappa <= k
                    }
                    GraphFilter::ConnectedBipartite => unreachable!(),
                };
                if ok {
                    return Some(&w.rows[..]);
                }
            },
        }
    }
}

/// Iterator over every labeled graph on `n` vertices accepted by `filter`, each exactly once.
pub struct GraphEnumerator(RowsEnumerator);

impl Iterator for GraphEnumerator {
    type Item = Graph;
    fn next(&mut self) -> Option<Graph> {
        self.0.next_rows().map(Graph::from_rows_unchecked)
    }
}

pub fn enumerate_graphs(
    n: usize,
    filter: GraphFilter,
) -> Result<GraphEnumerator, EnumerationError> {
    RowsEnumerator::new(n, filter).map(GraphEnumerator)
}

/// Size of the labeled population without materialising graphs.
pub fn count_graphs(n: usize, filter: GraphFilter) -> Result<u64, EnumerationError> {
    let mut e = RowsEnumerator::new(n, filter)?;
    let mut count = 0;
    while e.next_rows().is_some() {
        count += 1;
    }
    Ok(count)
}
