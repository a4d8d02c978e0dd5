//! Bound scans over exhaustive labeled populations or graph6 streams.
//!
//! Work is cut into fixed-size chunks in enumeration order. Each chunk keeps
//! its own cache of eigensolves keyed by [`SpectralKey`], so the outcome does
//! not depend on how many worker threads share the chunks.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, BufRead, Write};
use std::rc::Rc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    edge_count_bound, laplacian_energy_bound, BoundError, BoundId, BoundSelector, BoundSpec,
    Direction, Family, LAPLACIAN_ENERGY_POLYNOMIAL, LAPLACIAN_ENERGY_POLYNOMIAL_AS_PRINTED,
};
use crate::connectivity::{
    exhaustive_vertex_connectivity, vertex_connectivity, EXHAUSTIVE_MAX_VERTICES,
};
use crate::graph::{induced_connected, low_mask, reach, two_colour, Graph};
use crate::graph6::{emit_graph6, parse_graph6, HEADER};
use crate::invariants::{nonzero_power_sum, Alpha};
use crate::search::enumerate::{EnumerationError, GraphFilter, RowsEnumerator};
use crate::search::key::{spectral_key, SpectralKey};
use crate::spectra::{
    eigenvalues_with, q_spectrum, signless_laplacian, JacobiOptions, MatrixKind, SpectraError,
    Spectrum,
};
use crate::verify::{equality_tolerance, signed_slack, SPECTRUM_TOL};

/// Graphs per unit of work.
pub const CHUNK_SIZE: usize = 1 << 16;

/// Environment variable capping scan parallelism.
pub const THREADS_ENV: &str = "QPOW_THREADS";

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("alpha grid is empty")]
    EmptyAlphaGrid,
    #[error("invalid order range {min}..={max}")]
    InvalidRange { min: usize, max: usize },
    #[error("{id} requires {range}, got alpha={alpha}")]
    AlphaOutsideRange {
        id: BoundId,
        range: &'static str,
        alpha: f64,
    },
    #[error("connectivity threshold must be at least 1")]
    ZeroThreshold,
    #[error("{0} takes no connectivity threshold")]
    UnexpectedK(BoundSelector),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("numerical failure on {graph}: {source}")]
    Numerical { graph: String, source: SpectraError },
    #[error("read error at line {line}: {source}")]
    Io { line: usize, source: io::Error },
}

/// Worker count from [`THREADS_ENV`], defaulting to the machine's parallelism.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub selector: BoundSelector,
    pub n_min: usize,
    pub n_max: usize,
    pub alpha_grid: Vec<Alpha>,
    /// Connectivity threshold; `None` evaluates every `k` from `max(κ, 1)` to `n - 1`.
    pub k: Option<usize>,
    pub threads: usize,
}

impl ScanConfig {
    pub fn new(selector: BoundSelector, n_max: usize, alpha_grid: Vec<Alpha>) -> Self {
        Self {
            selector,
            n_min: 2,
            n_max,
            alpha_grid,
            k: None,
            threads: 1,
        }
    }

    pub fn with_min_n(mut self, n_min: usize) -> Self {
        self.n_min = n_min;
        self
    }

    pub fn with_k(mut self, k: Option<usize>) -> Self {
        self.k = k;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
enum ClassId {
    Spectral(SpectralKey),
    Graph6(String),
}

/// A reverified counterexample, deduplicated per spectral class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub graph6: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub alpha: f64,
    pub bound_id: BoundId,
    pub invariant_value: f64,
    pub bound_value: f64,
    /// Signed slack; negative for a violation.
    pub margin: f64,
    pub reverified: bool,
    /// Labeled graphs in the same spectral class that violate at this `(n, k, α)`.
    pub labeled_copies: u64,
    /// Enumeration ordinal within `n`, or input line number for streams.
    pub index: u64,
}

pub const VIOLATION_CSV_HEADER: &str = "graph6,n,k,alpha,bound_id,invariant,bound,margin";

impl ViolationRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.graph6,
            self.n,
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            self.alpha,
            self.bound_id,
            self.invariant_value,
            self.bound_value,
            self.margin
        )
    }
}

pub fn write_violations_csv<W: Write>(mut out: W, records: &[ViolationRecord]) -> io::Result<()> {
    writeln!(out, "{VIOLATION_CSV_HEADER}")?;
    for r in records {
        // graph6 text can contain commas and quotes.
        let g6 = if r.graph6.contains([',', '"']) {
            format!("\"{}\"", r.graph6.replace('"', "\"\""))
        } else {
            r.graph6.clone()
        };
        let row = r.csv_row();
        let rest = &row[r.graph6.len()..];
        writeln!(out, "{g6}{rest}")?;
    }
    Ok(())
}

/// Per `(n, k, α)` summary with the graph extremising the invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalWitness {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub alpha: f64,
    pub bound_id: BoundId,
    pub evaluations: u64,
    /// Maximiser for upper bounds, minimiser for lower bounds.
    pub graph6: String,
    pub value: f64,
    pub bound_value: f64,
    pub min_slack: f64,
    pub equality_count: u64,
    pub equality_mismatches: u64,
    /// The witness is Q-cospectral with the claimed extremal graph.
    pub matches_extremal: bool,
    /// `i` with the witness Q-cospectral with `K_k ∨ (K_i ∪ K_{n-k-i})`, for connectivity bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joined_cliques_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedAlpha {
    pub alpha: f64,
    pub bound_id: BoundId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub bound_id: String,
    pub resolved: Vec<ResolvedAlpha>,
    pub n_range: (usize, usize),
    pub alpha_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub source: String,
    pub population: String,
    pub graphs_scanned: u64,
    pub graphs_per_n: BTreeMap<usize, u64>,
    /// Graphs read or enumerated but outside every resolved bound's domain.
    pub graphs_skipped: u64,
    pub evaluations: u64,
    pub inapplicable_evaluations: u64,
    pub equality_count: u64,
    pub extremal_match_count: u64,
    /// Evaluations where numerical equality and Q-cospectrality with the extremal graph disagree.
    pub equality_mismatches: u64,
    /// Graphs exceeding the edge-count bound for their `k` (connectivity bounds only).
    pub edge_count_violations: u64,
    pub labeled_violations: u64,
    /// Candidates that did not survive re-verification.
    pub unconfirmed_violations: u64,
    pub violations: Vec<ViolationRecord>,
    pub extremal_witnesses: Vec<ExtremalWitness>,
    pub notes: Vec<String>,
    pub stream_errors: Vec<StreamIssue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl ScanReport {
    /// Copy without wall time, for byte-level comparison of runs.
    pub fn redacted(&self) -> ScanReport {
        ScanReport {
            wall_time_secs: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan reports serialize")
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Population {
    ConnectedBipartite,
    Connected,
}

struct Plan {
    selector: BoundSelector,
    alphas: Vec<Alpha>,
    ids: Vec<BoundId>,
    k: Option<usize>,
    population: Population,
    needs_kappa: bool,
    needs_parts: bool,
    n_min: usize,
    n_max: usize,
}

impl Plan {
    fn new(cfg: &ScanConfig) -> Result<Self, ScanError> {
        if cfg.alpha_grid.is_empty() {
            return Err(ScanError::EmptyAlphaGrid);
        }
        if cfg.n_min == 0 || cfg.n_min > cfg.n_max {
            return Err(ScanError::InvalidRange {
                min: cfg.n_min,
                max: cfg.n_max,
            });
        }
        let mut ids = Vec::with_capacity(cfg.alpha_grid.len());
        for &a in &cfg.alpha_grid {
            let id = cfg.selector.resolve(a)?;
            if !id.admits_alpha(a) {
                return Err(ScanError::AlphaOutsideRange {
                    id,
                    range: id.alpha_range(),
                    alpha: a.value(),
                });
            }
            ids.push(id);
        }
        let needs_kappa = ids.iter().any(|id| id.needs_k());
        match cfg.k {
            Some(0) => return Err(ScanError::ZeroThreshold),
            Some(_) if !needs_kappa => return Err(ScanError::UnexpectedK(cfg.selector)),
            _ => {}
        }
        let bipartite_only = ids
            .iter()
            .all(|id| id.family() == Family::ConnectedBipartite);
        Ok(Self {
            selector: cfg.selector,
            alphas: cfg.alpha_grid.clone(),
            needs_parts: ids
                .iter()
                .any(|&id| matches!(id, BoundId::PartiteUpper | BoundId::PartiteLower)),
            ids,
            k: cfg.k,
            population: if bipartite_only {
                Population::ConnectedBipartite
            } else {
                Population::Connected
            },
            needs_kappa,
            n_min: cfg.n_min,
            n_max: cfg.n_max,
        })
    }

    fn filter(&self) -> GraphFilter {
        match self.population {
            Population::ConnectedBipartite => GraphFilter::ConnectedBipartite,
            Population::Connected => GraphFilter::Connected,
        }
    }
}

struct Chunk {
    /// `(index, n, offset into rows)`.
    items: Vec<(u64, usize, usize)>,
    rows: Vec<u64>,
}

impl Chunk {
    fn new() -> Self {
        Self {
            items: Vec::with_capacity(CHUNK_SIZE),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, index: u64, rows: &[u64]) {
        self.items.push((index, rows.len(), self.rows.len()));
        self.rows.extend_from_slice(rows);
    }

    fn is_full(&self) -> bool {
        self.items.len() >= CHUNK_SIZE
    }
}

enum Source<R> {
    Internal {
        n: usize,
        n_max: usize,
        filter: GraphFilter,
        current: Option<RowsEnumerator>,
        index: u64,
    },
    Stream {
        reader: R,
        line: usize,
        n_min: usize,
        n_max: usize,
        issues: Vec<StreamIssue>,
        out_of_range: u64,
        done: bool,
    },
}

impl<R: BufRead> Source<R> {
    fn next_chunk(&mut self) -> Result<Option<Chunk>, ScanError> {
        match self {
            Source::Internal {
                n,
                n_max,
                filter,
                current,
                index,
            } => loop {
                if *n > *n_max {
                    return Ok(None);
                }
                let e = match current {
                    Some(e) => e,
                    None => {
                        *index = 0;
                        current.insert(RowsEnumerator::new(*n, *filter)?)
                    }
                };
                let mut chunk = Chunk::new();
                while !chunk.is_full() {
                    match e.next_rows() {
                        Some(rows) => {
                            chunk.push(*index, rows);
                            *index += 1;
                        }
                        None => {
                            *current = None;
                            *n += 1;
                            break;
                        }
                    }
                }
                if !chunk.items.is_empty() {
                    return Ok(Some(chunk));
                }
            },
            Source::Stream {
                reader,
                line,
                n_min,
                n_max,
                issues,
                out_of_range,
                done,
            } => {
                if *done {
                    return Ok(None);
                }
                let mut chunk = Chunk::new();
                let mut buf = String::new();
                while !chunk.is_full() {
                    buf.clear();
                    let read = reader.read_line(&mut buf).map_err(|source| ScanError::Io {
                        line: *line + 1,
                        source,
                    })?;
                    if read == 0 {
                        *done = true;
                        break;
                    }
                    *line += 1;
                    let mut text = buf.trim_end_matches(['\n', '\r']);
                    if let Some(rest) = text.strip_prefix(HEADER) {
                        text = rest;
                    }
                    if text.trim().is_empty() {
                        continue;
                    }
                    match parse_graph6(text) {
                        Ok(g) if (*n_min..=*n_max).contains(&g.n()) => {
                            chunk.push(*line as u64, g.rows())
                        }
                        Ok(_) => *out_of_range += 1,
                        Err(e) => issues.push(StreamIssue {
                            line: *line,
                            message: e.to_string(),
                        }),
                    }
                }
                Ok((!chunk.items.is_empty()).then_some(chunk))
            }
        }
    }
}

struct ClassData {
    key: Option<SpectralKey>,
    sums: Vec<Option<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct ExtremalKey {
    id: BoundId,
    n: usize,
    parts: Option<(usize, usize)>,
    k: Option<usize>,
}

struct ExtremalData {
    key: Option<SpectralKey>,
    spectrum: Spectrum,
    degrees: Vec<u32>,
    bound: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    n: usize,
    k: Option<usize>,
    alpha: usize,
}

#[derive(Debug, Clone)]
struct Cell {
    evaluations: u64,
    equality_count: u64,
    equality_mismatches: u64,
    min_slack: f64,
    bound_value: f64,
    best_value: f64,
    best_index: u64,
    best_rows: Vec<u64>,
}

impl Cell {
    fn merge(&mut self, other: Cell, direction: Direction) {
        self.evaluations += other.evaluations;
        self.equality_count += other.equality_count;
        self.equality_mismatches += other.equality_mismatches;
        self.min_slack = self.min_slack.min(other.min_slack);
        if beats(
            direction,
            other.best_value,
            other.best_index,
            self.best_value,
            self.best_index,
        ) {
            self.best_value = other.best_value;
            self.best_index = other.best_index;
            self.best_rows = other.best_rows;
        }
    }
}

fn beats(direction: Direction, value: f64, index: u64, best: f64, best_index: u64) -> bool {
    match direction {
        Direction::Upper if value > best => true,
        Direction::Lower if value < best => true,
        _ => value == best && index < best_index,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ViolationKey {
    n: usize,
    k: Option<usize>,
    alpha: usize,
    class: ClassId,
}

#[derive(Default)]
struct Tally {
    graphs_scanned: u64,
    graphs_skipped: u64,
    graphs_per_n: BTreeMap<usize, u64>,
    evaluations: u64,
    inapplicable: u64,
    equality_count: u64,
    extremal_match_count: u64,
    equality_mismatches: u64,
    edge_count_violations: u64,
    labeled_violations: u64,
    unconfirmed: u64,
    cells: BTreeMap<CellKey, Cell>,
    violations: BTreeMap<ViolationKey, ViolationRecord>,
}

impl Tally {
    fn merge(&mut self, other: Tally, plan: &Plan) {
        self.graphs_scanned += other.graphs_scanned;
        self.graphs_skipped += other.graphs_skipped;
        for (n, c) in other.graphs_per_n {
            *self.graphs_per_n.entry(n).or_default() += c;
        }
        self.evaluations += other.evaluations;
        self.inapplicable += other.inapplicable;
        self.equality_count += other.equality_count;
        self.extremal_match_count += other.extremal_match_count;
        self.equality_mismatches += other.equality_mismatches;
        self.edge_count_violations += other.edge_count_violations;
        self.labeled_violations += other.labeled_violations;
        self.unconfirmed += other.unconfirmed;
        for (key, cell) in other.cells {
            let direction = plan.ids[key.alpha].direction();
            match self.cells.get_mut(&key) {
                Some(c) => c.merge(cell, direction),
                None => {
                    self.cells.insert(key, cell);
                }
            }
        }
        for (key, rec) in other.violations {
            self.add_violation(key, rec);
        }
    }

    /// Keeps the earliest labeled representative of each class and counts the rest.
    fn add_violation(&mut self, key: ViolationKey, rec: ViolationRecord) {
        match self.violations.get_mut(&key) {
            Some(r) => {
                let copies = r.labeled_copies + rec.labeled_copies;
                if rec.index < r.index {
                    *r = rec;
                }
                r.labeled_copies = copies;
            }
            None => {
                self.violations.insert(key, rec);
            }
        }
    }
}

fn sorted_degrees(rows: &[u64]) -> Vec<u32> {
    let mut d: Vec<u32> = rows.iter().map(|r| r.count_ones()).collect();
    d.sort_unstable();
    d
}

/// Colour class sizes of a connected bipartite graph, smaller first.
fn parts_of(rows: &[u64]) -> Option<(usize, usize)> {
    let all = low_mask(rows.len());
    let even = two_colour(rows, all)?;
    let a = even.count_ones() as usize;
    let b = rows.len() - a;
    Some((a.min(b), a.max(b)))
}

fn is_bipartite_rows(rows: &[u64]) -> bool {
    let mut left = low_mask(rows.len());
    while left != 0 {
        let comp = reach(rows, left.trailing_zeros() as usize, low_mask(rows.len()));
        if two_colour(rows, comp).is_none() {
            return false;
        }
        left &= !comp;
    }
    true
}

fn numerical(g: &Graph, source: SpectraError) -> ScanError {
    ScanError::Numerical {
        graph: emit_graph6(g),
        source,
    }
}

struct Worker<'a> {
    plan: &'a Plan,
    classes: HashMap<SpectralKey, Rc<ClassData>>,
    extremal: HashMap<ExtremalKey, Rc<ExtremalData>>,
    tally: Tally,
}

impl<'a> Worker<'a> {
    fn new(plan: &'a Plan) -> Self {
        Self {
            plan,
            classes: HashMap::new(),
            extremal: HashMap::new(),
            tally: Tally::default(),
        }
    }

    fn class(&mut self, rows: &[u64]) -> Result<Rc<ClassData>, ScanError> {
        let key = spectral_key(rows, MatrixKind::SignlessLaplacian);
        if let Some(k) = key {
            if let Some(c) = self.classes.get(&k) {
                return Ok(c.clone());
            }
        }
        let g = Graph::from_rows_unchecked(rows);
        let spec = q_spectrum(&g).map_err(|e| numerical(&g, e))?;
        let sums = self
            .plan
            .alphas
            .iter()
            .map(|&a| nonzero_power_sum(&spec, a).ok())
            .collect();
        let data = Rc::new(ClassData { key, sums });
        if let Some(k) = key {
            self.classes.insert(k, data.clone());
        }
        Ok(data)
    }

    fn extremal(&mut self, ek: ExtremalKey) -> Result<Rc<ExtremalData>, ScanError> {
        if let Some(e) = self.extremal.get(&ek) {
            return Ok(e.clone());
        }
        let spec = BoundSpec { id: ek.id, k: ek.k };
        let g = spec.extremal_graph(ek.n, ek.parts)?;
        let bound = self
            .plan
            .ids
            .iter()
            .zip(&self.plan.alphas)
            .map(|(&id, &a)| {
                if id.bound_family() == ek.id.bound_family() {
                    BoundSpec { id, k: ek.k }
                        .evaluate(ek.n, ek.parts, a)
                        .map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let data = Rc::new(ExtremalData {
            key: spectral_key(g.rows(), MatrixKind::SignlessLaplacian),
            spectrum: q_spectrum(&g).map_err(|e| numerical(&g, e))?,
            degrees: sorted_degrees(g.rows()),
            bound,
        });
        self.extremal.insert(ek, data.clone());
        Ok(data)
    }

    fn cospectral(
        &self,
        class: &ClassData,
        ext: &ExtremalData,
        rows: &[u64],
    ) -> Result<bool, ScanError> {
        match (class.key, ext.key) {
            (Some(a), Some(b)) => Ok(a == b),
            _ => {
                let g = Graph::from_rows_unchecked(rows);
                let spec = q_spectrum(&g).map_err(|e| numerical(&g, e))?;
                Ok(spec.approx_eq(&ext.spectrum, SPECTRUM_TOL))
            }
        }
    }

    fn process(&mut self, index: u64, rows: &[u64]) -> Result<(), ScanError> {
        let plan = self.plan;
        let n = rows.len();
        let all = low_mask(n);
        if !induced_connected(rows, all) {
            self.tally.graphs_skipped += 1;
            return Ok(());
        }
        let bipartite = match plan.population {
            Population::ConnectedBipartite => {
                if !is_bipartite_rows(rows) {
                    self.tally.graphs_skipped += 1;
                    return Ok(());
                }
                true
            }
            Population::Connected => is_bipartite_rows(rows),
        };
        let parts = if plan.needs_parts && bipartite {
            parts_of(rows)
        } else {
            None
        };
        let ks: Vec<Option<usize>> = if plan.needs_kappa {
            let kappa = vertex_connectivity(&Graph::from_rows_unchecked(rows)).kappa;
            match plan.k {
                Some(k) if kappa <= k && k < n => vec![Some(k)],
                Some(_) => vec![],
                None => (kappa.max(1)..n).map(Some).collect(),
            }
        } else {
            vec![None]
        };
        let m = rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2;
        if plan.needs_kappa {
            for k in ks.iter().flatten() {
                if m > edge_count_bound(n, *k) {
                    self.tally.edge_count_violations += 1;
                }
            }
        }

        let mut class: Option<Rc<ClassData>> = None;
        let mut degrees: Option<Vec<u32>> = None;
        let mut applied = 0u64;
        for (ai, &id) in plan.ids.iter().enumerate() {
            let in_domain = match id.family() {
                Family::ConnectedBipartite => bipartite,
                Family::Connected => true,
                Family::ConnectedNonBipartite => !bipartite || n == 2,
                Family::ConnectivityAtMostK => true,
            };
            if !in_domain {
                self.tally.inapplicable += 1;
                continue;
            }
            let class = match &class {
                Some(c) => c.clone(),
                None => class.insert(self.class(rows)?).clone(),
            };
            let Some(value) = class.sums[ai] else {
                self.tally.inapplicable += 1;
                continue;
            };
            let k_list: &[Option<usize>] = if id.needs_k() { &ks } else { &[None] };
            if k_list.is_empty() {
                self.tally.inapplicable += 1;
            }
            for &k in k_list {
                let ext = self.extremal(ExtremalKey {
                    id,
                    n,
                    parts: if id.family() == Family::ConnectedBipartite {
                        parts
                    } else {
                        None
                    },
                    k,
                })?;
                let bound = ext.bound[ai].expect("bound evaluated for every resolved alpha");
                let slack = signed_slack(id.direction(), value, bound);
                let tol = equality_tolerance(bound);
                let equality = slack.abs() <= tol;
                let cospectral = self.cospectral(&class, &ext, rows)?;
                let degrees = degrees.get_or_insert_with(|| sorted_degrees(rows));
                let matches = cospectral && *degrees == ext.degrees;
                applied += 1;
                let t = &mut self.tally;
                t.evaluations += 1;
                t.equality_count += equality as u64;
                t.extremal_match_count += matches as u64;
                let mismatch = equality != cospectral;
                t.equality_mismatches += mismatch as u64;
                let cell_key = CellKey { n, k, alpha: ai };
                let fresh = Cell {
                    evaluations: 1,
                    equality_count: equality as u64,
                    equality_mismatches: mismatch as u64,
                    min_slack: slack,
                    bound_value: bound,
                    best_value: value,
                    best_index: index,
                    best_rows: rows.to_vec(),
                };
                match t.cells.get_mut(&cell_key) {
                    Some(c) => {
                        c.evaluations += 1;
                        c.equality_count += equality as u64;
                        c.equality_mismatches += mismatch as u64;
                        c.min_slack = c.min_slack.min(slack);
                        if beats(id.direction(), value, index, c.best_value, c.best_index) {
                            c.best_value = value;
                            c.best_index = index;
                            c.best_rows = fresh.best_rows;
                        }
                    }
                    None => {
                        t.cells.insert(cell_key, fresh);
                    }
                }
                if slack < -tol {
                    self.violation(index, rows, &class, ai, id, k)?;
                }
            }
        }
        if applied > 0 {
            self.tally.graphs_scanned += 1;
            *self.tally.graphs_per_n.entry(n).or_default() += 1;
        } else {
            self.tally.graphs_skipped += 1;
        }
        Ok(())
    }

    fn violation(
        &mut self,
        index: u64,
        rows: &[u64],
        class: &ClassData,
        ai: usize,
        id: BoundId,
        k: Option<usize>,
    ) -> Result<(), ScanError> {
        self.tally.labeled_violations += 1;
        let g = Graph::from_rows_unchecked(rows);
        let Some((value, bound, slack)) = reverify(&g, id, k, self.plan.alphas[ai])? else {
            self.tally.unconfirmed += 1;
            return Ok(());
        };
        let class_id = match class.key {
            Some(key) => ClassId::Spectral(key),
            None => ClassId::Graph6(emit_graph6(&g)),
        };
        let key = ViolationKey {
            n: g.n(),
            k,
            alpha: ai,
            class: class_id,
        };
        let record = ViolationRecord {
            graph6: emit_graph6(&g),
            n: g.n(),
            k,
            alpha: self.plan.alphas[ai].value(),
            bound_id: id,
            invariant_value: value,
            bound_value: bound,
            margin: slack,
            reverified: true,
            labeled_copies: 1,
            index,
        };
        self.tally.add_violation(key, record);
        Ok(())
    }

    fn run_chunk(&mut self, chunk: &Chunk) -> Result<(), ScanError> {
        self.classes.clear();
        for &(index, n, offset) in &chunk.items {
            self.process(index, &chunk.rows[offset..offset + n])?;
        }
        Ok(())
    }
}

/// Recomputes a candidate violation with a tightened eigensolver and, for
/// connectivity bounds, the exhaustive vertex-cut oracle. Returns the
/// confirmed `(invariant, bound, slack)` or `None` when it does not survive.
pub fn reverify(
    g: &Graph,
    id: BoundId,
    k: Option<usize>,
    alpha: Alpha,
) -> Result<Option<(f64, f64, f64)>, ScanError> {
    if !g.is_connected() {
        return Ok(None);
    }
    let parts = match id.family() {
        Family::ConnectedBipartite => match g.bipartition().map_err(BoundError::from)? {
            Some(p) => Some(p),
            None => return Ok(None),
        },
        _ => None,
    };
    if id.needs_k() {
        let Some(k) = k else { return Ok(None) };
        let kappa = if g.n() <= EXHAUSTIVE_MAX_VERTICES {
            exhaustive_vertex_connectivity(g)
                .expect("order checked")
                .kappa
        } else {
            vertex_connectivity(g).kappa
        };
        if kappa > k {
            return Ok(None);
        }
    }
    let spec = eigenvalues_with(&signless_laplacian(g), JacobiOptions::tightened())
        .map_err(|e| numerical(g, e))?;
    let Ok(value) = nonzero_power_sum(&spec, alpha) else {
        return Ok(None);
    };
    let bound = BoundSpec { id, k }.evaluate(g.n(), parts, alpha)?;
    let slack = signed_slack(id.direction(), value, bound);
    Ok((slack < -equality_tolerance(bound)).then_some((value, bound, slack)))
}

/// The `i` for which `g` is Q-cospectral with `K_k ∨ (K_i ∪ K_{n-k-i})`.
pub fn joined_cliques_index(g: &Graph, k: usize) -> Result<Option<usize>, ScanError> {
    let n = g.n();
    if k == 0 || k >= n {
        return Ok(None);
    }
    let key = spectral_key(g.rows(), MatrixKind::SignlessLaplacian);
    let spec = match key {
        Some(_) => None,
        None => Some(q_spectrum(g).map_err(|e| numerical(g, e))?),
    };
    for i in 1..=((n - k) / 2).max(1) {
        let gi = Graph::joined_cliques(n, k, i).map_err(BoundError::from)?;
        let same = match (&key, &spec) {
            (Some(a), _) => {
                spectral_key(gi.rows(), MatrixKind::SignlessLaplacian).as_ref() == Some(a)
            }
            (None, Some(s)) => s.approx_eq(
                &q_spectrum(&gi).map_err(|e| numerical(&gi, e))?,
                SPECTRUM_TOL,
            ),
            (None, None) => unreachable!(),
        };
        if same {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn drive<R: BufRead>(
    plan: &Plan,
    mut source: Source<R>,
    threads: usize,
) -> Result<(Tally, Source<R>), ScanError> {
    let mut total = Tally::default();
    if threads <= 1 {
        let mut worker = Worker::new(plan);
        while let Some(chunk) = source.next_chunk()? {
            worker.run_chunk(&chunk)?;
        }
        total.merge(worker.tally, plan);
        return Ok((total, source));
    }
    let (chunk_tx, chunk_rx) = crossbeam::channel::bounded::<Chunk>(threads * 2);
    let (result_tx, result_rx) = crossbeam::channel::unbounded::<Result<Tally, ScanError>>();
    let produced = std::thread::scope(|scope| {
        for _ in 0..threads {
            let rx = chunk_rx.clone();
            let tx = result_tx.clone();
            scope.spawn(move || {
                let mut worker = Worker::new(plan);
                for chunk in rx {
                    if let Err(e) = worker.run_chunk(&chunk) {
                        let _ = tx.send(Err(e));
                        return;
                    }
                }
                let _ = tx.send(Ok(worker.tally));
            });
        }
        drop(result_tx);
        let mut produced = Ok(());
        loop {
            match source.next_chunk() {
                Ok(Some(chunk)) => {
                    if chunk_tx.send(chunk).is_err() {
                        break;
                    }
                }
                Ok(None) => break,
                Err(e) => {
                    produced = Err(e);
                    break;
                }
            }
        }
        drop(chunk_tx);
        produced
    });
    let mut first_err = produced.err();
    for r in result_rx {
        match r {
            Ok(t) => total.merge(t, plan),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok((total, source)),
    }
}

fn finish(
    plan: &Plan,
    tally: Tally,
    source: String,
    stream: Option<(Vec<StreamIssue>, u64)>,
) -> Result<ScanReport, ScanError> {
    let mut witnesses = Vec::with_capacity(tally.cells.len());
    for (key, cell) in &tally.cells {
        let id = plan.ids[key.alpha];
        let g = Graph::from_rows_unchecked(&cell.best_rows);
        let parts = if id.family() == Family::ConnectedBipartite {
            g.bipartition().map_err(BoundError::from)?
        } else {
            None
        };
        let extremal = BoundSpec { id, k: key.k }.extremal_graph(key.n, parts)?;
        let same = match (
            spectral_key(g.rows(), MatrixKind::SignlessLaplacian),
            spectral_key(extremal.rows(), MatrixKind::SignlessLaplacian),
        ) {
            (Some(a), Some(b)) => a == b,
            _ => q_spectrum(&g).map_err(|e| numerical(&g, e))?.approx_eq(
                &q_spectrum(&extremal).map_err(|e| numerical(&extremal, e))?,
                SPECTRUM_TOL,
            ),
        };
        let gi = match key.k {
            Some(k) => joined_cliques_index(&g, k)?,
            None => None,
        };
        witnesses.push(ExtremalWitness {
            n: key.n,
            k: key.k,
            alpha: plan.alphas[key.alpha].value(),
            bound_id: id,
            evaluations: cell.evaluations,
            graph6: emit_graph6(&g),
            value: cell.best_value,
            bound_value: cell.bound_value,
            min_slack: cell.min_slack,
            equality_count: cell.equality_count,
            equality_mismatches: cell.equality_mismatches,
            matches_extremal: same,
            joined_cliques_index: gi,
        });
    }
    let mut notes = Vec::new();
    if plan.needs_kappa {
        let at = laplacian_energy_bound(3, 2);
        notes.push(format!(
            "E_L of the extremal graph is {LAPLACIAN_ENERGY_POLYNOMIAL}; the printed form {LAPLACIAN_ENERGY_POLYNOMIAL_AS_PRINTED} gives {} instead of {} at n=3, k=2",
            at.as_printed, at.corrected
        ));
    }
    let (stream_errors, out_of_range) = stream.unwrap_or_default();
    if out_of_range > 0 {
        notes.push(format!(
            "{out_of_range} input graphs outside the order range were ignored"
        ));
    }
    let mut violations: Vec<(ViolationKey, ViolationRecord)> =
        tally.violations.into_iter().collect();
    violations.sort_by(|a, b| {
        (a.0.n, a.0.k, a.0.alpha, a.1.index).cmp(&(b.0.n, b.0.k, b.0.alpha, b.1.index))
    });
    Ok(ScanReport {
        bound_id: plan.selector.to_string(),
        resolved: plan
            .alphas
            .iter()
            .zip(&plan.ids)
            .map(|(a, &id)| ResolvedAlpha {
                alpha: a.value(),
                bound_id: id,
            })
            .collect(),
        n_range: (plan.n_min, plan.n_max),
        alpha_grid: plan.alphas.iter().map(|a| a.value()).collect(),
        k: plan.k,
        source,
        population: plan.filter().to_string(),
        graphs_scanned: tally.graphs_scanned,
        graphs_per_n: tally.graphs_per_n,
        graphs_skipped: tally.graphs_skipped + out_of_range,
        evaluations: tally.evaluations,
        inapplicable_evaluations: tally.inapplicable,
        equality_count: tally.equality_count,
        extremal_match_count: tally.extremal_match_count,
        equality_mismatches: tally.equality_mismatches,
        edge_count_violations: tally.edge_count_violations,
        labeled_violations: tally.labeled_violations,
        unconfirmed_violations: tally.unconfirmed,
        violations: violations.into_iter().map(|(_, r)| r).collect(),
        extremal_witnesses: witnesses,
        notes,
        stream_errors,
        wall_time_secs: None,
    })
}

/// Scans every labeled graph in the bound's population for `n_min..=n_max`.
pub fn scan(cfg: &ScanConfig) -> Result<ScanReport, ScanError> {
    let start = Instant::now();
    let plan = Plan::new(cfg)?;
    let source: Source<io::Empty> = Source::Internal {
        n: plan.n_min,
        n_max: plan.n_max,
        filter: plan.filter(),
        current: None,
        index: 0,
    };
    if plan.n_max > crate::search::enumerate::ENUMERATION_MAX_VERTICES {
        RowsEnumerator::new(plan.n_max, plan.filter())?;
    }
    let (tally, _) = drive(&plan, source, cfg.threads)?;
    let mut report = finish(&plan, tally, "internal".into(), None)?;
    report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

/// Scans graphs read from a graph6 stream; unparsable lines are reported, not fatal.
pub fn scan_stream<R: BufRead>(cfg: &ScanConfig, reader: R) -> Result<ScanReport, ScanError> {
    let start = Instant::now();
    let plan = Plan::new(cfg)?;
    let source = Source::Stream {
        reader,
        line: 0,
        n_min: plan.n_min,
        n_max: plan.n_max,
        issues: Vec::new(),
        out_of_range: 0,
        done: false,
    };
    let (tally, source) = drive(&plan, source, cfg.threads)?;
    let Source::Stream {
        issues,
        out_of_range,
        ..
    } = source
    else {
        unreachable!()
    };
    let mut report = finish(&plan, tally, "stream".into(), Some((issues, out_of_range)))?;
    report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

/// One spectral class in an extremal ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedGraph {
    pub graph6: String,
    pub value: f64,
    /// Labeled graphs in the population sharing this Q-spectrum.
    pub labeled_copies: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joined_cliques_index: Option<usize>,
}

/// The `top` spectral classes of the bound's population on `n` vertices,
/// ranked by `S_α` in the bound's extremal direction (largest first for
/// upper bounds).
pub fn extremal_table(
    selector: BoundSelector,
    n: usize,
    k: Option<usize>,
    alpha: Alpha,
    top: usize,
) -> Result<Vec<RankedGraph>, ScanError> {
    let cfg = ScanConfig::new(selector, n, vec![alpha])
        .with_min_n(n)
        .with_k(k);
    let plan = Plan::new(&cfg)?;
    let id = plan.ids[0];
    if id.needs_k() && k.is_none() {
        return Err(BoundError::MissingK(id).into());
    }
    let mut e = RowsEnumerator::new(n, plan.filter())?;
    let mut classes: HashMap<ClassId, (f64, u64, Vec<u64>, u64)> = HashMap::new();
    let mut worker = Worker::new(&plan);
    let mut index = 0u64;
    while let Some(rows) = e.next_rows() {
        let i = index;
        index += 1;
        let bipartite = is_bipartite_rows(rows);
        let in_domain = match id.family() {
            Family::ConnectedBipartite => bipartite,
            Family::Connected => true,
            Family::ConnectedNonBipartite => !bipartite || n == 2,
            Family::ConnectivityAtMostK => {
                let k = k.expect("checked above");
                k < n && vertex_connectivity(&Graph::from_rows_unchecked(rows)).kappa <= k
            }
        };
        if !in_domain {
            continue;
        }
        let class = worker.class(rows)?;
        let Some(value) = class.sums[0] else { continue };
        let cid = match class.key {
            Some(key) => ClassId::Spectral(key),
            None => ClassId::Graph6(emit_graph6(&Graph::from_rows_unchecked(rows))),
        };
        classes
            .entry(cid)
            .and_modify(|e| e.1 += 1)
            .or_insert_with(|| (value, 1, rows.to_vec(), i));
    }
    let mut ranked: Vec<(f64, u64, Vec<u64>, u64)> = classes.into_values().collect();
    let upper = id.direction() == Direction::Upper;
    ranked.sort_by(|a, b| {
        let by_value = if upper {
            b.0.total_cmp(&a.0)
        } else {
            a.0.total_cmp(&b.0)
        };
        by_value.then(a.3.cmp(&b.3))
    });
    ranked
        .into_iter()
        .take(top)
        .map(|(value, copies, rows, _)| {
            let g = Graph::from_rows_unchecked(&rows);
            Ok(RankedGraph {
                graph6: emit_graph6(&g),
                value,
                labeled_copies: copies,
                joined_cliques_index: match k {
                    Some(k) if id.needs_k() => joined_cliques_index(&g, k)?,
                    _ => None,
                },
            })
        })
        .collect()
}
