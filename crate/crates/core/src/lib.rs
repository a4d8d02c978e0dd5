//! Signless Laplacian power sums `S_α(G)` and related spectral invariants,
//! closed-form extremal bounds, numerical verification of those bounds, and
//! exhaustive small-graph scans hunting for counterexamples.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: immutable bit-matrix graphs and the constructions used by the bounds
//! * [`graph6`]: graph6 text I/O
//! * [`spectra`]: graph matrices and a Jacobi eigensolver
//! * [`invariants`]: `S_α`, `s_α`, energies, Kirchhoff index, Zagreb indices
//! * [`connectivity`]: vertex and edge connectivity by max-flow
//! * [`bounds`]: closed-form spectra and bound formulas
//! * [`verify`]: per-graph checks producing structured evidence
//! * [`search`]: labeled enumeration and bound scans

pub mod bounds;
pub mod connectivity;
pub mod graph;
pub mod graph6;
pub mod invariants;
pub mod search;
pub mod spectra;
pub mod verify;

pub use bounds::{BoundFamily, BoundId, BoundSelector, BoundSpec, Direction};
pub use graph::{Graph, GraphError, MAX_VERTICES};
pub use graph6::{emit_graph6, parse_graph6};
pub use invariants::{Alpha, InvariantBundle};
pub use search::{ScanConfig, ScanReport, ViolationRecord};
pub use spectra::{MatrixKind, Spectrum, SymmetricMatrix};
pub use verify::BoundResult;
