//! Exhaustive enumeration of small labeled graphs and bound scans over them.

pub mod enumerate;
pub mod key;
pub mod scan;

pub use enumerate::{
    count_graphs, enumerate_graphs, EnumerationError, GraphEnumerator, GraphFilter, RowsEnumerator,
    ENUMERATION_MAX_VERTICES,
};
pub use key::{spectral_key, SpectralKey, KEY_MAX_VERTICES};
pub use scan::{
    extremal_table, reverify, scan, scan_stream, threads_from_env, write_violations_csv,
    ExtremalWitness, RankedGraph, ScanConfig, ScanError, ScanReport, ViolationRecord,
    VIOLATION_CSV_HEADER,
};
