//! Fixture graphs shared by the benchmarks.

use qpow::Graph;

/// A spread of small connected graphs: complete, complete bipartite, joined cliques, cycle.
pub fn fixtures(n: usize) -> Vec<(&'static str, Graph)> {
    vec![
        ("complete", Graph::complete(n).unwrap()),
        (
            "bipartite",
            Graph::complete_bipartite(n / 2, n - n / 2).unwrap(),
        ),
        ("joined-cliques", Graph::joined_cliques(n, 2, 1).unwrap()),
        ("cycle", Graph::cycle(n).unwrap()),
    ]
}
