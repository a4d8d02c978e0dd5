use proptest::prelude::*;

use qpow::bounds::{BoundId, BoundSpec};
use qpow::connectivity::{edge_connectivity, exhaustive_vertex_connectivity, vertex_connectivity};
use qpow::invariants::{first_zagreb, laplacian_power_sum, named_invariants, signless_power_sum};
use qpow::search::{spectral_key, SpectralKey};
use qpow::spectra::{l_spectrum, q_spectrum};
use qpow::verify::{check_bound, check_identities, check_interlacing};
use qpow::{emit_graph6, parse_graph6, Alpha, Graph, MatrixKind};

fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut idx = 0;
    for v in 1..n {
        for u in 0..v {
            if bits[idx] {
                edges.push((u, v));
            }
            idx += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

fn graphs(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2)
            .prop_map(move |bits| graph_from_bits(n, &bits))
    })
}

/// A random spanning tree plus independent extra edges with probability `density`.
fn connected_graphs(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n, 0.0..1.0f64).prop_flat_map(|(n, density)| {
        (
            prop::collection::vec(any::<prop::sample::Index>(), n.saturating_sub(1)),
            prop::collection::vec(
                prop::bool::weighted(density.clamp(0.01, 0.99)),
                n * (n - 1) / 2,
            ),
        )
            .prop_map(move |(parents, extra)| {
                let g = graph_from_bits(n, &extra);
                let mut out = g;
                for (i, p) in parents.iter().enumerate() {
                    let v = i + 1;
                    let u = p.index(v);
                    if !out.has_edge(u, v) {
                        out = out.add_edge(u, v).unwrap();
                    }
                }
                out
            })
    })
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    Graph::new(g.n(), g.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap()
}

fn permutations(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graphs(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Odd closed walk search over all 2-colourings; independent of the BFS colouring.
fn has_proper_two_colouring(g: &Graph) -> bool {
    (0u32..1 << g.n()).any(|c| g.edges().all(|(u, v)| (c >> u & 1) != (c >> v & 1)))
}

fn alpha(x: f64) -> Alpha {
    Alpha::new(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn join_edge_count(a in graphs(8), b in graphs(8)) {
        let j = a.join(&b).unwrap();
        prop_assert_eq!(j.edge_count(), a.edge_count() + b.edge_count() + a.n() * b.n());
        prop_assert_eq!(j.n(), a.n() + b.n());
        let u = a.disjoint_union(&b).unwrap();
        prop_assert_eq!(u.edge_count(), a.edge_count() + b.edge_count());
    }

    #[test]
    fn degree_sum_is_twice_edge_count(g in graphs(20)) {
        prop_assert_eq!(g.degree_sequence().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn edge_edit_round_trip(g in connected_graphs(2, 12)) {
        let (u, v) = g.edges().next().unwrap();
        let h = g.delete_edge(u, v).unwrap();
        prop_assert_eq!(h.edge_count() + 1, g.edge_count());
        prop_assert_eq!(h.add_edge(u, v).unwrap(), g);
    }

    #[test]
    fn bipartite_iff_two_colourable(g in graphs(8)) {
        prop_assert_eq!(g.is_bipartite(), has_proper_two_colouring(&g));
    }

    #[test]
    fn graph6_round_trip(g in graphs(64)) {
        let text = emit_graph6(&g);
        prop_assert_eq!(parse_graph6(&text).unwrap(), g.clone());
        if g.n() <= 62 {
            let bits = g.n() * (g.n() - 1) / 2;
            prop_assert_eq!(text.len(), 1 + bits.div_ceil(6));
        }
    }

    #[test]
    fn spectrum_shape_and_trace_identities(g in graphs(12)) {
        let q = q_spectrum(&g).unwrap();
        prop_assert_eq!(q.len(), g.n());
        prop_assert!(q.values().windows(2).all(|w| w[0] >= w[1]));
        let two_m = 2.0 * g.edge_count() as f64;
        prop_assert!((q.sum() - two_m).abs() <= 1e-8);
        let squares: f64 = q.values().iter().map(|x| x * x).sum();
        prop_assert!((squares - (first_zagreb(&g) as f64 + two_m)).abs() <= 1e-8);
        prop_assert!(q.smallest() >= -1e-10 * q.largest().max(1.0));
    }

    #[test]
    fn zero_signless_eigenvalue_iff_bipartite(g in connected_graphs(1, 10)) {
        let q = q_spectrum(&g).unwrap();
        prop_assert_eq!(q.smallest() <= q.zero_threshold(), g.is_bipartite());
    }

    #[test]
    fn bipartite_laplacian_matches_signless(g in connected_graphs(2, 10)) {
        prop_assume!(g.is_bipartite());
        let (q, l) = (q_spectrum(&g).unwrap(), l_spectrum(&g).unwrap());
        prop_assert!(q.max_deviation(&l) <= 1e-8);
        for x in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0] {
            let (a, b) = (signless_power_sum(&g, alpha(x)).unwrap(), laplacian_power_sum(&g, alpha(x)).unwrap());
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
        }
    }

    #[test]
    fn second_power_sums_match_zagreb(g in graphs(8)) {
        let target = (first_zagreb(&g) + 2 * g.edge_count() as u64) as f64;
        prop_assert!((signless_power_sum(&g, alpha(2.0)).unwrap() - target).abs() <= 1e-8);
        prop_assert!((laplacian_power_sum(&g, alpha(2.0)).unwrap() - target).abs() <= 1e-8);
    }

    #[test]
    fn spectral_key_is_label_invariant((g, perm) in permutations(10)) {
        let h = relabel(&g, &perm);
        let key = |g: &Graph| -> SpectralKey { spectral_key(g.rows(), MatrixKind::SignlessLaplacian).unwrap() };
        prop_assert_eq!(key(&g), key(&h));
        prop_assert!(q_spectrum(&g).unwrap().max_deviation(&q_spectrum(&h).unwrap()) <= 1e-8);
    }

    #[test]
    fn whitney_chain(g in connected_graphs(2, 12)) {
        let kappa = vertex_connectivity(&g);
        let eps = edge_connectivity(&g);
        prop_assert!(kappa.kappa <= eps.epsilon);
        prop_assert!(eps.epsilon <= g.min_degree());
        prop_assert_eq!(kappa.kappa, exhaustive_vertex_connectivity(&g).unwrap().kappa);
        if !g.is_complete() {
            prop_assert_eq!(kappa.cut.len(), kappa.kappa);
            prop_assert!(!g.remove_vertices(&kappa.cut).unwrap().is_connected());
        }
        prop_assert_eq!(eps.cut.len(), eps.epsilon);
        let mut h = g.clone();
        for &(u, v) in &eps.cut {
            h = h.delete_edge(u, v).unwrap();
        }
        prop_assert!(!h.is_connected());
    }

    #[test]
    fn interlacing_holds_for_every_edge(g in connected_graphs(2, 10)) {
        for e in g.edges() {
            prop_assert!(check_interlacing(&g, e).unwrap().passed());
        }
    }

    #[test]
    fn identities_hold(g in connected_graphs(1, 10)) {
        let r = check_identities(&g).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn named_invariants_agree_with_power_sums(g in connected_graphs(2, 10)) {
        let b = named_invariants(&g).unwrap();
        prop_assert!((b.incidence_energy - signless_power_sum(&g, alpha(0.5)).unwrap()).abs() <= 1e-9);
        prop_assert!((b.lel - laplacian_power_sum(&g, alpha(0.5)).unwrap()).abs() <= 1e-9);
        prop_assert!((b.kirchhoff - g.n() as f64 * laplacian_power_sum(&g, alpha(-1.0)).unwrap()).abs() <= 1e-9);
        prop_assert!((b.laplacian_energy - b.m1 - 2.0 * b.m as f64).abs() <= 1e-8);
    }

    #[test]
    fn complete_graph_bounds_hold(g in connected_graphs(2, 10), x in prop_oneof![0.1..4.0f64, -3.0..-0.1f64]) {
        let id = if x > 0.0 { BoundId::CompleteUpper } else { BoundId::CompleteLower };
        let r = check_bound(&g, &BoundSpec::new(id), alpha(x)).unwrap();
        prop_assert_eq!(r.applicable, x > 0.0 || !g.is_bipartite() || g.n() == 2);
        if r.applicable {
            prop_assert!(r.satisfied(), "{:?}", r);
            prop_assert_eq!(r.equality, g.is_complete());
        }
    }

    #[test]
    fn connectivity_bound_holds(g in connected_graphs(2, 10), x in 1.0..4.0f64) {
        let kappa = vertex_connectivity(&g).kappa;
        for k in kappa.max(1)..g.n() {
            let r = check_bound(&g, &BoundSpec::with_k(BoundId::ConnectivityUpper, k), alpha(x)).unwrap();
            prop_assert!(r.applicable && r.satisfied(), "{:?}", r);
        }
    }

    #[test]
    fn bound_checks_are_deterministic(g in connected_graphs(2, 9), x in 0.1..1.0f64) {
        let spec = BoundSpec::new(BoundId::CompleteUpper);
        prop_assert_eq!(check_bound(&g, &spec, alpha(x)).unwrap(), check_bound(&g, &spec, alpha(x)).unwrap());
    }
}
