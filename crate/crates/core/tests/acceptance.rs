//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qpow::bounds::{
    complete_bipartite_spectrum, complete_spectrum, joined_cliques_spectrum,
    laplacian_energy_bound, BoundFamily, LAPLACIAN_ENERGY_POLYNOMIAL,
    LAPLACIAN_ENERGY_POLYNOMIAL_AS_PRINTED,
};
use qpow::connectivity::{exhaustive_vertex_connectivity, vertex_connectivity};
use qpow::invariants::laplacian_power_sum;
use qpow::search::{
    enumerate_graphs, reverify, scan, threads_from_env, GraphFilter, ScanConfig, ScanReport,
};
use qpow::spectra::q_spectrum;
use qpow::verify::{
    check_bipartite_cospectral, check_edge_monotonicity, check_identities, check_interlacing,
    EdgeCheckStatus,
};
use qpow::{emit_graph6, parse_graph6, Alpha, BoundSelector, Graph};

type Outcome = Result<String, String>;

fn alphas(xs: &[f64]) -> Vec<Alpha> {
    xs.iter().map(|&x| Alpha::new(x).unwrap()).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Connected labeled bipartite counts by edge-subset sweep, independent of the generator.
fn bipartite_census(n: usize) -> u64 {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut count = 0;
    for mask in 0u64..1 << pairs.len() {
        let mut adj = vec![0u32; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        let mut colour = vec![u8::MAX; n];
        colour[0] = 0;
        let mut stack = vec![0];
        let (mut seen, mut proper) = (1, true);
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if adj[u] >> v & 1 == 1 {
                    if colour[v] == u8::MAX {
                        colour[v] = 1 - colour[u];
                        seen += 1;
                        stack.push(v);
                    } else if colour[v] == colour[u] {
                        proper = false;
                    }
                }
            }
        }
        count += (proper && seen == n) as u64;
    }
    count
}

/// Census value for n = 8, confirmed once by the same sweep over 2^28 subsets.
const BIPARTITE_CENSUS_8: u64 = 2_086_099;

fn closed_form_spectra() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=12 {
        let d = complete_spectrum(n)
            .unwrap()
            .max_deviation(&q_spectrum(&Graph::complete(n).unwrap()).unwrap());
        worst = worst.max(d);
    }
    for r in 1..=8 {
        for s in r..=8 {
            let g = Graph::complete_bipartite(r, s).unwrap();
            let d = complete_bipartite_spectrum(r, s)
                .unwrap()
                .max_deviation(&q_spectrum(&g).unwrap());
            worst = worst.max(d);
        }
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "K_n (n<=12), K_r,s (r<=s<=8): max deviation {worst:.1e}"
    ))
}

fn joined_cliques_spectra() -> Outcome {
    let (mut worst, mut cases) = (0.0f64, 0);
    for n in 2..=12 {
        for k in 1..n {
            let top = ((n - k) / 2).max(1);
            for i in 1..=top {
                let g = Graph::joined_cliques(n, k, i).unwrap();
                let d = joined_cliques_spectrum(n, k, i)
                    .unwrap()
                    .max_deviation(&q_spectrum(&g).unwrap());
                worst = worst.max(d);
                cases += 1;
            }
        }
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "{cases} parameter triples: max deviation {worst:.1e}"
    ))
}

fn min_slack(r: &ScanReport) -> f64 {
    r.extremal_witnesses
        .iter()
        .map(|w| w.min_slack)
        .fold(f64::INFINITY, f64::min)
}

fn balanced_bipartite_exhaustive() -> Outcome {
    let cfg = ScanConfig::new(
        BoundSelector::Family(BoundFamily::Balanced),
        8,
        alphas(&[-2.0, -1.0, -0.5, 0.5, 1.0]),
    )
    .with_threads(threads_from_env());
    let r = scan(&cfg).map_err(|e| e.to_string())?;
    for n in 2..=8 {
        let expected = if n == 8 {
            BIPARTITE_CENSUS_8
        } else {
            bipartite_census(n)
        };
        let got = r.graphs_per_n.get(&n).copied().unwrap_or(0);
        ensure(got == expected, || {
            format!("n={n}: scanned {got}, census {expected}")
        })?;
    }
    let slack = min_slack(&r);
    ensure(slack >= -1e-7, || format!("min slack {slack:e}"))?;
    ensure(r.labeled_violations == 0, || {
        format!("{} violations", r.labeled_violations)
    })?;
    ensure(r.equality_mismatches == 0, || {
        format!(
            "{} equality/cospectrality disagreements",
            r.equality_mismatches
        )
    })?;
    Ok(format!(
        "{} graphs, {} evaluations, min slack {slack:.3e}, {} equalities all Q-cospectral with the balanced K_a,b",
        r.graphs_scanned, r.evaluations, r.equality_count
    ))
}

fn connectivity_exhaustive() -> Outcome {
    let cfg = ScanConfig::new(
        BoundSelector::Family(BoundFamily::Connectivity),
        7,
        alphas(&[1.0, 1.5, 2.0, 3.0]),
    )
    .with_threads(threads_from_env());
    let r = scan(&cfg).map_err(|e| e.to_string())?;
    ensure(r.labeled_violations == 0, || {
        format!("{} violations", r.labeled_violations)
    })?;
    let slack = min_slack(&r);
    ensure(r.equality_mismatches == 0, || {
        format!(
            "{} equality/cospectrality disagreements",
            r.equality_mismatches
        )
    })?;
    ensure(r.edge_count_violations == 0, || {
        format!(
            "{} graphs exceed the edge-count bound",
            r.edge_count_violations
        )
    })?;
    for w in &r.extremal_witnesses {
        ensure(w.joined_cliques_index.is_some(), || {
            format!(
                "arg-max {} at n={} k={:?} alpha={} is no G(i)",
                w.graph6, w.n, w.k, w.alpha
            )
        })?;
        ensure(w.matches_extremal, || {
            format!(
                "arg-max {} at n={} k={:?} alpha={} is not G(1)",
                w.graph6, w.n, w.k, w.alpha
            )
        })?;
    }
    Ok(format!(
        "{} graphs, {} (graph, k, alpha) evaluations, min slack {slack:.3e}, {} cells with arg-max G(1), edge counts within bound",
        r.graphs_scanned,
        r.evaluations,
        r.extremal_witnesses.len()
    ))
}

fn laplacian_energy_polynomial() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=20 {
        for k in 1..n {
            let g = Graph::joined_cliques(n, k, 1).unwrap();
            let el = laplacian_power_sum(&g, Alpha::new(2.0).unwrap()).unwrap();
            let b = laplacian_energy_bound(n, k);
            worst = worst.max((el - b.corrected as f64).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    let at = laplacian_energy_bound(3, 2);
    let el = laplacian_power_sum(
        &Graph::joined_cliques(3, 2, 1).unwrap(),
        Alpha::new(2.0).unwrap(),
    )
    .unwrap();
    ensure(
        at.corrected == 18 && at.as_printed == 72 && (el - 18.0).abs() < 1e-9,
        || {
            format!(
                "(3,2): E_L={el}, corrected {}, printed {}",
                at.corrected, at.as_printed
            )
        },
    )?;
    Ok(format!(
        "E_L(G(1)) = {LAPLACIAN_ENERGY_POLYNOMIAL} for n<=20 (max deviation {worst:.1e}); \
         printed {LAPLACIAN_ENERGY_POLYNOMIAL_AS_PRINTED} gives {} at (3,2) where E_L = {}",
        at.as_printed, at.corrected
    ))
}

fn interlacing_and_monotonicity() -> Outcome {
    let (mut edges, mut recorded, mut inapplicable, mut asserted_negative) =
        (0u64, 0u64, 0u64, 0u64);
    let mut worst_margin = f64::INFINITY;
    for n in 2..=6 {
        for g in enumerate_graphs(n, GraphFilter::Connected).unwrap() {
            for e in g.edges() {
                let r = check_interlacing(&g, e).map_err(|e| e.to_string())?;
                ensure(r.passed(), || {
                    format!("{} edge {e:?}: {r:?}", emit_graph6(&g))
                })?;
                edges += 1;
            }
            for x in [0.5, 1.0, 2.0, -2.0, -1.0, -0.5] {
                let r = check_edge_monotonicity(&g, Alpha::new(x).unwrap())
                    .map_err(|e| e.to_string())?;
                ensure(r.passed(), || format!("{} alpha={x}", emit_graph6(&g)))?;
                for o in r
                    .edges
                    .iter()
                    .filter(|o| o.status == EdgeCheckStatus::Asserted)
                {
                    worst_margin = worst_margin.min(o.margin);
                }
                if x < 0.0 {
                    asserted_negative += r.count(EdgeCheckStatus::Asserted) as u64;
                    recorded += r.count(EdgeCheckStatus::Recorded) as u64;
                    inapplicable += r.count(EdgeCheckStatus::Inapplicable) as u64;
                }
            }
        }
    }
    ensure(worst_margin > 1e-9, || {
        format!("smallest margin {worst_margin:e}")
    })?;
    Ok(format!(
        "{edges} (graph, edge) pairs interlace with trace gap 2; smallest asserted margin {worst_margin:.3e}; \
         alpha<0: {asserted_negative} asserted, {recorded} recorded (h changes), {inapplicable} disconnecting"
    ))
}

fn bipartite_cospectral() -> Outcome {
    let (mut graphs, mut worst) = (0u64, 0.0f64);
    for n in 1..=8 {
        for g in enumerate_graphs(n, GraphFilter::ConnectedBipartite).unwrap() {
            let r = check_bipartite_cospectral(&g).map_err(|e| e.to_string())?;
            ensure(r.applicable && r.passed, || {
                format!("{}: {r:?}", emit_graph6(&g))
            })?;
            worst = worst.max(r.max_deviation);
            graphs += 1;
        }
    }
    Ok(format!(
        "{graphs} connected bipartite graphs, max |L - Q| deviation {worst:.1e}"
    ))
}

fn identities() -> Outcome {
    let (mut graphs, mut checks) = (0u64, 0u64);
    for n in 1..=7 {
        for g in enumerate_graphs(n, GraphFilter::Connected).unwrap() {
            let r = check_identities(&g).map_err(|e| e.to_string())?;
            ensure(r.passed(), || {
                format!(
                    "{}: {:?}",
                    emit_graph6(&g),
                    r.failures().collect::<Vec<_>>()
                )
            })?;
            let s1 = r.checks.iter().find(|c| c.name == "S_1 = 2m").unwrap();
            ensure(s1.lhs.round() as usize == 2 * g.edge_count(), || {
                format!("{}: S_1 = {}", emit_graph6(&g), s1.lhs)
            })?;
            graphs += 1;
            checks += r.checks.len() as u64;
        }
    }
    Ok(format!(
        "{graphs} connected graphs, {checks} identity and interval checks"
    ))
}

fn conjecture_scan(cfg: &ScanConfig, label: &str) -> Result<(ScanReport, String), String> {
    let first = scan(cfg).map_err(|e| e.to_string())?;
    let second = scan(&cfg.clone().with_threads(2)).map_err(|e| e.to_string())?;
    let (a, b) = (first.redacted().to_json(), second.redacted().to_json());
    ensure(a == b, || format!("{label}: reports differ between runs"))?;
    for v in &first.violations {
        let g = parse_graph6(&v.graph6).map_err(|e| e.to_string())?;
        let again = reverify(&g, v.bound_id, v.k, Alpha::new(v.alpha).unwrap())
            .map_err(|e| e.to_string())?;
        ensure(v.reverified && again.is_some(), || {
            format!("{label}: {} did not survive re-verification", v.graph6)
        })?;
    }
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(format!("{label}.json"));
    std::fs::write(&path, first.to_json()).map_err(|e| e.to_string())?;
    let summary = format!(
        "{label}: {} graphs, {} labeled violations in {} spectral classes (all reverified), {} unconfirmed; report {}",
        first.graphs_scanned,
        first.labeled_violations,
        first.violations.len(),
        first.unconfirmed_violations,
        path.display()
    );
    Ok((first, summary))
}

fn conjecture_scans() -> Outcome {
    let threads = threads_from_env();
    let balanced = ScanConfig::new(
        BoundSelector::Family(BoundFamily::BalancedConjecture),
        8,
        alphas(&[1.5, 2.0, 3.0]),
    )
    .with_threads(threads);
    let (_, a) = conjecture_scan(&balanced, "conj31")?;
    let connectivity = ScanConfig::new(
        BoundSelector::Family(BoundFamily::ConnectivityConjecture),
        7,
        alphas(&[-2.0, -1.0, -0.5, 0.25, 0.5, 0.75]),
    )
    .with_threads(threads);
    let (r, b) = conjecture_scan(&connectivity, "conj44")?;
    // For alpha > 0 the maximiser over bounded connectivity is one of the G(i).
    for w in r.extremal_witnesses.iter().filter(|w| w.alpha > 0.0) {
        ensure(w.joined_cliques_index.is_some(), || {
            format!(
                "arg-max {} at n={} k={:?} alpha={} is no G(i)",
                w.graph6, w.n, w.k, w.alpha
            )
        })?;
    }
    Ok(format!(
        "{a}; {b}; deterministic across runs and thread counts"
    ))
}

fn oracles() -> Outcome {
    let mut graphs = 0u64;
    for n in 1..=7 {
        for g in enumerate_graphs(n, GraphFilter::Connected).unwrap() {
            let flow = vertex_connectivity(&g).kappa;
            let brute = exhaustive_vertex_connectivity(&g).unwrap().kappa;
            ensure(flow == brute, || {
                format!("{}: flow {flow}, brute force {brute}", emit_graph6(&g))
            })?;
            graphs += 1;
        }
    }
    let mut seen = HashSet::new();
    let mut labeled = 0u64;
    for n in 1..=5 {
        for g in enumerate_graphs(n, GraphFilter::All).unwrap() {
            let text = emit_graph6(&g);
            let back = parse_graph6(&text).map_err(|e| e.to_string())?;
            ensure(back == g && emit_graph6(&back) == text, || {
                format!("round trip failed for {text}")
            })?;
            ensure(seen.insert(text.clone()), || {
                format!("{text} emitted twice")
            })?;
            labeled += 1;
        }
    }
    Ok(format!(
        "kappa agrees on {graphs} connected graphs; graph6 round trip on {labeled} labeled graphs"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "closed-form K_n and K_r,s spectra",
            limit: Some(Duration::from_secs(1)),
            run: closed_form_spectra,
        },
        Criterion {
            id: 2,
            name: "closed-form G(i) spectra",
            limit: Some(Duration::from_secs(5)),
            run: joined_cliques_spectra,
        },
        Criterion {
            id: 3,
            name: "balanced bipartite bound, exhaustive n<=8",
            limit: Some(Duration::from_secs(120)),
            run: balanced_bipartite_exhaustive,
        },
        Criterion {
            id: 4,
            name: "bounded-connectivity bound, exhaustive n<=7",
            limit: Some(Duration::from_secs(600)),
            run: connectivity_exhaustive,
        },
        Criterion {
            id: 5,
            name: "Laplacian energy polynomial of G(1)",
            limit: None,
            run: laplacian_energy_polynomial,
        },
        Criterion {
            id: 6,
            name: "interlacing and edge monotonicity, n<=6",
            limit: None,
            run: interlacing_and_monotonicity,
        },
        Criterion {
            id: 7,
            name: "L/Q cospectrality on bipartite graphs, n<=8",
            limit: None,
            run: bipartite_cospectral,
        },
        Criterion {
            id: 8,
            name: "trace identities and interval relations, n<=7",
            limit: None,
            run: identities,
        },
        Criterion {
            id: 9,
            name: "conjecture scans",
            limit: Some(Duration::from_secs(1800)),
            run: conjecture_scans,
        },
        Criterion {
            id: 10,
            name: "connectivity and graph6 oracles",
            limit: None,
            run: oracles,
        },
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for c in criteria
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.id))
    {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} [{elapsed:.2?}] {}: {detail}",
                c.id, c.name
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2} [{elapsed:.2?}] {}: {why}",
                    c.id, c.name
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
