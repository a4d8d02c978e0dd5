use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use qpow::bounds::BoundError;
use qpow::invariants::{
    energy, first_zagreb, kirchhoff_index, laplacian_power_sum, signless_power_sum, InvariantError,
};
use qpow::search::{scan, scan_stream, threads_from_env, write_violations_csv, ScanError};
use qpow::spectra::{spectrum_of, SpectraError};
use qpow::verify::{check_bound, VerifyError};
use qpow::{
    emit_graph6, parse_graph6, Alpha, BoundResult, BoundSelector, BoundSpec, Graph, MatrixKind,
    ScanConfig, ScanReport,
};

mod format;
use format::sig12;

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Signless Laplacian power sums, bounds and counterexample scans.
#[derive(Debug, Parser)]
#[command(name = "qpow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the eigenvalues of a graph matrix, largest first.
    Spectrum {
        #[arg(long)]
        graph6: String,
        #[arg(long, value_enum, default_value = "Q")]
        matrix: Matrix,
    },
    /// Print one named invariant.
    Invariant {
        #[arg(long)]
        graph6: String,
        #[arg(long, value_enum)]
        name: InvariantName,
        /// Exponent for `Salpha` and `salpha`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Build a standard graph.
    Construct {
        #[command(subcommand)]
        family: Family,
        #[arg(long, value_enum, default_value = "graph6", global = true)]
        emit: Emit,
    },
    /// Evaluate a closed-form bound.
    Bounds {
        #[arg(long)]
        id: BoundSelector,
        /// Vertex count; defaults to `r + s` when both part sizes are given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, requires = "s")]
        r: Option<usize>,
        #[arg(long, requires = "r")]
        s: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// Check one graph against a bound.
    Check {
        #[arg(long)]
        id: BoundSelector,
        #[arg(long)]
        graph6: String,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha: f64,
        /// Connectivity threshold; when omitted every `k` from `max(κ, 1)` to `n - 1` is checked.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exhaustively scan small graphs, or graph6 input, for bound violations.
    Scan {
        #[arg(long)]
        id: BoundSelector,
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        min_n: usize,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        alpha_grid: Vec<f64>,
        #[arg(long)]
        k: Option<usize>,
        /// graph6 file to scan instead of enumerating; `-` reads standard input.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also write the violations as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Matrix {
    #[value(name = "Q")]
    Q,
    #[value(name = "L")]
    L,
    #[value(name = "A")]
    A,
}

impl From<Matrix> for MatrixKind {
    fn from(m: Matrix) -> Self {
        match m {
            Matrix::Q => MatrixKind::SignlessLaplacian,
            Matrix::L => MatrixKind::Laplacian,
            Matrix::A => MatrixKind::Adjacency,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InvariantName {
    #[value(name = "Salpha")]
    SignlessPowerSum,
    #[value(name = "salpha")]
    LaplacianPowerSum,
    #[value(name = "IE")]
    IncidenceEnergy,
    #[value(name = "LEL")]
    Lel,
    #[value(name = "Kf")]
    Kirchhoff,
    #[value(name = "EL")]
    LaplacianEnergy,
    #[value(name = "E")]
    Energy,
    #[value(name = "M1")]
    Zagreb,
}

#[derive(Debug, Subcommand)]
enum Family {
    /// K_n
    Complete { n: usize },
    /// K_{r,s}
    Bipartite { r: usize, s: usize },
    /// K_k join (K_i union K_{n-k-i})
    Gi { n: usize, k: usize, i: usize },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Emit {
    Graph6,
    /// `n m` followed by one `u v` line per edge.
    Edges,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }
}

trait Classify {
    fn is_numerical(&self) -> bool;
}

impl Classify for SpectraError {
    fn is_numerical(&self) -> bool {
        matches!(self, SpectraError::NoConvergence { .. })
    }
}

impl Classify for InvariantError {
    fn is_numerical(&self) -> bool {
        matches!(self, InvariantError::Spectra(e) if e.is_numerical())
    }
}

impl Classify for BoundError {
    fn is_numerical(&self) -> bool {
        matches!(self, BoundError::Invariant(e) if e.is_numerical())
    }
}

impl Classify for VerifyError {
    fn is_numerical(&self) -> bool {
        match self {
            VerifyError::Spectra(e) => e.is_numerical(),
            VerifyError::Invariant(e) => e.is_numerical(),
            VerifyError::Bound(e) => e.is_numerical(),
            VerifyError::Graph(_) => false,
        }
    }
}

impl Classify for ScanError {
    fn is_numerical(&self) -> bool {
        match self {
            ScanError::Numerical { .. } => true,
            ScanError::Bound(e) => e.is_numerical(),
            _ => false,
        }
    }
}

fn classified<E>(error: E) -> Failure
where
    E: Classify + std::error::Error + Send + Sync + 'static,
{
    let code = if error.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    };
    Failure {
        code,
        error: error.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out);
    if let Err(e) = out.flush() {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Outcome {
    match command {
        Command::Spectrum { graph6, matrix } => spectrum(&graph6, matrix, out),
        Command::Invariant {
            graph6,
            name,
            alpha,
        } => invariant(&graph6, name, alpha, out),
        Command::Construct { family, emit } => construct(family, emit, out),
        Command::Bounds {
            id,
            n,
            k,
            r,
            s,
            alpha,
        } => bounds(id, n, k, r.zip(s), alpha, out),
        Command::Check {
            id,
            graph6,
            alpha,
            k,
            format,
        } => check(id, &graph6, alpha, k, format, out),
        Command::Scan {
            id,
            max_n,
            min_n,
            alpha_grid,
            k,
            input,
            format,
            csv,
        } => {
            let cfg = ScanConfig::new(id, max_n, parse_alphas(&alpha_grid)?)
                .with_min_n(min_n)
                .with_k(k)
                .with_threads(threads_from_env());
            run_scan(&cfg, input, format, csv, out)
        }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::usage(anyhow!(e).context("write failed"))
}

fn read_graph(text: &str) -> Result<Graph, Failure> {
    parse_graph6(text.trim())
        .with_context(|| format!("cannot parse graph6 {text:?}"))
        .map_err(Failure::usage)
}

fn parse_alpha(x: f64) -> Result<Alpha, Failure> {
    Alpha::new(x).map_err(Failure::usage)
}

fn parse_alphas(xs: &[f64]) -> Result<Vec<Alpha>, Failure> {
    xs.iter().map(|&x| parse_alpha(x)).collect()
}

fn spectrum(graph6: &str, matrix: Matrix, out: &mut impl Write) -> Outcome {
    let g = read_graph(graph6)?;
    let spec = spectrum_of(&g, matrix.into()).map_err(classified)?;
    let threshold = spec.zero_threshold();
    let text: Vec<String> = spec
        .values()
        .iter()
        .map(|&v| sig12(if v.abs() <= threshold { 0.0 } else { v }))
        .collect();
    writeln!(out, "{}", text.join(" ")).map_err(io_failure)?;
    Ok(0)
}

fn invariant(
    graph6: &str,
    name: InvariantName,
    alpha: Option<f64>,
    out: &mut impl Write,
) -> Outcome {
    let g = read_graph(graph6)?;
    let need_alpha = || -> Result<Alpha, Failure> {
        let x = alpha
            .ok_or_else(|| Failure::usage(anyhow!("--alpha is required for this invariant")))?;
        parse_alpha(x)
    };
    let half = parse_alpha(0.5)?;
    let value = match name {
        InvariantName::SignlessPowerSum => signless_power_sum(&g, need_alpha()?),
        InvariantName::LaplacianPowerSum => laplacian_power_sum(&g, need_alpha()?),
        InvariantName::IncidenceEnergy => signless_power_sum(&g, half),
        InvariantName::Lel => laplacian_power_sum(&g, half),
        InvariantName::Kirchhoff => kirchhoff_index(&g),
        InvariantName::LaplacianEnergy => laplacian_power_sum(&g, parse_alpha(2.0)?),
        InvariantName::Energy => energy(&g),
        InvariantName::Zagreb => Ok(first_zagreb(&g) as f64),
    }
    .map_err(classified)?;
    writeln!(out, "{}", sig12(value)).map_err(io_failure)?;
    Ok(0)
}

fn construct(family: Family, emit: Emit, out: &mut impl Write) -> Outcome {
    let g = match family {
        Family::Complete { n } => Graph::complete(n),
        Family::Bipartite { r, s } => Graph::complete_bipartite(r, s),
        Family::Gi { n, k, i } => Graph::joined_cliques(n, k, i),
    }
    .map_err(Failure::usage)?;
    match emit {
        Emit::Graph6 => writeln!(out, "{}", emit_graph6(&g)),
        Emit::Edges => writeln!(out, "{} {}", g.n(), g.edge_count())
            .and_then(|_| g.edges().try_for_each(|(u, v)| writeln!(out, "{u} {v}"))),
    }
    .map_err(io_failure)?;
    Ok(0)
}

fn bounds(
    selector: BoundSelector,
    n: Option<usize>,
    k: Option<usize>,
    parts: Option<(usize, usize)>,
    alpha: f64,
    out: &mut impl Write,
) -> Outcome {
    let alpha = parse_alpha(alpha)?;
    let id = selector.resolve(alpha).map_err(Failure::usage)?;
    if !id.admits_alpha(alpha) {
        return Err(Failure::usage(anyhow!(
            "{id} requires {}",
            id.alpha_range()
        )));
    }
    let n = match (n, parts) {
        (Some(n), Some((r, s))) if n != r + s => {
            return Err(Failure::usage(anyhow!(
                "--n {n} does not equal --r {r} + --s {s}"
            )))
        }
        (Some(n), _) => n,
        (None, Some((r, s))) => r + s,
        (None, None) => return Err(Failure::usage(anyhow!("--n is required"))),
    };
    if k.is_some() && !id.needs_k() {
        return Err(Failure::usage(anyhow!(
            "{id} takes no connectivity threshold"
        )));
    }
    let spec = BoundSpec { id, k };
    let value = spec.evaluate(n, parts, alpha).map_err(classified)?;
    writeln!(out, "{}", sig12(value)).map_err(io_failure)?;
    Ok(0)
}

fn check(
    selector: BoundSelector,
    graph6: &str,
    alpha: f64,
    k: Option<usize>,
    format: Format,
    out: &mut impl Write,
) -> Outcome {
    let g = read_graph(graph6)?;
    let alpha = parse_alpha(alpha)?;
    let id = selector.resolve(alpha).map_err(Failure::usage)?;
    let ks: Vec<Option<usize>> = match (id.needs_k(), k) {
        (false, Some(_)) => {
            return Err(Failure::usage(anyhow!(
                "{id} takes no connectivity threshold"
            )))
        }
        (false, None) => vec![None],
        (true, Some(k)) => vec![Some(k)],
        (true, None) if g.n() < 2 || !g.is_connected() => vec![Some(1)],
        (true, None) => {
            let kappa = qpow::connectivity::vertex_connectivity(&g).kappa;
            (kappa.max(1)..g.n()).map(Some).collect()
        }
    };
    let results = ks
        .into_iter()
        .map(|k| check_bound(&g, &BoundSpec { id, k }, alpha))
        .collect::<Result<Vec<_>, _>>()
        .map_err(classified)?;
    write_results(&results, format, out).map_err(io_failure)?;
    for r in results.iter().filter(|r| !r.applicable) {
        eprintln!(
            "inapplicable: {}",
            r.reason.as_deref().unwrap_or("outside the bound's domain")
        );
    }
    Ok(if results.iter().any(|r| r.applicable && !r.satisfied()) {
        EXIT_VIOLATION
    } else if results.iter().any(|r| !r.applicable) {
        EXIT_USAGE
    } else {
        0
    })
}

fn opt(x: Option<usize>) -> String {
    x.map_or_else(String::new, |k| k.to_string())
}

fn write_results(results: &[BoundResult], format: Format, out: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Json => results
            .iter()
            .try_for_each(|r| writeln!(out, "{}", r.to_json_line())),
        Format::Csv => {
            writeln!(
                out,
                "bound_id,graph6,k,alpha,invariant,bound,slack,equality,extremal_match,applicable"
            )?;
            for r in results {
                writeln!(
                    out,
                    "{},\"{}\",{},{},{},{},{},{},{},{}",
                    r.bound_id,
                    r.graph.replace('"', "\"\""),
                    opt(r.k),
                    sig12(r.alpha),
                    sig12(r.invariant_value),
                    sig12(r.bound_value),
                    sig12(r.slack),
                    r.equality,
                    r.extremal_match,
                    r.applicable
                )?;
            }
            Ok(())
        }
        Format::Table => {
            writeln!(
                out,
                "{:<14} {:>3} {:>6} {:>20} {:>20} {:>20}  status",
                "bound", "k", "alpha", "S_alpha", "bound", "slack"
            )?;
            for r in results {
                let status = match (r.applicable, r.satisfied(), r.equality) {
                    (false, _, _) => format!("inapplicable: {}", r.reason.as_deref().unwrap_or("")),
                    (true, false, _) => "VIOLATED".into(),
                    (true, true, true) => "equality".into(),
                    (true, true, false) => "holds".into(),
                };
                writeln!(
                    out,
                    "{:<14} {:>3} {:>6} {:>20} {:>20} {:>20}  {status}",
                    r.bound_id.to_string(),
                    opt(r.k),
                    sig12(r.alpha),
                    sig12(r.invariant_value),
                    sig12(r.bound_value),
                    sig12(r.slack)
                )?;
            }
            Ok(())
        }
    }
}

fn run_scan(
    cfg: &ScanConfig,
    input: Option<PathBuf>,
    format: Format,
    csv: Option<PathBuf>,
    out: &mut impl Write,
) -> Outcome {
    let report = match input {
        None => scan(cfg),
        Some(path) if path.as_os_str() == "-" => scan_stream(cfg, io::stdin().lock()),
        Some(path) => {
            let file = File::open(&path)
                .with_context(|| format!("cannot open {}", path.display()))
                .map_err(Failure::usage)?;
            scan_stream(cfg, BufReader::new(file))
        }
    }
    .map_err(classified)?;
    if let Some(path) = csv {
        let file = File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))
            .map_err(Failure::usage)?;
        write_violations_csv(BufWriter::new(file), &report.violations).map_err(io_failure)?;
    }
    match format {
        Format::Json => writeln!(out, "{}", report.redacted().to_json()),
        Format::Csv => write_violations_csv(&mut *out, &report.violations),
        Format::Table => write_scan_table(&report, out),
    }
    .map_err(io_failure)?;
    for issue in &report.stream_errors {
        eprintln!("line {}: {}", issue.line, issue.message);
    }
    Ok(if report.is_clean() { 0 } else { EXIT_VIOLATION })
}

fn write_scan_table(r: &ScanReport, out: &mut impl Write) -> io::Result<()> {
    let grid: Vec<String> = r.alpha_grid.iter().map(|&a| sig12(a)).collect();
    writeln!(out, "bound        {}", r.bound_id)?;
    writeln!(out, "population   {} ({})", r.population, r.source)?;
    writeln!(out, "orders       {}..={}", r.n_range.0, r.n_range.1)?;
    writeln!(out, "alpha grid   {}", grid.join(", "))?;
    if let Some(k) = r.k {
        writeln!(out, "k            {k}")?;
    }
    writeln!(
        out,
        "graphs       {} scanned, {} skipped",
        r.graphs_scanned, r.graphs_skipped
    )?;
    writeln!(
        out,
        "evaluations  {} ({} inapplicable)",
        r.evaluations, r.inapplicable_evaluations
    )?;
    writeln!(
        out,
        "equalities   {} ({} match the extremal graph)",
        r.equality_count, r.extremal_match_count
    )?;
    writeln!(
        out,
        "violations   {} classes, {} labeled, {} unconfirmed",
        r.violations.len(),
        r.labeled_violations,
        r.unconfirmed_violations
    )?;
    if let Some(t) = r.wall_time_secs {
        writeln!(out, "wall time    {}s", sig12(t))?;
    }
    for note in &r.notes {
        writeln!(out, "note         {note}")?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "{:>3} {:>3} {:>6} {:<14} {:>20} {:>20} {:>20}  witness",
        "n", "k", "alpha", "bound", "extreme S_alpha", "bound", "min slack"
    )?;
    for w in &r.extremal_witnesses {
        writeln!(
            out,
            "{:>3} {:>3} {:>6} {:<14} {:>20} {:>20} {:>20}  {}{}",
            w.n,
            opt(w.k),
            sig12(w.alpha),
            w.bound_id.to_string(),
            sig12(w.value),
            sig12(w.bound_value),
            sig12(w.min_slack),
            w.graph6,
            if w.matches_extremal {
                " (extremal)"
            } else {
                ""
            }
        )?;
    }
    if !r.violations.is_empty() {
        writeln!(out)?;
        writeln!(
            out,
            "{:>3} {:>3} {:>6} {:<14} {:>20} {:>20}  graph6",
            "n", "k", "alpha", "bound", "S_alpha", "bound"
        )?;
        for v in &r.violations {
            writeln!(
                out,
                "{:>3} {:>3} {:>6} {:<14} {:>20} {:>20}  {}",
                v.n,
                opt(v.k),
                sig12(v.alpha),
                v.bound_id.to_string(),
                sig12(v.invariant_value),
                sig12(v.bound_value),
                v.graph6
            )?;
        }
    }
    Ok(())
}
