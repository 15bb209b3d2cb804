//! Command-line front end. Every command prints a single JSON document
//! (or CSV where requested) to the given writer.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::canonical::{default_normalization_column, permanent_trellis_normalized_with, permanent_trellis_with};
use crate::error::{Error, Result};
use crate::matrix::{parse_matrix, Matrix};
use crate::oracles::{opcount_table, permanent_glynn, permanent_naive, permanent_nw, permanent_ryser};
use crate::order_stats::{joint_probability_with, OrderStatQuery};
use crate::repeated::{permanent_repeated, repeated_op_bounds, RepeatedRowSpec};
use crate::scalar::{format_float, format_rational, parse_rational};
use crate::semiring::{Field, OpCounter};
use crate::sparse::{
    estimate_phi_u, expected_vertices_u, fig_sparse_rows, permanent_sparse, phi_constants, sparse_benchmark,
    SparseModel,
};
use crate::trellis::FlowOptions;
use crate::tsp::{solve_tsp, DistanceMatrix};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "permatrellis",
    version,
    about = "Permanents and related sums as trellis flows"
)]
pub struct Cli {
    /// Worker threads for level-parallel flows (1 keeps everything sequential).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Permanent of a matrix read from CSV or JSON.
    Perm {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = PermMethod::Trellis)]
        method: PermMethod,
        #[arg(long, value_enum, default_value_t = Domain::Exact)]
        domain: Domain,
    },
    /// Permanent of a repeated-row matrix `{"rows": [...], "mults": [...]}`.
    Repeated {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Domain::Exact)]
        domain: Domain,
    },
    /// Joint order-statistic probability `{"ranks": [...], "cdf": [[...]]}`.
    Orderstats {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Domain::Exact)]
        domain: Domain,
    },
    /// Pruned-trellis statistics under the random sparse model.
    SparseBench {
        #[arg(long)]
        n: usize,
        /// Expected nonzeros per row, an integer or `p/q`.
        #[arg(long, default_value = "3")]
        d: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Largest `n` measured by sampling when emitting the CSV curves.
        #[arg(long, default_value_t = 20)]
        measure_max: usize,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Shortest tour for a distance matrix read from CSV or JSON.
    Tsp {
        file: PathBuf,
        /// Skip tour reconstruction.
        #[arg(long)]
        no_tour: bool,
    },
    /// Operation-count table, sparse growth constants and sparse curves.
    Tables {
        /// Dimension range for the operation-count table, as `lo..hi`.
        #[arg(long, default_value = "2..12")]
        range: String,
        #[arg(long, value_enum, default_value_t = Table::Opcounts)]
        which: Table,
        /// Dimension at which `U(n)^{1/n}` is evaluated.
        #[arg(long, default_value_t = 200)]
        phi_n: usize,
        #[arg(long, value_enum, default_value_t = Emit::Csv)]
        emit: Emit,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PermMethod {
    Trellis,
    TrellisNorm,
    Naive,
    Ryser,
    RyserGray,
    Nw,
    Glynn,
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Opcounts,
    Phi,
    FigSparse,
}

#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, std::io::Error),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    /// 2 for unparsable input, 3 for size, dimension and validity
    /// violations, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Parse(_)) => 2,
            CliError::Lib(
                Error::TooLarge { .. }
                | Error::TooSmall { .. }
                | Error::Dimension(_)
                | Error::Invalid(_)
                | Error::SymbolOutOfRange { .. }
                | Error::AlphabetMismatch(..)
                | Error::EnumerationCap { .. },
            ) => 3,
            _ => 1,
        }
    }
}

trait Render {
    fn render(&self) -> String;
}

impl Render for BigRational {
    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Render for f64 {
    fn render(&self) -> String {
        format_float(*self)
    }
}

fn read(path: &Path) -> std::result::Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Exact => "exact",
        Domain::Float => "float",
    }
}

fn method_name(m: PermMethod) -> String {
    m.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

struct PermOutcome<T> {
    value: T,
    counter: Option<OpCounter>,
    peak_width: Option<usize>,
}

fn run_perm<T: Field>(a: &Matrix<T>, method: PermMethod, opts: FlowOptions) -> Result<PermOutcome<T>> {
    let plain = |(value, counter): (T, OpCounter)| PermOutcome {
        value,
        counter: Some(counter),
        peak_width: None,
    };
    Ok(match method {
        PermMethod::Trellis => {
            let f = permanent_trellis_with(a, opts)?;
            PermOutcome {
                value: f.value,
                counter: Some(f.counter),
                peak_width: Some(f.peak_width),
            }
        }
        PermMethod::TrellisNorm => {
            let f = permanent_trellis_normalized_with(a, Some(default_normalization_column(a.n())), opts)?;
            PermOutcome {
                value: f.value,
                counter: Some(f.counter),
                peak_width: Some(f.peak_width),
            }
        }
        PermMethod::Sparse => {
            let f = permanent_sparse(a)?;
            PermOutcome {
                value: f.value,
                counter: Some(f.counter),
                peak_width: Some(f.peak_width),
            }
        }
        PermMethod::Naive => PermOutcome {
            value: permanent_naive(a)?,
            counter: None,
            peak_width: None,
        },
        PermMethod::Ryser => plain(permanent_ryser(a, false)?),
        PermMethod::RyserGray => plain(permanent_ryser(a, true)?),
        PermMethod::Nw => plain(permanent_nw(a)?),
        PermMethod::Glynn => plain(permanent_glynn(a)?),
    })
}

fn perm_json<T: Field + Render>(a: &Matrix<T>, method: PermMethod, domain: Domain, opts: FlowOptions) -> Result<Value> {
    let start = Instant::now();
    let out = run_perm(a, method, opts)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "perm",
        "n": a.n(),
        "method": method_name(method),
        "domain": domain_name(domain),
        "value": out.value.render(),
        "mults": out.counter.map(|c| c.mults),
        "adds": out.counter.map(|c| c.adds),
        "peak_width": out.peak_width,
        "wall_ms": elapsed_ms(start),
    }))
}

fn repeated_json<T: Field + Render>(spec: &RepeatedRowSpec<T>, domain: Domain) -> Result<Value> {
    let start = Instant::now();
    let r = permanent_repeated(spec)?;
    let (mult_bound, add_bound) = repeated_op_bounds(spec.mults());
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "repeated",
        "n": spec.n(),
        "mults_of_rows": spec.mults(),
        "domain": domain_name(domain),
        "value": r.value.render(),
        "toor_flow": r.flow.value.render(),
        "scale": r.scale.to_string(),
        "vertices": r.vertices,
        "edges": r.edges,
        "mults": r.flow.counter.mults,
        "adds": r.flow.counter.adds,
        "mults_bound": mult_bound.to_string(),
        "adds_bound": add_bound.to_string(),
        "wall_ms": elapsed_ms(start),
    }))
}

fn orderstats_json<T: Field + PartialOrd + Render>(
    q: &OrderStatQuery<T>,
    domain: Domain,
    opts: FlowOptions,
) -> Result<Value> {
    let start = Instant::now();
    let r = joint_probability_with(q, opts)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "orderstats",
        "n": q.n(),
        "ranks": q.ranks(),
        "domain": domain_name(domain),
        "probability": r.probability.render(),
        "vertices": r.vertices,
        "declared_vertices": r.declared_vertices.to_string(),
        "edges": r.edges,
        "mults": r.counter.mults,
        "adds": r.counter.adds,
        "wall_ms": elapsed_ms(start),
    }))
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| Error::parse(format!("expected a range lo..hi, found {text:?}")))?;
    let num = |s: &str| {
        s.trim_start_matches('=')
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(format!("bad range bound {s:?}")))
    };
    Ok((num(lo)?, num(hi)?))
}

fn write_csv<S: Serialize>(out: &mut dyn Write, rows: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::invalid(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(())
}

#[derive(Serialize)]
struct PhiRow {
    d: u32,
    phi1: f64,
    phi2: f64,
    phi3: f64,
    phi_t: f64,
    n: usize,
    phi_u: f64,
}

fn phi_rows(phi_n: usize) -> Result<Vec<PhiRow>> {
    (2..=6u32)
        .map(|d| {
            let c = phi_constants(d);
            let est = estimate_phi_u(d, &[phi_n])?;
            Ok(PhiRow {
                d,
                phi1: c.phi1,
                phi2: c.phi2,
                phi3: c.phi3,
                phi_t: c.phi_t,
                n: phi_n,
                phi_u: est.estimate,
            })
        })
        .collect()
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values serialize")
    )
    .map_err(|e| Error::invalid(e.to_string()))
}

/// Runs a parsed command line, writing the result to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    if cli.threads > 1 {
        // a second call in one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let opts = FlowOptions {
        parallel: cli.threads > 1,
    };
    match &cli.command {
        Command::Perm { file, method, domain } => {
            let a = parse_matrix(&read(file)?)?;
            let v = match domain {
                Domain::Exact => perm_json(&a, *method, *domain, opts)?,
                Domain::Float => perm_json(&a.to_f64(), *method, *domain, opts)?,
            };
            emit_json(out, &v)?;
        }
        Command::Repeated { file, domain } => {
            let spec = RepeatedRowSpec::from_json_str(&read(file)?)?;
            let v = match domain {
                Domain::Exact => repeated_json(&spec, *domain)?,
                Domain::Float => repeated_json(&spec.map(crate::scalar::rational_to_f64), *domain)?,
            };
            emit_json(out, &v)?;
        }
        Command::Orderstats { file, domain } => {
            let q = OrderStatQuery::from_json_str(&read(file)?)?;
            let v = match domain {
                Domain::Exact => orderstats_json(&q, *domain, opts)?,
                Domain::Float => orderstats_json(&q.map(crate::scalar::rational_to_f64), *domain, opts)?,
            };
            emit_json(out, &v)?;
        }
        Command::SparseBench {
            n,
            d,
            trials,
            measure_max,
            emit,
        } => {
            let dq = parse_rational(d)?;
            match emit {
                Emit::Csv => {
                    if !dq.is_integer() {
                        return Err(Error::invalid("the curve table needs an integer d").into());
                    }
                    let d = u32::try_from(dq.to_integer()).map_err(|_| Error::invalid("d out of range"))?;
                    write_csv(out, &fig_sparse_rows(d, *n, *measure_max, *trials, cli.seed)?)?;
                }
                Emit::Json => {
                    let m = SparseModel::new(*n, dq.clone(), cli.seed)?;
                    let start = Instant::now();
                    let report = sparse_benchmark(&m, *trials)?;
                    let u = expected_vertices_u(*n, &dq)?;
                    let v = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": "sparse-bench",
                        "report": report,
                        "expected_vertices_u_exact": format_rational(&u),
                        "wall_ms": elapsed_ms(start),
                    });
                    emit_json(out, &v)?;
                }
            }
        }
        Command::Tsp { file, no_tour } => {
            let dm = DistanceMatrix::from_matrix(&parse_matrix(&read(file)?)?)?;
            let start = Instant::now();
            let s = solve_tsp(&dm, !no_tour)?;
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "tsp",
                "n": dm.n(),
                "length": format_float(s.length),
                "tour": s.tour,
                "additions": s.additions,
                "comparisons": s.comparisons,
                "wall_ms": elapsed_ms(start),
            });
            emit_json(out, &v)?;
        }
        Command::Tables {
            range,
            which,
            phi_n,
            emit,
        } => {
            let (lo, hi) = parse_range(range)?;
            match which {
                Table::Opcounts => {
                    let rows = opcount_table(lo, hi)?;
                    match emit {
                        Emit::Csv => write_csv(out, &rows)?,
                        Emit::Json => emit_json(
                            out,
                            &json!({"schema_version": SCHEMA_VERSION, "command": "tables", "opcounts": rows}),
                        )?,
                    }
                }
                Table::Phi => {
                    let rows = phi_rows(*phi_n)?;
                    match emit {
                        Emit::Csv => write_csv(out, &rows)?,
                        Emit::Json => emit_json(
                            out,
                            &json!({"schema_version": SCHEMA_VERSION, "command": "tables", "phi": rows}),
                        )?,
                    }
                }
                Table::FigSparse => {
                    let rows = fig_sparse_rows(3, hi, 20.min(hi), 20, cli.seed)?;
                    match emit {
                        Emit::Csv => write_csv(out, &rows)?,
                        Emit::Json => emit_json(
                            out,
                            &json!({"schema_version": SCHEMA_VERSION, "command": "tables", "fig_sparse": rows}),
                        )?,
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Convenience for tests: runs a command and captures its output.
pub fn run_captured<I, S>(args: I) -> std::result::Result<String, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Lib(Error::parse(e.to_string())))?;
    let mut buf = Vec::new();
    run(&cli, &mut buf)?;
    Ok(String::from_utf8(buf).expect("output is UTF-8"))
}
