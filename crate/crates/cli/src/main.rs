//! quditphase: kernels, distributions, and identity suites for symmetric
//! ensembles of N identical D-level systems on the complex projective chart.
//!
//! Exit codes: 0 success, 1 usage, 2 a verification suite failed,
//! 3 the request is well-formed but the model rejects it.

mod error;
mod grid;
mod state;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quditphase::combinatorics::ModelParams;
use quditphase::sw::{quasi_distribution, seed_sw_kernel, sw_kernel_for, SWKernel};
use quditphase::verify::run_suite;

use error::CliError;
use grid::{GridSpec, Section};

const CACHE_ENV: &str = "QUDITPHASE_CACHE";

#[derive(Parser)]
#[command(
    name = "quditphase",
    version,
    about = "Phase-space toolkit for symmetric ensembles of D-level systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the kernel family at a chart point, or build the exact
    /// block store for later runs when --at is omitted.
    Kernel(KernelArgs),
    /// Sweep a state's s-ordered distribution over a grid.
    Dist(DistArgs),
    /// Run a named identity suite and report per-check results.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct KernelArgs {
    /// Levels per constituent, D >= 2
    #[arg(short = 'D', long = "levels", value_name = "D")]
    d_levels: usize,
    /// Number of constituents
    #[arg(short = 'N', long = "particles", value_name = "N")]
    n_particles: u32,
    /// Ordering parameter of the kernel family
    #[arg(
        short = 's',
        long = "ordering",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    s: f64,
    /// Chart point x1,y1[,x2,y2,...]; omit to build the block store
    #[arg(long, value_name = "COORDS", allow_hyphen_values = true)]
    at: Option<String>,
    /// Directory holding exact block stores
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Output significand width in bits (53 = full double precision)
    #[arg(long, default_value_t = 53, value_name = "BITS")]
    precision_bits: u32,
    /// Write to a file instead of stdout
    #[arg(short = 'o', long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    /// Levels per constituent, D >= 2
    #[arg(short = 'D', long = "levels", value_name = "D")]
    d_levels: usize,
    /// Number of constituents
    #[arg(short = 'N', long = "particles", value_name = "N")]
    n_particles: u32,
    /// Ordering parameter: -1 smoothest, 0 self-dual, +1 sharpest
    #[arg(
        short = 's',
        long = "ordering",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    s: f64,
    /// State descriptor: mixed | coherent:... | cat:... | fock:... | JSON
    #[arg(long, allow_hyphen_values = true)]
    state: String,
    /// Swept axes, e.g. x1:-3:3:41,y1:-3:3:41 (first axis slowest)
    #[arg(long, value_name = "AXES", allow_hyphen_values = true)]
    grid: String,
    /// Section plane: position pins y_i = 0, momentum pins x_i = 0
    #[arg(long, value_enum, default_value_t = Section::Full)]
    section: Section,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory holding exact block stores
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Output significand width in bits (53 = full double precision)
    #[arg(long, default_value_t = 53, value_name = "BITS")]
    precision_bits: u32,
    /// Write to a file instead of stdout
    #[arg(short = 'o', long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: young, tracing, heat, flow, harmonic, asymptotics,
    /// semiclassical, negativity
    suite: String,
    /// Levels range, inclusive: LO..HI or a single value
    #[arg(short = 'D', long = "levels", default_value = "2..3", value_name = "RANGE")]
    d_range: String,
    /// Particle-number range, inclusive: LO..HI or a single value
    #[arg(short = 'N', long = "particles", default_value = "0..3", value_name = "RANGE")]
    n_range: String,
    /// Re-gate residual-bearing checks against this bound instead of the
    /// suite's built-in one
    #[arg(long, value_name = "TOL")]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Round to the requested significand width. The computation itself always
/// runs at full double precision; this only coarsens what is printed.
fn quantize(v: f64, bits: u32) -> f64 {
    if bits >= 53 || v == 0.0 || !v.is_finite() {
        return v;
    }
    let drop = 53 - bits;
    let half = 1u64 << (drop - 1);
    let mask = u64::MAX << drop;
    f64::from_bits(v.to_bits().wrapping_add(half) & mask)
}

fn check_bits(bits: u32) -> Result<u32, CliError> {
    if (1..=53).contains(&bits) {
        Ok(bits)
    } else {
        Err(CliError::Usage(
            "precision-bits must be in 1..=53 (the numeric backend is 53-bit binary)".into(),
        ))
    }
}

fn parse_range<T: std::str::FromStr + PartialOrd + Copy>(text: &str) -> Result<(T, T), String> {
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a, b),
        None => (text, text),
    };
    let lo: T = lo.trim().parse().map_err(|_| format!("bad bound '{lo}'"))?;
    let hi: T = hi.trim().parse().map_err(|_| format!("bad bound '{hi}'"))?;
    if lo > hi {
        return Err(format!("empty range '{text}'"));
    }
    Ok((lo, hi))
}

fn resolve_cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

fn store_name(params: &ModelParams) -> String {
    format!("kernel-D{}-N{}.json", params.d_levels, params.n_particles)
}

/// Shared kernel family, loaded from the block store when one exists.
fn kernel_with_cache(params: &ModelParams, dir: Option<&Path>) -> Result<Arc<SWKernel>, CliError> {
    if let Some(dir) = dir {
        let path = dir.join(store_name(params));
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Input(format!("read {}: {e}", path.display())))?;
            let kern = SWKernel::from_json(&text)
                .map_err(|e| CliError::Input(format!("block store {}: {e}", path.display())))?;
            return Ok(seed_sw_kernel(kern));
        }
    }
    Ok(sw_kernel_for(params)?)
}

fn emit(bytes: &[u8], output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Input(format!("write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .lock()
                .write_all(bytes)
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn cmd_kernel(args: KernelArgs) -> Result<(), CliError> {
    let bits = check_bits(args.precision_bits)?;
    let params = ModelParams::new(args.d_levels, args.n_particles)?;
    let cache = resolve_cache_dir(args.cache_dir);

    let Some(text) = &args.at else {
        let dir = cache.ok_or_else(|| {
            CliError::Usage(format!(
                "kernel without --at builds the block store; give --cache-dir or set {CACHE_ENV}"
            ))
        })?;
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Input(format!("create {}: {e}", dir.display())))?;
        let kern = sw_kernel_for(&params)?;
        let body = kern.to_json();
        let path = dir.join(store_name(&params));
        std::fs::write(&path, body.as_bytes())
            .map_err(|e| CliError::Input(format!("write {}: {e}", path.display())))?;
        let blocks = serde_json::from_str::<Value>(&body)
            .ok()
            .and_then(|v| v.get("blocks").and_then(|b| b.as_array().map(Vec::len)))
            .unwrap_or(0);
        let doc = json!({
            "D": params.d_levels,
            "N": params.n_particles,
            "path": path.display().to_string(),
            "blocks": blocks,
        });
        return emit(format!("{doc}\n").as_bytes(), args.output.as_deref());
    };

    let reals = state::parse_reals(text).map_err(|m| CliError::Usage(format!("--at: {m}")))?;
    let z = state::point_from_reals(&reals, params.chart_dim())
        .map_err(|m| CliError::Usage(format!("--at: {m}")))?;
    let kern = kernel_with_cache(&params, cache.as_deref())?;
    let m = kern.assemble(args.s, &z);
    let d = m.dim();
    let matrix: Vec<Value> = (0..d)
        .map(|a| {
            Value::from(
                (0..d)
                    .map(|b| {
                        let v = m.get(a, b);
                        json!([quantize(v.re, bits), quantize(v.im, bits)])
                    })
                    .collect::<Vec<Value>>(),
            )
        })
        .collect();
    let doc = json!({
        "D": params.d_levels,
        "N": params.n_particles,
        "s": args.s,
        "at": reals,
        "dim": d,
        "matrix": matrix,
    });
    emit(format!("{doc}\n").as_bytes(), args.output.as_deref())
}

fn csv_bytes(columns: &[String], data: &[f64], width: usize) -> Vec<u8> {
    use std::fmt::Write;
    let mut out = String::with_capacity(data.len() * 8);
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in data.chunks(width) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("string writes are total");
        }
        out.push('\n');
    }
    out.into_bytes()
}

fn cmd_dist(args: DistArgs) -> Result<(), CliError> {
    let bits = check_bits(args.precision_bits)?;
    let params = ModelParams::new(args.d_levels, args.n_particles)?;
    let rho = state::parse_state(&args.state, &params)?;
    let spec = GridSpec::parse(&args.grid, params.chart_dim(), args.section)
        .map_err(|m| CliError::Usage(format!("--grid: {m}")))?;
    kernel_with_cache(&params, resolve_cache_dir(args.cache_dir).as_deref())?;

    let dist = quasi_distribution(&rho, args.s)?;
    let width = 2 * params.chart_dim() + 1;
    let rows = spec.points();
    let mut data = vec![0.0f64; rows * width];

    let workers = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1)
        .min(rows.max(1));
    let chunk_rows = rows.div_ceil(workers);
    std::thread::scope(|scope| {
        for (t, chunk) in data.chunks_mut(chunk_rows * width).enumerate() {
            let dist = &dist;
            let spec = &spec;
            scope.spawn(move || {
                let base = t * chunk_rows;
                for (r, row) in chunk.chunks_mut(width).enumerate() {
                    let (coords, z) = spec.point(base + r);
                    row[..coords.len()].copy_from_slice(&coords);
                    row[width - 1] = dist.eval_real(&z);
                }
            });
        }
    });
    for v in &mut data {
        *v = quantize(*v, bits);
    }

    let columns = spec.column_names();
    let bytes = match args.format {
        Format::Csv => csv_bytes(&columns, &data, width),
        Format::Json => {
            let axes: Vec<Value> = spec
                .axes
                .iter()
                .map(|a| json!({"name": a.name, "lo": a.lo, "hi": a.hi, "count": a.count}))
                .collect();
            let row_values: Vec<Value> =
                data.chunks(width).map(|r| Value::from(r.to_vec())).collect();
            let doc = json!({
                "D": params.d_levels,
                "N": params.n_particles,
                "s": args.s,
                "state": args.state,
                "section": spec.section.label(),
                "axes": axes,
                "columns": columns,
                "rows": row_values,
            });
            format!("{doc}\n").into_bytes()
        }
    };
    emit(&bytes, args.output.as_deref())
}

const SUITES: &[&str] = &[
    "young",
    "tracing",
    "heat",
    "flow",
    "harmonic",
    "asymptotics",
    "semiclassical",
    "negativity",
];

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown suite '{}'; one of: {}",
            args.suite,
            SUITES.join(", ")
        )));
    }
    let d_range =
        parse_range::<usize>(&args.d_range).map_err(|m| CliError::Usage(format!("-D: {m}")))?;
    let n_range =
        parse_range::<u32>(&args.n_range).map_err(|m| CliError::Usage(format!("-N: {m}")))?;

    let reports = run_suite(&args.suite, d_range, n_range)?;
    let mut all = true;
    let checks: Vec<Value> = reports
        .iter()
        .map(|r| {
            let passed = match (args.tolerance, r.residual) {
                (Some(tol), Some(residual)) => residual <= tol,
                _ => r.passed,
            };
            all &= passed;
            eprintln!("{} {}: {}", if passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            json!({
                "name": r.name,
                "passed": passed,
                "residual": r.residual,
                "detail": r.detail,
            })
        })
        .collect();
    let doc = json!({
        "suite": args.suite,
        "levels": [d_range.0, d_range.1],
        "particles": [n_range.0, n_range.1],
        "tolerance": args.tolerance,
        "allPassed": all,
        "checks": checks,
    });
    println!("{doc}");
    if all {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Kernel(args) => cmd_kernel(args),
        Cmd::Dist(args) => cmd_dist(args),
        Cmd::Verify(args) => cmd_verify(args),
    }
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return std::process::ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Usage(msg) | CliError::Input(msg) => eprintln!("error: {msg}"),
                CliError::VerifyFailed => {}
            }
            std::process::ExitCode::from(err.exit_code())
        }
    }
}
