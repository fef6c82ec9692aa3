use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use abdg_cli::{config, parse_config, summary_text, RawSettings, RunConfig, EXIT_CONFIG, EXIT_CONSTRUCTION};
use abdg_core::catalog;
use abdg_core::report::{report_schema, to_json_string, write_report};
use clap::{Args, Parser, Subcommand};

/// Affine differential invariants of surface pairs: grid sweeps of the Bäcklund-pair checks.
#[derive(Parser)]
#[command(name = "abdg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on a catalog pair, surface or normal-form state.
    ///
    /// Exit codes: 0 all checks satisfied, 1 a check failed, 2 configuration error,
    /// 3 construction error. The environment variable ABDG_THREADS caps the worker threads.
    Check(Box<CheckArgs>),
    /// List catalog entries with their parameters.
    List {
        /// Print the catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the report schema.
    Schema,
}

#[derive(Args)]
struct CheckArgs {
    /// Key = value config file (keys as the long flags, `param.NAME` for parameters);
    /// flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog pair or normal-form entry.
    #[arg(long, conflicts_with = "surface")]
    pair: Option<String>,
    /// Catalog surface.
    #[arg(long)]
    surface: Option<String>,
    /// Expression g(u, v) for `--surface graph`.
    #[arg(long)]
    expr: Option<String>,
    /// Angle σ of the classical pair and its spoilers [default: π/3].
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Length L of the classical pair [default: 1].
    #[arg(long = "L", allow_hyphen_values = true)]
    length: Option<String>,
    /// Further catalog parameters, NAME=VALUE (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Grid NxM, each side at least 8 [default: 16x16].
    #[arg(long)]
    grid: Option<String>,
    /// Jet order K of the Gauss/Weingarten check, 3..=6 [default: 4].
    #[arg(long)]
    order: Option<String>,
    /// Tolerance of algebraic conditions [default: 1e-6].
    #[arg(long)]
    tol_alg: Option<String>,
    /// Tolerance of differential conditions [default: 1e-5].
    #[arg(long)]
    tol_diff: Option<String>,
    /// Comma-separated checks: gw, blaschke, psi, rank, conditions, curvature, metric, a00,
    /// chern-terng, blaschke-pair [default: conditions for pairs, gw,blaschke for surfaces,
    /// a00 for normal-form entries].
    #[arg(long)]
    checks: Option<String>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a per-grid-point CSV table here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code as u8)
}

fn flag_settings(a: &CheckArgs) -> Result<RawSettings, String> {
    let mut params = BTreeMap::new();
    for kv in &a.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("--param expects NAME=VALUE, got {kv:?}"))?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(s) = &a.sigma {
        params.insert("sigma".into(), s.clone());
    }
    if let Some(l) = &a.length {
        params.insert("L".into(), l.clone());
    }
    Ok(RawSettings {
        pair: a.pair.clone(),
        surface: a.surface.clone(),
        expr: a.expr.clone(),
        params,
        grid: a.grid.clone(),
        order: a.order.clone(),
        tol_alg: a.tol_alg.clone(),
        tol_diff: a.tol_diff.clone(),
        checks: a.checks.clone(),
        out: a.out.clone(),
        csv: a.csv.clone(),
    })
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ABDG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("ABDG_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn check(a: CheckArgs) -> ExitCode {
    if let Err(e) = configure_threads() {
        return fail(EXIT_CONFIG, e);
    }
    let flags = match flag_settings(&a) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let raw = match &a.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_CONFIG, format!("cannot read {}: {e}", path.display())),
            };
            match parse_config(&text) {
                Ok(m) => RawSettings::from_config(&m).overridden_by(flags),
                Err(e) => return fail(EXIT_CONFIG, e),
            }
        }
        None => flags,
    };
    let cfg = match RunConfig::from_raw(raw) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let outcome = match abdg_cli::run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(EXIT_CONSTRUCTION, format!("cannot build {:?}: {e}", cfg.name)),
    };
    let json = write_report(&outcome.report);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                return fail(EXIT_CONFIG, format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{json}"),
    }
    if let (Some(path), Some(table)) = (&cfg.csv, &outcome.csv) {
        if let Err(e) = std::fs::write(path, table) {
            return fail(EXIT_CONFIG, format!("cannot write {}: {e}", path.display()));
        }
    }
    eprint!("{}", summary_text(&outcome.report));
    ExitCode::from(outcome.exit_code() as u8)
}

fn list(json: bool) -> ExitCode {
    let entries = catalog::entries();
    if json {
        print!("{}", to_json_string(&entries));
        return ExitCode::SUCCESS;
    }
    for e in entries {
        println!("{:<22} {:<12} {}", e.name, config::kind_name(e.kind), e.summary);
        for p in &e.params {
            println!(
                "    --param {}=<{} ≤ x ≤ {}> (default {}): {}",
                p.name, p.min, p.max, p.default, p.doc
            );
        }
        println!("    expected: {}", e.notes);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli.command {
        Command::Check(a) => check(*a),
        Command::List { json } => list(json),
        Command::Schema => {
            print!("{}", to_json_string(&report_schema()));
            ExitCode::SUCCESS
        }
    }
}
