#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Batch driver: validated configuration in, JSON report (and optional CSV table) out.
//!
//! Exit codes: `0` all requested checks satisfied, `1` some check failed, `2` configuration
//! error, `3` construction error (the catalog object could not be built).

pub mod checks;
pub mod config;

use std::fmt::Write as _;

use abdg_core::backlund::ConditionSweep;
use abdg_core::catalog::{self, EntryKind};
use abdg_core::report::{Report, Subject as ReportSubject, Summaries, SCHEMA_VERSION};

use checks::{CheckOutput, Subject};
pub use config::{parse_config, parse_grid, Check, ConfigError, RawSettings, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;

/// Result of a run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// Per-grid-point table, when requested.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.all_satisfied {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Build the catalog object. Errors are construction errors (exit code 3).
pub fn build_subject(cfg: &RunConfig) -> abdg_core::Result<Subject> {
    Ok(match cfg.kind {
        EntryKind::Surface => Subject::Surface(catalog::make_surface(&cfg.name, &cfg.params, cfg.expr.as_deref())?),
        EntryKind::Pair => Subject::Pair(catalog::make_pair(&cfg.name, &cfg.params)?),
        EntryKind::NormalForm => Subject::NormalForm(catalog::make_a00(&cfg.name, &cfg.params)?),
    })
}

fn run_check(check: Check, subject: &Subject, cfg: &RunConfig) -> CheckOutput {
    use Subject::*;
    match (check, subject) {
        (Check::Gw, s) => checks::gw(s, cfg),
        (Check::Blaschke, s) => checks::blaschke(s, cfg),
        (Check::Curvature, s) => checks::curvature(s, cfg),
        (Check::ChernTerng, s) => checks::chern_terng(s, cfg),
        (Check::Psi, Pair(p)) => checks::psi(p, cfg),
        (Check::Rank, Pair(p)) => checks::rank(p, cfg),
        (Check::Conditions, Pair(p)) => checks::conditions(p, cfg),
        (Check::Metric, Pair(p)) => checks::metric(p, cfg),
        (Check::BlaschkePair, Pair(p)) => checks::blaschke_pair(p, cfg),
        (Check::A00, NormalForm(s)) => checks::a00(s, cfg),
        _ => unreachable!("applicability is validated with the configuration"),
    }
}

/// Later summaries fill in fields the earlier ones left empty.
fn merge(into: &mut Summaries, from: Summaries) {
    into.psi = into.psi.or(from.psi);
    into.h = into.h.or(from.h);
    into.hhat = into.hhat.or(from.hhat);
    into.kappa = into.kappa.or(from.kappa);
    if into.case_label.is_none() {
        into.case_label = from.case_label;
    }
    for (k, v) in from.scalars {
        into.scalars.entry(k).or_insert(v);
    }
}

/// Run all requested checks on an already-built subject.
pub fn run_on(cfg: &RunConfig, subject: &Subject) -> Outcome {
    let mut checks = Vec::new();
    let mut summaries = Summaries::default();
    let mut diagnostics = Vec::new();
    if let Subject::Pair(p) = subject {
        diagnostics.extend(p.notes.iter().cloned());
    }
    let mut sweep = None;
    for &c in &cfg.checks {
        let out = run_check(c, subject, cfg);
        checks.extend(out.record);
        merge(&mut summaries, out.summaries);
        for d in out.diagnostics {
            if !diagnostics.contains(&d) {
                diagnostics.push(d);
            }
        }
        sweep = sweep.or(out.sweep);
    }
    let csv = cfg.csv.as_ref().map(|_| csv_table(cfg, subject, sweep));
    let report = Report {
        schema_version: SCHEMA_VERSION.to_string(),
        subject: ReportSubject {
            kind: config::kind_name(cfg.kind).to_string(),
            name: cfg.name.clone(),
            params: cfg.params.clone(),
            expression: cfg.expr.clone(),
        },
        grid: [cfg.grid.0, cfg.grid.1],
        order: cfg.order,
        tol_alg: cfg.tol_alg,
        tol_diff: cfg.tol_diff,
        all_satisfied: checks.iter().all(|c| c.satisfied),
        checks,
        summaries,
        diagnostics,
    };
    Outcome { report, csv }
}

/// Build and run. `Err` carries a construction error.
pub fn run(cfg: &RunConfig) -> abdg_core::Result<Outcome> {
    Ok(run_on(cfg, &build_subject(cfg)?))
}

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

/// Column names of the CSV table for an entry kind.
pub fn csv_columns(kind: EntryKind) -> &'static [&'static str] {
    match kind {
        EntryKind::Pair => &[
            "i",
            "j",
            "u",
            "v",
            "psi",
            "H",
            "Hhat",
            "W",
            "A",
            "Ahat",
            "conformality_defect",
            "nabla_r",
            "nabla_rhat",
        ],
        EntryKind::Surface => &["i", "j", "u", "v", "K", "nabla_r"],
        EntryKind::NormalForm => &["i", "j", "u", "v", "alpha", "beta"],
    }
}

/// Per-grid-point table; missing or non-finite values are empty cells.
pub fn csv_table(cfg: &RunConfig, subject: &Subject, sweep: Option<ConditionSweep>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_columns(cfg.kind)).expect("in-memory write");
    let (nu, nv) = cfg.grid;
    let rows: Vec<Vec<String>> = match subject {
        Subject::Pair(pair) => {
            let rc = abdg_core::backlund::ReportConfig {
                nu,
                nv,
                tol_alg: cfg.tol_alg,
                tol_diff: cfg.tol_diff,
                nabla: abdg_core::backlund::NablaMode::Jet,
                conclusions: true,
            };
            let sweep = sweep.unwrap_or_else(|| ConditionSweep::run(pair, &rc));
            sweep
                .samples
                .iter()
                .map(|s| {
                    let mut r = vec![
                        s.index[0].to_string(),
                        s.index[1].to_string(),
                        cell(Some(s.point.u)),
                        cell(Some(s.point.v)),
                    ];
                    r.extend(
                        [
                            s.psi,
                            s.h,
                            s.hhat,
                            s.w,
                            s.a,
                            s.ahat,
                            s.conformality_defect,
                            s.nabla_r,
                            s.nabla_rhat,
                        ]
                        .map(cell),
                    );
                    r
                })
                .collect()
        }
        Subject::Surface(f) => {
            let xi_e = abdg_core::geometry::TransversalField::euclidean_unit_normal(f);
            let xi_b = abdg_core::geometry::TransversalField::blaschke(f, abdg_core::geometry::Orientation::Positive);
            checks::sweep(f.domain, nu, nv, |p| {
                let k = abdg_core::geometry::gauss_weingarten(f, &xi_e, p)
                    .ok()
                    .map(|d| d.det_theta_h);
                let n = abdg_core::backlund::covariant_derivative_r(f, &xi_b, p, abdg_core::backlund::NablaMode::Jet)
                    .ok()
                    .map(|n| n.norm);
                (k, n)
            })
            .into_iter()
            .map(|(p, i, (k, n))| {
                vec![
                    i[0].to_string(),
                    i[1].to_string(),
                    cell(Some(p.u)),
                    cell(Some(p.v)),
                    cell(k),
                    cell(n),
                ]
            })
            .collect()
        }
        Subject::NormalForm(s) => checks::sweep(s.domain, nu, nv, |p| {
            (
                s.alpha.jets(p, 0).ok().map(|j| j.value()),
                s.beta.jets(p, 0).ok().map(|j| j.value()),
            )
        })
        .into_iter()
        .map(|(p, i, (a, b))| {
            vec![
                i[0].to_string(),
                i[1].to_string(),
                cell(Some(p.u)),
                cell(Some(p.v)),
                cell(a),
                cell(b),
            ]
        })
        .collect(),
    };
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV cells are UTF-8")
}

/// One line per check for the terminal.
pub fn summary_text(report: &Report) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let _ = writeln!(
            s,
            "{:<14} {}  worst {:.3e}  tol {:.1e}{}",
            c.name,
            if c.satisfied { "PASS" } else { "FAIL" },
            c.worst_residual,
            c.tolerance,
            c.witness_point.map(|p| format!("  at {p}")).unwrap_or_default()
        );
        for p in c.parts.iter().filter(|p| !p.satisfied) {
            let _ = writeln!(
                s,
                "    failing: {}  worst {:.3e}{}",
                p.name,
                p.worst_residual,
                p.witness_point.map(|q| format!("  at {q}")).unwrap_or_default()
            );
        }
        if let Some(m) = &c.message {
            let _ = writeln!(s, "    {m}");
        }
    }
    for d in &report.diagnostics {
        let _ = writeln!(s, "note: {d}");
    }
    s
}
