//! The individual checks. Each sweeps the grid (data-parallel, merged in grid order) and
//! produces one [`CheckRecord`], usually with one part per tested statement.

use abdg_core::backlund::{
    a00_residuals, affine_minimality, blaschke_pair_check, chern_terng_identities, covariant_derivative_r,
    metric_reconstruction, psi_data, spherical_rank, A00State, ConditionKind, ConditionRecord, ConditionReport,
    ConditionSweep, NablaMode, ReportConfig, Stats, SurfacePair,
};
use abdg_core::geometry::{
    blaschke_normal, gauss_weingarten_jets, ChartPoint, Domain, Orientation, SurfaceMap, TransversalField,
};
use abdg_core::report::{CheckRecord, Summaries};
use rayon::prelude::*;

use crate::config::RunConfig;

/// Tolerance of the Gauss/Weingarten reconstruction residuals.
pub const GW_TOL: f64 = 1e-9;
/// Tolerance of the Blaschke normalization (`τ = 0`, `|det_θ h| = 1`).
pub const BLASCHKE_TOL: f64 = 1e-8;
/// Tolerance of identities that hold exactly in exact arithmetic (minimality proxy, frame
/// identities, determinant identity).
pub const IDENTITY_TOL: f64 = 1e-7;
/// Tolerance of the normal-form residuals.
pub const A00_TOL: f64 = 1e-8;
/// Tolerance for 0/1 indicator residuals.
pub const INDICATOR_TOL: f64 = 0.5;

/// What a check can contribute besides its record.
#[derive(Default)]
pub struct CheckOutput {
    pub record: Option<CheckRecord>,
    pub summaries: Summaries,
    pub diagnostics: Vec<String>,
    pub sweep: Option<ConditionSweep>,
}

/// A geometric object the surface checks run on: one or two (surface, transversal) couples.
pub enum Subject {
    Surface(SurfaceMap),
    Pair(SurfacePair),
    NormalForm(A00State),
}

impl Subject {
    pub fn domain(&self) -> Domain {
        match self {
            Subject::Surface(f) => f.domain,
            Subject::Pair(p) => p.domain,
            Subject::NormalForm(s) => s.domain,
        }
    }

    /// Surfaces with their transversal fields: a lone surface carries `default`.
    fn couples(
        &self,
        default: impl Fn(&SurfaceMap) -> TransversalField,
    ) -> Vec<(&'static str, SurfaceMap, TransversalField)> {
        match self {
            Subject::Surface(f) => vec![("f", f.clone(), default(f))],
            Subject::Pair(p) => vec![("f", p.f.clone(), p.xi.clone()), ("f̂", p.fhat.clone(), p.xihat.clone())],
            Subject::NormalForm(_) => vec![],
        }
    }
}

type Sample = (ChartPoint, [usize; 2], f64);

/// Evaluate `f` at every grid node, in grid order.
pub fn sweep<T: Send>(
    domain: Domain,
    nu: usize,
    nv: usize,
    f: impl Fn(ChartPoint) -> T + Sync,
) -> Vec<(ChartPoint, [usize; 2], T)> {
    (0..nu * nv)
        .into_par_iter()
        .map(|n| {
            let (i, j) = (n / nv, n % nv);
            let p = domain.node(i, j, nu, nv);
            (p, [i, j], f(p))
        })
        .collect()
}

fn to_record(c: &ConditionRecord) -> CheckRecord {
    CheckRecord {
        name: format!("{} {}", c.id, c.name),
        satisfied: c.satisfied,
        worst_residual: c.worst,
        witness_point: c.witness,
        tolerance: c.tolerance,
        parts: vec![],
        message: None,
    }
}

fn part(name: &str, kind: ConditionKind, tol: f64, values: impl IntoIterator<Item = Sample>) -> CheckRecord {
    to_record(&ConditionRecord::aggregate("", name, kind, tol, values)).renamed(name)
}

trait Renamed {
    fn renamed(self, name: &str) -> Self;
}

impl Renamed for CheckRecord {
    fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

/// Composite record: satisfied iff all parts are; worst residual and witness of the first
/// failing part (or of the first part when all pass).
pub fn composite(name: &str, parts: Vec<CheckRecord>) -> CheckRecord {
    let lead = parts.iter().find(|p| !p.satisfied).or(parts.first());
    CheckRecord {
        name: name.to_string(),
        satisfied: !parts.is_empty() && parts.iter().all(|p| p.satisfied),
        worst_residual: lead.map_or(f64::NAN, |p| p.worst_residual),
        witness_point: lead.and_then(|p| p.witness_point),
        tolerance: lead.map_or(f64::NAN, |p| p.tolerance),
        parts,
        message: None,
    }
}

/// Count errors in a column and remember the first message.
fn error_note<T>(check: &str, rows: &[(ChartPoint, [usize; 2], abdg_core::Result<T>)]) -> Option<String> {
    let mut errs = rows.iter().filter_map(|(p, _, r)| r.as_ref().err().map(|e| (p, e)));
    let (p, first) = errs.next()?;
    let n = 1 + errs.count();
    Some(format!(
        "{check}: evaluation failed at {n} grid point(s); first at {p}: {first}"
    ))
}

fn column<T>(rows: &[(ChartPoint, [usize; 2], abdg_core::Result<T>)], pick: impl Fn(&T) -> f64) -> Vec<Sample> {
    rows.iter()
        .map(|(p, i, r)| (*p, *i, r.as_ref().map_or(f64::NAN, &pick)))
        .collect()
}

pub fn gw(subject: &Subject, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let mut parts = Vec::new();
    for (label, f, xi) in subject.couples(TransversalField::euclidean_unit_normal) {
        let rows = sweep(subject.domain(), nu, nv, |p| {
            let g = gauss_weingarten_jets(&f.jets(p, cfg.order)?, &xi.jets(p, cfg.order - 1)?, p)?;
            let d = g.to_data();
            Ok(d.gauss_residual.max(d.weingarten_residual))
        });
        out.diagnostics.extend(error_note(&format!("gw({label})"), &rows));
        parts.push(part(
            &format!("Gauss/Weingarten reconstruction ({label})"),
            ConditionKind::Vanishing,
            GW_TOL,
            column(&rows, |x| *x),
        ));
    }
    out.record = Some(composite("gw", parts));
    out
}

pub fn blaschke(subject: &Subject, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let mut parts = Vec::new();
    for (label, f, _) in subject.couples(TransversalField::euclidean_unit_normal) {
        let rows = sweep(subject.domain(), nu, nv, |p| {
            let (_, d) = blaschke_normal(&f, p, Orientation::Positive)?;
            Ok((d.tau[0].hypot(d.tau[1]), (d.det_theta_h.abs() - 1.0).abs()))
        });
        out.diagnostics.extend(error_note(&format!("blaschke({label})"), &rows));
        parts.push(part(
            &format!("τ = 0 ({label})"),
            ConditionKind::Vanishing,
            BLASCHKE_TOL,
            column(&rows, |x| x.0),
        ));
        parts.push(part(
            &format!("|det_θ h| = 1 ({label})"),
            ConditionKind::Vanishing,
            BLASCHKE_TOL,
            column(&rows, |x| x.1),
        ));
    }
    out.record = Some(composite("blaschke", parts));
    out
}

pub fn psi(pair: &SurfacePair, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let rows = sweep(pair.domain, nu, nv, |p| {
        let d = psi_data(pair, p)?;
        let (defect, _) = abdg_core::backlund::conformality_defect(pair, p)?;
        Ok((d, defect))
    });
    out.diagnostics.extend(error_note("psi", &rows));
    let ok = || rows.iter().filter_map(|(_, _, r)| r.as_ref().ok());
    out.summaries.psi = Stats::of(ok().map(|(d, _)| d.psi));
    out.summaries.h = Stats::of(ok().map(|(d, _)| d.h));
    out.summaries.hhat = Stats::of(ok().map(|(d, _)| d.hhat));
    let parts = vec![
        part(
            "ψ = 1",
            ConditionKind::Vanishing,
            cfg.tol_alg,
            column(&rows, |(d, _)| d.psi - 1.0),
        ),
        part(
            "h and ĥ conformal",
            ConditionKind::Vanishing,
            cfg.tol_alg,
            column(&rows, |(_, c)| *c),
        ),
    ];
    out.record = Some(composite("psi", parts));
    out
}

pub fn rank(pair: &SurfacePair, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let rows = sweep(pair.domain, nu, nv, |p| spherical_rank(pair, p));
    out.diagnostics.extend(error_note("rank", &rows));
    let parts = vec![
        part(
            "rank 2",
            ConditionKind::Nonvanishing,
            cfg.tol_alg,
            column(&rows, |r| r.wedge_relative),
        ),
        part(
            "wedge and projectivized Jacobian agree",
            ConditionKind::Vanishing,
            INDICATOR_TOL,
            column(&rows, |r| if r.consistent() { 0.0 } else { 1.0 }),
        ),
        part(
            "determinant identity",
            ConditionKind::Vanishing,
            IDENTITY_TOL,
            column(&rows, |r| if r.rank == 2 { r.identity_residual } else { 0.0 }),
        ),
    ];
    out.record = Some(composite("rank", parts));
    out
}

fn report_config(cfg: &RunConfig) -> ReportConfig {
    ReportConfig {
        nu: cfg.grid.0,
        nv: cfg.grid.1,
        tol_alg: cfg.tol_alg,
        tol_diff: cfg.tol_diff,
        nabla: NablaMode::Jet,
        conclusions: true,
    }
}

fn condition_summaries(rep: &ConditionReport, out: &mut CheckOutput) {
    if let Some(c) = &rep.conclusions {
        out.summaries.psi = c.psi;
        out.summaries.h = c.h;
        out.summaries.hhat = c.hhat;
        out.summaries.kappa = c.kappa;
        out.summaries.case_label = c.case_label.clone();
        let s = &mut out.summaries.scalars;
        s.insert("max_abs_psi_minus_1".into(), c.psi_minus_1);
        s.insert("max_conformality_defect".into(), c.conformality_defect);
        s.insert("max_nabla_r".into(), c.nabla_r_norm);
        s.insert("max_nabla_rhat".into(), c.nabla_rhat_norm);
        s.insert("dim_im_r".into(), c.dim_im_r.map(|d| d as f64));
        s.insert("dim_im_rhat".into(), c.dim_im_rhat.map(|d| d as f64));
        if let Some(e) = &c.metric_error {
            out.diagnostics.push(format!("metric: {e}"));
        }
    }
    out.diagnostics.extend(rep.notes.iter().cloned());
}

pub fn conditions(pair: &SurfacePair, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let rc = report_config(cfg);
    let sweep = ConditionSweep::run(pair, &rc);
    let rep = sweep.report(pair, &rc);
    let failed = sweep.failed_points();
    if failed > 0 {
        out.diagnostics.push(format!(
            "conditions: some measures failed to evaluate at {failed} grid point(s)"
        ));
    }
    condition_summaries(&rep, &mut out);
    out.record = Some(composite("conditions", rep.conditions.iter().map(to_record).collect()));
    out.sweep = Some(sweep);
    out
}

pub fn curvature(subject: &Subject, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let mut parts = Vec::new();
    let mut dims = Vec::new();
    for (label, f, xi) in subject.couples(|f| TransversalField::blaschke(f, Orientation::Positive)) {
        let rows = sweep(subject.domain(), nu, nv, |p| {
            covariant_derivative_r(&f, &xi, p, NablaMode::Jet)
        });
        out.diagnostics
            .extend(error_note(&format!("curvature({label})"), &rows));
        parts.push(part(
            &format!("∇R = 0 ({label})"),
            ConditionKind::Vanishing,
            cfg.tol_diff,
            column(&rows, |n| n.norm),
        ));
        let d: Vec<Option<usize>> = rows
            .iter()
            .map(|(_, _, r)| r.as_ref().ok().map(|n| n.dim_im_r))
            .collect();
        let mode = mode(&d);
        out.summaries
            .scalars
            .insert(format!("dim_im_r({label})"), mode.map(|m| m as f64));
        dims.push(d);
    }
    if dims.len() == 2 {
        let values = sweep_points(subject.domain(), nu, nv)
            .into_iter()
            .zip(dims[0].iter().zip(&dims[1]))
            .map(|((p, i), (a, b))| {
                let x = match (a, b) {
                    (Some(a), Some(b)) if a == b => 0.0,
                    (Some(_), Some(_)) => 1.0,
                    _ => f64::NAN,
                };
                (p, i, x)
            });
        parts.push(part(
            "dim Im R = dim Im R̂",
            ConditionKind::Vanishing,
            INDICATOR_TOL,
            values,
        ));
    }
    out.record = Some(composite("curvature", parts));
    out
}

fn sweep_points(domain: Domain, nu: usize, nv: usize) -> Vec<(ChartPoint, [usize; 2])> {
    (0..nu * nv)
        .map(|n| {
            let (i, j) = (n / nv, n % nv);
            (domain.node(i, j, nu, nv), [i, j])
        })
        .collect()
}

/// Most frequent value (smallest on ties).
fn mode(values: &[Option<usize>]) -> Option<usize> {
    let mut counts = std::collections::BTreeMap::new();
    for v in values.iter().flatten() {
        *counts.entry(*v).or_insert(0usize) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(v, _)| v)
}

pub fn metric(pair: &SurfacePair, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let rows = sweep(pair.domain, nu, nv, |p| metric_reconstruction(pair, p));
    out.diagnostics.extend(error_note("metric", &rows));
    let center = metric_reconstruction(pair, pair.domain.center());
    match &center {
        Ok(m) => {
            out.summaries.kappa = Some(m.kappa);
            out.summaries.case_label = Some(m.case.label().to_string());
            let s = &mut out.summaries.scalars;
            s.insert("metric.delta".into(), Some(m.delta as f64));
            s.insert("metric.kappahat".into(), Some(m.kappahat));
            s.insert("metric.l2".into(), Some(m.l2));
            s.insert("metric.angle_invariant".into(), Some(m.angle_invariant));
            s.insert("metric.cos_angle".into(), m.cos_angle);
        }
        Err(e) => out.diagnostics.push(format!("metric at the domain center: {e}")),
    }
    let case = center.as_ref().ok().map(|m| m.case);
    let parts = vec![
        part(
            "G constant (DG = 0)",
            ConditionKind::Vanishing,
            cfg.tol_alg,
            column(&rows, |m| m.dg_residual),
        ),
        part(
            "κ = δ",
            ConditionKind::Vanishing,
            cfg.tol_diff,
            column(&rows, |m| m.kappa - m.delta as f64),
        ),
        part(
            "κ̂ = δ",
            ConditionKind::Vanishing,
            cfg.tol_diff,
            column(&rows, |m| m.kappahat - m.delta as f64),
        ),
        part(
            "case constant over the domain",
            ConditionKind::Vanishing,
            INDICATOR_TOL,
            column(&rows, |m| if Some(m.case) == case { 0.0 } else { 1.0 }),
        ),
    ];
    out.record = Some(composite("metric", parts));
    out
}

pub fn a00(state: &A00State, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    match a00_residuals(state, nu, nv, A00_TOL) {
        Ok(r) => {
            let rec = |name: &str, m: &abdg_core::backlund::ResidualMax| CheckRecord {
                name: name.to_string(),
                satisfied: m.value < A00_TOL,
                worst_residual: m.value,
                witness_point: m.at,
                tolerance: A00_TOL,
                parts: vec![],
                message: None,
            };
            let parts = vec![
                rec("α equation", &r.alpha_equation),
                rec("β equation", &r.beta_equation),
                rec("α_y equation", &r.alpha_y_equation),
                rec("β_x equation", &r.beta_x_equation),
                rec("α + βH identity", &r.identity),
            ];
            let s = &mut out.summaries.scalars;
            s.insert("a00.max_d_alpha".into(), Some(r.d_alpha.value));
            s.insert("a00.max_d_beta".into(), Some(r.d_beta.value));
            s.insert("a00.nabla_symmetric".into(), Some(r.nabla_symmetric as u8 as f64));
            s.insert(
                "a00.nabla_hat_symmetric".into(),
                Some(r.nabla_hat_symmetric as u8 as f64),
            );
            out.record = Some(composite("a00", parts));
        }
        Err(e) => {
            let mut r = composite("a00", vec![]);
            r.worst_residual = f64::INFINITY;
            r.tolerance = A00_TOL;
            r.message = Some(e.to_string());
            out.record = Some(r);
        }
    }
    out
}

pub fn chern_terng(subject: &Subject, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    let (nu, nv) = cfg.grid;
    let mut parts = Vec::new();
    for (label, f, _) in subject.couples(TransversalField::euclidean_unit_normal) {
        let rows = sweep(subject.domain(), nu, nv, |p| affine_minimality(&f, p));
        out.diagnostics
            .extend(error_note(&format!("chern-terng({label})"), &rows));
        parts.push(part(
            &format!("tr S: Weingarten trace = 2-form proxy ({label})"),
            ConditionKind::Vanishing,
            IDENTITY_TOL,
            column(&rows, |m| m.agreement),
        ));
    }
    if let Subject::Pair(pair) = subject {
        let rows = sweep(pair.domain, nu, nv, |p| chern_terng_identities(pair, p));
        let all_failed = rows.iter().all(|(_, _, r)| r.is_err());
        if all_failed {
            if let Some((_, _, Err(e))) = rows.first() {
                out.diagnostics
                    .push(format!("chern-terng: parallel-pair identities not applicable: {e}"));
            }
        } else {
            out.diagnostics.extend(error_note("chern-terng(identities)", &rows));
            parts.push(part(
                "β(ϑ² + ω²₁) = λω³₁",
                ConditionKind::Vanishing,
                IDENTITY_TOL,
                column(&rows, |r| r.first),
            ));
            parts.push(part(
                "βω²₃ + dλ = 0",
                ConditionKind::Vanishing,
                IDENTITY_TOL,
                column(&rows, |r| r.second),
            ));
        }
    }
    out.record = Some(composite("chern-terng", parts));
    out
}

pub fn blaschke_pair(pair: &SurfacePair, cfg: &RunConfig) -> CheckOutput {
    let mut out = CheckOutput::default();
    match blaschke_pair_check(&pair.label, &pair.f, &pair.fhat, pair.domain, &report_config(cfg)) {
        Ok(r) => {
            let s = &mut out.summaries.scalars;
            s.insert("blaschke_pair.sign".into(), Some(r.signs[0] as f64));
            s.insert("blaschke_pair.sign_hat".into(), Some(r.signs[1] as f64));
            s.insert(
                "blaschke_pair.normalization_residual".into(),
                Some(r.normalization_residual),
            );
            out.record = Some(composite(
                "blaschke-pair",
                r.report.conditions.iter().map(to_record).collect(),
            ));
        }
        Err(e) => {
            let mut r = composite("blaschke-pair", vec![]);
            r.worst_residual = f64::INFINITY;
            r.message = Some(e.to_string());
            out.record = Some(r);
        }
    }
    out
}
