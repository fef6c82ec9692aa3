//! Grid checker for the hypotheses 1°–7° of the local-symmetry theorem and its conclusions.
//!
//! Each condition is measured from raw jets of `(f, f̂, ξ, ξ̂)` with a scale-free residual, so a
//! pair violating one hypothesis does not contaminate the measurement of the others:
//!
//! | condition | per-point measure | kind |
//! |---|---|---|
//! | 1° `f ≠ f̂`, `f̂ − f` tangent to both | relative tangency residual (1 where `f = f̂`) | vanishing |
//! | 2° `ω²₁∧ω³₁ ≠ 0` | `|det(v₁, ∂u v₁, ∂v v₁)| / |v₁|³` | nonvanishing |
//! | 3° `W ≠ 0` | `|W| / (|v₁| |ξ| |ξ̂|)` | nonvanishing |
//! | 4° `A`, `Â` constant, `(A, Â) ≠ (0, 0)` | grid variation `/(1 + |mean|)` | vanishing |
//! | 5° `W⁴HĤ = (1 − AÂ)⁴` | `|x − y| / max(x, y, 10⁻⁸)` with `x = |W| |HĤ|^{1/4}`, `y = |1 − AÂ|` (`x + y` in the numerator when `HĤ < 0`) | vanishing |
//! | 6° `ω¹₁ = 0` | `max_Y |det(∂_Y v₁, ξ, ξ̂)| / (|∂_Y v₁| |ξ| |ξ̂|)` | vanishing |
//! | 7° `dW∧dH = 0` | `|W_u H_v − W_v H_u| / ((|W| + |dW|)(|H| + |dH|))` | vanishing |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curvature::{covariant_derivative_r, NablaMode};
use super::metric::metric_reconstruction;
use super::pair::pair_jets;
use super::psi::{pair_gw, proportionality_defect};
use super::{Stats, SurfacePair};
use crate::error::Result;
use crate::geometry::ChartPoint;
use crate::jets::Var;

/// Default tolerance for algebraic identities.
pub const DEFAULT_TOL_ALG: f64 = 1e-6;
/// Default tolerance for differentiated quantities.
pub const DEFAULT_TOL_DIFF: f64 = 1e-5;

/// Whether a condition asks a measure to vanish or to stay away from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    /// Satisfied iff the largest residual is below the tolerance.
    Vanishing,
    /// Satisfied iff the smallest margin is above the tolerance.
    Nonvanishing,
}

/// Verdict for one condition over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    /// `"1°"` … `"7°"` (or `"(i)"` … `"(vii)"` for the Blaschke-normal variant).
    pub id: String,
    pub name: String,
    pub kind: ConditionKind,
    pub satisfied: bool,
    /// Largest residual (vanishing) or smallest margin (nonvanishing) over the grid.
    pub worst: f64,
    /// Grid point attaining `worst` (lowest grid index on ties).
    pub witness: Option<ChartPoint>,
    pub witness_index: Option<[usize; 2]>,
    pub tolerance: f64,
}

impl ConditionRecord {
    /// Aggregate per-point values in grid order. Non-finite entries count as the worst possible
    /// value for the kind (`+∞` residual or `0` margin).
    pub fn aggregate(
        id: &str,
        name: &str,
        kind: ConditionKind,
        tolerance: f64,
        values: impl IntoIterator<Item = (ChartPoint, [usize; 2], f64)>,
    ) -> Self {
        let mut worst: Option<(f64, ChartPoint, [usize; 2])> = None;
        for (p, idx, x) in values {
            let x = match kind {
                ConditionKind::Vanishing if !x.is_finite() => f64::INFINITY,
                ConditionKind::Nonvanishing if !x.is_finite() => 0.0,
                _ => x.abs(),
            };
            let better = match (&worst, kind) {
                (None, _) => true,
                (Some((w, ..)), ConditionKind::Vanishing) => x > *w,
                (Some((w, ..)), ConditionKind::Nonvanishing) => x < *w,
            };
            if better {
                worst = Some((x, p, idx));
            }
        }
        let (value, witness, witness_index) = match worst {
            Some((w, p, i)) => (w, Some(p), Some(i)),
            None => (f64::NAN, None, None),
        };
        let satisfied = match kind {
            ConditionKind::Vanishing => value < tolerance,
            ConditionKind::Nonvanishing => value > tolerance,
        };
        ConditionRecord {
            id: id.to_string(),
            name: name.to_string(),
            kind,
            satisfied,
            worst: value,
            witness,
            witness_index,
            tolerance,
        }
    }
}

/// Grid and tolerances of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub nu: usize,
    pub nv: usize,
    pub tol_alg: f64,
    pub tol_diff: f64,
    pub nabla: NablaMode,
    /// Evaluate the conclusions (`ψ`, conformality, `∇R`, `dim Im R`, case) as well.
    pub conclusions: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            nu: 16,
            nv: 16,
            tol_alg: DEFAULT_TOL_ALG,
            tol_diff: DEFAULT_TOL_DIFF,
            nabla: NablaMode::Jet,
            conclusions: true,
        }
    }
}

impl ReportConfig {
    pub fn with_grid(nu: usize, nv: usize) -> Self {
        ReportConfig {
            nu,
            nv,
            ..Default::default()
        }
    }
}

/// Everything measured at one grid point. Measures that could not be evaluated are `None`
/// and the corresponding error message is kept in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub index: [usize; 2],
    pub point: ChartPoint,
    pub tangency: Option<f64>,
    pub rank_margin: Option<f64>,
    pub w_margin: Option<f64>,
    pub a: Option<f64>,
    pub ahat: Option<f64>,
    pub w: Option<f64>,
    pub h: Option<f64>,
    pub hhat: Option<f64>,
    pub identity5: Option<f64>,
    pub omega11: Option<f64>,
    pub wedge7: Option<f64>,
    pub psi: Option<f64>,
    pub conformality_defect: Option<f64>,
    pub nabla_r: Option<f64>,
    pub nabla_rhat: Option<f64>,
    pub dim_im_r: Option<usize>,
    pub dim_im_rhat: Option<usize>,
    pub errors: Vec<String>,
}

fn keep<T>(errors: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(x) => Some(x),
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            None
        }
    }
}

/// Raw measures of conditions 1°, 2°, 3°, 6° and the values `A`, `Â`, `W`.
fn raw_measures(pair: &SurfacePair, p: ChartPoint, s: &mut PointSample) -> Result<()> {
    let j = match pair_jets(pair, p, 1) {
        Err(crate::Error::CoincidentPoints(_)) => {
            s.tangency = Some(1.0);
            return Err(crate::Error::CoincidentPoints(p));
        }
        r => r?,
    };
    s.tangency = Some(j.tangency);
    let (v1, xi, xih) = (j.v1.value(), j.xi.value(), j.xihat.value());
    let v1u = j.v1.derivative(Var::U)?.value();
    let v1v = j.v1.derivative(Var::V)?.value();
    s.rank_margin = Some(v1.dot(&v1u.cross(&v1v)).abs() / v1.norm().powi(3));
    s.w_margin = Some(j.w_ratio());
    s.a = Some(j.a.value());
    s.ahat = Some(j.ahat.value());
    s.w = Some(j.w.value());
    let n = xi.norm() * xih.norm();
    let six = [v1u, v1v]
        .iter()
        .map(|d| {
            let m = d.norm() * n;
            if m > 0.0 {
                d.dot(&xi.cross(&xih)).abs() / m
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    s.omega11 = Some(six);
    Ok(())
}

/// Denominator floor of the 5° measure.
const IDENTITY5_FLOOR: f64 = 1e-8;

/// Measures of 5° and 7° (need `H`, `Ĥ` and their first derivatives).
fn curvature_measures(pair: &SurfacePair, p: ChartPoint, s: &mut PointSample) -> Result<()> {
    let (g, gh) = pair_gw(pair, p, 1)?;
    let j = pair_jets(pair, p, 1)?;
    let (h, hh) = (g.det_theta_h.value(), gh.det_theta_h.value());
    s.h = Some(h);
    s.hhat = Some(hh);
    let (a, ah, w) = (j.a.value(), j.ahat.value(), j.w.value());
    // compared on the fourth-root scale, where both sides are O(1) and a common zero is benign
    let x = w.abs() * (h * hh).abs().sqrt().sqrt();
    let y = (1.0 - a * ah).abs();
    let m = x.max(y).max(IDENTITY5_FLOOR);
    s.identity5 = Some(if h * hh < 0.0 { (x + y) / m } else { (x - y).abs() / m });
    let dw = j.w.gradient()?;
    let dh = g.det_theta_h.gradient()?;
    let wedge = dw[0] * dh[1] - dw[1] * dh[0];
    let scale = (w.abs() + dw[0].hypot(dw[1])) * (h.abs() + dh[0].hypot(dh[1]));
    s.wedge7 = Some(if scale > 0.0 { wedge.abs() / scale } else { 0.0 });
    Ok(())
}

fn conclusion_measures(pair: &SurfacePair, p: ChartPoint, mode: NablaMode, s: &mut PointSample) {
    let mut errors = std::mem::take(&mut s.errors);
    if let Some(d) = keep(&mut errors, "psi", super::psi::psi_data(pair, p)) {
        s.psi = Some(d.psi);
        s.conformality_defect = Some(proportionality_defect(&d.h_form, &d.hhat_form));
    }
    if let Some(n) = keep(
        &mut errors,
        "nabla R",
        covariant_derivative_r(&pair.f, &pair.xi, p, mode),
    ) {
        s.nabla_r = Some(n.norm);
        s.dim_im_r = Some(n.dim_im_r);
    }
    if let Some(n) = keep(
        &mut errors,
        "nabla R-hat",
        covariant_derivative_r(&pair.fhat, &pair.xihat, p, mode),
    ) {
        s.nabla_rhat = Some(n.norm);
        s.dim_im_rhat = Some(n.dim_im_r);
    }
    s.errors = errors;
}

/// Evaluate one grid point.
pub fn sample_point(pair: &SurfacePair, p: ChartPoint, index: [usize; 2], cfg: &ReportConfig) -> PointSample {
    let mut s = PointSample {
        index,
        point: p,
        tangency: None,
        rank_margin: None,
        w_margin: None,
        a: None,
        ahat: None,
        w: None,
        h: None,
        hhat: None,
        identity5: None,
        omega11: None,
        wedge7: None,
        psi: None,
        conformality_defect: None,
        nabla_r: None,
        nabla_rhat: None,
        dim_im_r: None,
        dim_im_rhat: None,
        errors: Vec::new(),
    };
    if let Err(e) = raw_measures(pair, p, &mut s) {
        s.errors.push(format!("pair: {e}"));
    }
    if let Err(e) = curvature_measures(pair, p, &mut s) {
        s.errors.push(format!("curvature: {e}"));
    }
    if cfg.conclusions {
        conclusion_measures(pair, p, cfg.nabla, &mut s);
    }
    s
}

/// All per-point samples of a grid sweep, in grid order (`u` index slowest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSweep {
    pub nu: usize,
    pub nv: usize,
    pub samples: Vec<PointSample>,
}

impl ConditionSweep {
    /// Sample the pair's domain on a `nu × nv` grid (data-parallel, ordered collect).
    pub fn run(pair: &SurfacePair, cfg: &ReportConfig) -> Self {
        let (nu, nv) = (cfg.nu, cfg.nv);
        let samples = (0..nu * nv)
            .into_par_iter()
            .map(|k| {
                let idx = [k / nv, k % nv];
                sample_point(pair, pair.domain.node(idx[0], idx[1], nu, nv), idx, cfg)
            })
            .collect();
        ConditionSweep { nu, nv, samples }
    }

    pub(crate) fn column(&self, pick: impl Fn(&PointSample) -> Option<f64>) -> Vec<(ChartPoint, [usize; 2], f64)> {
        self.samples
            .iter()
            .map(|s| (s.point, s.index, pick(s).unwrap_or(f64::NAN)))
            .collect()
    }

    /// Grid-variation record for `A` and `Â`; with `require_nonzero`, `(A, Â) = (0, 0)` fails.
    pub(crate) fn constancy(&self, id: &str, name: &str, tol: f64, require_nonzero: bool) -> ConditionRecord {
        let a = Stats::of(self.samples.iter().filter_map(|s| s.a));
        let ah = Stats::of(self.samples.iter().filter_map(|s| s.ahat));
        let flag_ok = match (a, ah) {
            (Some(a), Some(ah)) => {
                !require_nonzero || a.min.abs().max(a.max.abs()).max(ah.min.abs()).max(ah.max.abs()) > tol
            }
            _ => false,
        };
        let values = self.samples.iter().map(|s| {
            let dev = match (s.a, s.ahat, a, ah) {
                (Some(x), Some(y), Some(a), Some(ah)) if flag_ok => {
                    ((x - a.mean).abs() / (1.0 + a.mean.abs())).max((y - ah.mean).abs() / (1.0 + ah.mean.abs()))
                }
                (Some(_), Some(_), Some(_), Some(_)) => 1.0,
                _ => f64::NAN,
            };
            (s.point, s.index, dev)
        });
        // the witness is the point farthest from the mean; the reported value is the full spread
        let mut r = ConditionRecord::aggregate(id, name, ConditionKind::Vanishing, tol, values);
        if flag_ok {
            let spread = |st: Option<Stats>| {
                st.map(|s| (s.max - s.min) / (1.0 + s.mean.abs()))
                    .unwrap_or(f64::INFINITY)
            };
            let var = spread(a).max(spread(ah));
            if r.worst.is_finite() {
                r.worst = var;
                r.satisfied = var < tol;
            }
        }
        r
    }

    /// Aggregate into the seven condition records and the conclusions.
    pub fn report(&self, pair: &SurfacePair, cfg: &ReportConfig) -> ConditionReport {
        use ConditionKind::*;
        let conditions = vec![
            ConditionRecord::aggregate(
                "1°",
                "f ≠ f̂ and f̂ − f tangent to both surfaces",
                Vanishing,
                super::pair::TANGENCY_TOL,
                self.column(|s| s.tangency),
            ),
            ConditionRecord::aggregate(
                "2°",
                "rank of the spherical representation is 2",
                Nonvanishing,
                cfg.tol_alg,
                self.column(|s| s.rank_margin),
            ),
            ConditionRecord::aggregate("3°", "W ≠ 0", Nonvanishing, cfg.tol_alg, self.column(|s| s.w_margin)),
            self.constancy("4°", "A and Â constant, (A, Â) ≠ (0, 0)", cfg.tol_diff, true),
            ConditionRecord::aggregate(
                "5°",
                "W⁴ H Ĥ = (1 − AÂ)⁴",
                Vanishing,
                cfg.tol_alg,
                self.column(|s| s.identity5),
            ),
            ConditionRecord::aggregate(
                "6°",
                "f_*Y − f̂_*Y ∈ span{ξ, ξ̂}",
                Vanishing,
                cfg.tol_alg,
                self.column(|s| s.omega11),
            ),
            ConditionRecord::aggregate("7°", "dW ∧ dH = 0", Vanishing, cfg.tol_diff, self.column(|s| s.wedge7)),
        ];
        let conclusions = cfg.conclusions.then(|| self.conclusions(pair));
        ConditionReport {
            label: pair.label.clone(),
            nu: self.nu,
            nv: self.nv,
            tol_alg: cfg.tol_alg,
            tol_diff: cfg.tol_diff,
            conditions,
            conclusions,
            notes: pair.notes.clone(),
        }
    }

    fn conclusions(&self, pair: &SurfacePair) -> Conclusions {
        let max_abs = |pick: &dyn Fn(&PointSample) -> Option<f64>| -> Option<f64> {
            let mut out: Option<f64> = None;
            for s in &self.samples {
                let x = pick(s).map(f64::abs).unwrap_or(f64::NAN);
                let x = if x.is_finite() { x } else { f64::INFINITY };
                out = Some(out.map_or(x, |o| o.max(x)));
            }
            out
        };
        let mode = |pick: &dyn Fn(&PointSample) -> Option<usize>| -> (Option<usize>, bool) {
            let mut counts = [0usize; 3];
            let mut missing = false;
            for s in &self.samples {
                match pick(s) {
                    Some(d) if d < 3 => counts[d] += 1,
                    _ => missing = true,
                }
            }
            let best = (0..3).max_by_key(|&d| (counts[d], d)).filter(|&d| counts[d] > 0);
            let uniform = !missing && counts.iter().filter(|&&c| c > 0).count() == 1;
            (best, uniform)
        };
        let (dim_r, uni_r) = mode(&|s| s.dim_im_r);
        let (dim_rh, uni_rh) = mode(&|s| s.dim_im_rhat);
        let center = pair.domain.center();
        let metric = metric_reconstruction(pair, center);
        Conclusions {
            psi_minus_1: max_abs(&|s| s.psi.map(|x| x - 1.0)),
            conformality_defect: max_abs(&|s| s.conformality_defect),
            nabla_r_norm: max_abs(&|s| s.nabla_r),
            nabla_rhat_norm: max_abs(&|s| s.nabla_rhat),
            dim_im_r: dim_r,
            dim_im_rhat: dim_rh,
            dim_uniform: uni_r && uni_rh,
            psi: Stats::of(self.samples.iter().filter_map(|s| s.psi)),
            h: Stats::of(self.samples.iter().filter_map(|s| s.h)),
            hhat: Stats::of(self.samples.iter().filter_map(|s| s.hhat)),
            case_label: metric.as_ref().ok().map(|m| m.case.label().to_string()),
            kappa: metric.as_ref().ok().map(|m| m.kappa),
            metric_error: metric.err().map(|e| e.to_string()),
        }
    }

    /// Number of points with at least one evaluation error.
    pub fn failed_points(&self) -> usize {
        self.samples.iter().filter(|s| !s.errors.is_empty()).count()
    }
}

/// Conclusions of the theorem, aggregated over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conclusions {
    /// `max |ψ − 1|`.
    pub psi_minus_1: Option<f64>,
    /// Max conformality defect of `h`, `ĥ`.
    pub conformality_defect: Option<f64>,
    /// Max `‖∇R‖`.
    pub nabla_r_norm: Option<f64>,
    /// Max `‖∇̂R̂‖`.
    pub nabla_rhat_norm: Option<f64>,
    /// Most frequent `dim Im R` over the grid.
    pub dim_im_r: Option<usize>,
    pub dim_im_rhat: Option<usize>,
    /// Whether both dimensions are the same at every grid point.
    pub dim_uniform: bool,
    pub psi: Option<Stats>,
    pub h: Option<Stats>,
    pub hhat: Option<Stats>,
    /// Case of the metric reconstruction at the domain center, when it applies.
    pub case_label: Option<String>,
    pub kappa: Option<f64>,
    pub metric_error: Option<String>,
}

/// Grid-aggregated verdicts for the hypotheses and the conclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub label: String,
    pub nu: usize,
    pub nv: usize,
    pub tol_alg: f64,
    pub tol_diff: f64,
    pub conditions: Vec<ConditionRecord>,
    pub conclusions: Option<Conclusions>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn all_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    /// Ids of the failing conditions.
    pub fn failing(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.satisfied)
            .map(|c| c.id.as_str())
            .collect()
    }

    pub fn condition(&self, id: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

/// Sweep the pair's domain and aggregate the condition report.
pub fn backlund_condition_report(pair: &SurfacePair, cfg: &ReportConfig) -> ConditionReport {
    ConditionSweep::run(pair, cfg).report(pair, cfg)
}
