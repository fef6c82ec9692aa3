//! Moving frames, Maurer–Cartan pullbacks and chart 1-forms.
//!
//! A frame field assigns to each chart point a base point `F₀` and three ambient columns
//! `(v₁, v₂, v₃)`. Its Maurer–Cartan forms are defined by
//!
//! ```text
//! dF₀ = Σ ϑ^i v_i,        dv_j = Σ ω^i_j v_i,
//! ```
//!
//! and satisfy the structure equations `dϑ^s + Σ ω^s_k∧ϑ^k = 0`, `dω^i_j + Σ ω^i_k∧ω^k_j = 0`.
//! Forms are stored in the chart basis `(du, dv)` with jet-valued coefficients, so exterior
//! derivatives are exact; a finite-difference path exists for opaque fields.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Domain, Vec3J};
use crate::jets::{MultiJet, Var};

/// Condition-number ceiling for frames.
pub const MAX_FRAME_CONDITION: f64 = 1e12;

/// A chart 1-form `a du + b dv` with jet-valued coefficients at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartOneForm {
    pub a: MultiJet,
    pub b: MultiJet,
}

impl ChartOneForm {
    pub fn new(a: MultiJet, b: MultiJet) -> Self {
        ChartOneForm { a, b }
    }

    /// The exact form `dg` (order drops by one).
    pub fn exact(g: &MultiJet) -> Result<Self> {
        Ok(ChartOneForm::new(g.derivative(Var::U)?, g.derivative(Var::V)?))
    }

    /// Value on the tangent vector `x ∂u + y ∂v` at the base point.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a.value() * x + self.b.value() * y
    }

    /// Coefficients `(a, b)` at the base point.
    pub fn values(&self) -> [f64; 2] {
        [self.a.value(), self.b.value()]
    }

    /// `du∧dv` coefficient of `self ∧ other`, as a jet.
    pub fn wedge(&self, other: &ChartOneForm) -> MultiJet {
        self.a * other.b - self.b * other.a
    }

    /// `du∧dv` coefficient of `d(self) = (∂u b − ∂v a) du∧dv`, as a jet.
    pub fn d(&self) -> Result<MultiJet> {
        Ok(self.b.derivative(Var::U)? - self.a.derivative(Var::V)?)
    }

    pub fn scale(&self, s: &MultiJet) -> Self {
        ChartOneForm::new(self.a * *s, self.b * *s)
    }

    pub fn add(&self, o: &ChartOneForm) -> Self {
        ChartOneForm::new(self.a + o.a, self.b + o.b)
    }

    pub fn sub(&self, o: &ChartOneForm) -> Self {
        ChartOneForm::new(self.a - o.a, self.b - o.b)
    }

    pub fn order(&self) -> usize {
        self.a.order().min(self.b.order())
    }
}

/// Jets of a frame: base point and three columns.
#[derive(Debug, Clone, Copy)]
pub struct FrameJets {
    pub base: Vec3J,
    pub cols: [Vec3J; 3],
}

/// Jet evaluator of a frame field: `(point, order) ↦ FrameJets`.
pub type FrameEval = dyn Fn(ChartPoint, usize) -> Result<FrameJets> + Send + Sync;

/// A frame field over a chart rectangle.
#[derive(Clone)]
pub struct FrameField {
    pub domain: Domain,
    eval: Arc<FrameEval>,
}

impl FrameField {
    pub fn new(domain: Domain, eval: impl Fn(ChartPoint, usize) -> Result<FrameJets> + Send + Sync + 'static) -> Self {
        FrameField {
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn jets(&self, p: ChartPoint, order: usize) -> Result<FrameJets> {
        (self.eval)(p, order)
    }
}

/// Maurer–Cartan forms of a frame at a point.
#[derive(Debug, Clone)]
pub struct FrameFormMatrix {
    pub point: ChartPoint,
    /// `theta[i] = ϑ^{i+1}`.
    pub theta: [ChartOneForm; 3],
    /// `omega[i][j] = ω^{i+1}_{j+1}`.
    pub omega: [[ChartOneForm; 3]; 3],
    /// Base-point values of `(F₀, v₁, v₂, v₃)`.
    pub frame: [Vector3<f64>; 4],
    /// Relative residual of the defining relations at the base point.
    pub reconstruction_residual: f64,
}

/// 2-norm condition number of the column matrix.
pub fn condition_number(cols: &[Vector3<f64>; 3]) -> f64 {
    let m = Matrix3::from_columns(cols);
    let sv = m.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    }
}

/// Maurer–Cartan forms `F⁻¹dF` from frame jets of order `K ≥ 1`; the forms carry order `K − 1`.
pub fn maurer_cartan_from_jets(fr: &FrameJets, p: ChartPoint) -> Result<FrameFormMatrix> {
    let [v1, v2, v3] = fr.cols;
    let vals = [v1.value(), v2.value(), v3.value()];
    let cond = condition_number(&vals);
    if !(cond <= MAX_FRAME_CONDITION) {
        return Err(Error::SingularFrame { at: p, cond });
    }
    let det = v1.det(&v2, &v3);
    let inv = det.recip()?;
    let rows = [
        v2.cross(&v3).scale_jet(&inv),
        v3.cross(&v1).scale_jet(&inv),
        v1.cross(&v2).scale_jet(&inv),
    ];
    let db = [fr.base.derivative(Var::U)?, fr.base.derivative(Var::V)?];
    let dv = [
        [v1.derivative(Var::U)?, v1.derivative(Var::V)?],
        [v2.derivative(Var::U)?, v2.derivative(Var::V)?],
        [v3.derivative(Var::U)?, v3.derivative(Var::V)?],
    ];
    let theta = [0, 1, 2].map(|i| ChartOneForm::new(rows[i].dot(&db[0]), rows[i].dot(&db[1])));
    let omega = [0, 1, 2].map(|i| [0, 1, 2].map(|j| ChartOneForm::new(rows[i].dot(&dv[j][0]), rows[i].dot(&dv[j][1]))));

    let mut residual: f64 = 0.0;
    for dir in 0..2 {
        let pick = |f: &ChartOneForm| if dir == 0 { f.a.value() } else { f.b.value() };
        let target = db[dir].value();
        let recon: Vector3<f64> = (0..3).map(|i| vals[i] * pick(&theta[i])).sum();
        let scale = target.norm() + (0..3).map(|i| (vals[i] * pick(&theta[i])).norm()).sum::<f64>();
        residual = residual.max(if scale > 0.0 {
            (target - recon).norm() / scale
        } else {
            0.0
        });
        for j in 0..3 {
            let target = dv[j][dir].value();
            let recon: Vector3<f64> = (0..3).map(|i| vals[i] * pick(&omega[i][j])).sum();
            let scale = target.norm() + (0..3).map(|i| (vals[i] * pick(&omega[i][j])).norm()).sum::<f64>();
            residual = residual.max(if scale > 0.0 {
                (target - recon).norm() / scale
            } else {
                0.0
            });
        }
    }
    Ok(FrameFormMatrix {
        point: p,
        theta,
        omega,
        frame: [fr.base.value(), vals[0], vals[1], vals[2]],
        reconstruction_residual: residual,
    })
}

/// Maurer–Cartan forms of a frame field at `p`, with coefficient jets of order `order`.
pub fn maurer_cartan(field: &FrameField, p: ChartPoint, order: usize) -> Result<FrameFormMatrix> {
    maurer_cartan_from_jets(&field.jets(p, order + 1)?, p)
}

/// Finite-difference scheme for exterior derivatives of sampled forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Exact differentiation of coefficient jets.
    Jet,
    /// Second-order central differences with the given step.
    Central { step: f64 },
    /// Central differences at `h` and `h/2` combined by Richardson extrapolation.
    Richardson { step: f64 },
}

fn central(sample: &dyn Fn(ChartPoint) -> Result<[f64; 2]>, p: ChartPoint, h: f64) -> Result<f64> {
    let bp = sample(p.offset(h, 0.0))?[1];
    let bm = sample(p.offset(-h, 0.0))?[1];
    let ap = sample(p.offset(0.0, h))?[0];
    let am = sample(p.offset(0.0, -h))?[0];
    Ok((bp - bm) / (2.0 * h) - (ap - am) / (2.0 * h))
}

/// `du∧dv` coefficient of `d(a du + b dv)` at `p` by finite differences of the sampled
/// coefficient pair `(a, b)`.
pub fn exterior_derivative(
    sample: &dyn Fn(ChartPoint) -> Result<[f64; 2]>,
    p: ChartPoint,
    domain: &Domain,
    mode: DerivativeMode,
) -> Result<f64> {
    match mode {
        DerivativeMode::Jet => Err(Error::Jet(crate::jets::JetError::DegenerateJet(
            "sampled forms carry no jets; use a finite-difference mode".into(),
        ))),
        DerivativeMode::Central { step } => {
            if !domain.contains_stencil(p, step) {
                return Err(Error::BoundaryStencil { at: p, width: step });
            }
            central(sample, p, step)
        }
        DerivativeMode::Richardson { step } => {
            if !domain.contains_stencil(p, step) {
                return Err(Error::BoundaryStencil { at: p, width: step });
            }
            let d1 = central(sample, p, step)?;
            let d2 = central(sample, p, 0.5 * step)?;
            Ok((4.0 * d2 - d1) / 3.0)
        }
    }
}

/// The 12 structure-equation residuals at `p`: three for `dϑ^s + Σ ω^s_k∧ϑ^k` followed by
/// nine for `dω^i_j + Σ ω^i_k∧ω^k_j` (row-major in `(i, j)`), each divided by the largest
/// wedge-term magnitude at `p` (floored by the squared largest form coefficient), in
/// absolute value.
pub fn structural_residuals(field: &FrameField, p: ChartPoint, mode: DerivativeMode) -> Result<[f64; 12]> {
    let (m, d_theta, d_omega) = match mode {
        DerivativeMode::Jet => {
            let m = maurer_cartan(field, p, 1)?;
            let mut dt = [0.0; 3];
            let mut dw = [[0.0; 3]; 3];
            for i in 0..3 {
                dt[i] = m.theta[i].d()?.value();
                for j in 0..3 {
                    dw[i][j] = m.omega[i][j].d()?.value();
                }
            }
            (m, dt, dw)
        }
        _ => {
            let m = maurer_cartan(field, p, 0)?;
            let forms_at = |q: ChartPoint| -> Result<FrameFormMatrix> { maurer_cartan(field, q, 0) };
            let mut dt = [0.0; 3];
            let mut dw = [[0.0; 3]; 3];
            // sample all 12 forms once per stencil point
            let cache = std::cell::RefCell::new(Vec::<(ChartPoint, FrameFormMatrix)>::new());
            let lookup = |q: ChartPoint| -> Result<FrameFormMatrix> {
                if let Some((_, fm)) = cache.borrow().iter().find(|(x, _)| *x == q) {
                    return Ok(fm.clone());
                }
                let fm = forms_at(q)?;
                cache.borrow_mut().push((q, fm.clone()));
                Ok(fm)
            };
            for (s, d) in dt.iter_mut().enumerate() {
                *d = exterior_derivative(&|q| Ok(lookup(q)?.theta[s].values()), p, &field.domain, mode)?;
            }
            for i in 0..3 {
                for j in 0..3 {
                    dw[i][j] = exterior_derivative(&|q| Ok(lookup(q)?.omega[i][j].values()), p, &field.domain, mode)?;
                }
            }
            (m, dt, dw)
        }
    };

    let wedge = |x: &ChartOneForm, y: &ChartOneForm| {
        let (a, b) = (x.values(), y.values());
        a[0] * b[1] - a[1] * b[0]
    };
    let mut scale: f64 = 0.0;
    let mut raw = [0.0; 12];
    for s in 0..3 {
        let mut acc = d_theta[s];
        scale = scale.max(d_theta[s].abs());
        for k in 0..3 {
            let w = wedge(&m.omega[s][k], &m.theta[k]);
            scale = scale.max(w.abs());
            acc += w;
        }
        raw[s] = acc;
    }
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = d_omega[i][j];
            scale = scale.max(d_omega[i][j].abs());
            for k in 0..3 {
                let w = wedge(&m.omega[i][k], &m.omega[k][j]);
                scale = scale.max(w.abs());
                acc += w;
            }
            raw[3 + 3 * i + j] = acc;
        }
    }
    // floor the scale by the squared size of the forms, so that round-off in the
    // derivatives of a (nearly) flat frame is not blown up to O(1)
    let coef = m
        .theta
        .iter()
        .chain(m.omega.iter().flatten())
        .flat_map(|w| w.values())
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    scale = scale.max(coef * coef);
    if scale > 0.0 {
        for r in raw.iter_mut() {
            *r = (*r / scale).abs();
        }
    }
    Ok(raw)
}

/// Solve `γ = p·α + q·β` for 1-forms at the base point; `None` when `α∧β` is degenerate
/// relative to `|α||β|` (threshold `1e−10`). Returns jets of `(p, q)` and the residual jet.
pub fn expand_in_basis(
    gamma: &ChartOneForm,
    alpha: &ChartOneForm,
    beta: &ChartOneForm,
) -> Option<(MultiJet, MultiJet)> {
    let det = alpha.wedge(beta);
    let na = alpha.values()[0].hypot(alpha.values()[1]);
    let nb = beta.values()[0].hypot(beta.values()[1]);
    if !(det.value().abs() > 1e-10 * na * nb) {
        return None;
    }
    let inv = det.recip().ok()?;
    // [α_a β_a; α_b β_b] (p, q)ᵀ = (γ_a, γ_b)ᵀ
    let p = (gamma.a * beta.b - gamma.b * beta.a) * inv;
    let q = (alpha.a * gamma.b - alpha.b * gamma.a) * inv;
    Some((p, q))
}
