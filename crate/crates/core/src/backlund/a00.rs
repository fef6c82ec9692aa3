//! The normal-form system for `dim Im R = 2` pairs with `A = Â = 0`, checked as residuals on a
//! grid. With chart coordinates `(x, y) = (u, v)` and a nonzero constant `W`:
//!
//! ```text
//! α = W² H_y e^{−2γ} γ_y + W² H (e^{−2γ} γ_y)_y + (e^{2γ} γ_x)_x,
//! β = −W² (e^{−2γ} γ_y)_y − (1/H)(e^{2γ} γ_x)_x + (H_x/H²) e^{2γ} γ_x,
//! α_y = (α + βH) γ_y,     β_x = −(1/H)(α + βH) γ_x,
//! ```
//!
//! and consequently `α + βH = W² H_y e^{−2γ} γ_y + (H_x/H) e^{2γ} γ_x`. The connection `∇` is
//! locally symmetric iff `α` is constant, `∇̂` iff `β` is constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Domain, ScalarField};
use crate::jets::{MultiJet, Var};

/// Threshold below which `γ_x` or `γ_y` counts as vanishing.
const GAMMA_CRITICAL_TOL: f64 = 1e-10;

/// Fields of the normal form.
#[derive(Clone, Debug)]
pub struct A00State {
    pub gamma: ScalarField,
    pub h: ScalarField,
    pub alpha: ScalarField,
    pub beta: ScalarField,
    pub w: f64,
    pub domain: Domain,
}

/// Right-hand sides `(α, β)` of the first two equations as jets of order `k`
/// (consumes order `k + 2` jets of `γ` and `k + 1` jets of `H`).
fn defining_rhs(gamma: &ScalarField, h: &ScalarField, w: f64, p: ChartPoint, k: usize) -> Result<(MultiJet, MultiJet)> {
    let g = gamma.jets(p, k + 2)?;
    let hh = h.jets(p, k + 2)?;
    let gx = g.derivative(Var::U)?;
    let gy = g.derivative(Var::V)?;
    let e2 = (g * 2.0).exp()?;
    let em2 = e2.recip()?;
    let a = em2 * gy; // e^{−2γ} γ_y
    let b = e2 * gx; // e^{2γ} γ_x
    let a_y = a.derivative(Var::V)?;
    let b_x = b.derivative(Var::U)?;
    let (hx, hy) = (hh.derivative(Var::U)?, hh.derivative(Var::V)?);
    let w2 = w * w;
    let hinv = hh.recip()?;
    let alpha = hy * a * w2 + hh * a_y * w2 + b_x;
    let beta = -(a_y * w2) - hinv * b_x + hx * hinv * hinv * b;
    Ok((alpha.truncate(k), beta.truncate(k)))
}

impl A00State {
    /// Manufactured state: `α`, `β` defined by the first two equations from `γ`, `H`, `W`.
    pub fn manufactured(gamma: ScalarField, h: ScalarField, w: f64, domain: Domain) -> Self {
        let (g1, h1) = (gamma.clone(), h.clone());
        let alpha = ScalarField::new(move |p, k| Ok(defining_rhs(&g1, &h1, w, p, k)?.0));
        let (g2, h2) = (gamma.clone(), h.clone());
        let beta = ScalarField::new(move |p, k| Ok(defining_rhs(&g2, &h2, w, p, k)?.1));
        A00State {
            gamma,
            h,
            alpha,
            beta,
            w,
            domain,
        }
    }
}

/// Largest residual of one equation and where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualMax {
    pub value: f64,
    pub at: Option<ChartPoint>,
}

impl ResidualMax {
    fn new() -> Self {
        ResidualMax { value: 0.0, at: None }
    }

    fn push(&mut self, x: f64, p: ChartPoint) {
        let x = if x.is_finite() { x.abs() } else { f64::INFINITY };
        if self.at.is_none() || x > self.value {
            self.value = x;
            self.at = Some(p);
        }
    }
}

/// Residuals of the normal-form system over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A00Report {
    pub nu: usize,
    pub nv: usize,
    /// Equation for `α`, relative to `1 + |α|`.
    pub alpha_equation: ResidualMax,
    /// Equation for `β`, relative to `1 + |β|`.
    pub beta_equation: ResidualMax,
    /// `α_y − (α + βH)γ_y`.
    pub alpha_y_equation: ResidualMax,
    /// `β_x + (α + βH)γ_x / H`.
    pub beta_x_equation: ResidualMax,
    /// The derived identity for `α + βH`.
    pub identity: ResidualMax,
    /// `max |dα|`.
    pub d_alpha: ResidualMax,
    /// `max |dβ|`.
    pub d_beta: ResidualMax,
    pub tolerance: f64,
    /// `∇` locally symmetric (`α` constant within tolerance).
    pub nabla_symmetric: bool,
    /// `∇̂` locally symmetric (`β` constant within tolerance).
    pub nabla_hat_symmetric: bool,
}

impl A00Report {
    /// Whether all four equations and the identity hold within the tolerance.
    pub fn system_satisfied(&self) -> bool {
        [
            &self.alpha_equation,
            &self.beta_equation,
            &self.alpha_y_equation,
            &self.beta_x_equation,
            &self.identity,
        ]
        .iter()
        .all(|r| r.value < self.tolerance)
    }
}

/// Evaluate the system on an `nu × nv` grid of the state's domain.
///
/// Errors: `GammaCritical` where `γ_x` or `γ_y` vanishes; jet errors (e.g. `H = 0`).
pub fn a00_residuals(state: &A00State, nu: usize, nv: usize, tolerance: f64) -> Result<A00Report> {
    let mut rep = A00Report {
        nu,
        nv,
        alpha_equation: ResidualMax::new(),
        beta_equation: ResidualMax::new(),
        alpha_y_equation: ResidualMax::new(),
        beta_x_equation: ResidualMax::new(),
        identity: ResidualMax::new(),
        d_alpha: ResidualMax::new(),
        d_beta: ResidualMax::new(),
        tolerance,
        nabla_symmetric: false,
        nabla_hat_symmetric: false,
    };
    let w2 = state.w * state.w;
    for p in state.domain.grid(nu, nv) {
        let g = state.gamma.jets(p, 2)?;
        let [gx, gy] = g.gradient()?;
        if gx.abs() < GAMMA_CRITICAL_TOL || gy.abs() < GAMMA_CRITICAL_TOL {
            return Err(Error::GammaCritical(p));
        }
        let h = state.h.jets(p, 1)?;
        let al = state.alpha.jets(p, 1)?;
        let be = state.beta.jets(p, 1)?;
        let (ra, rb) = defining_rhs(&state.gamma, &state.h, state.w, p, 0)?;
        let (hv, [hx, hy]) = (h.value(), h.gradient()?);
        let (a, b) = (al.value(), be.value());
        let [ax, ay] = al.gradient()?;
        let [bx, by] = be.gradient()?;
        let s = a + b * hv;
        let e2 = (2.0 * g.value()).exp();
        rep.alpha_equation.push((a - ra.value()) / (1.0 + a.abs()), p);
        rep.beta_equation.push((b - rb.value()) / (1.0 + b.abs()), p);
        rep.alpha_y_equation.push((ay - s * gy) / (1.0 + ay.abs()), p);
        rep.beta_x_equation.push((bx + s * gx / hv) / (1.0 + bx.abs()), p);
        let id_rhs = w2 * hy * gy / e2 + hx / hv * e2 * gx;
        rep.identity.push((s - id_rhs) / (1.0 + s.abs()), p);
        rep.d_alpha.push(ax.hypot(ay), p);
        rep.d_beta.push(bx.hypot(by), p);
    }
    rep.nabla_symmetric = rep.d_alpha.value < tolerance;
    rep.nabla_hat_symmetric = rep.d_beta.value < tolerance;
    Ok(rep)
}
