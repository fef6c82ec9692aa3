//! Gauss–Weingarten decomposition for a pair (f, ξ).
//!
//! In the chart basis the structure equations read
//!
//! ```text
//! f_ij = Γ^k_ij f_k + h_ij ξ,        ξ_i = −S^k_i f_k + τ_i ξ.
//! ```
//!
//! Every coefficient is obtained from the dual basis of `(f_u, f_v, ξ)`, which is
//! `(f_v×ξ, ξ×f_u, f_u×f_v)/θ12` with `θ12 = det(f_u, f_v, ξ)`; the last row is the conormal ν.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{ChartPoint, SurfaceMap, TransversalField, Vec3J};
use crate::error::{Error, Result};
use crate::jets::{MultiJet, Var};

/// Relative tolerance below which `f_u × f_v` counts as vanishing.
pub(crate) const IMMERSION_TOL: f64 = 1e-12;
/// Relative tolerance below which `θ12` counts as vanishing.
pub(crate) const TRANSVERSAL_TOL: f64 = 1e-10;

/// Jet-valued Gauss–Weingarten data at a chart point.
#[derive(Debug, Clone)]
pub struct GwJets {
    pub point: ChartPoint,
    /// `h[i][j]`.
    pub h: [[MultiJet; 2]; 2],
    /// `gamma[k][i][j] = Γ^k_ij`.
    pub gamma: [[[MultiJet; 2]; 2]; 2],
    /// `shape[k][i] = S^k_i`, the `∂k` component of `S ∂i`.
    pub shape: [[MultiJet; 2]; 2],
    pub tau: [MultiJet; 2],
    pub theta12: MultiJet,
    /// `H = det h / θ12²`.
    pub det_theta_h: MultiJet,
    pub conormal: Vec3J,
    gauss_residual: f64,
    weingarten_residual: f64,
}

/// Per-point Gauss–Weingarten bundle for one `(f, ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussWeingartenData {
    pub point: ChartPoint,
    pub h: [[f64; 2]; 2],
    /// `gamma[k][i][j] = Γ^k_ij`.
    pub gamma: [[[f64; 2]; 2]; 2],
    /// `shape[k][i] = S^k_i`.
    pub shape: [[f64; 2]; 2],
    pub tau: [f64; 2],
    pub theta12: f64,
    /// `det_θ h`.
    pub det_theta_h: f64,
    pub conormal: [f64; 3],
    /// Sign of `det_θ h`.
    pub epsilon: i8,
    /// Relative residual of the Gauss formula.
    pub gauss_residual: f64,
    /// Relative residual of the Weingarten formula.
    pub weingarten_residual: f64,
}

fn rel(res: Vector3<f64>, scale: f64) -> f64 {
    if scale > 0.0 {
        res.norm() / scale
    } else {
        res.norm()
    }
}

/// Gauss–Weingarten jets from the jets of `f` (order ≥ 2) and `ξ` (order ≥ 1).
///
/// `h`, `Γ` come out at order `min(K_f − 2, K_ξ)`, `S`, `τ` at `min(K_f − 1, K_ξ − 1)`.
pub fn gauss_weingarten_jets(f: &Vec3J, xi: &Vec3J, p: ChartPoint) -> Result<GwJets> {
    let fu = f.derivative(Var::U)?;
    let fv = f.derivative(Var::V)?;
    let fuu = fu.derivative(Var::U)?;
    let fuv = fu.derivative(Var::V)?;
    let fvv = fv.derivative(Var::V)?;
    let xu = xi.derivative(Var::U)?;
    let xv = xi.derivative(Var::V)?;

    let n = fu.cross(&fv);
    let (fu0, fv0, n0, x0) = (fu.value(), fv.value(), n.value(), xi.value());
    if !(n0.norm() > IMMERSION_TOL * fu0.norm() * fv0.norm()) {
        return Err(Error::NotImmersive(p));
    }
    let theta = n.dot(xi);
    if !(theta.value().abs() > TRANSVERSAL_TOL * n0.norm() * x0.norm()) {
        return Err(Error::NotTransversal(p));
    }
    let inv = theta.recip()?;
    let r1 = fv.cross(xi).scale_jet(&inv);
    let r2 = xi.cross(&fu).scale_jet(&inv);
    let nu = n.scale_jet(&inv);
    let rows = [r1, r2];

    let fij = [[fuu, fuv], [fuv, fvv]];
    let xd = [xu, xv];
    let mut h = [[MultiJet::zero(0); 2]; 2];
    let mut gamma = [[[MultiJet::zero(0); 2]; 2]; 2];
    let mut shape = [[MultiJet::zero(0); 2]; 2];
    let mut tau = [MultiJet::zero(0); 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = nu.dot(&fij[i][j]);
            for k in 0..2 {
                gamma[k][i][j] = rows[k].dot(&fij[i][j]);
            }
        }
        tau[i] = nu.dot(&xd[i]);
        for k in 0..2 {
            shape[k][i] = -rows[k].dot(&xd[i]);
        }
    }
    let det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let det_theta_h = det_h.mul_jet(&(inv * inv));

    // reconstruction residuals at the base point
    let basis = [fu0, fv0];
    let mut gauss_residual: f64 = 0.0;
    let mut weingarten_residual: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let target = fij[i][j].value();
            let mut recon = x0 * h[i][j].value();
            let mut scale = target.norm() + recon.norm();
            for k in 0..2 {
                let t = basis[k] * gamma[k][i][j].value();
                scale += t.norm();
                recon += t;
            }
            gauss_residual = gauss_residual.max(rel(target - recon, scale));
        }
        let target = xd[i].value();
        let mut recon = x0 * tau[i].value();
        let mut scale = target.norm() + recon.norm();
        for k in 0..2 {
            let t = -basis[k] * shape[k][i].value();
            scale += t.norm();
            recon += t;
        }
        weingarten_residual = weingarten_residual.max(rel(target - recon, scale));
    }

    Ok(GwJets {
        point: p,
        h,
        gamma,
        shape,
        tau,
        theta12: theta,
        det_theta_h,
        conormal: nu,
        gauss_residual,
        weingarten_residual,
    })
}

impl GwJets {
    /// Base-point values.
    pub fn to_data(&self) -> GaussWeingartenData {
        let v2 = |m: &[[MultiJet; 2]; 2]| [[m[0][0].value(), m[0][1].value()], [m[1][0].value(), m[1][1].value()]];
        let hv = self.det_theta_h.value();
        GaussWeingartenData {
            point: self.point,
            h: v2(&self.h),
            gamma: [v2(&self.gamma[0]), v2(&self.gamma[1])],
            shape: v2(&self.shape),
            tau: [self.tau[0].value(), self.tau[1].value()],
            theta12: self.theta12.value(),
            det_theta_h: hv,
            conormal: self.conormal.value().into(),
            epsilon: if hv > 0.0 {
                1
            } else if hv < 0.0 {
                -1
            } else {
                0
            },
            gauss_residual: self.gauss_residual,
            weingarten_residual: self.weingarten_residual,
        }
    }
}

/// Gauss–Weingarten data of `(f, ξ)` at `p`.
pub fn gauss_weingarten(f: &SurfaceMap, xi: &TransversalField, p: ChartPoint) -> Result<GaussWeingartenData> {
    let fj = f.jets(p, 2)?;
    let xj = xi.jets(p, 1)?;
    Ok(gauss_weingarten_jets(&fj, &xj, p)?.to_data())
}

/// Conormal `ν` with `ν(f_u) = ν(f_v) = 0`, `ν(ξ) = 1`.
///
/// Uses the same arithmetic as [`gauss_weingarten_jets`], so both agree bit for bit.
pub fn conormal(f: &SurfaceMap, xi: &TransversalField, p: ChartPoint) -> Result<Vector3<f64>> {
    let fj = f.jets(p, 1)?;
    let xj = xi.jets(p, 0)?;
    let fu = fj.derivative(Var::U)?;
    let fv = fj.derivative(Var::V)?;
    let n = fu.cross(&fv);
    let (fu0, fv0, n0, x0) = (fu.value(), fv.value(), n.value(), xj.value());
    if !(n0.norm() > IMMERSION_TOL * fu0.norm() * fv0.norm()) {
        return Err(Error::NotImmersive(p));
    }
    let theta = n.dot(&xj);
    if !(theta.value().abs() > TRANSVERSAL_TOL * n0.norm() * x0.norm()) {
        return Err(Error::NotTransversal(p));
    }
    Ok(n.scale_jet(&theta.recip()?).value())
}
