//! Blaschke (affine) normal construction.
//!
//! Starting from the seed `ξ₀ = f_u × f_v` the normal is obtained by a transversal change
//! `ξ = φ ξ₀ + f_*Z` with `φ = |H₀|^{1/4}` (so that `|det_θ h| = 1`) and
//! `Z = −φ h₀⁻¹ (τ₀ + d ln φ)` (so that `τ = 0`).

use serde::{Deserialize, Serialize};

use super::gw::gauss_weingarten_jets;
use super::{ChartPoint, GaussWeingartenData, SurfaceMap, Vec3J};
use crate::error::{Error, Result};
use crate::jets::{MultiJet, Var};

/// Threshold on the scale-free degeneracy ratio below which a surface is treated as
/// affinely degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Requested sign of `θ12 = det(f_u, f_v, ξ)` for the Blaschke normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Scale-free nondegeneracy measure `|det II| / s²`, with `II` the Euclidean second
/// fundamental form and `s` the largest norm among `f_u, f_v, f_uu, f_uv, f_vv`.
pub fn degeneracy_ratio(f: &Vec3J) -> Result<f64> {
    let fu = f.derivative(Var::U)?;
    let fv = f.derivative(Var::V)?;
    let d2 = [
        fu.derivative(Var::U)?.value(),
        fu.derivative(Var::V)?.value(),
        fv.derivative(Var::V)?.value(),
    ];
    let (fu, fv) = (fu.value(), fv.value());
    let n = fu.cross(&fv);
    let nn = n.norm();
    if nn == 0.0 {
        return Ok(0.0);
    }
    let n = n / nn;
    let det2 = n.dot(&d2[0]) * n.dot(&d2[2]) - n.dot(&d2[1]).powi(2);
    let s = [fu.norm(), fv.norm(), d2[0].norm(), d2[1].norm(), d2[2].norm()]
        .into_iter()
        .fold(0.0_f64, f64::max);
    Ok(if s > 0.0 { det2.abs() / (s * s) } else { 0.0 })
}

/// Blaschke normal jets of order `K` at `p` (consumes order `K + 3` jets of `f`),
/// together with the rescaling factor `φ` used.
pub fn blaschke_jets(
    f: &SurfaceMap,
    p: ChartPoint,
    order: usize,
    orientation: Orientation,
) -> Result<(Vec3J, MultiJet)> {
    let fj = f.jets(p, order + 3)?;
    if degeneracy_ratio(&fj)? < DEGENERACY_TOL {
        return Err(Error::DegenerateSurface(p));
    }
    let fu = fj.derivative(Var::U)?;
    let fv = fj.derivative(Var::V)?;
    let seed = fu.cross(&fv);
    let g0 = gauss_weingarten_jets(&fj, &seed, p)?;
    let h0 = g0.det_theta_h;
    let abs_h0 = if h0.value() < 0.0 { -h0 } else { h0 };
    let phi = abs_h0.powf(0.25)?;
    let lnphi = phi.ln()?;
    let w = [
        g0.tau[0] + lnphi.derivative(Var::U)?,
        g0.tau[1] + lnphi.derivative(Var::V)?,
    ];
    // h0⁻¹ w
    let h = &g0.h;
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let inv_det = det.recip()?;
    let hw = [
        (h[1][1] * w[0] - h[0][1] * w[1]) * inv_det,
        (h[0][0] * w[1] - h[1][0] * w[0]) * inv_det,
    ];
    let z = [-(phi * hw[0]), -(phi * hw[1])];
    let xi = seed.scale_jet(&phi) + fu.scale_jet(&z[0]) + fv.scale_jet(&z[1]);
    let xi = xi.truncate(order).scale(orientation.sign());
    Ok((xi, phi))
}

/// Blaschke normal at `p`: its order-2 jet and the Gauss–Weingarten data recomputed from
/// scratch with that field (so `τ ≈ 0`, `|det_θ h| ≈ 1` are checked, not assumed).
pub fn blaschke_normal(
    f: &SurfaceMap,
    p: ChartPoint,
    orientation: Orientation,
) -> Result<(Vec3J, GaussWeingartenData)> {
    let (xi, _) = blaschke_jets(f, p, 2, orientation)?;
    let fj = f.jets(p, 3)?;
    let gw = gauss_weingarten_jets(&fj, &xi, p)?;
    Ok((xi, gw.to_data()))
}
