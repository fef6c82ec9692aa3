//! Adapted pair frames `F = (f; v₁, f_*X₂, ξ)` and `F̂ = (f̂; v₁, f̂_*X̂₂, ξ̂)`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::SurfacePair;
use crate::error::{Error, Result};
use crate::forms::{FrameField, FrameJets};
use crate::geometry::gw::{IMMERSION_TOL, TRANSVERSAL_TOL};
use crate::geometry::{ChartPoint, Vec3J};
use crate::jets::{MultiJet, Var};

/// Relative tolerance for the tangency of `f̂ − f` to both surfaces.
pub const TANGENCY_TOL: f64 = 1e-8;
/// Relative tolerance below which `|f̂ − f|` counts as zero.
const COINCIDENCE_TOL: f64 = 1e-12;
/// Relative tolerance below which `W` counts as zero.
const ZERO_W_TOL: f64 = 1e-10;

/// Jets of all pair quantities at a point, of a common order `K`
/// (built from jets of `f, f̂` of order `K + 1` and of `ξ, ξ̂` of order `K`).
#[derive(Debug, Clone)]
pub struct PairJets {
    pub point: ChartPoint,
    pub f: Vec3J,
    pub fhat: Vec3J,
    /// `v₁ = f̂ − f`.
    pub v1: Vec3J,
    pub fu: Vec3J,
    pub fv: Vec3J,
    pub fhu: Vec3J,
    pub fhv: Vec3J,
    pub xi: Vec3J,
    pub xihat: Vec3J,
    /// Conormal `ν` of `(f, ξ)`.
    pub nu: Vec3J,
    /// Conormal `ν̂` of `(f̂, ξ̂)`.
    pub nuhat: Vec3J,
    /// `θ12 = det(f_u, f_v, ξ)`.
    pub theta12: MultiJet,
    /// `θ̂12 = det(f̂_u, f̂_v, ξ̂)`.
    pub thetahat12: MultiJet,
    /// `A = ν(ξ̂)`.
    pub a: MultiJet,
    /// `Â = ν̂(ξ)`.
    pub ahat: MultiJet,
    /// `W = det(v₁, ξ, ξ̂)`.
    pub w: MultiJet,
    /// Chart components of `X₁` (tangential part of `v₁` along `f`).
    pub x1: [MultiJet; 2],
    /// Chart components of `X̂₁` (tangential part of `v₁` along `f̂`).
    pub x1hat: [MultiJet; 2],
    /// Larger of the two relative tangency residuals at the base point.
    pub tangency: f64,
}

/// The `X₂`-dependent part of the pair frame (needs `W ≠ 0`).
#[derive(Debug, Clone)]
pub struct PairFrameJets {
    /// `f_*X₂ = (Aξ − ξ̂)/W`.
    pub fx2: Vec3J,
    /// `f̂_*X̂₂ = (ξ − Âξ̂)/W`.
    pub fhx2: Vec3J,
    pub x2: [MultiJet; 2],
    pub x2hat: [MultiJet; 2],
}

/// Base-point values of the pair frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFrame {
    pub point: ChartPoint,
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub x1hat: [f64; 2],
    pub x2hat: [f64; 2],
    pub a: f64,
    pub ahat: f64,
    pub w: f64,
    /// Relative tangency residual of `f̂ − f` (larger of the two surfaces).
    pub tangency_residual: f64,
    /// Residual of `f̂_*X̂₂ = Â f_*X₂ + ((1−AÂ)/W) ξ` and `ξ̂ = −W f_*X₂ + Aξ`.
    pub relation_residual: f64,
    /// Largest deviation of the two frame determinants from 1.
    pub unimodularity_residual: f64,
}

/// Chart components `(a, b)` of the tangential part of `x = a f_u + b f_v + c ξ`.
fn tangential_components(x: &Vec3J, fu: &Vec3J, fv: &Vec3J, xi: &Vec3J, inv_theta: &MultiJet) -> [MultiJet; 2] {
    [x.det(fv, xi) * *inv_theta, fu.det(x, xi) * *inv_theta]
}

fn check_immersion_and_transversality(fu: &Vec3J, fv: &Vec3J, xi: &Vec3J, p: ChartPoint) -> Result<MultiJet> {
    let n = fu.cross(fv);
    let (fu0, fv0, n0) = (fu.value(), fv.value(), n.value());
    if !(n0.norm() > IMMERSION_TOL * fu0.norm() * fv0.norm()) {
        return Err(Error::NotImmersive(p));
    }
    let theta = n.dot(xi);
    if !(theta.value().abs() > TRANSVERSAL_TOL * n0.norm() * xi.value().norm()) {
        return Err(Error::NotTransversal(p));
    }
    Ok(theta)
}

/// Relative tangency residual `|det(v, x_u, x_v)| / (|v| |x_u × x_v|)`.
pub fn tangency_residual(v: &Vector3<f64>, xu: &Vector3<f64>, xv: &Vector3<f64>) -> f64 {
    let n = xu.cross(xv);
    let s = v.norm() * n.norm();
    if s > 0.0 {
        v.dot(&n).abs() / s
    } else {
        f64::INFINITY
    }
}

/// Pair jets of order `order` at `p`.
///
/// Errors: `CoincidentPoints`, `NotImmersive`, `NotTransversal`. Tangency is measured, not
/// enforced (see [`PairJets::require_tangent`]).
pub fn pair_jets(pair: &SurfacePair, p: ChartPoint, order: usize) -> Result<PairJets> {
    let f = pair.f.jets(p, order + 1)?;
    let fhat = pair.fhat.jets(p, order + 1)?;
    let xi = pair.xi.jets(p, order)?;
    let xihat = pair.xihat.jets(p, order)?;
    let v1 = fhat - f;
    let scale = f.value().norm() + fhat.value().norm() + 1.0;
    if !(v1.value().norm() > COINCIDENCE_TOL * scale) {
        return Err(Error::CoincidentPoints(p));
    }
    let fu = f.derivative(Var::U)?;
    let fv = f.derivative(Var::V)?;
    let fhu = fhat.derivative(Var::U)?;
    let fhv = fhat.derivative(Var::V)?;
    let theta12 = check_immersion_and_transversality(&fu, &fv, &xi, p)?;
    let thetahat12 = check_immersion_and_transversality(&fhu, &fhv, &xihat, p)?;
    let inv = theta12.recip()?;
    let invh = thetahat12.recip()?;
    let nu = fu.cross(&fv).scale_jet(&inv);
    let nuhat = fhu.cross(&fhv).scale_jet(&invh);
    let a = nu.dot(&xihat);
    let ahat = nuhat.dot(&xi);
    let w = v1.det(&xi, &xihat);
    let x1 = tangential_components(&v1, &fu, &fv, &xi, &inv);
    let x1hat = tangential_components(&v1, &fhu, &fhv, &xihat, &invh);
    let v1v = v1.value();
    let tangency =
        tangency_residual(&v1v, &fu.value(), &fv.value()).max(tangency_residual(&v1v, &fhu.value(), &fhv.value()));
    Ok(PairJets {
        point: p,
        f,
        fhat,
        v1,
        fu,
        fv,
        fhu,
        fhv,
        xi,
        xihat,
        nu,
        nuhat,
        theta12,
        thetahat12,
        a,
        ahat,
        w,
        x1,
        x1hat,
        tangency,
    })
}

impl PairJets {
    /// `NotTangent` unless `f̂ − f` is tangent to both surfaces within [`TANGENCY_TOL`].
    pub fn require_tangent(&self) -> Result<()> {
        if self.tangency < TANGENCY_TOL {
            Ok(())
        } else {
            Err(Error::NotTangent {
                at: self.point,
                residual: self.tangency,
            })
        }
    }

    /// Scale-free size of `W`: `|W| / (|v₁| |ξ| |ξ̂|)`.
    pub fn w_ratio(&self) -> f64 {
        let s = self.v1.value().norm() * self.xi.value().norm() * self.xihat.value().norm();
        self.w.value().abs() / s
    }

    /// The `X₂`-part of the frame; `ZeroW` when `W` vanishes.
    pub fn frame(&self) -> Result<PairFrameJets> {
        if !(self.w_ratio() > ZERO_W_TOL) {
            return Err(Error::ZeroW(self.point));
        }
        let iw = self.w.recip()?;
        let fx2 = (self.xi.scale_jet(&self.a) - self.xihat).scale_jet(&iw);
        let fhx2 = (self.xi - self.xihat.scale_jet(&self.ahat)).scale_jet(&iw);
        let x2 = tangential_components(&fx2, &self.fu, &self.fv, &self.xi, &self.theta12.recip()?);
        let x2hat = tangential_components(&fhx2, &self.fhu, &self.fhv, &self.xihat, &self.thetahat12.recip()?);
        Ok(PairFrameJets { fx2, fhx2, x2, x2hat })
    }

    /// Base-point values of the pair frame.
    pub fn frame_values(&self) -> Result<PairFrame> {
        let fr = self.frame()?;
        let (a, ahat, w) = (self.a.value(), self.ahat.value(), self.w.value());
        let (fx2, fhx2, xi, xihat, v1) = (
            fr.fx2.value(),
            fr.fhx2.value(),
            self.xi.value(),
            self.xihat.value(),
            self.v1.value(),
        );
        let r1 = fhx2 - (fx2 * ahat + xi * ((1.0 - a * ahat) / w));
        let r2 = xihat - (-fx2 * w + xi * a);
        let relation_residual =
            (r1.norm() / (fhx2.norm() + fx2.norm() * ahat.abs() + 1e-300)).max(r2.norm() / (xihat.norm() + 1e-300));
        let d1 = v1.dot(&fx2.cross(&xi));
        let d2 = v1.dot(&fhx2.cross(&xihat));
        let vals = |x: &[MultiJet; 2]| [x[0].value(), x[1].value()];
        Ok(PairFrame {
            point: self.point,
            x1: vals(&self.x1),
            x2: vals(&fr.x2),
            x1hat: vals(&self.x1hat),
            x2hat: vals(&fr.x2hat),
            a,
            ahat,
            w,
            tangency_residual: self.tangency,
            relation_residual,
            unimodularity_residual: (d1 - 1.0).abs().max((d2 - 1.0).abs()),
        })
    }
}

/// Solve the pair frame at `p`.
///
/// Errors: `CoincidentPoints`, `NotTangent` (condition 1° fails), `ZeroW`, and the
/// immersion/transversality errors of the underlying decomposition.
pub fn solve_pair_frame(pair: &SurfacePair, p: ChartPoint) -> Result<PairFrame> {
    let j = pair_jets(pair, p, 0)?;
    j.require_tangent()?;
    j.frame_values()
}

/// Moving frames `F = (f; v₁, f_*X₂, ξ)` and `F̂ = (f̂; v₁, f̂_*X̂₂, ξ̂)` as frame fields.
pub fn pair_frame_fields(pair: &SurfacePair) -> (FrameField, FrameField) {
    let p1 = pair.clone();
    let f = FrameField::new(pair.domain, move |p, k| {
        let j = pair_jets(&p1, p, k)?;
        let fr = j.frame()?;
        Ok(FrameJets {
            base: j.f,
            cols: [j.v1, fr.fx2, j.xi],
        })
    });
    let p2 = pair.clone();
    let fhat = FrameField::new(pair.domain, move |p, k| {
        let j = pair_jets(&p2, p, k)?;
        let fr = j.frame()?;
        Ok(FrameJets {
            base: j.fhat,
            cols: [j.v1, fr.fhx2, j.xihat],
        })
    });
    (f, fhat)
}

/// The gauge matrix `M` with `(v₁, f̂_*X̂₂, ξ̂) = (v₁, f_*X₂, ξ)·M`:
///
/// ```text
/// M = [[1, 0, 0], [0, Â, −W], [0, (1−AÂ)/W, A]]
/// ```
///
/// (together with the base shift `f̂ = f + v₁`).
pub fn gauge_matrix(j: &PairJets) -> Result<[[MultiJet; 3]; 3]> {
    let k = j.w.order();
    let one = MultiJet::constant(1.0, k);
    let zero = MultiJet::zero(k);
    let c = (one - j.a * j.ahat) * j.w.recip()?;
    Ok([[one, zero, zero], [zero, j.ahat, -j.w], [zero, c, j.a]])
}
