//! The criterion for parallel transversal fields: with `ξ̂ = ξ/λ` and
//! `f̂_*X̂₂ = λ f_*X₂ + β ξ`, the forms `h`, `ĥ` are proportional iff `H Ĥ = β⁴`.

use serde::{Deserialize, Serialize};

use super::pair::pair_jets;
use super::psi::{pair_gw, proportionality_defect};
use super::SurfacePair;
use crate::error::{Error, Result};
use crate::geometry::ChartPoint;

/// Relative tolerance for `ξ ∥ ξ̂`.
pub const PARALLEL_TOL: f64 = 1e-8;

/// Output of [`parallel_transversal_criterion`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelCriterion {
    pub point: ChartPoint,
    /// `λ` with `ξ̂ = ξ/λ`.
    pub lambda: f64,
    /// `β = −ν̂(f_*X₂)`.
    pub beta: f64,
    /// `H Ĥ − β⁴`.
    pub defect: f64,
    pub h: f64,
    pub hhat: f64,
    /// `min_μ ‖ĥ − μh‖ / ‖ĥ‖` in the chart basis (zero iff `h`, `ĥ` are proportional).
    pub conformality_defect: f64,
    /// `|ξ × ξ̂| / (|ξ| |ξ̂|)`.
    pub parallel_residual: f64,
    /// Chart components of the chosen `X₂` (unimodular with `X₁`).
    pub x2: [f64; 2],
    /// Chart components of the induced `X̂₂`.
    pub x2hat: [f64; 2],
}

/// Evaluate the criterion at `p` with the canonical `X₂` (the θ-unimodular complement of `X₁`
/// orthogonal to it in chart coordinates).
pub fn parallel_transversal_criterion(pair: &SurfacePair, p: ChartPoint) -> Result<ParallelCriterion> {
    parallel_transversal_criterion_shifted(pair, p, 0.0)
}

/// As [`parallel_transversal_criterion`], with `X₂` replaced by `X₂ + t·X₁`.
pub fn parallel_transversal_criterion_shifted(pair: &SurfacePair, p: ChartPoint, t: f64) -> Result<ParallelCriterion> {
    let j = pair_jets(pair, p, 0)?;
    j.require_tangent()?;
    let (xi, xih) = (j.xi.value(), j.xihat.value());
    let parallel_residual = xi.cross(&xih).norm() / (xi.norm() * xih.norm());
    if !(parallel_residual < PARALLEL_TOL) {
        return Err(Error::NotParallel {
            at: p,
            residual: parallel_residual,
        });
    }
    let lambda = xi.norm_squared() / xi.dot(&xih);
    let (fu, fv, fhu, fhv) = (j.fu.value(), j.fv.value(), j.fhu.value(), j.fhv.value());
    let (pq, th) = ([j.x1[0].value(), j.x1[1].value()], j.theta12.value());
    let n2 = pq[0] * pq[0] + pq[1] * pq[1];
    let x2 = [-pq[1] / (n2 * th) + t * pq[0], pq[0] / (n2 * th) + t * pq[1]];
    let fx2 = fu * x2[0] + fv * x2[1];
    let beta = -j.nuhat.value().dot(&fx2);
    let scale = fx2.norm() * j.nuhat.value().norm();
    if !(beta.abs() > 1e-12 * scale) {
        return Err(Error::BetaZero(p));
    }
    let fhx2 = fx2 * lambda + xi * beta;
    let thh = j.thetahat12.value();
    let x2hat = [fhx2.dot(&fhv.cross(&xih)) / thh, fhu.dot(&fhx2.cross(&xih)) / thh];
    let (g, gh) = pair_gw(pair, p, 0)?;
    let (h, hhat) = (g.det_theta_h.value(), gh.det_theta_h.value());
    Ok(ParallelCriterion {
        point: p,
        lambda,
        beta,
        defect: h * hhat - beta.powi(4),
        h,
        hhat,
        conformality_defect: proportionality_defect(&g.to_data().h, &gh.to_data().h),
        parallel_residual,
        x2,
        x2hat,
    })
}
