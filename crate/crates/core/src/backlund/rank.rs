//! Rank of the spherical representation `p ↦ π(f̂(p) − f(p)) ∈ P²`.
//!
//! For any unimodular frame whose first column is `v₁`, the Maurer–Cartan forms satisfy
//! `ω²₁∧ω³₁ = det(v₁, ∂u v₁, ∂v v₁) du∧dv`, and in the affine chart `v₁ᵏ ≠ 0` of `P²`
//!
//! ```text
//! d(v₁ⁱ/v₁ᵏ)∧d(v₁ʲ/v₁ᵏ) = sgn(i,j,k) · det(v₁, ∂u v₁, ∂v v₁) / (v₁ᵏ)³ du∧dv,
//! ```
//!
//! so the rank is 2 exactly where `ω²₁∧ω³₁ ≠ 0`.

use serde::{Deserialize, Serialize};

use super::pair::pair_jets;
use super::SurfacePair;
use crate::error::Result;
use crate::forms::{maurer_cartan_from_jets, FrameJets};
use crate::geometry::ChartPoint;
use crate::jets::{MultiJet, Var};

/// Relative threshold below which a wedge or Jacobian determinant counts as zero.
const RANK_TOL: f64 = 1e-10;

/// Which unimodular frame produced the Maurer–Cartan forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankFrame {
    /// The pair frame `(f; v₁, f_*X₂, ξ)` (needs `W ≠ 0`).
    Pair,
    /// `(f; v₁, f_*X₂', ξ)` with `X₂'` the chart-orthogonal unimodular complement of `X₁`,
    /// used when `W = 0`.
    TangentComplement,
}

/// Output of [`spherical_rank`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalRank {
    pub point: ChartPoint,
    /// Rank decided from the Maurer–Cartan wedge.
    pub rank: u8,
    /// `(ω²₁∧ω³₁)(∂u, ∂v)`.
    pub wedge: f64,
    /// `|wedge| / (|v₁| |∂u v₁| |∂v v₁|)` (0 when a derivative vanishes).
    pub wedge_relative: f64,
    /// Rank of the Jacobian of the projectivized direction map.
    pub jacobian_rank: u8,
    /// `d(v₁ⁱ/v₁ᵏ)∧d(v₁ʲ/v₁ᵏ)(∂u, ∂v)` in the best-conditioned affine chart.
    pub jacobian_det: f64,
    /// `sgn(i,j,k) · wedge / (v₁ᵏ)³`, the Jacobian determinant predicted from the wedge.
    pub predicted_det: f64,
    /// Relative residual of the determinant identity linking the two computations.
    pub identity_residual: f64,
    /// Index `k` (0-based) of the affine chart `v₁ᵏ ≠ 0`.
    pub pivot: usize,
    pub frame: RankFrame,
}

impl SphericalRank {
    /// Whether the two rank computations agree and, at rank 2, the Jacobian determinant has
    /// the sign predicted by the identity.
    pub fn consistent(&self) -> bool {
        self.rank == self.jacobian_rank && (self.rank < 2 || self.jacobian_det.signum() == self.predicted_det.signum())
    }
}

/// Rank of the spherical representation at `p`, computed from the Maurer–Cartan forms and
/// cross-checked against the projectivized Jacobian.
pub fn spherical_rank(pair: &SurfacePair, p: ChartPoint) -> Result<SphericalRank> {
    let j = pair_jets(pair, p, 1)?;
    let (x2col, frame) = match j.frame() {
        Ok(fr) => (fr.fx2, RankFrame::Pair),
        Err(_) => {
            // unimodular complement X₂' = (−q, p)/((p² + q²) θ12) of X₁ = (p, q)
            let [pp, qq] = j.x1;
            let n2 = pp * pp + qq * qq;
            let s = (n2 * j.theta12).recip()?;
            let x2 = [-(qq * s), pp * s];
            (
                j.fu.scale_jet(&x2[0]) + j.fv.scale_jet(&x2[1]),
                RankFrame::TangentComplement,
            )
        }
    };
    let mc = maurer_cartan_from_jets(
        &FrameJets {
            base: j.f,
            cols: [j.v1, x2col, j.xi],
        },
        p,
    )?;
    let wedge = mc.omega[1][0].wedge(&mc.omega[2][0]).value();

    let v1u = j.v1.derivative(Var::U)?.value();
    let v1v = j.v1.derivative(Var::V)?.value();
    let v = j.v1.value();
    let denom = v.norm() * v1u.norm() * v1v.norm();
    let wedge_relative = if denom > 0.0 { wedge.abs() / denom } else { 0.0 };

    // projectivized Jacobian in the chart v₁ᵏ ≠ 0
    let pivot = (0..3).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(2);
    let (i, jj) = match pivot {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let sgn = if pivot == 1 { -1.0 } else { 1.0 };
    let vk = j.v1.0[pivot];
    let inv = vk.recip()?;
    let ri: MultiJet = j.v1.0[i] * inv;
    let rj: MultiJet = j.v1.0[jj] * inv;
    let gi = ri.gradient()?;
    let gj = rj.gradient()?;
    let jacobian_det = gi[0] * gj[1] - gi[1] * gj[0];
    let ni = gi[0].hypot(gi[1]);
    let nj = gj[0].hypot(gj[1]);
    let predicted = sgn * wedge / vk.value().powi(3);
    let identity_residual = if ni * nj > 0.0 {
        (jacobian_det - predicted).abs() / (ni * nj)
    } else {
        (jacobian_det - predicted).abs()
    };

    let grad_scale = (v1u.norm() + v1v.norm()) / v.norm();
    let rank = if wedge_relative > RANK_TOL {
        2
    } else if grad_scale > RANK_TOL {
        // direction still moves unless v₁' ∥ v₁ in both directions
        let mu = v.cross(&v1u).norm() + v.cross(&v1v).norm();
        if mu > RANK_TOL * v.norm() * (v1u.norm() + v1v.norm()) {
            1
        } else {
            0
        }
    } else {
        0
    };
    let jacobian_rank = if ni * nj > 0.0 && jacobian_det.abs() > RANK_TOL * ni * nj {
        2
    } else if ni.max(nj) > RANK_TOL * (1.0 + ri.value().abs() + rj.value().abs()) * grad_scale.max(f64::MIN_POSITIVE) {
        1
    } else {
        0
    };
    Ok(SphericalRank {
        point: p,
        rank,
        wedge,
        wedge_relative,
        jacobian_rank,
        jacobian_det,
        predicted_det: predicted,
        identity_residual,
        pivot,
        frame,
    })
}
