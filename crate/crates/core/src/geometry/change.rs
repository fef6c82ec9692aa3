//! Closed-form transversal change rules for `ξ̃ = λξ + f_*Z`.
//!
//! ```text
//! h̃ = h/λ,  θ̃ = λθ,  det_θ̃ h̃ = det_θ h / λ⁴,  ν̃ = ν/λ,
//! Γ̃^k_ij = Γ^k_ij − h_ij Z^k/λ,
//! τ̃_i = τ_i + ∂_i ln|λ| + h_ij Z^j/λ,
//! S̃^k_i = λ S^k_i − (∂_i Z^k + Γ^k_ij Z^j) + τ̃_i Z^k.
//! ```
//!
//! These are accelerators; the tests cross-check them against a from-scratch
//! Gauss–Weingarten decomposition of the explicit field `ξ̃`.

use super::gw::{gauss_weingarten_jets, GwJets};
use super::{ChartPoint, GaussWeingartenData, ScalarField, SurfaceMap, TangentField, TransversalField};
use crate::error::{Error, Result};
use crate::jets::{MultiJet, Var};

/// Apply the change rules to jet-valued data; `λ`, `Z` must carry order ≥ 1.
pub fn transversal_change_jets(g: &GwJets, lambda: &MultiJet, z: &[MultiJet; 2]) -> Result<GwJets> {
    if lambda.value() == 0.0 {
        return Err(Error::ZeroScale(g.point));
    }
    let il = lambda.recip()?;
    let dl = [lambda.derivative(Var::U)?, lambda.derivative(Var::V)?];
    let dz = [
        [z[0].derivative(Var::U)?, z[0].derivative(Var::V)?],
        [z[1].derivative(Var::U)?, z[1].derivative(Var::V)?],
    ];
    let mut out = g.clone();
    for i in 0..2 {
        for j in 0..2 {
            out.h[i][j] = g.h[i][j] * il;
            for k in 0..2 {
                out.gamma[k][i][j] = g.gamma[k][i][j] - g.h[i][j] * z[k] * il;
            }
        }
        out.tau[i] = g.tau[i] + dl[i] * il + (g.h[i][0] * z[0] + g.h[i][1] * z[1]) * il;
    }
    for i in 0..2 {
        for k in 0..2 {
            let cov = dz[k][i] + g.gamma[k][i][0] * z[0] + g.gamma[k][i][1] * z[1];
            out.shape[k][i] = *lambda * g.shape[k][i] - cov + out.tau[i] * z[k];
        }
    }
    out.theta12 = g.theta12 * *lambda;
    let il2 = il * il;
    out.det_theta_h = g.det_theta_h * il2 * il2;
    out.conormal = g.conormal.scale_jet(&il);
    Ok(out)
}

/// Gauss–Weingarten data of `ξ̃ = λξ + f_*Z` at `p`, via the change rules.
pub fn transversal_change(
    f: &SurfaceMap,
    xi: &TransversalField,
    lambda: &ScalarField,
    z: &TangentField,
    p: ChartPoint,
) -> Result<GaussWeingartenData> {
    let g = gauss_weingarten_jets(&f.jets(p, 2)?, &xi.jets(p, 1)?, p)?;
    let l = lambda.jets(p, 1)?;
    let zz = z.jets(p, 1)?;
    Ok(transversal_change_jets(&g, &l, &zz)?.to_data())
}
