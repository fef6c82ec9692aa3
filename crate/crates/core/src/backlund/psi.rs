//! The transversal-invariant `ψ(f, f̂) = ((1 − AÂ)/W)⁴ / (H Ĥ)` and the conformality
//! defect of the affine fundamental forms.

use serde::{Deserialize, Serialize};

use super::pair::pair_jets;
use super::SurfacePair;
use crate::error::{Error, Result};
use crate::geometry::{degeneracy_ratio, gauss_weingarten_jets, ChartPoint, GwJets, DEGENERACY_TOL};

/// Everything entering `ψ` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiData {
    pub point: ChartPoint,
    pub psi: f64,
    pub a: f64,
    pub ahat: f64,
    pub w: f64,
    /// `H = det_θ h`.
    pub h: f64,
    /// `Ĥ = det_θ̂ ĥ`.
    pub hhat: f64,
    /// `h` in the chart basis.
    pub h_form: [[f64; 2]; 2],
    /// `ĥ` in the chart basis.
    pub hhat_form: [[f64; 2]; 2],
}

/// Gauss–Weingarten jets of both surfaces at `p` (`h`, `Γ` of order `order`), after the
/// nondegeneracy check.
pub(crate) fn pair_gw(pair: &SurfacePair, p: ChartPoint, order: usize) -> Result<(GwJets, GwJets)> {
    let f = pair.f.jets(p, order + 2)?;
    let fh = pair.fhat.jets(p, order + 2)?;
    if degeneracy_ratio(&f)? < DEGENERACY_TOL || degeneracy_ratio(&fh)? < DEGENERACY_TOL {
        return Err(Error::DegenerateSurface(p));
    }
    let g = gauss_weingarten_jets(&f, &pair.xi.jets(p, order + 1)?, p)?;
    let gh = gauss_weingarten_jets(&fh, &pair.xihat.jets(p, order + 1)?, p)?;
    Ok((g, gh))
}

/// All ingredients of `ψ` at `p`. Errors: `ZeroW`, `DegenerateSurface`, and the pair-jet errors.
pub fn psi_data(pair: &SurfacePair, p: ChartPoint) -> Result<PsiData> {
    let j = pair_jets(pair, p, 0)?;
    j.frame()?; // ZeroW guard
    let (g, gh) = pair_gw(pair, p, 0)?;
    let (a, ahat, w) = (j.a.value(), j.ahat.value(), j.w.value());
    let (h, hhat) = (g.det_theta_h.value(), gh.det_theta_h.value());
    let psi = ((1.0 - a * ahat) / w).powi(4) / (h * hhat);
    let d = g.to_data();
    let dh = gh.to_data();
    Ok(PsiData {
        point: p,
        psi,
        a,
        ahat,
        w,
        h,
        hhat,
        h_form: d.h,
        hhat_form: dh.h,
    })
}

/// `ψ(f, f̂)` at `p`.
pub fn psi(pair: &SurfacePair, p: ChartPoint) -> Result<f64> {
    Ok(psi_data(pair, p)?.psi)
}

/// Relative least-squares distance `min_λ ‖ĥ − λh‖_F / ‖ĥ‖_F` between chart matrices.
pub(crate) fn proportionality_defect(h: &[[f64; 2]; 2], hh: &[[f64; 2]; 2]) -> f64 {
    let dot = |x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]| -> f64 {
        (0..2)
            .flat_map(|i| (0..2).map(move |k| (i, k)))
            .map(|(i, k)| x[i][k] * y[i][k])
            .sum()
    };
    let (hh2, h2, hx) = (dot(hh, hh), dot(h, h), dot(h, hh));
    if hh2 == 0.0 || h2 == 0.0 {
        return 1.0;
    }
    ((hh2 - hx * hx / h2).max(0.0) / hh2).sqrt()
}

/// `(defect, ψ − 1)` at `p`, where `defect = min_λ ‖ĥ − λh‖_F / ‖ĥ‖_F` in the chart basis.
///
/// Errors: `NotTangent` (condition 1° fails), `DegenerateSurface`, `ZeroW`, and the
/// pair-jet errors.
pub fn conformality_defect(pair: &SurfacePair, p: ChartPoint) -> Result<(f64, f64)> {
    pair_jets(pair, p, 0)?.require_tangent()?;
    let d = psi_data(pair, p)?;
    Ok((proportionality_defect(&d.h_form, &d.hhat_form), d.psi - 1.0))
}
