//! Expansion coefficients of the pair-frame Maurer–Cartan forms in the basis `(ω²₁, ω³₁)`:
//!
//! ```text
//! ϑ¹ = s ω²₁ + t ω³₁,   ω³₂ = u ω²₁ + v ω³₁,   ω¹₂ = α ω²₁,   ω¹₃ = β ω³₁,   ω̂³₂ = x ω²₁ + y ω³₁,
//! ```
//!
//! with the relations `s = ÂWu/(1−AÂ) + v`, `x = −((1−AÂ)²/(W²H)) u` and
//! `β = ÂW²α/(A(1−AÂ))` reported as residuals.

use serde::{Deserialize, Serialize};

use super::pair::{pair_jets, PairJets};
use super::psi::pair_gw;
use super::SurfacePair;
use crate::error::{Error, Result};
use crate::forms::{expand_in_basis, maurer_cartan_from_jets, ChartOneForm, FrameFormMatrix, FrameJets};
use crate::geometry::ChartPoint;
use crate::jets::MultiJet;

/// `|A|` at or below which the `β` relation is not evaluated.
const A_ZERO_TOL: f64 = 1e-10;

/// Coefficients at a point together with the consistency residuals of the relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCoefficients {
    pub point: ChartPoint,
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub y: f64,
    /// `dα` in the chart basis.
    pub d_alpha: [f64; 2],
    /// `dβ` in the chart basis.
    pub d_beta: [f64; 2],
    pub a: f64,
    pub ahat: f64,
    pub w: f64,
    /// `H = det_θ h`.
    pub h: f64,
    /// `|ω¹₂∧ω²₁| / (|ω¹₂| |ω²₁|)`: how far `ω¹₂` is from a multiple of `ω²₁`.
    pub alpha_consistency: f64,
    /// `|ω¹₃∧ω³₁| / (|ω¹₃| |ω³₁|)`.
    pub beta_consistency: f64,
    /// `|s − (ÂWu/(1−AÂ) + v)|`, relative.
    pub s_relation: f64,
    /// `|x + ((1−AÂ)²/(W²H)) u|`, relative.
    pub x_relation: f64,
    /// `|β − ÂW²α/(A(1−AÂ))|`, relative; `None` when `|A| ≤ 1e−10`.
    pub beta_relation: Option<f64>,
    /// Largest `|ω¹₁|` component, relative to `|ω²₁| + |ω³₁|` (6° forces `ω¹₁ = 0`).
    pub omega11: f64,
}

/// Maurer–Cartan forms of `F` and `F̂` at `p` with coefficient jets of order `order`.
pub(crate) fn pair_maurer_cartan(
    pair: &SurfacePair,
    p: ChartPoint,
    order: usize,
) -> Result<(PairJets, FrameFormMatrix, FrameFormMatrix)> {
    let j = pair_jets(pair, p, order + 1)?;
    let fr = j.frame()?;
    let mc = maurer_cartan_from_jets(
        &FrameJets {
            base: j.f,
            cols: [j.v1, fr.fx2, j.xi],
        },
        p,
    )?;
    let mch = maurer_cartan_from_jets(
        &FrameJets {
            base: j.fhat,
            cols: [j.v1, fr.fhx2, j.xihat],
        },
        p,
    )?;
    Ok((j, mc, mch))
}

fn norm(w: &ChartOneForm) -> f64 {
    let [a, b] = w.values();
    a.hypot(b)
}

fn alignment(x: &ChartOneForm, y: &ChartOneForm) -> f64 {
    let d = norm(x) * norm(y);
    if d > 0.0 {
        x.wedge(y).value().abs() / d
    } else {
        0.0
    }
}

/// `γ/β` for 1-forms assumed proportional, evaluated through the larger component of `β`.
fn ratio(gamma: &ChartOneForm, beta: &ChartOneForm) -> Result<MultiJet> {
    let [ba, bb] = beta.values();
    Ok(if ba.abs() >= bb.abs() {
        gamma.a * beta.a.recip()?
    } else {
        gamma.b * beta.b.recip()?
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Frame coefficients at `p`. Errors: `DegenerateExpansionBasis` where `ω²₁∧ω³₁` vanishes,
/// plus the pair-frame errors.
pub fn frame_coefficients(pair: &SurfacePair, p: ChartPoint) -> Result<FrameCoefficients> {
    let (j, mc, mch) = pair_maurer_cartan(pair, p, 1)?;
    let (w21, w31) = (mc.omega[1][0], mc.omega[2][0]);
    let degenerate = || Error::DegenerateExpansionBasis(p);
    let (s, t) = expand_in_basis(&mc.theta[0], &w21, &w31).ok_or_else(degenerate)?;
    let (u, v) = expand_in_basis(&mc.omega[2][1], &w21, &w31).ok_or_else(degenerate)?;
    let (x, y) = expand_in_basis(&mch.omega[2][1], &w21, &w31).ok_or_else(degenerate)?;
    let alpha = ratio(&mc.omega[0][1], &w21)?;
    let beta = ratio(&mc.omega[0][2], &w31)?;

    let (a, ahat, w) = (j.a.value(), j.ahat.value(), j.w.value());
    let (g, _) = pair_gw(pair, p, 0)?;
    let h = g.det_theta_h.value();
    let c = 1.0 - a * ahat;
    let (s, t, u, v, x, y) = (s.value(), t.value(), u.value(), v.value(), x.value(), y.value());
    let s_pred = ahat * w * u / c + v;
    let x_pred = -(c * c / (w * w * h)) * u;
    let beta_relation = (a.abs() > A_ZERO_TOL).then(|| rel(beta.value(), ahat * w * w * alpha.value() / (a * c)));
    let scale = norm(&w21) + norm(&w31);
    let [o1, o2] = mc.omega[0][0].values();
    Ok(FrameCoefficients {
        point: p,
        s,
        t,
        u,
        v,
        alpha: alpha.value(),
        beta: beta.value(),
        x,
        y,
        d_alpha: alpha.gradient()?,
        d_beta: beta.gradient()?,
        a,
        ahat,
        w,
        h,
        alpha_consistency: alignment(&mc.omega[0][1], &w21),
        beta_consistency: alignment(&mc.omega[0][2], &w31),
        s_relation: rel(s, s_pred),
        x_relation: rel(x, x_pred),
        beta_relation,
        omega11: if scale > 0.0 {
            o1.abs().max(o2.abs()) / scale
        } else {
            0.0
        },
    })
}
