//! Affine minimality (`tr S = 0` for the Blaschke shape operator) and the frame identities
//! satisfied by pairs with parallel transversal fields.

use serde::{Deserialize, Serialize};

use super::pair::pair_jets;
use super::SurfacePair;
use crate::error::{Error, Result};
use crate::forms::{maurer_cartan_from_jets, ChartOneForm, FrameJets};
use crate::geometry::{blaschke_jets, gauss_weingarten_jets, ChartPoint, Orientation, SurfaceMap};
use crate::jets::MultiJet;

/// `tr S` of the Blaschke normal computed two ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityCheck {
    pub point: ChartPoint,
    /// Trace of the shape operator from the Weingarten formula.
    pub tr_s: f64,
    /// `−(−ϑ²∧ω¹₃ + ϑ¹∧ω²₃) / (ϑ¹∧ϑ²)` in the frame `(f; f_u, f_v, ξ)`.
    pub proxy: f64,
    /// `|tr_s − proxy| / (1 + |tr_s|)`.
    pub agreement: f64,
}

/// Affine minimality data of `f` at `p` with the positively oriented Blaschke normal.
/// Errors: `DegenerateSurface` and the jet/frame errors.
pub fn affine_minimality(f: &SurfaceMap, p: ChartPoint) -> Result<MinimalityCheck> {
    let (xi, _) = blaschke_jets(f, p, 1, Orientation::Positive)?;
    let fj = f.jets(p, 3)?;
    let g = gauss_weingarten_jets(&fj, &xi, p)?;
    let d = g.to_data();
    let tr_s = d.shape[0][0] + d.shape[1][1];

    let f1 = fj.truncate(2);
    let frame = FrameJets {
        base: f1,
        cols: [
            f1.derivative(crate::jets::Var::U)?,
            f1.derivative(crate::jets::Var::V)?,
            xi,
        ],
    };
    let mc = maurer_cartan_from_jets(&frame, p)?;
    let two_form = mc.theta[0].wedge(&mc.omega[1][2]) - mc.theta[1].wedge(&mc.omega[0][2]);
    let vol = mc.theta[0].wedge(&mc.theta[1]).value();
    let proxy = -two_form.value() / vol;
    Ok(MinimalityCheck {
        point: p,
        tr_s,
        proxy,
        agreement: (tr_s - proxy).abs() / (1.0 + tr_s.abs()),
    })
}

/// Residuals of `β(ϑ² + ω²₁) − λω³₁ = 0` and `βω²₃ + dλ = 0` for a pair with `ξ̂ = ξ/λ`, in the
/// frame `(f; v₁, f_*X₂, ξ)` with the canonical unimodular `X₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernTerngResiduals {
    pub point: ChartPoint,
    pub lambda: f64,
    pub beta: f64,
    /// Relative residual of `β(ϑ² + ω²₁) − λω³₁`.
    pub first: f64,
    /// Relative residual of `βω²₃ + dλ`.
    pub second: f64,
}

fn form_norm(w: &ChartOneForm) -> f64 {
    let [a, b] = w.values();
    a.hypot(b)
}

fn relative(res: &ChartOneForm, scale: f64) -> f64 {
    let r = form_norm(res);
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Evaluate the parallel-pair frame identities at `p`. Errors: `NotTangent`, `NotParallel`,
/// `BetaZero`, and the frame errors.
pub fn chern_terng_identities(pair: &SurfacePair, p: ChartPoint) -> Result<ChernTerngResiduals> {
    // validates tangency, parallelism and β ≠ 0
    super::parallel::parallel_transversal_criterion(pair, p)?;
    let j = pair_jets(pair, p, 1)?;
    let [pp, qq] = j.x1;
    let s = ((pp * pp + qq * qq) * j.theta12).recip()?;
    let x2 = [-(qq * s), pp * s];
    let fx2 = j.fu.scale_jet(&x2[0]) + j.fv.scale_jet(&x2[1]);
    let lambda: MultiJet = j.xi.norm_sq() * j.xi.dot(&j.xihat).recip()?;
    let beta = -j.nuhat.dot(&fx2);
    if beta.value() == 0.0 {
        return Err(Error::BetaZero(p));
    }
    let mc = maurer_cartan_from_jets(
        &FrameJets {
            base: j.f,
            cols: [j.v1, fx2, j.xi],
        },
        p,
    )?;
    let (b, l) = (beta.truncate(0), lambda.truncate(0));
    let lhs = mc.theta[1].add(&mc.omega[1][0]);
    let r1 = lhs.scale(&b).sub(&mc.omega[2][0].scale(&l));
    let dl = ChartOneForm::exact(&lambda)?;
    let r2 = mc.omega[1][2].scale(&b).add(&dl);
    let first = relative(
        &r1,
        b.value().abs() * form_norm(&lhs) + l.value().abs() * form_norm(&mc.omega[2][0]),
    );
    let second = relative(&r2, b.value().abs() * form_norm(&mc.omega[1][2]) + form_norm(&dl));
    Ok(ChernTerngResiduals {
        point: p,
        lambda: lambda.value(),
        beta: beta.value(),
        first,
        second,
    })
}
