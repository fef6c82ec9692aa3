//! The classical Bäcklund pair: the pseudosphere (one-soliton of the sine-Gordon equation in
//! asymptotic coordinates) and its transform with angle `σ`, scaled to line length `L`.
//!
//! With `a = cot(σ/2)`, `x = (u + v)/2`, `y = (u − v)/2`, `ω = −4 atan(eᵘ)` and
//!
//! ```text
//! ω̃ = 4 atan( ((a + 1)/(a − 1)) · (eᵘ − e^{ax + y/a}) / (1 + eᵘ e^{ax + y/a}) )
//! ```
//!
//! (limit `ω̃ = −4 atan(v sech u)` at `a = 1`), the transform is `f̂ = f + sin σ · T` with the
//! unit tangent
//!
//! ```text
//! T = ( sin((ω − ω̃)/2)(f_u + f_v) + sin((ω + ω̃)/2)(f_u − f_v) ) / sin ω.
//! ```
//!
//! Both surfaces have Gaussian curvature `−sin²σ/L²` after scaling by `L/sin σ`. The pair is
//! accepted only after checking `|f̂ − f| = L`, tangency, and the normal angle on a 9×9 grid.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::surfaces::pseudosphere_jets;
use crate::backlund::{tangency_residual, SurfacePair};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Domain, SurfaceMap, TransversalField, Vec3J};
use crate::jets::{MultiJet, Var};

/// Tolerance of the self-validation checks.
pub const VALIDATION_TOL: f64 = 1e-8;
/// Chart range of `u` (away from the pseudosphere cusp).
const U_RANGE: (f64, f64) = (0.5, 2.5);
/// Minimum of `|sin ω̃|` along `u` required for a `v` value to be admitted.
const MIN_SIN_OMEGA: f64 = 0.15;
/// Fraction of the admitted `v` interval trimmed from each end.
const V_TRIM: f64 = 0.05;
/// `|a − 1|` below which the `a = 1` limit formula for `ω̃` is used.
const LIMIT_TOL: f64 = 1e-6;

fn tilde_omega_value(a: f64, u: f64, v: f64) -> f64 {
    if (a - 1.0).abs() < LIMIT_TOL {
        return -4.0 * (v / u.cosh()).atan();
    }
    let (x, y) = (0.5 * (u + v), 0.5 * (u - v));
    let (e1, e2) = (u.exp(), (a * x + y / a).exp());
    4.0 * ((a + 1.0) / (a - 1.0) * (e1 - e2) / (1.0 + e1 * e2)).atan()
}

fn tilde_omega(a: f64, u: &MultiJet, v: &MultiJet) -> Result<MultiJet> {
    if (a - 1.0).abs() < LIMIT_TOL {
        return Ok((*v * u.sech()?).atan()? * -4.0);
    }
    let x = (*u + *v) * 0.5;
    let y = (*u - *v) * 0.5;
    let e1 = u.exp()?;
    let e2 = (x * a + y * (1.0 / a)).exp()?;
    let q = (e1 - e2) * (e1 * e2 + 1.0).recip()? * ((a + 1.0) / (a - 1.0));
    Ok(q.atan()? * 4.0)
}

/// The `v` interval on which `|sin ω̃| ≥ 0.15` along the whole `u` range (longest run over
/// `v ∈ [−3, 3]`), trimmed by 5% on each side.
pub fn classical_domain(sigma: f64) -> Result<Domain> {
    let a = 1.0 / (0.5 * sigma).tan();
    let (nu, nv) = (200usize, 601usize);
    let mut best: Option<(f64, f64)> = None;
    let mut cur: Option<(f64, f64)> = None;
    for j in 0..nv {
        let v = -3.0 + 6.0 * j as f64 / (nv - 1) as f64;
        let ok = (0..nu).all(|i| {
            let u = U_RANGE.0 + (U_RANGE.1 - U_RANGE.0) * i as f64 / (nu - 1) as f64;
            tilde_omega_value(a, u, v).sin().abs() > MIN_SIN_OMEGA
        });
        if ok {
            let c = cur.map_or((v, v), |(lo, _)| (lo, v));
            cur = Some(c);
            if best.is_none_or(|(lo, hi)| c.1 - c.0 > hi - lo) {
                best = Some(c);
            }
        } else {
            cur = None;
        }
    }
    let (lo, hi) = best
        .filter(|(lo, hi)| hi > lo)
        .ok_or_else(|| Error::ConstructionFailed(format!("no admissible v-interval for σ = {sigma}")))?;
    let trim = V_TRIM * (hi - lo);
    Ok(Domain::new(U_RANGE.0, U_RANGE.1, lo + trim, hi - trim))
}

/// Jets of `(f, f̂)` of order `k` at `p` (unscaled pseudosphere chart).
fn pair_surfaces(sigma: f64, p: ChartPoint, k: usize) -> Result<(Vec3J, Vec3J)> {
    let a = 1.0 / (0.5 * sigma).tan();
    let (u, v) = p.vars(k);
    let f = pseudosphere_jets(&u, &v)?;
    // explicit first derivatives keep f̂ at the same order as f
    let (s, th) = (u.sech()?, u.tanh()?);
    let (cv, sv) = (v.cos()?, v.sin()?);
    let fu = Vec3J::new(-(th * s * cv), -(th * s * sv), th * th);
    let fv = Vec3J::new(-(s * sv), s * cv, MultiJet::zero(k));
    let w = u.exp()?.atan()? * -4.0;
    let wt = tilde_omega(a, &u, &v)?;
    let c1 = ((w - wt) * 0.5).sin()?;
    let c2 = ((w + wt) * 0.5).sin()?;
    let inv = w.sin()?.recip()?;
    let t = ((fu + fv).scale_jet(&c1) + (fu - fv).scale_jet(&c2)).scale_jet(&inv);
    Ok((f, f + t.scale(sigma.sin())))
}

/// The classical pair with Euclidean unit normals as transversal fields, `ξ̂` oriented so that
/// `⟨ξ, ξ̂⟩ = cos σ`.
///
/// Errors: `ParamOutOfRange` unless `0 < σ < π` and `L > 0`; `ConstructionFailed` when the
/// self-validation fails.
pub fn make_classical_pair(sigma: f64, l: f64) -> Result<SurfacePair> {
    if !(sigma > 0.0 && sigma < PI) {
        return Err(Error::ParamOutOfRange {
            name: "sigma".into(),
            value: sigma,
        });
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "L".into(),
            value: l,
        });
    }
    let domain = classical_domain(sigma)?;
    let scale = l / sigma.sin();
    let f = SurfaceMap::new("classical-f", domain, move |p, k| {
        Ok(pair_surfaces(sigma, p, k)?.0.scale(scale))
    });
    let fhat = SurfaceMap::new("classical-fhat", domain, move |p, k| {
        Ok(pair_surfaces(sigma, p, k)?.1.scale(scale))
    });
    let n = TransversalField::euclidean_unit_normal(&f);
    let nh = TransversalField::euclidean_unit_normal(&fhat);
    let center = domain.center();
    let d = n.value(center)?.dot(&nh.value(center)?);
    let mut notes = Vec::new();
    let xihat = if d * sigma.cos() < 0.0 { nh.negated() } else { nh };
    if sigma.cos().abs() < 1e-12 {
        notes.push("σ = π/2: A = Â = 0, so condition 4° cannot hold".to_string());
    }
    let mut pair = SurfacePair::new(format!("classical(σ={sigma}, L={l})"), f, fhat, n, xihat, domain);
    pair.notes = notes;
    validate_classical(&pair, sigma, l)?;
    Ok(pair)
}

fn validate_classical(pair: &SurfacePair, sigma: f64, l: f64) -> Result<()> {
    let fail = |what: &str, p: ChartPoint, r: f64| {
        Err(Error::ConstructionFailed(format!(
            "classical pair: {what} residual {r:.3e} at {p}"
        )))
    };
    for p in pair.domain.grid(9, 9) {
        let f = pair.f.jets(p, 1)?;
        let fh = pair.fhat.jets(p, 1)?;
        let v1: Vector3<f64> = fh.value() - f.value();
        let r = (v1.norm() - l).abs() / l;
        if !(r < VALIDATION_TOL) {
            return fail("length", p, r);
        }
        let t = tangency_residual(&v1, &f.derivative(Var::U)?.value(), &f.derivative(Var::V)?.value()).max(
            tangency_residual(&v1, &fh.derivative(Var::U)?.value(), &fh.derivative(Var::V)?.value()),
        );
        if !(t < VALIDATION_TOL) {
            return fail("tangency", p, t);
        }
        let c = pair.xi.value(p)?.dot(&pair.xihat.value(p)?);
        let r = (c - sigma.cos()).abs();
        if !(r < VALIDATION_TOL) {
            return fail("normal angle", p, r);
        }
    }
    Ok(())
}
