//! Analytic surfaces with closed-form jets.

use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::{Domain, SurfaceMap, Vec3J};
use crate::jets::MultiJet;

/// `(u, v, (u² + v²)/2)` on `[−1, 1]²`.
pub fn elliptic_paraboloid() -> SurfaceMap {
    SurfaceMap::new("elliptic-paraboloid", Domain::new(-1.0, 1.0, -1.0, 1.0), |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, (u * u + v * v) * 0.5))
    })
}

/// `(u, v, (u² − v²)/2)` on `[−1, 1]²`.
pub fn hyperbolic_paraboloid() -> SurfaceMap {
    SurfaceMap::new("hyperbolic-paraboloid", Domain::new(-1.0, 1.0, -1.0, 1.0), |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, (u * u - v * v) * 0.5))
    })
}

/// `(cos u cos v, sin u cos v, sin v)` with longitude `u ∈ [−1.5, 1.5]` and latitude
/// `v ∈ [−1.2, 1.2]` (kept ≈ 0.37 rad away from the poles).
pub fn unit_sphere() -> SurfaceMap {
    SurfaceMap::new("unit-sphere", Domain::new(-1.5, 1.5, -1.2, 1.2), |p, k| {
        let (u, v) = p.vars(k);
        let cv = v.cos()?;
        Ok(Vec3J::new(u.cos()? * cv, u.sin()? * cv, v.sin()?))
    })
}

/// `(sech u cos v, sech u sin v, u − tanh u)` on `u ∈ [0.5, 2.5]`, `v ∈ [−1.5, 1.5]`
/// (away from the cusp at `u = 0`).
pub fn pseudosphere() -> SurfaceMap {
    SurfaceMap::new("pseudosphere", Domain::new(0.5, 2.5, -1.5, 1.5), |p, k| {
        let (u, v) = p.vars(k);
        pseudosphere_jets(&u, &v)
    })
}

pub(crate) fn pseudosphere_jets(u: &MultiJet, v: &MultiJet) -> Result<Vec3J> {
    let s = u.sech()?;
    Ok(Vec3J::new(s * v.cos()?, s * v.sin()?, *u - u.tanh()?))
}

/// The graph `(u, v, g(u, v))` of a parsed expression.
pub fn graph(label: &str, g: Expr, domain: Domain) -> SurfaceMap {
    SurfaceMap::new(label, domain, move |p, k| {
        let (u, v) = p.vars(k);
        let z = g.eval_jet(&u, &v)?;
        Ok(Vec3J::new(u, v, z))
    })
}
