//! Synthetic pairs: designed transversal fields with prescribed `A`, `Â`, `W`, focal pairs of
//! tangent-line congruences, parallel-transversal pairs, and single-condition spoilers.
//!
//! Designed transversals. Pick a plane field with normal `N_P` and let `N`, `N̂` be the unit
//! normals of `f`, `f̂`. Then `w = N_P × N` is tangent to `f`, `ŵ = N_P × N̂` is tangent to `f̂`,
//! and
//!
//! ```text
//! ξ = a ŵ + Â₀ c w,    ξ̂ = c w + A₀ a ŵ
//! ```
//!
//! give `A = A₀`, `Â = Â₀`, `W = a c (1 − A₀Â₀) det(v₁, ŵ, w)`, and both fields lie in the
//! plane `N_P^⊥`. With `N_P = ∂u v₁ × ∂v v₁` that plane contains `dv₁`, which is condition 6°.

use nalgebra::Vector3;

use super::classical::make_classical_pair;
use super::surfaces;
use crate::backlund::{tangency_residual, SurfacePair, PARALLEL_TOL};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{ChartPoint, Domain, ScalarField, SurfaceMap, TransversalField, Vec3J};
use crate::jets::{MultiJet, Var};

/// Plane field `N_P` for designed transversals.
#[derive(Clone, Debug)]
pub enum PlaneChoice {
    /// `N_P = ∂u v₁ × ∂v v₁` (satisfies 6°).
    SpanDv1,
    /// A constant normal.
    Constant(Vector3<f64>),
    /// `N_P = (N + t f_u/|f_u|) × N̂`, a tilt of the plane spanned by the two normals.
    Tilted(f64),
}

/// How the scale factors `a`, `c` are chosen.
#[derive(Clone, Debug)]
pub enum Scaling {
    /// Prescribed fields `a`, `c`.
    Fields { a: ScalarField, c: ScalarField },
    /// `a = 1` and `c = W₀ / ((1 − A₀Â₀) det(v₁, ŵ, w))`, so that `W ≡ W₀`.
    ConstantW(f64),
}

/// Recipe for a designed pair of transversal fields.
#[derive(Clone, Debug)]
pub struct DesignedTransversals {
    pub plane: PlaneChoice,
    pub a0: f64,
    pub ahat0: f64,
    pub scaling: Scaling,
}

fn unit_normal(x: &Vec3J) -> Result<Vec3J> {
    let n = x.derivative(Var::U)?.cross(&x.derivative(Var::V)?);
    Ok(n.normalized()?)
}

impl DesignedTransversals {
    /// Jets `(ξ, ξ̂)` of order `k` at `p`.
    fn jets(&self, f: &SurfaceMap, fhat: &SurfaceMap, p: ChartPoint, k: usize) -> Result<(Vec3J, Vec3J)> {
        let fj = f.jets(p, k + 1)?;
        let fh = fhat.jets(p, k + 1)?;
        let n = unit_normal(&fj)?;
        let nh = unit_normal(&fh)?;
        let v1 = fh - fj;
        let np = match &self.plane {
            PlaneChoice::SpanDv1 => v1.derivative(Var::U)?.cross(&v1.derivative(Var::V)?),
            PlaneChoice::Constant(x) => Vec3J::constant(x, k),
            PlaneChoice::Tilted(t) => {
                let fu = fj.derivative(Var::U)?.normalized()?;
                (n.truncate(k) + fu.scale(*t)).cross(&nh)
            }
        };
        let (n, nh, v1) = (n.truncate(k), nh.truncate(k), v1.truncate(k));
        let w = np.cross(&n);
        let wh = np.cross(&nh);
        let (a, c) = match &self.scaling {
            Scaling::Fields { a, c } => (a.jets(p, k)?, c.jets(p, k)?),
            Scaling::ConstantW(w0) => {
                let d0 = v1.det(&wh, &w);
                let c = d0.recip()? * (w0 / (1.0 - self.a0 * self.ahat0));
                (MultiJet::constant(1.0, k), c)
            }
        };
        let xi = wh.scale_jet(&a) + w.scale_jet(&(c * self.ahat0));
        let xih = w.scale_jet(&c) + wh.scale_jet(&(a * self.a0));
        Ok((xi, xih))
    }

    /// The pair `(f, f̂)` equipped with the designed fields.
    pub fn equip(&self, label: &str, f: &SurfaceMap, fhat: &SurfaceMap, domain: Domain) -> SurfacePair {
        let (d1, f1, g1) = (self.clone(), f.clone(), fhat.clone());
        let xi = TransversalField::new(crate::geometry::Provenance::Explicit, move |p, k| {
            Ok(d1.jets(&f1, &g1, p, k)?.0)
        });
        let (d2, f2, g2) = (self.clone(), f.clone(), fhat.clone());
        let xih = TransversalField::new(crate::geometry::Provenance::Explicit, move |p, k| {
            Ok(d2.jets(&f2, &g2, p, k)?.1)
        });
        SurfacePair::new(label, f.clone(), fhat.clone(), xi, xih, domain)
    }
}

/// Tangent-line congruence `e = (1, φ, g_u + φ g_v)` along the graph `f = (u, v, g)`, and its
/// second focal surface `f̂ = f + t* e` with
/// `t* = −[det(f_u, e_v, e) + det(e_u, f_v, e)] / det(e_u, e_v, e)`.
#[derive(Clone, Debug)]
pub struct FocalCongruence {
    pub g: Expr,
    pub phi: Expr,
}

impl FocalCongruence {
    /// Jets of `(f, e)` of order `k`.
    fn base(&self, p: ChartPoint, k: usize) -> Result<(Vec3J, Vec3J)> {
        let (u, v) = p.vars(k + 1);
        let g = self.g.eval_jet(&u, &v)?;
        let phi = self.phi.eval_jet(&u, &v)?.truncate(k);
        let (gu, gv) = (g.derivative(Var::U)?, g.derivative(Var::V)?);
        let f = Vec3J::new(u, v, g).truncate(k);
        let e = Vec3J::new(MultiJet::constant(1.0, k), phi, gu + phi * gv);
        Ok((f, e))
    }

    /// Focal parameter `t*` as a jet of order `k`.
    pub fn focal_parameter(&self, p: ChartPoint, k: usize) -> Result<MultiJet> {
        let (f, e) = self.base(p, k + 1)?;
        let (fu, fv) = (f.derivative(Var::U)?, f.derivative(Var::V)?);
        let (eu, ev) = (e.derivative(Var::U)?, e.derivative(Var::V)?);
        let e = e.truncate(k);
        let lin = fu.det(&ev, &e) + eu.det(&fv, &e);
        let quad = eu.det(&ev, &e);
        Ok(-(lin * quad.recip()?))
    }

    pub fn surfaces(&self, domain: Domain) -> (SurfaceMap, SurfaceMap) {
        let c1 = self.clone();
        let f = SurfaceMap::new("focal-f", domain, move |p, k| Ok(c1.base(p, k)?.0));
        let c2 = self.clone();
        let fhat = SurfaceMap::new("focal-fhat", domain, move |p, k| {
            let (f, e) = c2.base(p, k)?;
            let t = c2.focal_parameter(p, k)?;
            Ok(f + e.scale_jet(&t))
        });
        (f, fhat)
    }
}

fn parse(src: &str) -> Expr {
    crate::expr::parse_expr(src).expect("built-in expression parses")
}

/// Focal congruence `g = (u² + 2v²)/2 + u³/10`, `φ = k + a(u − v)`.
pub fn focal_congruence(k: f64, a: f64) -> FocalCongruence {
    FocalCongruence {
        g: parse("(u^2 + 2*v^2)/2 + u^3/10"),
        phi: parse(&format!("({k}) + ({a})*(u - v)")),
    }
}

/// Chart domain of the focal spoiler.
pub const FOCAL_DOMAIN: Domain = Domain::new(-0.3, 0.3, -0.3, 0.3);

/// Chart domain of the parallel-transversal pair.
pub const PARALLEL_DOMAIN: Domain = Domain::new(-0.1, 0.1, -0.1, 0.1);

/// Slope `a` of the congruence used by the parallel-transversal pair.
pub const PARALLEL_SLOPE: f64 = 0.5;

/// Parallel-transversal pair: a focal pair with `ξ = e₃` and `ξ̂ = e₃/λ₀`.
pub fn make_parallel_pair(lambda0: f64, k: f64) -> Result<SurfacePair> {
    if !(lambda0.is_finite() && lambda0 != 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "lambda".into(),
            value: lambda0,
        });
    }
    let (f, fhat) = focal_congruence(k, PARALLEL_SLOPE).surfaces(PARALLEL_DOMAIN);
    let e3 = Vector3::new(0.0, 0.0, 1.0);
    let pair = SurfacePair::new(
        format!("parallel(λ={lambda0}, k={k})"),
        f,
        fhat,
        TransversalField::constant(e3),
        TransversalField::constant(e3 / lambda0),
        PARALLEL_DOMAIN,
    );
    validate_pair(&pair, true)?;
    Ok(pair)
}

/// Tangency (and optionally parallelism) on a 9×9 grid.
fn validate_pair(pair: &SurfacePair, parallel: bool) -> Result<()> {
    for p in pair.domain.grid(9, 9) {
        let f = pair.f.jets(p, 1)?;
        let fh = pair.fhat.jets(p, 1)?;
        let v1 = fh.value() - f.value();
        let t = tangency_residual(&v1, &f.derivative(Var::U)?.value(), &f.derivative(Var::V)?.value()).max(
            tangency_residual(&v1, &fh.derivative(Var::U)?.value(), &fh.derivative(Var::V)?.value()),
        );
        if !(t < 1e-10) {
            return Err(Error::ConstructionFailed(format!(
                "{}: tangency residual {t:.3e} at {p}",
                pair.label
            )));
        }
        if parallel {
            let (x, xh) = (pair.xi.value(p)?, pair.xihat.value(p)?);
            let r = x.cross(&xh).norm() / (x.norm() * xh.norm());
            if !(r < PARALLEL_TOL) {
                return Err(Error::ConstructionFailed(format!(
                    "{}: parallelism residual {r:.3e} at {p}",
                    pair.label
                )));
            }
        }
    }
    Ok(())
}

/// Spoiler of 1°: `f̂ − f = (1, u, v)` is not tangent; everything else holds.
pub fn spoiler_1() -> SurfacePair {
    let dom = Domain::new(-0.5, 0.5, -0.5, 0.5);
    let f = surfaces::elliptic_paraboloid().with_domain(dom);
    let fhat = SurfaceMap::new("paraboloid + (1, u, v)", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u + 1.0, v + u, (u * u + v * v) * 0.5 + v))
    });
    let design = DesignedTransversals {
        plane: PlaneChoice::Constant(Vector3::new(1.0, 0.0, 0.0)),
        a0: 0.5,
        ahat0: 0.5,
        scaling: Scaling::ConstantW(-0.75),
    };
    design.equip("spoiler-1", &f, &fhat, dom)
}

/// Spoiler of 2°: `f̂ − f = L(1, 0, v)` on the saddle `z = uv`, so `∂u v₁ = 0`.
pub fn spoiler_2(l: f64) -> SurfacePair {
    let dom = Domain::new(-0.5, 0.5, -0.5, 0.5);
    let f = SurfaceMap::new("saddle z = uv", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, u * v))
    });
    let fhat = SurfaceMap::new("saddle + L(1, 0, v)", dom, move |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u + l, v, u * v + v * l))
    });
    let design = DesignedTransversals {
        plane: PlaneChoice::Constant(Vector3::new(1.0, 0.0, 0.0)),
        a0: 0.5,
        ahat0: 0.5,
        scaling: Scaling::ConstantW(0.75),
    };
    design.equip("spoiler-2", &f, &fhat, dom)
}

/// Spoiler of 3°: the classical pair with `ξ̂ = ξ`, so `W ≡ 0` (and `1 − AÂ ≡ 0`).
pub fn spoiler_3(sigma: f64, l: f64) -> Result<SurfacePair> {
    let c = make_classical_pair(sigma, l)?;
    let mut p = c.with_transversals(c.xi.clone(), c.xi.clone());
    p.label = "spoiler-3".into();
    Ok(p)
}

/// Spoiler of 4°: the classical pair with `ξ̂` scaled by `1 + u/10`.
pub fn spoiler_4(sigma: f64, l: f64) -> Result<SurfacePair> {
    let c = make_classical_pair(sigma, l)?;
    let xh = c.xihat.clone();
    let scaled = TransversalField::new(crate::geometry::Provenance::Explicit, move |p, k| {
        let (u, _) = p.vars(k);
        Ok(xh.jets(p, k)?.scale_jet(&(u * 0.1 + 1.0)))
    });
    let mut p = c.with_transversals(c.xi.clone(), scaled);
    p.label = "spoiler-4".into();
    Ok(p)
}

/// Spoiler of 5°: a focal pair (ψ ≠ 1) with designed transversals satisfying 1°–4°, 6°, 7°.
pub fn spoiler_5() -> SurfacePair {
    let (f, fhat) = focal_congruence(0.3, 1.0).surfaces(FOCAL_DOMAIN);
    let design = DesignedTransversals {
        plane: PlaneChoice::SpanDv1,
        a0: 0.5,
        ahat0: 0.5,
        scaling: Scaling::ConstantW(1.0),
    };
    design.equip("spoiler-5", &f, &fhat, FOCAL_DOMAIN)
}

/// Spoiler of 6°: the classical pair with transversals in a tilted plane, `W` constant.
pub fn spoiler_6(sigma: f64, l: f64) -> Result<SurfacePair> {
    let c = make_classical_pair(sigma, l)?;
    let design = DesignedTransversals {
        plane: PlaneChoice::Tilted(0.3),
        a0: sigma.cos(),
        ahat0: sigma.cos(),
        scaling: Scaling::ConstantW(1.0),
    };
    Ok(design.equip("spoiler-6", &c.f, &c.fhat, c.domain))
}

/// Spoiler of 7°: the classical pair with designed transversals `a = a(u)`, `c = c(v)`, so `W`
/// and `H` vary independently.
pub fn spoiler_7(sigma: f64, l: f64) -> Result<SurfacePair> {
    let c = make_classical_pair(sigma, l)?;
    let design = DesignedTransversals {
        plane: PlaneChoice::SpanDv1,
        a0: sigma.cos(),
        ahat0: sigma.cos(),
        scaling: Scaling::Fields {
            a: ScalarField::new(|p, k| Ok(p.vars(k).0 * 0.2 + 1.0)),
            c: ScalarField::new(|p, k| Ok(p.vars(k).1 * 0.3 + 1.0)),
        },
    };
    Ok(design.equip("spoiler-7", &c.f, &c.fhat, c.domain))
}

/// The classical pair with `ξ` rescaled by a constant.
pub fn rescaled_classical(sigma: f64, l: f64, c: f64) -> Result<SurfacePair> {
    if !(c.is_finite() && c != 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "c".into(),
            value: c,
        });
    }
    let pair = make_classical_pair(sigma, l)?;
    let mut p = pair.with_transversals(pair.xi.scaled(c), pair.xihat.clone());
    p.label = format!("rescaled(c={c})");
    Ok(p)
}

/// `f̂ = f + ξ` on the paraboloid with `ξ = e₃`: violates tangency.
pub fn transversal_offset() -> SurfacePair {
    let f = surfaces::elliptic_paraboloid();
    let dom = f.domain;
    let fhat = SurfaceMap::new("paraboloid + e3", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, (u * u + v * v) * 0.5 + 1.0))
    });
    let e3 = TransversalField::constant(Vector3::new(0.0, 0.0, 1.0));
    SurfacePair::new("offset", f, fhat, e3.clone(), e3, dom)
}

/// `f̂ = f + e₁/2` on the cylinder `z = v²`: the direction of `f̂ − f` is constant.
pub fn constant_direction() -> SurfacePair {
    let dom = Domain::new(-1.0, 1.0, -1.0, 1.0);
    let f = SurfaceMap::new("cylinder z = v^2", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, v * v))
    });
    let fhat = SurfaceMap::new("cylinder + e1/2", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u + 0.5, v, v * v))
    });
    let e3 = TransversalField::constant(Vector3::new(0.0, 0.0, 1.0));
    SurfacePair::new("constant-direction", f, fhat, e3.clone(), e3, dom)
}

/// Convex paraboloid over a saddle (`ε ≠ ε̂`), both with `ξ = e₃`.
pub fn mixed_convexity() -> SurfacePair {
    let f = surfaces::elliptic_paraboloid();
    let dom = f.domain;
    let fhat = SurfaceMap::new("saddle + e3", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, (u * u - v * v) * 0.5 + 1.0))
    });
    let e3 = TransversalField::constant(Vector3::new(0.0, 0.0, 1.0));
    SurfacePair::new("mixed-convexity", f, fhat, e3.clone(), e3, dom)
}

/// Two stacked saddles (`ε = ε̂ = −1`, so `Â + εA = 0` for their Blaschke normals).
pub fn saddle_stack() -> SurfacePair {
    let f = surfaces::hyperbolic_paraboloid();
    let dom = f.domain;
    let fhat = SurfaceMap::new("saddle + e3", dom, |p, k| {
        let (u, v) = p.vars(k);
        Ok(Vec3J::new(u, v, (u * u - v * v) * 0.5 + 1.0))
    });
    let e3 = TransversalField::constant(Vector3::new(0.0, 0.0, 1.0));
    SurfacePair::new("saddle-stack", f, fhat, e3.clone(), e3, dom)
}

/// Helper for tests and tools: evaluate a scalar jet function at a point.
pub fn scalar_at(f: &ScalarField, p: ChartPoint) -> Result<f64> {
    Ok(f.jets(p, 0)?.value())
}
