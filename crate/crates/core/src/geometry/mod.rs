//! Single-surface affine differential geometry.
//!
//! Surfaces and transversal fields are jet evaluators: given a chart point and an order
//! they return the ambient coordinates as [`MultiJet`]s, from which all derivatives needed
//! for the Gauss–Weingarten decomposition are read off exactly.

mod blaschke;
mod change;
pub(crate) mod gw;
mod vec3;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jets::{MultiJet, Var};

pub use blaschke::{blaschke_jets, blaschke_normal, degeneracy_ratio, Orientation, DEGENERACY_TOL};
pub use change::{transversal_change, transversal_change_jets};
pub use gw::{conormal, gauss_weingarten, gauss_weingarten_jets, GaussWeingartenData, GwJets};
pub use vec3::Vec3J;

/// A point of the chart rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        ChartPoint { u, v }
    }

    /// Jets of the coordinate functions at this point.
    pub fn vars(&self, order: usize) -> (MultiJet, MultiJet) {
        (
            MultiJet::variable(self.u, Var::U, order),
            MultiJet::variable(self.v, Var::V, order),
        )
    }

    pub fn offset(&self, du: f64, dv: f64) -> Self {
        ChartPoint::new(self.u + du, self.v + dv)
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u={:.6}, v={:.6})", self.u, self.v)
    }
}

/// Chart rectangle `[u0,u1] × [v0,v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub const fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Domain { u0, u1, v0, v1 }
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        p.u >= self.u0 && p.u <= self.u1 && p.v >= self.v0 && p.v <= self.v1
    }

    /// True when the square of half-width `w` around `p` stays inside the domain.
    pub fn contains_stencil(&self, p: ChartPoint, w: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.size());
        p.u - w >= self.u0 - slack
            && p.u + w <= self.u1 + slack
            && p.v - w >= self.v0 - slack
            && p.v + w <= self.v1 + slack
    }

    /// The larger side length.
    pub fn size(&self) -> f64 {
        (self.u1 - self.u0).max(self.v1 - self.v0)
    }

    pub fn center(&self) -> ChartPoint {
        ChartPoint::new(0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))
    }

    /// Uniform `nu × nv` node grid including the boundary, ordered row-major in `(i, j)`
    /// with `u` index `i` varying slowest.
    pub fn grid(&self, nu: usize, nv: usize) -> Vec<ChartPoint> {
        let mut pts = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                pts.push(self.node(i, j, nu, nv));
            }
        }
        pts
    }

    /// Node `(i, j)` of the uniform `nu × nv` grid.
    pub fn node(&self, i: usize, j: usize, nu: usize, nv: usize) -> ChartPoint {
        let t = |k: usize, n: usize| if n <= 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
        ChartPoint::new(
            self.u0 + t(i, nu) * (self.u1 - self.u0),
            self.v0 + t(j, nv) * (self.v1 - self.v0),
        )
    }

    /// Domain shrunk by the fraction `m` of each side on every edge.
    pub fn shrunk(&self, m: f64) -> Domain {
        let du = m * (self.u1 - self.u0);
        let dv = m * (self.v1 - self.v0);
        Domain::new(self.u0 + du, self.u1 - du, self.v0 + dv, self.v1 - dv)
    }
}

/// Jet evaluator of an ambient vector-valued chart map.
pub type VecEval = dyn Fn(ChartPoint, usize) -> Result<Vec3J> + Send + Sync;
/// Jet evaluator of a scalar chart function.
pub type ScalarEval = dyn Fn(ChartPoint, usize) -> Result<MultiJet> + Send + Sync;
/// Jet evaluator of a chart tangent field `Z = Z¹∂u + Z²∂v`.
pub type TangentEval = dyn Fn(ChartPoint, usize) -> Result<[MultiJet; 2]> + Send + Sync;

/// A scalar field on the chart.
#[derive(Clone)]
pub struct ScalarField(pub Arc<ScalarEval>);

impl ScalarField {
    pub fn new(f: impl Fn(ChartPoint, usize) -> Result<MultiJet> + Send + Sync + 'static) -> Self {
        ScalarField(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::new(move |_, k| Ok(MultiJet::constant(c, k)))
    }

    pub fn jets(&self, p: ChartPoint, order: usize) -> Result<MultiJet> {
        (self.0)(p, order)
    }
}

/// A chart tangent field.
#[derive(Clone)]
pub struct TangentField(pub Arc<TangentEval>);

impl TangentField {
    pub fn new(f: impl Fn(ChartPoint, usize) -> Result<[MultiJet; 2]> + Send + Sync + 'static) -> Self {
        TangentField(Arc::new(f))
    }

    pub fn zero() -> Self {
        TangentField::new(|_, k| Ok([MultiJet::zero(k), MultiJet::zero(k)]))
    }

    pub fn jets(&self, p: ChartPoint, order: usize) -> Result<[MultiJet; 2]> {
        (self.0)(p, order)
    }
}

/// An immersion of a chart rectangle into affine 3-space.
#[derive(Clone)]
pub struct SurfaceMap {
    pub label: String,
    pub domain: Domain,
    eval: Arc<VecEval>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField")
    }
}

impl fmt::Debug for TangentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TangentField")
    }
}

impl fmt::Debug for SurfaceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceMap")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl SurfaceMap {
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        eval: impl Fn(ChartPoint, usize) -> Result<Vec3J> + Send + Sync + 'static,
    ) -> Self {
        SurfaceMap {
            label: label.into(),
            domain,
            eval: Arc::new(eval),
        }
    }

    /// Jets of the three ambient coordinates at `p`.
    pub fn jets(&self, p: ChartPoint, order: usize) -> Result<Vec3J> {
        (self.eval)(p, order)
    }

    /// Ambient position at `p`.
    pub fn point(&self, p: ChartPoint) -> Result<Vector3<f64>> {
        Ok(self.jets(p, 0)?.value())
    }

    /// The surface `x ↦ T·f(x) + b` for an ambient affine map.
    pub fn transformed(&self, t: Matrix3<f64>, b: Vector3<f64>) -> SurfaceMap {
        let inner = self.eval.clone();
        SurfaceMap {
            label: format!("affine image of {}", self.label),
            domain: self.domain,
            eval: Arc::new(move |p, k| Ok(inner(p, k)?.linear_map(&t).add_const(&b))),
        }
    }

    /// Same map on a different chart rectangle.
    pub fn with_domain(&self, domain: Domain) -> SurfaceMap {
        SurfaceMap {
            label: self.label.clone(),
            domain,
            eval: self.eval.clone(),
        }
    }

    /// Push forward a chart tangent field: `f_*Z = Z¹ f_u + Z² f_v` (order `K`).
    pub fn push_forward(&self, p: ChartPoint, z: &[MultiJet; 2], order: usize) -> Result<Vec3J> {
        let f = self.jets(p, order + 1)?;
        let fu = f.derivative(Var::U)?;
        let fv = f.derivative(Var::V)?;
        Ok(fu.scale_jet(&z[0]) + fv.scale_jet(&z[1]))
    }
}

/// Where a transversal field came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Explicit,
    EuclideanUnitNormal,
    Blaschke,
    CrossProductSeed,
}

/// A transversal vector field along an immersion.
#[derive(Clone)]
pub struct TransversalField {
    pub provenance: Provenance,
    eval: Arc<VecEval>,
}

impl fmt::Debug for TransversalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransversalField")
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl TransversalField {
    pub fn new(
        provenance: Provenance,
        eval: impl Fn(ChartPoint, usize) -> Result<Vec3J> + Send + Sync + 'static,
    ) -> Self {
        TransversalField {
            provenance,
            eval: Arc::new(eval),
        }
    }

    /// A constant ambient vector.
    pub fn constant(x: Vector3<f64>) -> Self {
        TransversalField::new(Provenance::Explicit, move |_, k| Ok(Vec3J::constant(&x, k)))
    }

    pub fn jets(&self, p: ChartPoint, order: usize) -> Result<Vec3J> {
        (self.eval)(p, order)
    }

    pub fn value(&self, p: ChartPoint) -> Result<Vector3<f64>> {
        Ok(self.jets(p, 0)?.value())
    }

    /// The seed `f_u × f_v` (the ambient volume form turned into a vector).
    pub fn cross_product_seed(f: &SurfaceMap) -> Self {
        let f = f.clone();
        TransversalField::new(Provenance::CrossProductSeed, move |p, k| {
            let j = f.jets(p, k + 1)?;
            Ok(j.derivative(Var::U)?.cross(&j.derivative(Var::V)?))
        })
    }

    /// The Euclidean unit normal `(f_u × f_v)/|f_u × f_v|`.
    pub fn euclidean_unit_normal(f: &SurfaceMap) -> Self {
        let f = f.clone();
        TransversalField::new(Provenance::EuclideanUnitNormal, move |p, k| {
            let j = f.jets(p, k + 1)?;
            let n = j.derivative(Var::U)?.cross(&j.derivative(Var::V)?);
            if n.value().norm() == 0.0 {
                return Err(crate::Error::NotImmersive(p));
            }
            Ok(n.normalized()?)
        })
    }

    /// The Blaschke (affine) normal of `f` with the requested orientation of `θ12`.
    pub fn blaschke(f: &SurfaceMap, orientation: Orientation) -> Self {
        let f = f.clone();
        TransversalField::new(Provenance::Blaschke, move |p, k| {
            Ok(blaschke_jets(&f, p, k, orientation)?.0)
        })
    }

    /// `−ξ`.
    pub fn negated(&self) -> Self {
        let inner = self.eval.clone();
        TransversalField {
            provenance: self.provenance.clone(),
            eval: Arc::new(move |p, k| Ok(-inner(p, k)?)),
        }
    }

    /// `c·ξ` for a constant `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        TransversalField {
            provenance: Provenance::Explicit,
            eval: Arc::new(move |p, k| Ok(inner(p, k)?.scale(c))),
        }
    }

    /// The changed field `λ·ξ + f_*Z` as an explicit field.
    pub fn changed(&self, f: &SurfaceMap, lambda: &ScalarField, z: &TangentField) -> Self {
        let inner = self.eval.clone();
        let (f, lambda, z) = (f.clone(), lambda.clone(), z.clone());
        TransversalField {
            provenance: Provenance::Explicit,
            eval: Arc::new(move |p, k| {
                let xi = inner(p, k)?;
                let l = lambda.jets(p, k)?;
                let zz = z.jets(p, k)?;
                Ok(xi.scale_jet(&l) + f.push_forward(p, &zz, k)?)
            }),
        }
    }
}
