//! Crate-wide error type.

use thiserror::Error;

use crate::expr::ExprError;
use crate::geometry::ChartPoint;
use crate::jets::JetError;

/// Errors raised by geometric constructions and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("invalid expression: {0}")]
    Expr(#[from] ExprError),
    #[error("surface is not immersive at {0}")]
    NotImmersive(ChartPoint),
    #[error("transversal field is tangent (|θ12| below tolerance) at {0}")]
    NotTransversal(ChartPoint),
    #[error("surface is affinely degenerate (det h ≈ 0) at {0}")]
    DegenerateSurface(ChartPoint),
    #[error("transversal rescaling factor vanishes at {0}")]
    ZeroScale(ChartPoint),
    #[error("moving frame is singular (condition number {cond:.3e}) at {at}")]
    SingularFrame { at: ChartPoint, cond: f64 },
    #[error("finite-difference stencil of half-width {width:.3e} leaves the domain at {at}")]
    BoundaryStencil { at: ChartPoint, width: f64 },
    #[error("f̂ − f is not tangent (residual {residual:.3e}) at {at}")]
    NotTangent { at: ChartPoint, residual: f64 },
    #[error("f and f̂ coincide at {0}")]
    CoincidentPoints(ChartPoint),
    #[error("det(f̂ − f, ξ, ξ̂) vanishes at {0}")]
    ZeroW(ChartPoint),
    #[error("ξ and ξ̂ are not parallel (residual {residual:.3e}) at {at}")]
    NotParallel { at: ChartPoint, residual: f64 },
    #[error("β vanishes at {0} (the spherical representation is degenerate)")]
    BetaZero(ChartPoint),
    #[error("expansion basis ω²₁, ω³₁ is degenerate at {0}")]
    DegenerateExpansionBasis(ChartPoint),
    #[error("α vanishes at {0}; no invariant metric exists on this branch")]
    AlphaZero(ChartPoint),
    #[error("Gram signature of G conflicts with the case table at {0}")]
    InconsistentSignature(ChartPoint),
    #[error("(A, Â, α) = ({a}, {ahat}, {alpha}) lies on a case boundary")]
    Unclassifiable { a: f64, ahat: f64, alpha: f64 },
    #[error("γ has a critical direction (γ_x or γ_y vanishes) at {0}")]
    GammaCritical(ChartPoint),
    #[error("no sign assignment of the Blaschke normals realizes W = 1 − AÂ")]
    SignChoiceFailed,
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("parameter {name} = {value} is outside its range")]
    ParamOutOfRange { name: String, value: f64 },
    #[error("catalog entry {entry:?} has no parameter {param:?}")]
    UnknownParam { entry: String, param: String },
    #[error("construction failed self-validation: {0}")]
    ConstructionFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
