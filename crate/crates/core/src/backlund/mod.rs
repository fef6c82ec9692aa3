//! Pair-level affine geometry: adapted pair frames, the ψ invariant, the rank lemma,
//! curvature and local symmetry, frame coefficients, metric reconstruction, the condition
//! checker for Bäcklund-type theorems, affine minimality and the A00 residual system.
//!
//! Notation. For surfaces `f, f̂` on a shared chart with transversal fields `ξ, ξ̂`:
//!
//! ```text
//! v₁ = f̂ − f,   A = ν(ξ̂),   Â = ν̂(ξ),   W = det(v₁, ξ, ξ̂),
//! f_*X₁ = v₁ = f̂_*X̂₁,   f_*X₂ = (Aξ − ξ̂)/W,   f̂_*X̂₂ = (ξ − Âξ̂)/W,
//! ```
//!
//! so that `det(f_*X₁, f_*X₂, ξ) = det(f̂_*X̂₁, f̂_*X̂₂, ξ̂) = 1`, and the frames
//! `F = (f; v₁, f_*X₂, ξ)`, `F̂ = (f̂; v₁, f̂_*X̂₂, ξ̂)` are adapted and unimodular.

mod a00;
mod blaschke_pair;
mod chern_terng;
mod coefficients;
mod conditions;
mod curvature;
mod metric;
mod pair;
mod parallel;
mod psi;
mod rank;

use serde::{Deserialize, Serialize};

use crate::geometry::{Domain, SurfaceMap, TransversalField};

pub use a00::{a00_residuals, A00Report, A00State, ResidualMax};
pub use blaschke_pair::{blaschke_pair, blaschke_pair_check, BlaschkePairReport};
pub use chern_terng::{affine_minimality, chern_terng_identities, ChernTerngResiduals, MinimalityCheck};
pub use coefficients::{frame_coefficients, FrameCoefficients};
pub use conditions::{
    backlund_condition_report, sample_point, Conclusions, ConditionKind, ConditionRecord, ConditionReport,
    ConditionSweep, PointSample, ReportConfig, DEFAULT_TOL_ALG, DEFAULT_TOL_DIFF,
};
pub use curvature::{
    apply_curvature, connection_curvature, covariant_derivative_r, curvature_from_gw, curvature_jets, dim_image,
    nabla_r_from_gw, Curvature, NablaMode, NablaR, Riemann,
};
pub use metric::{classify_case, metric_reconstruction, MetricReconstruction, SymmetricCase};
pub use pair::{
    gauge_matrix, pair_frame_fields, pair_jets, solve_pair_frame, tangency_residual, PairFrame, PairFrameJets,
    PairJets, TANGENCY_TOL,
};
pub use parallel::{
    parallel_transversal_criterion, parallel_transversal_criterion_shifted, ParallelCriterion, PARALLEL_TOL,
};
pub use psi::{conformality_defect, psi, psi_data, PsiData};
pub use rank::{spherical_rank, RankFrame, SphericalRank};

/// Two immersions of a shared chart with a transversal field for each.
#[derive(Clone, Debug)]
pub struct SurfacePair {
    pub label: String,
    pub f: SurfaceMap,
    pub fhat: SurfaceMap,
    pub xi: TransversalField,
    pub xihat: TransversalField,
    /// The shared chart rectangle.
    pub domain: Domain,
    /// Construction notes and warnings (e.g. degenerate parameter choices).
    pub notes: Vec<String>,
}

impl SurfacePair {
    pub fn new(
        label: impl Into<String>,
        f: SurfaceMap,
        fhat: SurfaceMap,
        xi: TransversalField,
        xihat: TransversalField,
        domain: Domain,
    ) -> Self {
        SurfacePair {
            label: label.into(),
            f,
            fhat,
            xi,
            xihat,
            domain,
            notes: Vec::new(),
        }
    }

    /// Same surfaces with other transversal fields.
    pub fn with_transversals(&self, xi: TransversalField, xihat: TransversalField) -> Self {
        SurfacePair {
            xi,
            xihat,
            ..self.clone()
        }
    }

    /// Same pair on a different chart rectangle.
    pub fn with_domain(&self, domain: Domain) -> Self {
        SurfacePair {
            f: self.f.with_domain(domain),
            fhat: self.fhat.with_domain(domain),
            domain,
            ..self.clone()
        }
    }
}

/// Sign of a real number as `−1, 0, +1`.
pub(crate) fn sign_i8(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Summary statistics of a scalar field over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    /// Statistics of the finite entries; `None` if there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Stats> {
        let mut n = 0usize;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for x in values.into_iter().filter(|x| x.is_finite()) {
            n += 1;
            min = min.min(x);
            max = max.max(x);
            sum += x;
        }
        (n > 0).then(|| Stats {
            min,
            max,
            mean: sum / n as f64,
        })
    }
}
