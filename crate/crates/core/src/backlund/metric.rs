//! Reconstruction of the ambient constant metric `G` for pairs with `dim Im R = 2`, and the
//! five-way case classification.
//!
//! In the basis `B = (v₁, f_*X₂, ξ)` the bilinear form is diagonal:
//!
//! ```text
//! G(v₁, v₁) = −δ(1 − AÂ),   G(f_*X₂, f_*X₂) = δα(1 − AÂ),   G(ξ, ξ) = δα(Â/A)W²,
//! ```
//!
//! and in ambient coordinates `G = Σ_k G_k r_k r_kᵀ` with `r_k` the rows of `B⁻¹`.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use super::coefficients::pair_maurer_cartan;
use super::curvature::{apply_curvature, connection_curvature};
use super::SurfacePair;
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Vec3J};
use crate::jets::{MultiJet, Var};

/// Relative size below which an eigenvalue of `G` counts as zero in the signature.
const SIGNATURE_TOL: f64 = 1e-9;

/// The five cases of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetricCase {
    /// (i) `0 < AÂ < 1`, `α < 0`.
    Euclidean,
    /// (ii) `0 < AÂ < 1`, `α > 0`.
    LorentzTimelikeCongruence,
    /// (iii) `AÂ > 1`, `α > 0`.
    LorentzSpacelikeTimelike,
    /// (iv) `AÂ > 1`, `α < 0`.
    ///
    /// At least one earlier classification of locally symmetric pairs disagrees with this case;
    /// the label here follows the sign rule for `δ` and is not reconciled with that result.
    LorentzSpacelikeSpacelike,
    /// (v) `AÂ < 0`.
    LorentzMixed,
}

impl SymmetricCase {
    pub fn label(self) -> &'static str {
        match self {
            SymmetricCase::Euclidean => "euclidean",
            SymmetricCase::LorentzTimelikeCongruence => "lorentz-timelike-congruence",
            SymmetricCase::LorentzSpacelikeTimelike => "lorentz-spacelike-timelike",
            SymmetricCase::LorentzSpacelikeSpacelike => "lorentz-spacelike-spacelike",
            SymmetricCase::LorentzMixed => "lorentz-mixed",
        }
    }

    /// Number of negative eigenvalues of `G` the case requires.
    pub fn negative_eigenvalues(self) -> usize {
        match self {
            SymmetricCase::Euclidean => 0,
            _ => 1,
        }
    }
}

impl std::fmt::Display for SymmetricCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Case and sign `δ` from `(A, Â, α)`. Errors: `Unclassifiable` on the boundaries
/// `AÂ ∈ {0, 1}`, `α = 0`, or non-finite input.
pub fn classify_case(a: f64, ahat: f64, alpha: f64) -> Result<(SymmetricCase, i8)> {
    let p = a * ahat;
    let bad = || Error::Unclassifiable { a, ahat, alpha };
    if !p.is_finite() || !alpha.is_finite() || alpha == 0.0 || p == 0.0 || p == 1.0 {
        return Err(bad());
    }
    Ok(if p < 0.0 {
        (SymmetricCase::LorentzMixed, -1)
    } else if p < 1.0 {
        if alpha < 0.0 {
            (SymmetricCase::Euclidean, -1)
        } else {
            (SymmetricCase::LorentzTimelikeCongruence, 1)
        }
    } else if alpha > 0.0 {
        (SymmetricCase::LorentzSpacelikeTimelike, 1)
    } else {
        (SymmetricCase::LorentzSpacelikeSpacelike, 1)
    })
}

/// Output of [`metric_reconstruction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReconstruction {
    pub point: ChartPoint,
    /// `G` in ambient coordinates.
    pub g: [[f64; 3]; 3],
    pub eigenvalues: [f64; 3],
    pub delta: i8,
    /// `max |∂G| / max |G|` over both chart directions.
    pub dg_residual: f64,
    /// Sectional curvature of `∇` measured with `G` restricted to `f`.
    pub kappa: f64,
    /// Sectional curvature of `∇̂` measured with `G` restricted to `f̂`.
    pub kappahat: f64,
    /// `G(f̂ − f, f̂ − f)`.
    pub l2: f64,
    /// `cos²∠(ξ, ξ̂)` in cases (i)/(ii), `cosh²` in (iii)/(iv), `sinh²` in (v).
    pub angle_invariant: f64,
    /// Signed `cos∠(ξ, ξ̂)` in the Euclidean case.
    pub cos_angle: Option<f64>,
    pub case: SymmetricCase,
    pub alpha: f64,
    pub a: f64,
    pub ahat: f64,
    pub w: f64,
}

fn bilinear(g: &Matrix3<f64>, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    x.dot(&(g * y))
}

/// Sectional curvature `G(R(∂u,∂v)∂v, ∂u) / det(G|T)` of the connection induced by
/// `(surface, transversal)`.
fn sectional(g: &Matrix3<f64>, fu: &Vector3<f64>, fv: &Vector3<f64>, r: &super::curvature::Riemann<f64>) -> f64 {
    let rv = apply_curvature(r, [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]);
    let rvec = fu * rv[0] + fv * rv[1];
    let (guu, guv, gvv) = (bilinear(g, fu, fu), bilinear(g, fu, fv), bilinear(g, fv, fv));
    bilinear(g, &rvec, fu) / (guu * gvv - guv * guv)
}

/// Reconstruct `G` at `p` and evaluate `κ`, `κ̂`, `L²` and the angle invariant.
///
/// The pair frame and `α` are computed internally. Errors: `AlphaZero`, `Unclassifiable`,
/// `InconsistentSignature`, and the pair-frame errors.
pub fn metric_reconstruction(pair: &SurfacePair, p: ChartPoint) -> Result<MetricReconstruction> {
    let (j, mc, _) = pair_maurer_cartan(pair, p, 1)?;
    let w21 = mc.omega[1][0];
    let [ba, bb] = w21.values();
    let alpha_j = if ba.abs() >= bb.abs() {
        mc.omega[0][1].a * w21.a.recip()?
    } else {
        mc.omega[0][1].b * w21.b.recip()?
    };
    let alpha = alpha_j.value();
    let scale = mc.omega[0][1].values()[0].hypot(mc.omega[0][1].values()[1]) / ba.hypot(bb).max(f64::MIN_POSITIVE);
    if !(alpha.abs() > 1e-12 * (1.0 + scale)) {
        return Err(Error::AlphaZero(p));
    }
    let (a, ahat, w) = (j.a.value(), j.ahat.value(), j.w.value());
    let (case, delta) = classify_case(a, ahat, alpha)?;

    // diagonal entries as order-1 jets
    let d = delta as f64;
    let one = MultiJet::constant(1.0, 1);
    let c = one - j.a * j.ahat;
    let gk = [
        c * (-d),
        alpha_j * c * d,
        alpha_j * j.ahat * j.a.recip()? * j.w * j.w * d,
    ];
    let fr = j.frame()?;
    let basis = [j.v1, fr.fx2, j.xi];
    let inv_det = basis[0].det(&basis[1], &basis[2]).recip()?;
    let rows: [Vec3J; 3] = [
        basis[1].cross(&basis[2]).scale_jet(&inv_det),
        basis[2].cross(&basis[0]).scale_jet(&inv_det),
        basis[0].cross(&basis[1]).scale_jet(&inv_det),
    ];
    let mut gj = [[MultiJet::zero(1); 3]; 3];
    for (k, r) in rows.iter().enumerate() {
        for m in 0..3 {
            for n in 0..3 {
                gj[m][n] += gk[k] * r.0[m] * r.0[n];
            }
        }
    }
    let mut g = Matrix3::zeros();
    let (mut gmax, mut dgmax): (f64, f64) = (0.0, 0.0);
    for m in 0..3 {
        for n in 0..3 {
            g[(m, n)] = gj[m][n].value();
            gmax = gmax.max(g[(m, n)].abs());
            for var in [Var::U, Var::V] {
                dgmax = dgmax.max(gj[m][n].derivative(var)?.value().abs());
            }
        }
    }
    let dg_residual = if gmax > 0.0 { dgmax / gmax } else { f64::INFINITY };

    let eig = SymmetricEigen::new(g).eigenvalues;
    let emax = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let negatives = eig.iter().filter(|&&e| e < -SIGNATURE_TOL * emax).count();
    let zeros = eig.iter().filter(|&&e| e.abs() <= SIGNATURE_TOL * emax).count();
    if zeros > 0 || negatives != case.negative_eigenvalues() {
        return Err(Error::InconsistentSignature(p));
    }

    let r = connection_curvature(&pair.f, &pair.xi, p)?.r;
    let rh = connection_curvature(&pair.fhat, &pair.xihat, p)?.r;
    let kappa = sectional(&g, &j.fu.value(), &j.fv.value(), &r);
    let kappahat = sectional(&g, &j.fhu.value(), &j.fhv.value(), &rh);

    let (v1, xi, xih) = (j.v1.value(), j.xi.value(), j.xihat.value());
    let l2 = bilinear(&g, &v1, &v1);
    let (gxx, ghh, gxh) = (
        bilinear(&g, &xi, &xi),
        bilinear(&g, &xih, &xih),
        bilinear(&g, &xi, &xih),
    );
    let angle_invariant = match case {
        SymmetricCase::LorentzMixed => gxh * gxh / (-gxx * ghh),
        _ => gxh * gxh / (gxx * ghh),
    };
    let cos_angle = (case == SymmetricCase::Euclidean).then(|| gxh / (gxx * ghh).sqrt());
    let mut gout = [[0.0; 3]; 3];
    for (m, row) in gout.iter_mut().enumerate() {
        for (n, x) in row.iter_mut().enumerate() {
            *x = g[(m, n)];
        }
    }
    let mut eigenvalues = [eig[0], eig[1], eig[2]];
    eigenvalues.sort_by(f64::total_cmp);
    Ok(MetricReconstruction {
        point: p,
        g: gout,
        eigenvalues,
        delta,
        dg_residual,
        kappa,
        kappahat,
        l2,
        angle_invariant,
        cos_angle,
        case,
        alpha,
        a,
        ahat,
        w,
    })
}
