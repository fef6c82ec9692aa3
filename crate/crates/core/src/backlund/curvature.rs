//! Curvature of the induced connection, its covariant derivative, and `dim Im R`.
//!
//! Conventions (chart basis, `Γ^k_ij = gamma[k][i][j]`, `R(∂i, ∂j)∂k = R^l_kij ∂l`):
//!
//! ```text
//! R^l_kij = ∂iΓ^l_jk − ∂jΓ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik,     Ric_jk = R^i_kij,
//! (∇_m R)^l_kij = ∂m R^l_kij + Γ^l_mp R^p_kij − Γ^p_mk R^l_pij − Γ^p_mi R^l_kpj − Γ^p_mj R^l_kip.
//! ```

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gauss_weingarten_jets, ChartPoint, GwJets, SurfaceMap, TransversalField};
use crate::jets::{MultiJet, Var};

/// Ratio to the largest singular value below which a singular value of `R` counts as zero.
const IMAGE_RATIO_TOL: f64 = 1e-7;
/// Absolute guard (relative to the connection's own scale) for an identically flat `R`.
const FLAT_TOL: f64 = 1e-12;

/// `R[l][k][i][j]`.
pub type Riemann<T> = [[[[T; 2]; 2]; 2]; 2];

/// Curvature at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    pub point: ChartPoint,
    /// `r[l][k][i][j] = R^l_kij`.
    pub r: Riemann<f64>,
    /// `ric[j][k] = Ric_jk`.
    pub ric: [[f64; 2]; 2],
    /// `θ12` of the transversal field (for unimodular-frame norms).
    pub theta12: f64,
    /// Scale of the connection at `p`: `max(|∂Γ|, |Γ|²)`.
    pub scale: f64,
    /// `dim Im R` at `p`.
    pub dim_im_r: usize,
}

/// How `∂R` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum NablaMode {
    /// Differentiate order-2 Christoffel jets (needs order-4 jets of `f`).
    Jet,
    /// Central differences of jet-computed `R` at `p ± h e_m`, Richardson-extrapolated.
    FiniteDifference { step: f64 },
}

/// `∇R` at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NablaR {
    pub point: ChartPoint,
    /// `components[m][l][k][i][j] = (∇_m R)^l_kij` in the chart basis.
    pub components: [Riemann<f64>; 2],
    /// Max absolute component in the θ-unimodular frame `(∂u, ∂v/θ12)`.
    pub norm: f64,
    /// Max absolute component of `R` in the same frame.
    pub r_norm: f64,
    pub dim_im_r: usize,
}

fn zero_riemann(k: usize) -> Riemann<MultiJet> {
    [[[[MultiJet::zero(k); 2]; 2]; 2]; 2]
}

/// Curvature jets from Christoffel jets of order `m ≥ 1` (result has order `m − 1`).
pub fn curvature_jets(gamma: &[[[MultiJet; 2]; 2]; 2]) -> Result<Riemann<MultiJet>> {
    let vars = [Var::U, Var::V];
    let mut dg = [[[[MultiJet::zero(0); 2]; 2]; 2]; 2]; // dg[d][l][i][j] = ∂_d Γ^l_ij
    for d in 0..2 {
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    dg[d][l][i][j] = gamma[l][i][j].derivative(vars[d])?;
                }
            }
        }
    }
    let k0 = gamma[0][0][0].order().saturating_sub(1);
    let mut r = zero_riemann(k0);
    for l in 0..2 {
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = dg[i][l][j][k] - dg[j][l][i][k];
                    for m in 0..2 {
                        acc += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    r[l][k][i][j] = acc;
                }
            }
        }
    }
    Ok(r)
}

fn values(r: &Riemann<MultiJet>) -> Riemann<f64> {
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for l in 0..2 {
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out[l][k][i][j] = r[l][k][i][j].value();
                }
            }
        }
    }
    out
}

/// `R(X, Y)Z` for chart vectors.
pub fn apply_curvature(r: &Riemann<f64>, x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (l, o) in out.iter_mut().enumerate() {
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    *o += x[i] * y[j] * z[k] * r[l][k][i][j];
                }
            }
        }
    }
    out
}

/// `dim Im R` from the singular values of `[R(∂u,∂v)∂u, R(∂u,∂v)∂v]`; every `R(X,Y)Z` is a
/// combination of these two vectors in dimension 2.
pub fn dim_image(r: &Riemann<f64>, scale: f64) -> usize {
    let m = Matrix2::new(r[0][0][0][1], r[0][1][0][1], r[1][0][0][1], r[1][1][0][1]);
    let sv = m.singular_values();
    let smax = sv.max();
    if !(smax > FLAT_TOL * scale) {
        return 0;
    }
    sv.iter().filter(|&&s| s > IMAGE_RATIO_TOL * smax).count()
}

fn connection_scale(gamma: &[[[MultiJet; 2]; 2]; 2]) -> f64 {
    let mut g: f64 = 0.0;
    let mut dg: f64 = 0.0;
    for row in gamma.iter().flatten().flatten() {
        g = g.max(row.value().abs());
        if let Ok(gr) = row.gradient() {
            dg = dg.max(gr[0].abs()).max(gr[1].abs());
        }
    }
    dg.max(g * g)
}

/// Curvature from Gauss–Weingarten jets whose `Γ` carry order ≥ 1.
pub fn curvature_from_gw(g: &GwJets) -> Result<Curvature> {
    let rj = curvature_jets(&g.gamma)?;
    let r = values(&rj);
    let mut ric = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            ric[j][k] = (0..2).map(|i| r[i][k][i][j]).sum();
        }
    }
    let scale = connection_scale(&g.gamma);
    Ok(Curvature {
        point: g.point,
        r,
        ric,
        theta12: g.theta12.value(),
        scale,
        dim_im_r: dim_image(&r, scale),
    })
}

/// Curvature of the connection induced by `(f, ξ)` at `p`.
pub fn connection_curvature(f: &SurfaceMap, xi: &TransversalField, p: ChartPoint) -> Result<Curvature> {
    let g = gauss_weingarten_jets(&f.jets(p, 3)?, &xi.jets(p, 1)?, p)?;
    curvature_from_gw(&g)
}

/// θ-unimodular weight of a component: `θ^{[l = v]} · θ^{−#(lower indices = v)}`.
fn unimodular_weight(theta: f64, upper_v: bool, lower_v: usize) -> f64 {
    let t = if upper_v { theta } else { 1.0 };
    t / theta.powi(lower_v as i32)
}

fn finish(
    p: ChartPoint,
    gamma: [[[f64; 2]; 2]; 2],
    r: Riemann<f64>,
    dr: [Riemann<f64>; 2],
    theta: f64,
    scale: f64,
) -> NablaR {
    let mut comps = [[[[[0.0; 2]; 2]; 2]; 2]; 2];
    let mut norm: f64 = 0.0;
    let mut r_norm: f64 = 0.0;
    for m in 0..2 {
        for l in 0..2 {
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let mut c = dr[m][l][k][i][j];
                        for q in 0..2 {
                            c += gamma[l][m][q] * r[q][k][i][j]
                                - gamma[q][m][k] * r[l][q][i][j]
                                - gamma[q][m][i] * r[l][k][q][j]
                                - gamma[q][m][j] * r[l][k][i][q];
                        }
                        comps[m][l][k][i][j] = c;
                        let lower_v = [m, k, i, j].iter().filter(|&&x| x == 1).count();
                        norm = norm.max((c * unimodular_weight(theta, l == 1, lower_v)).abs());
                        if m == 0 {
                            let lv = [k, i, j].iter().filter(|&&x| x == 1).count();
                            r_norm = r_norm.max((r[l][k][i][j] * unimodular_weight(theta, l == 1, lv)).abs());
                        }
                    }
                }
            }
        }
    }
    NablaR {
        point: p,
        components: comps,
        norm,
        r_norm,
        dim_im_r: dim_image(&r, scale),
    }
}

/// `∇R` from Gauss–Weingarten jets whose `Γ` carry order ≥ 2.
pub fn nabla_r_from_gw(g: &GwJets) -> Result<NablaR> {
    let rj = curvature_jets(&g.gamma)?;
    let r = values(&rj);
    let mut dr = [[[[[0.0; 2]; 2]; 2]; 2]; 2];
    for (m, var) in [Var::U, Var::V].into_iter().enumerate() {
        for l in 0..2 {
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        dr[m][l][k][i][j] = rj[l][k][i][j].derivative(var)?.value();
                    }
                }
            }
        }
    }
    let gamma = g.to_data().gamma;
    Ok(finish(
        g.point,
        gamma,
        r,
        dr,
        g.theta12.value(),
        connection_scale(&g.gamma),
    ))
}

/// `∇R` of the connection induced by `(f, ξ)` at `p`.
pub fn covariant_derivative_r(f: &SurfaceMap, xi: &TransversalField, p: ChartPoint, mode: NablaMode) -> Result<NablaR> {
    match mode {
        NablaMode::Jet => {
            let g = gauss_weingarten_jets(&f.jets(p, 4)?, &xi.jets(p, 2)?, p)?;
            nabla_r_from_gw(&g)
        }
        NablaMode::FiniteDifference { step } => {
            if !f.domain.contains_stencil(p, step) {
                return Err(Error::BoundaryStencil { at: p, width: step });
            }
            let r_at = |q: ChartPoint| -> Result<Riemann<f64>> { Ok(connection_curvature(f, xi, q)?.r) };
            let c0 = connection_curvature(f, xi, p)?;
            let g = gauss_weingarten_jets(&f.jets(p, 3)?, &xi.jets(p, 1)?, p)?;
            let central = |m: usize, h: f64| -> Result<Riemann<f64>> {
                let (du, dv) = if m == 0 { (h, 0.0) } else { (0.0, h) };
                let rp = r_at(p.offset(du, dv))?;
                let rm = r_at(p.offset(-du, -dv))?;
                let mut out = [[[[0.0; 2]; 2]; 2]; 2];
                for l in 0..2 {
                    for k in 0..2 {
                        for i in 0..2 {
                            for j in 0..2 {
                                out[l][k][i][j] = (rp[l][k][i][j] - rm[l][k][i][j]) / (2.0 * h);
                            }
                        }
                    }
                }
                Ok(out)
            };
            let mut dr = [[[[[0.0; 2]; 2]; 2]; 2]; 2];
            for (m, slot) in dr.iter_mut().enumerate() {
                let d1 = central(m, step)?;
                let d2 = central(m, 0.5 * step)?;
                for l in 0..2 {
                    for k in 0..2 {
                        for i in 0..2 {
                            for j in 0..2 {
                                slot[l][k][i][j] = (4.0 * d2[l][k][i][j] - d1[l][k][i][j]) / 3.0;
                            }
                        }
                    }
                }
            }
            Ok(finish(p, g.to_data().gamma, c0.r, dr, c0.theta12, c0.scale))
        }
    }
}
