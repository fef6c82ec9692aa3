//! Maurer–Cartan forms, exterior derivatives and structure equations.

#![allow(clippy::needless_range_loop)]

mod common;

use abdg_core::backlund::pair_frame_fields;
use abdg_core::catalog::make_classical_pair;
use abdg_core::catalog::surfaces::elliptic_paraboloid;
use abdg_core::forms::{
    expand_in_basis, exterior_derivative, maurer_cartan, structural_residuals, ChartOneForm, DerivativeMode,
    FrameField, FrameJets,
};
use abdg_core::geometry::{ChartPoint, Domain, Vec3J};
use abdg_core::jets::MultiJet;
use approx::assert_relative_eq;
use nalgebra::Vector3;

#[allow(clippy::approx_constant)]
const SIGMA: f64 = 1.0472;

fn paraboloid_frame() -> FrameField {
    let f = elliptic_paraboloid();
    FrameField::new(f.domain, move |p, k| {
        let j = f.jets(p, k + 1)?;
        Ok(FrameJets {
            base: j.truncate(k),
            cols: [
                j.derivative(abdg_core::jets::Var::U)?,
                j.derivative(abdg_core::jets::Var::V)?,
                Vec3J::constant(&Vector3::new(0.0, 0.0, 1.0), k),
            ],
        })
    })
}

fn constant_frame() -> FrameField {
    FrameField::new(Domain::new(-1.0, 1.0, -1.0, 1.0), |p, k| {
        let (u, v) = p.vars(k);
        Ok(FrameJets {
            base: Vec3J::new(u, v, u * v),
            cols: [
                Vec3J::constant(&Vector3::new(1.0, 0.0, 0.0), k),
                Vec3J::constant(&Vector3::new(1.0, 2.0, 0.0), k),
                Vec3J::constant(&Vector3::new(0.0, 1.0, 3.0), k),
            ],
        })
    })
}

fn form_values(w: &ChartOneForm) -> [f64; 2] {
    w.values()
}

#[test]
fn one_forms_are_linear_in_tangent_arguments() {
    let w = ChartOneForm::new(MultiJet::constant(2.0, 1), MultiJet::constant(-3.0, 1));
    for (x, y) in [(1.0, 0.0), (0.5, 2.0), (-1.5, 0.25)] {
        assert_eq!(w.eval(x, y), 2.0 * x - 3.0 * y);
    }
}

#[test]
fn paraboloid_adapted_frame() {
    let field = paraboloid_frame();
    let p = ChartPoint::new(0.3, -0.4);
    let m = maurer_cartan(&field, p, 1).unwrap();
    assert_eq!(form_values(&m.theta[0]), [1.0, 0.0]);
    assert_eq!(form_values(&m.theta[1]), [0.0, 1.0]);
    assert_eq!(form_values(&m.theta[2]), [0.0, 0.0]);
    // ω³₁ = h₁₁du + h₁₂dv = du; ω³₂ = dv
    assert_eq!(form_values(&m.omega[2][0]), [1.0, 0.0]);
    assert_eq!(form_values(&m.omega[2][1]), [0.0, 1.0]);
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2), (2, 2)] {
        assert_eq!(form_values(&m.omega[i][j]), [0.0, 0.0], "ω{i}{j}");
    }
    assert!(m.reconstruction_residual < 1e-14);
    let r = structural_residuals(&field, p, DerivativeMode::Jet).unwrap();
    assert!(r.iter().all(|x| *x < 1e-9), "{r:?}");
}

#[test]
fn constant_frame_has_vanishing_connection() {
    let field = constant_frame();
    let p = ChartPoint::new(0.2, 0.7);
    let m = maurer_cartan(&field, p, 2).unwrap();
    for row in &m.omega {
        for w in row {
            assert_eq!(form_values(w), [0.0, 0.0]);
        }
    }
    assert_eq!(structural_residuals(&field, p, DerivativeMode::Jet).unwrap(), [0.0; 12]);
    // differences of the (linear) coefficients are exact up to round-off
    let r = structural_residuals(&field, p, DerivativeMode::Central { step: 0.01 }).unwrap();
    assert!(r.iter().all(|x| *x < 1e-12), "{r:?}");
}

#[test]
fn exterior_derivative_examples() {
    let d = Domain::new(-1.0, 1.0, -1.0, 1.0);
    let p = ChartPoint::new(0.4, -0.2);
    let du = |_: ChartPoint| Ok([1.0, 0.0]);
    let u_dv = |q: ChartPoint| Ok([0.0, q.u]);
    for mode in [
        DerivativeMode::Central { step: 0.1 },
        DerivativeMode::Richardson { step: 0.1 },
    ] {
        assert_eq!(exterior_derivative(&du, p, &d, mode).unwrap(), 0.0);
        assert_relative_eq!(exterior_derivative(&u_dv, p, &d, mode).unwrap(), 1.0, epsilon = 1e-14);
    }
    // jets: d(u dv) = du∧dv exactly
    let (u, _) = p.vars(2);
    assert_eq!(ChartOneForm::new(MultiJet::zero(2), u).d().unwrap().value(), 1.0);
    // boundary stencils are refused
    assert!(exterior_derivative(
        &du,
        ChartPoint::new(0.95, 0.0),
        &d,
        DerivativeMode::Central { step: 0.1 }
    )
    .is_err());
    assert!(exterior_derivative(&du, p, &d, DerivativeMode::Jet).is_err());
    // an exact form is closed
    let (u, v) = p.vars(3);
    let g = (u * v).sin().unwrap() + u * u * v;
    assert!(ChartOneForm::exact(&g).unwrap().d().unwrap().value().abs() < 1e-14);
}

#[test]
fn expansion_in_a_basis() {
    let (u, v) = ChartPoint::new(0.1, 0.2).vars(1);
    let a = ChartOneForm::new(MultiJet::constant(1.0, 1), u);
    let b = ChartOneForm::new(v, MultiJet::constant(2.0, 1));
    let g = a
        .scale(&MultiJet::constant(3.0, 1))
        .add(&b.scale(&MultiJet::constant(-0.5, 1)));
    let (p, q) = expand_in_basis(&g, &a, &b).unwrap();
    assert_relative_eq!(p.value(), 3.0, epsilon = 1e-14);
    assert_relative_eq!(q.value(), -0.5, epsilon = 1e-14);
    assert!(expand_in_basis(&g, &a, &a).is_none());
}

#[test]
fn classical_pair_frames_are_adapted() {
    let pair = make_classical_pair(SIGMA, 1.0).unwrap();
    let (f, fh) = pair_frame_fields(&pair);
    let d = pair.domain.shrunk(0.05);
    let mut r = common::rng(31);
    for p in common::random_points(&mut r, 25, (d.u0, d.u1), (d.v0, d.v1)) {
        for field in [&f, &fh] {
            let m = maurer_cartan(field, p, 0).unwrap();
            let [a, b] = m.theta[2].values();
            assert!(a.hypot(b) < 1e-9, "ϑ³ at {p}: {a} {b}");
            assert!(m.reconstruction_residual < 1e-9);
        }
    }
}

#[test]
fn classical_pair_structure_equation_for_omega21() {
    let pair = make_classical_pair(SIGMA, 1.0).unwrap();
    let (f, _) = pair_frame_fields(&pair);
    let p = pair.domain.center();
    let m = maurer_cartan(&f, p, 0).unwrap();
    let rhs: f64 = -(0..3).map(|k| m.omega[1][k].wedge(&m.omega[k][0]).value()).sum::<f64>();
    let sample = |q: ChartPoint| Ok(maurer_cartan(&f, q, 0)?.omega[1][0].values());
    let lhs = exterior_derivative(&sample, p, &pair.domain, DerivativeMode::Richardson { step: 0.02 }).unwrap();
    let scale = 1.0 + rhs.abs();
    assert!((lhs - rhs).abs() / scale < 1e-6, "{lhs} vs {rhs}");
    // the jet route agrees as well
    let mj = maurer_cartan(&f, p, 1).unwrap();
    assert!((mj.omega[1][0].d().unwrap().value() - rhs).abs() / scale < 1e-9);
}

#[test]
fn classical_pair_residuals_converge_at_second_order() {
    let pair = make_classical_pair(SIGMA, 1.0).unwrap();
    let (f, fh) = pair_frame_fields(&pair);
    let p = pair.domain.center();
    for field in [&f, &fh] {
        let worst = |h: f64| {
            structural_residuals(field, p, DerivativeMode::Central { step: h })
                .unwrap()
                .into_iter()
                .fold(0.0_f64, f64::max)
        };
        let steps = [0.04, 0.02, 0.01];
        let res: Vec<f64> = steps.iter().map(|h| worst(*h)).collect();
        assert!(res[2] < 1e-4, "{res:?}");
        for w in res.windows(2) {
            assert!(w[0] / w[1] >= 3.0, "{res:?}");
        }
        let jet = structural_residuals(field, p, DerivativeMode::Jet).unwrap();
        assert!(jet.iter().all(|x| *x < 1e-6), "{jet:?}");
    }
}
