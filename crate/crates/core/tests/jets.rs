//! Truncated bivariate Taylor jets against closed forms and finite differences.

#![allow(clippy::needless_range_loop)]

mod common;

use abdg_core::expr::parse_expr;
use abdg_core::jets::{
    coeff_count, jet_arith, jet_compose, lift_variable, ArithOp, Elementary, JetError, MultiJet, Var, MAX_ORDER,
};
use approx::assert_relative_eq;
use proptest::prelude::*;

#[test]
fn lifted_variables_are_seeded() {
    let u = lift_variable(2.0, Var::U, 2).unwrap();
    assert_eq!(u.coeffs(), &[2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let v = lift_variable(0.0, Var::V, 1).unwrap();
    assert_eq!((v.coeff(0, 0), v.coeff(0, 1), v.coeff(1, 0)), (0.0, 1.0, 0.0));
    let sq = u * u;
    assert_eq!((sq.coeff(0, 0), sq.coeff(1, 0), sq.coeff(2, 0)), (4.0, 4.0, 1.0));
    assert!(matches!(
        lift_variable(0.0, Var::U, MAX_ORDER + 1),
        Err(JetError::OrderOutOfRange(_))
    ));
}

#[test]
fn coefficient_count_is_triangular() {
    for k in 0..=MAX_ORDER {
        assert_eq!(MultiJet::zero(k).coeffs().len(), (k + 1) * (k + 2) / 2);
        assert_eq!(coeff_count(k), (k + 1) * (k + 2) / 2);
    }
}

#[test]
fn product_rule_mixed_coefficient() {
    let u = lift_variable(1.0, Var::U, 2).unwrap();
    let v = lift_variable(1.0, Var::V, 2).unwrap();
    assert_eq!(jet_arith(&u, &v, ArithOp::Mul).unwrap().coeff(1, 1), 1.0);
    let zero = MultiJet::zero(2);
    assert_eq!(jet_arith(&u, &zero, ArithOp::Add).unwrap(), u);
    assert!(matches!(
        jet_arith(&u, &MultiJet::zero(3), ArithOp::Add),
        Err(JetError::OrderMismatch(2, 3))
    ));
}

#[test]
fn elementary_series() {
    let x = lift_variable(0.0, Var::U, 3).unwrap();
    let s = jet_compose(Elementary::Sin, &x).unwrap();
    assert_relative_eq!(s.coeff(0, 0), 0.0);
    assert_relative_eq!(s.coeff(1, 0), 1.0);
    assert_relative_eq!(s.coeff(2, 0), 0.0);
    assert_relative_eq!(s.coeff(3, 0), -1.0 / 6.0, epsilon = 1e-15);
    let e = jet_compose(Elementary::Exp, &x.truncate(2)).unwrap();
    assert_eq!(e.coeffs()[..3].iter().chain([e.coeff(2, 0)].iter()).count(), 4);
    assert_relative_eq!(e.coeff(2, 0), 0.5);
}

#[test]
fn mixed_partial_of_exp_uv_against_finite_differences() {
    let (u, v) = (
        lift_variable(1.0, Var::U, 2).unwrap(),
        lift_variable(1.0, Var::V, 2).unwrap(),
    );
    let jet = jet_compose(Elementary::Exp, &(u * v)).unwrap().partial(1, 1).unwrap();
    assert_relative_eq!(jet, 2.0 * std::f64::consts::E, max_relative = 1e-14);
    // ∂v of the Richardson ∂u-difference, itself Richardson-differenced
    let f = |a: f64, b: f64| (a * b).exp();
    let fu = |a: f64, b: f64| common::richardson(&f, a, b, 0, 1e-3);
    let fd = common::richardson(&fu, 1.0, 1.0, 1, 1e-3);
    assert_relative_eq!(jet, fd, max_relative = 1e-7);
}

#[test]
fn polynomials_are_exact() {
    // p(u, v) = 3 − 2u + u²v − 4uv³ + v⁴ at (0.7, −1.3): all partials up to order 4 exactly
    let (a, b) = (0.7, -1.3);
    let p = parse_expr("3 - 2*u + u^2*v - 4*u*v^3 + v^4").unwrap();
    let jet = p
        .eval_jet(
            &lift_variable(a, Var::U, 4).unwrap(),
            &lift_variable(b, Var::V, 4).unwrap(),
        )
        .unwrap();
    let exact = |i: usize, j: usize| -> f64 {
        match (i, j) {
            (0, 0) => 3.0 - 2.0 * a + a * a * b - 4.0 * a * b.powi(3) + b.powi(4),
            (1, 0) => -2.0 + 2.0 * a * b - 4.0 * b.powi(3),
            (0, 1) => a * a - 12.0 * a * b * b + 4.0 * b.powi(3),
            (2, 0) => 2.0 * b,
            (1, 1) => 2.0 * a - 12.0 * b * b,
            (0, 2) => -24.0 * a * b + 12.0 * b * b,
            (2, 1) => 2.0,
            (1, 2) => -24.0 * b,
            (0, 3) => -24.0 * a + 24.0 * b,
            (0, 4) => 24.0,
            (1, 3) => -24.0,
            _ => 0.0,
        }
    };
    for n in 0..=4 {
        for i in 0..=n {
            let j = n - i;
            assert_relative_eq!(jet.partial(i, j).unwrap(), exact(i, j), epsilon = 1e-12);
        }
    }
}

/// 100 random expressions: every partial of order 1..=3 agrees with a Richardson difference of
/// the partial one order lower (order 1 differences the plain value), < 1e−7 relative.
#[test]
fn random_expressions_match_finite_differences() {
    let (worst, at) = common::fd_oracle_worst(11, 100);
    assert!(worst < 1e-7, "{at}: {worst}");
}

fn small() -> impl Strategy<Value = f64> {
    -1.5f64..1.5
}

proptest! {
    #[test]
    fn multiplication_commutes(a in small(), b in small(), c in small(), d in small()) {
        let x = lift_variable(a, Var::U, 4).unwrap() * lift_variable(b, Var::V, 4).unwrap() + c;
        let y = lift_variable(d, Var::V, 4).unwrap().sin().unwrap();
        prop_assert_eq!(x * y, y * x);
    }

    #[test]
    fn truncation_commutes_with_products(a in small(), b in small()) {
        let x = lift_variable(a, Var::U, 5).unwrap().exp().unwrap();
        let y = lift_variable(b, Var::V, 5).unwrap().cos().unwrap() + lift_variable(a, Var::U, 5).unwrap();
        let full = (x * y).truncate(2);
        let low = x.truncate(2) * y.truncate(2);
        for (p, q) in full.coeffs().iter().zip(low.coeffs()) {
            prop_assert!((p - q).abs() <= 1e-13 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn division_inverts_multiplication(a in small(), b in small()) {
        let x = lift_variable(a, Var::U, 4).unwrap().sin().unwrap() + 3.0;
        let y = lift_variable(b, Var::V, 4).unwrap() * lift_variable(a, Var::U, 4).unwrap() * 0.5 + 2.0;
        let q = jet_arith(&(x * y), &y, ArithOp::Div).unwrap();
        for (p, r) in q.coeffs().iter().zip(x.coeffs()) {
            prop_assert!((p - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn elementary_inverses(a in 0.1f64..1.4) {
        let x = lift_variable(a, Var::U, 5).unwrap() + lift_variable(0.2, Var::V, 5).unwrap();
        let back = x.exp().unwrap().ln().unwrap();
        let sq = x.sqrt().unwrap() * x.sqrt().unwrap();
        let t = x.atan().unwrap();
        let tan = t.sin().unwrap() * t.cos().unwrap().recip().unwrap();
        for y in [back, sq, tan] {
            for (p, r) in y.coeffs().iter().zip(x.coeffs()) {
                prop_assert!((p - r).abs() <= 1e-11 * (1.0 + r.abs()));
            }
        }
    }
}
