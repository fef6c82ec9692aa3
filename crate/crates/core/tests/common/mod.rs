//! Shared oracles for the integration tests.
#![allow(dead_code)]

use abdg_core::expr::parse_expr;
use abdg_core::geometry::ChartPoint;
use abdg_core::jets::{lift_variable, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Central difference of `f` along `u` (`dir = 0`) or `v` (`dir = 1`) at `h` and `h/2`, combined
/// by Richardson extrapolation (error `O(h⁴)`).
pub fn richardson(f: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, dir: usize, h: f64) -> f64 {
    let c = |h: f64| {
        let (du, dv) = if dir == 0 { (h, 0.0) } else { (0.0, h) };
        (f(u + du, v + dv) - f(u - du, v - dv)) / (2.0 * h)
    };
    (4.0 * c(h / 2.0) - c(h)) / 3.0
}

/// Random points of a rectangle.
pub fn random_points(r: &mut ChaCha8Rng, n: usize, u: (f64, f64), v: (f64, f64)) -> Vec<ChartPoint> {
    (0..n)
        .map(|_| ChartPoint::new(r.gen_range(u.0..u.1), r.gen_range(v.0..v.1)))
        .collect()
}

/// A random well-conditioned expression in `u`, `v` (bounded arguments, denominators ≥ 1).
pub fn random_expression(r: &mut ChaCha8Rng, depth: usize) -> String {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..3) {
            0 => "u".into(),
            1 => "v".into(),
            _ => format!("{:.3}", r.gen_range(-2.0..2.0)),
        };
    }
    let a = random_expression(r, depth - 1);
    let b = random_expression(r, depth - 1);
    match r.gen_range(0..11) {
        0 => format!("({a} + {b})"),
        1 => format!("({a} - {b})"),
        2 => format!("({a} * {b})"),
        3 => format!("({a} / (2 + sin({b})))"),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(sin({a}))"),
        7 => format!("sqrt(1 + ({a})^2)"),
        8 => format!("atan({a})"),
        9 => format!("log(2 + cos({a}))"),
        _ => format!("tanh({a})"),
    }
}

/// Check that a parsed expression string evaluates at a point.
pub fn eval(src: &str, u: f64, v: f64) -> f64 {
    parse_expr(src).unwrap().eval(u, v).unwrap()
}

/// Worst relative disagreement `|jet − fd| / (1 + |jet|)` over `n` random expressions between
/// each jet partial of order 1..=3 and a Richardson difference of the partial one order lower
/// (order 1 differences the plain value), with the expression and partial attaining it.
pub fn fd_oracle_worst(seed: u64, n: usize) -> (f64, String) {
    let mut r = rng(seed);
    let mut worst = (0.0_f64, String::new());
    for _ in 0..n {
        let src = random_expression(&mut r, 4);
        let e = parse_expr(&src).unwrap();
        let (a, b) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let jet = |x: f64, y: f64, k: usize| {
            e.eval_jet(
                &lift_variable(x, Var::U, k).unwrap(),
                &lift_variable(y, Var::V, k).unwrap(),
            )
            .unwrap()
        };
        let j3 = jet(a, b, 3);
        for order in 1..=3usize {
            for i in 0..=order {
                let j = order - i;
                let (li, lj, dir) = if i > 0 { (i - 1, j, 0) } else { (i, j - 1, 1) };
                let lower = |x: f64, y: f64| jet(x, y, order - 1).partial(li, lj).unwrap();
                let fd = richardson(&lower, a, b, dir, 1e-3);
                let exact = j3.partial(i, j).unwrap();
                let rel = (exact - fd).abs() / (1.0 + exact.abs());
                if rel > worst.0 {
                    worst = (rel, format!("∂^({i},{j}) of {src} at ({a:.3}, {b:.3})"));
                }
            }
        }
    }
    worst
}
