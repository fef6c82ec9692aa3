//! Acceptance suite: one pass/fail line per criterion.
//!
//! Criterion 2 contains a sub-check that cannot hold: `ψ` and the conformality defect are
//! unchanged when `ξ` is multiplied by a constant (the factors cancel in `((1 − AÂ)/W)⁴/(HĤ)`,
//! and the surfaces themselves do not change). That line is printed as FAIL with the measured
//! values and is the only failure the suite tolerates.

#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use abdg_core::backlund::{
    a00_residuals, affine_minimality, backlund_condition_report, connection_curvature, covariant_derivative_r,
    metric_reconstruction, pair_frame_fields, pair_jets, parallel_transversal_criterion, psi, psi_data, spherical_rank,
    A00State, NablaMode, ReportConfig, SurfacePair,
};
use abdg_core::catalog::surfaces::{elliptic_paraboloid, hyperbolic_paraboloid, pseudosphere, unit_sphere};
use abdg_core::catalog::{entries, make_classical_pair, make_pair, make_parallel_pair, EntryKind, Params};
use abdg_core::forms::{structural_residuals, DerivativeMode};
use abdg_core::geometry::{ScalarField, TangentField, TransversalField};
use abdg_core::jets::{lift_variable, Var};
use nalgebra::Vector3;
use rand::Rng;

const SIGMA: f64 = PI / 3.0;

/// Criteria whose failure is expected (see the module documentation).
const KNOWN_FAILURES: &[usize] = &[2];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn classical() -> SurfacePair {
    make_classical_pair(SIGMA, 1.0).unwrap()
}

fn c1_curvature() -> Outcome {
    let pair = classical();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t0 = Instant::now();
    let worst = pool.install(|| {
        pair.domain
            .grid(64, 64)
            .into_iter()
            .map(|p| {
                let d = psi_data(&pair, p).unwrap();
                (d.h + 0.75).abs().max((d.hhat + 0.75).abs())
            })
            .fold(0.0_f64, f64::max)
    });
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst < 1e-5 && secs < 30.0,
        format!("max |H + 0.75|, |Ĥ + 0.75| = {worst:.2e} on 64×64 in {secs:.2} s (1 thread)"),
    )
}

fn c2_psi() -> Outcome {
    let pair = classical();
    let (mut psi_dev, mut defect): (f64, f64) = (0.0, 0.0);
    for p in pair.domain.grid(64, 64) {
        let (d, pm1) = abdg_core::backlund::conformality_defect(&pair, p).unwrap();
        psi_dev = psi_dev.max(pm1.abs());
        defect = defect.max(d);
    }
    let classical_ok = psi_dev < 1e-6 && defect < 1e-6;
    let c: f64 = 1.3;
    let rescaled = make_pair("rescaled", &[("c".to_string(), c)].into_iter().collect()).unwrap();
    let (mut psi_err, mut min_defect): (f64, f64) = (0.0, f64::INFINITY);
    for p in rescaled.domain.grid(16, 16) {
        let (d, pm1) = abdg_core::backlund::conformality_defect(&rescaled, p).unwrap();
        psi_err = psi_err.max((pm1 + 1.0 - c.powi(4)).abs());
        min_defect = min_defect.min(d);
    }
    let spoiler_ok = psi_err < 1e-6 && min_defect > 1e-2;
    outcome(
        classical_ok && spoiler_ok,
        format!(
            "classical: max|ψ−1| = {psi_dev:.2e}, max defect = {defect:.2e} ({}); rescaled c = 1.3: \
             max|ψ − c⁴| = {psi_err:.3e}, min defect = {min_defect:.2e} ({}; ψ is invariant under \
             constant rescaling, so ψ = c⁴ is unattainable)",
            if classical_ok { "ok" } else { "FAIL" },
            if spoiler_ok { "ok" } else { "FAIL" },
        ),
    )
}

fn c3_conditions() -> Outcome {
    let cfg = ReportConfig {
        conclusions: false,
        ..ReportConfig::with_grid(16, 16)
    };
    let rep = backlund_condition_report(&classical(), &cfg);
    let mut ok = rep.all_satisfied();
    let mut parts = vec![format!("classical all seven: {}", rep.all_satisfied())];
    for (i, id) in ["1°", "2°", "3°", "4°", "5°", "6°", "7°"].iter().enumerate() {
        let name = format!("spoiler-{}", i + 1);
        let pair = make_pair(&name, &Params::new()).unwrap();
        let rep = backlund_condition_report(&pair, &cfg);
        let failing = rep.failing();
        let witness = rep.condition(id).and_then(|c| c.witness);
        let good = failing == vec![*id] && witness.is_some();
        ok &= good;
        parts.push(format!("{name} fails {failing:?}"));
    }
    outcome(ok, parts.join("; "))
}

fn c4_symmetry() -> Outcome {
    let rep = backlund_condition_report(&classical(), &ReportConfig::with_grid(16, 16));
    let c = rep.conclusions.unwrap();
    let (n, nh) = (c.nabla_r_norm.unwrap(), c.nabla_rhat_norm.unwrap());
    let classical_ok = n < 1e-5 && nh < 1e-5 && c.dim_im_r == Some(2) && c.dim_im_rhat == Some(2) && c.dim_uniform;
    let f = elliptic_paraboloid();
    let e3 = TransversalField::constant(Vector3::new(0.0, 0.0, 1.0));
    let (mut flat_norm, mut flat_dim): (f64, usize) = (0.0, 0);
    for p in f.domain.grid(8, 8) {
        let r = covariant_derivative_r(&f, &e3, p, NablaMode::Jet).unwrap();
        let cur = connection_curvature(&f, &e3, p).unwrap();
        flat_norm = flat_norm.max(r.norm).max(r.r_norm);
        flat_dim = flat_dim.max(r.dim_im_r).max(cur.dim_im_r);
    }
    let flat_ok = flat_norm == 0.0 && flat_dim == 0;
    outcome(
        classical_ok && flat_ok,
        format!(
            "classical ‖∇R‖ = {n:.2e}, ‖∇̂R̂‖ = {nh:.2e}, dim Im R = {:?}/{:?}; paraboloid ‖∇R‖ = {flat_norm:.1e}, \
             dim Im R = {flat_dim}",
            c.dim_im_r, c.dim_im_rhat
        ),
    )
}

fn c5_metric() -> Outcome {
    let pair = classical();
    let mut ok = true;
    let (mut dg, mut dk, mut dcos): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for p in pair.domain.shrunk(0.02).grid(8, 8) {
        let m = metric_reconstruction(&pair, p).unwrap();
        ok &= m.delta == -1 && m.eigenvalues.iter().all(|e| *e > 0.0);
        dg = dg.max(m.dg_residual);
        dk = dk
            .max((m.kappa - m.delta as f64).abs())
            .max((m.kappahat - m.delta as f64).abs());
        let predicted = m.ahat.signum() * (m.a * m.ahat).sqrt();
        dcos = dcos.max((m.cos_angle.unwrap_or(f64::NAN) - predicted).abs());
    }
    ok &= dg < 1e-6 && dk < 1e-5 && dcos < 1e-6;
    outcome(
        ok,
        format!("δ = −1, G > 0; max DG = {dg:.2e}, max |κ − δ| = {dk:.2e}, max |cos∠ − sgn Â √(AÂ)| = {dcos:.2e}"),
    )
}

fn random_change(r: &mut impl Rng) -> (ScalarField, TangentField) {
    let c: [f64; 3] = [r.gen_range(0.7..1.6), r.gen_range(-0.2..0.2), r.gen_range(-0.2..0.2)];
    let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
    let z: [f64; 4] = std::array::from_fn(|_| r.gen_range(-0.3..0.3));
    let lambda = ScalarField::new(move |p, k| {
        let (u, v) = p.vars(k);
        Ok((u * c[1] + (v * c[2]).sin()? + c[0]) * sign)
    });
    let zf = TangentField::new(move |p, k| {
        let (u, v) = p.vars(k);
        Ok([u * v * z[1] + z[0], v * z[3] + z[2]])
    });
    (lambda, zf)
}

fn c6_invariance() -> Outcome {
    let mut r = common::rng(606);
    let pairs = ["classical", "spoiler-5", "spoiler-6"].map(|n| make_pair(n, &Params::new()).unwrap());
    let (mut drift, mut identity): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for base in &pairs {
        let d = base.domain.shrunk(0.05);
        for _ in 0..34 {
            let p = common::random_points(&mut r, 1, (d.u0, d.u1), (d.v0, d.v1))[0];
            let (l, z) = random_change(&mut r);
            let (m, y) = random_change(&mut r);
            let changed =
                base.with_transversals(base.xi.changed(&base.f, &l, &z), base.xihat.changed(&base.fhat, &m, &y));
            let (a, b) = (psi(base, p).unwrap(), psi(&changed, p).unwrap());
            drift = drift.max((a - b).abs() / a.abs());
            // 1 − ÃĀ = (1 − AÂ) W̃ / (λ μ W)
            let j0 = pair_jets(base, p, 0).unwrap();
            let j1 = pair_jets(&changed, p, 0).unwrap();
            let (lv, mv) = (l.jets(p, 0).unwrap().value(), m.jets(p, 0).unwrap().value());
            let lhs = 1.0 - j1.a.value() * j1.ahat.value();
            let rhs = (1.0 - j0.a.value() * j0.ahat.value()) * j1.w.value() / (lv * mv * j0.w.value());
            identity = identity.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
            count += 1;
        }
    }
    outcome(
        drift < 1e-6 && identity < 1e-7,
        format!("{count} random changes on 3 pairs: max ψ drift = {drift:.2e}, identity residual = {identity:.2e}"),
    )
}

fn c7_rank() -> Outcome {
    let (mut checked, mut disagreements, mut worst_identity) = (0usize, 0usize, 0.0_f64);
    let mut skipped = 0usize;
    for e in entries().into_iter().filter(|e| e.kind == EntryKind::Pair) {
        let pair = make_pair(e.name, &Params::new()).unwrap();
        for p in pair.domain.grid(8, 8) {
            match spherical_rank(&pair, p) {
                Ok(r) => {
                    checked += 1;
                    if !r.consistent() {
                        disagreements += 1;
                    }
                    if r.rank == 2 {
                        worst_identity = worst_identity.max(r.identity_residual);
                    }
                }
                Err(_) => skipped += 1,
            }
        }
    }
    outcome(
        disagreements == 0 && worst_identity < 1e-7,
        format!(
            "{checked} points on all catalog pairs: {disagreements} disagreements, determinant identity \
             residual {worst_identity:.2e} ({skipped} points without a valid frame)"
        ),
    )
}

/// `(H Ĥ − β⁴, conformality defect)` of the parallel pair with offset `k`, at the domain center.
fn parallel_defects(k: f64) -> (f64, f64) {
    let pair = make_parallel_pair(2.0, k).unwrap();
    let c = parallel_transversal_criterion(&pair, pair.domain.center()).unwrap();
    (c.defect, c.conformality_defect)
}

fn c8_parallel() -> Outcome {
    // recovery of (λ, β) against the construction and an independent conormal formula
    let mut recovery: f64 = 0.0;
    for (lambda0, k) in [(2.0, 0.3), (-0.7, 0.1)] {
        let pair = make_parallel_pair(lambda0, k).unwrap();
        for p in pair.domain.grid(5, 5) {
            let c = parallel_transversal_criterion(&pair, p).unwrap();
            let j = pair_jets(&pair, p, 0).unwrap();
            let fx2 = j.fu.value() * c.x2[0] + j.fv.value() * c.x2[1];
            let n = j.fhu.value().cross(&j.fhv.value());
            let beta = -lambda0 * n.dot(&fx2) / n.z;
            recovery = recovery
                .max((c.lambda - lambda0).abs() / lambda0.abs())
                .max((c.beta - beta).abs() / (1.0 + beta.abs()));
        }
    }
    // 10-cell sweep of the congruence offset
    let ks: Vec<f64> = (0..=10).map(|i| -0.31 + 0.025 * i as f64).collect();
    let vals: Vec<(f64, f64)> = ks.iter().map(|k| parallel_defects(*k)).collect();
    let sign_cells: Vec<usize> = (0..10)
        .filter(|&i| vals[i].0.signum() != vals[i + 1].0.signum())
        .collect();
    let imin = (0..=10).min_by(|&a, &b| vals[a].1.total_cmp(&vals[b].1)).unwrap();
    // golden-section refinement of the defect minimum around the best node
    let (mut lo, mut hi) = (ks[imin.saturating_sub(1)], ks[(imin + 1).min(10)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if parallel_defects(a).1 < parallel_defects(b).1 {
            hi = b;
        } else {
            lo = a;
        }
    }
    let kmin = 0.5 * (lo + hi);
    let min_cell = ((kmin - ks[0]) / 0.025).floor() as usize;
    // bisection on H Ĥ − β⁴ within the sign-change cell
    let (root, defect_at_root) = match sign_cells.as_slice() {
        [i] => {
            let (mut a, mut b) = (ks[*i], ks[*i + 1]);
            let fa = parallel_defects(a).0;
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if parallel_defects(m).0.signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let r = 0.5 * (a + b);
            (r, parallel_defects(r).1)
        }
        _ => (f64::NAN, f64::NAN),
    };
    let ok = recovery < 1e-8 && sign_cells.len() == 1 && sign_cells[0] == min_cell && defect_at_root < 1e-8;
    outcome(
        ok,
        format!(
            "(λ, β) recovery {recovery:.1e}; HĤ − β⁴ changes sign in cell {sign_cells:?}, conformality defect \
             minimal at k = {kmin:.6} (cell {min_cell}); root k = {root:.9}, defect there {defect_at_root:.1e}"
        ),
    )
}

fn constant_spread(f: &ScalarField, state: &A00State) -> f64 {
    let vals: Vec<f64> = state
        .domain
        .grid(12, 12)
        .into_iter()
        .map(|p| f.jets(p, 0).unwrap().value())
        .collect();
    let (lo, hi) = vals
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)));
    (hi - lo) / (1.0 + hi.abs().max(lo.abs()))
}

fn c9_a00() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    // a generic manufactured state: defining equations and the identity hold by construction
    let gamma = ScalarField::new(|p, k| {
        let (u, v) = p.vars(k);
        Ok((u * 0.5 + v * 0.3 + u * v * 0.2).sin()? + u * 0.7 + v)
    });
    let h = ScalarField::new(|p, k| {
        let (u, v) = p.vars(k);
        Ok(u * 0.3 - v * 0.2 + 2.0)
    });
    let generic = A00State::manufactured(gamma, h, 1.3, abdg_core::geometry::Domain::new(0.1, 0.9, 0.1, 0.9));
    for (name, state) in [
        ("manufactured", generic),
        ("a00-positive", abdg_core::catalog::a00_positive()),
        ("a00-negative", abdg_core::catalog::a00_negative()),
    ] {
        let rep = a00_residuals(&state, 12, 12, 1e-8).unwrap();
        let defining = rep
            .alpha_equation
            .value
            .max(rep.beta_equation.value)
            .max(rep.identity.value);
        let alpha_const = constant_spread(&state.alpha, &state) < 1e-8;
        let beta_const = constant_spread(&state.beta, &state) < 1e-8;
        let verdicts = rep.nabla_symmetric == alpha_const && rep.nabla_hat_symmetric == beta_const;
        ok &= defining < 1e-8 && verdicts;
        parts.push(format!(
            "{name}: defining/identity residual {defining:.1e}, ∇ symmetric {} (α constant {alpha_const}), \
             ∇̂ symmetric {} (β constant {beta_const})",
            rep.nabla_symmetric, rep.nabla_hat_symmetric
        ));
    }
    // the positive instance must actually be symmetric and the negative one not
    let pos = a00_residuals(&abdg_core::catalog::a00_positive(), 12, 12, 1e-8).unwrap();
    let neg = a00_residuals(&abdg_core::catalog::a00_negative(), 12, 12, 1e-8).unwrap();
    ok &= pos.system_satisfied() && pos.nabla_symmetric && !neg.nabla_symmetric;
    outcome(ok, parts.join("; "))
}

fn c10_minimality() -> Outcome {
    let mut r = common::rng(1010);
    let surfaces = [
        elliptic_paraboloid(),
        hyperbolic_paraboloid(),
        unit_sphere(),
        pseudosphere(),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let f = &surfaces[i % 4];
        let d = f.domain.shrunk(0.05);
        let p = common::random_points(&mut r, 1, (d.u0, d.u1), (d.v0, d.v1))[0];
        worst = worst.max(affine_minimality(f, p).unwrap().agreement);
    }
    outcome(
        worst < 1e-7,
        format!("tr S vs 2-form proxy on 100 random points: max disagreement {worst:.2e}"),
    )
}

fn c11_jets() -> Outcome {
    // polynomial exactness: ∂^(i,j) of u³v² + 2uv − v⁴ at (0.6, −1.1)
    let (a, b) = (0.6, -1.1);
    let e = abdg_core::expr::parse_expr("u^3*v^2 + 2*u*v - v^4").unwrap();
    let j = e
        .eval_jet(
            &lift_variable(a, Var::U, 5).unwrap(),
            &lift_variable(b, Var::V, 5).unwrap(),
        )
        .unwrap();
    let exact = [
        ((0, 0), a.powi(3) * b * b + 2.0 * a * b - b.powi(4)),
        ((1, 0), 3.0 * a * a * b * b + 2.0 * b),
        ((0, 1), 2.0 * a.powi(3) * b + 2.0 * a - 4.0 * b.powi(3)),
        ((1, 1), 6.0 * a * a * b + 2.0),
        ((2, 2), 12.0 * a),
        ((3, 2), 12.0),
        ((0, 4), -24.0),
        ((4, 0), 0.0),
        ((2, 3), 0.0),
    ];
    let poly = exact
        .iter()
        .map(|((i, k), x)| (j.partial(*i, *k).unwrap() - x).abs())
        .fold(0.0_f64, f64::max);
    let (fd, at) = common::fd_oracle_worst(1111, 100);
    outcome(
        poly < 1e-12 && fd < 1e-7,
        format!("polynomial partials error {poly:.1e}; 100 random expressions, orders ≤ 3: max relative FD gap {fd:.2e} ({at})"),
    )
}

fn c12_convergence() -> Outcome {
    let pair = classical();
    let (f, fh) = pair_frame_fields(&pair);
    let steps = [0.04, 0.02, 0.01, 0.005];
    let mut min_ratio = f64::INFINITY;
    let mut series = Vec::new();
    let c = pair.domain.center();
    for (field, p) in [(&f, c), (&fh, c), (&f, c.offset(0.3, 0.1)), (&fh, c.offset(-0.2, 0.15))] {
        let res: Vec<f64> = steps
            .iter()
            .map(|h| {
                structural_residuals(field, p, DerivativeMode::Central { step: *h })
                    .unwrap()
                    .into_iter()
                    .fold(0.0_f64, f64::max)
            })
            .collect();
        for w in res.windows(2) {
            min_ratio = min_ratio.min(w[0] / w[1]);
        }
        series.push(format!("{:.1e}→{:.1e}", res[0], res[3]));
    }
    outcome(
        min_ratio >= 3.0,
        format!(
            "h = 0.04 … 0.005: residuals {}; smallest reduction per halving {min_ratio:.2}×",
            series.join(", ")
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("classical-pair curvature", c1_curvature),
        ("psi criterion", c2_psi),
        ("conditions 1°–7°", c3_conditions),
        ("local symmetry", c4_symmetry),
        ("metric reconstruction", c5_metric),
        ("psi invariance", c6_invariance),
        ("rank lemma", c7_rank),
        ("parallel-transversal criterion", c8_parallel),
        ("A00 manufactured solutions", c9_a00),
        ("affine minimality desk check", c10_minimality),
        ("jet engine", c11_jets),
        ("convergence", c12_convergence),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let o = run();
        println!(
            "criterion {n:>2} {}: {name} — {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass && !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
