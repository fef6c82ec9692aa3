//! Catalog schemas, builders, error paths and self-validation of the built-in pairs.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use abdg_core::backlund::{
    backlund_condition_report, pair_jets, parallel_transversal_criterion, psi_data, spherical_rank, ReportConfig,
};
use abdg_core::catalog::{
    entries, entry, make_a00, make_classical_pair, make_pair, make_parallel_pair, make_surface, resolve_params,
    EntryKind, Params,
};
use abdg_core::geometry::{degeneracy_ratio, ChartPoint};
use abdg_core::jets::Var;
use abdg_core::Error;
use approx::assert_relative_eq;

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn entry_names_are_unique_and_defaults_in_range() {
    let all = entries();
    let names: BTreeSet<_> = all.iter().map(|e| e.name).collect();
    assert_eq!(names.len(), all.len());
    for e in &all {
        for p in &e.params {
            assert!(p.min <= p.default && p.default <= p.max, "{}.{}", e.name, p.name);
        }
        assert_eq!(entry(e.name).unwrap(), *e);
    }
    assert!(matches!(entry("nope"), Err(Error::UnknownEntry(_))));
}

#[test]
fn every_entry_builds_with_defaults() {
    let none = Params::new();
    for e in entries() {
        match e.kind {
            EntryKind::Surface => {
                let expr = (e.name == "graph").then_some("u^2 + v^2/2");
                make_surface(e.name, &none, expr).unwrap();
            }
            EntryKind::Pair => {
                make_pair(e.name, &none).unwrap();
            }
            EntryKind::NormalForm => {
                make_a00(e.name, &none).unwrap();
            }
        }
    }
}

#[test]
fn parameter_errors() {
    let e = entry("classical").unwrap();
    assert!(matches!(
        resolve_params(&e, &params(&[("tau", 1.0)])),
        Err(Error::UnknownParam { .. })
    ));
    assert!(matches!(
        resolve_params(&e, &params(&[("sigma", 4.0)])),
        Err(Error::ParamOutOfRange { .. })
    ));
    assert!(matches!(
        resolve_params(&e, &params(&[("L", f64::NAN)])),
        Err(Error::ParamOutOfRange { .. })
    ));
    let r = resolve_params(&e, &params(&[("L", 2.0)])).unwrap();
    assert_eq!(r["L"], 2.0);
    assert_relative_eq!(r["sigma"], PI / 3.0);
    assert!(matches!(
        make_pair("rescaled", &params(&[("c", 0.0)])),
        Err(Error::ParamOutOfRange { .. })
    ));
    assert!(matches!(
        make_pair("parallel", &params(&[("lambda", 0.0)])),
        Err(Error::ParamOutOfRange { .. })
    ));
    // kind mismatches
    assert!(matches!(
        make_pair("unit-sphere", &Params::new()),
        Err(Error::UnknownEntry(_))
    ));
    assert!(matches!(
        make_surface("classical", &Params::new(), None),
        Err(Error::UnknownEntry(_))
    ));
    assert!(matches!(
        make_a00("classical", &Params::new()),
        Err(Error::UnknownEntry(_))
    ));
    // graph needs a valid expression and an ordered rectangle
    assert!(make_surface("graph", &Params::new(), None).is_err());
    assert!(matches!(
        make_surface("graph", &Params::new(), Some("u +* v")),
        Err(Error::Expr(_))
    ));
    assert!(matches!(
        make_surface("graph", &params(&[("u0", 1.0), ("u1", 0.0)]), Some("u*v")),
        Err(Error::ParamOutOfRange { .. })
    ));
}

#[test]
fn graph_surface_follows_its_expression() {
    let f = make_surface("graph", &params(&[("u0", 0.0), ("u1", 2.0)]), Some("sin(u) * v")).unwrap();
    assert_eq!(
        (f.domain.u0, f.domain.u1, f.domain.v0, f.domain.v1),
        (0.0, 2.0, -1.0, 1.0)
    );
    let x = f.point(ChartPoint::new(0.5, 0.3)).unwrap();
    assert_relative_eq!(x.z, 0.5f64.sin() * 0.3, epsilon = 1e-15);
}

#[test]
fn catalog_surfaces_are_nondegenerate_on_their_domains() {
    for name in [
        "elliptic-paraboloid",
        "hyperbolic-paraboloid",
        "unit-sphere",
        "pseudosphere",
    ] {
        let f = make_surface(name, &Params::new(), None).unwrap();
        for p in f.domain.grid(9, 9) {
            let j = f.jets(p, 2).unwrap();
            let fu = j.derivative(Var::U).unwrap().value();
            let fv = j.derivative(Var::V).unwrap().value();
            assert!(fu.cross(&fv).norm() / (fu.norm() * fv.norm()) >= 1e-3, "{name} at {p}");
            assert!(degeneracy_ratio(&j).unwrap() > 1e-3, "{name} at {p}");
        }
    }
}

#[test]
fn classical_pair_self_validation() {
    for (sigma, l) in [(PI / 3.0, 1.0), (0.7, 2.0), (2.2, 0.5)] {
        let pair = make_classical_pair(sigma, l).unwrap();
        for p in pair.domain.grid(12, 12) {
            let j = pair_jets(&pair, p, 0).unwrap();
            assert!((j.v1.value().norm() - l).abs() < 1e-8 * l);
            assert!(j.tangency < 1e-8);
            let cos = j.xi.value().dot(&j.xihat.value());
            assert!((cos - sigma.cos()).abs() < 1e-8);
            assert!((j.a.value() - sigma.cos()).abs() < 1e-7);
            assert!((j.ahat.value() - sigma.cos()).abs() < 1e-7);
            let d = psi_data(&pair, p).unwrap();
            let k = -sigma.sin().powi(2) / (l * l);
            assert!(
                (d.h - k).abs() < 1e-5 && (d.hhat - k).abs() < 1e-5,
                "{p}: {} {}",
                d.h,
                d.hhat
            );
        }
    }
}

#[test]
fn classical_pair_parameter_guards() {
    assert!(matches!(
        make_classical_pair(0.0, 1.0),
        Err(Error::ParamOutOfRange { .. })
    ));
    assert!(matches!(
        make_classical_pair(1.0, -1.0),
        Err(Error::ParamOutOfRange { .. })
    ));
    let right = make_classical_pair(PI / 2.0, 1.0).unwrap();
    assert!(!right.notes.is_empty());
    let rep = backlund_condition_report(&right, &ReportConfig::with_grid(8, 8));
    assert!(rep.failing().contains(&"4°"));
}

#[test]
fn parallel_pair_construction() {
    let pair = make_pair("parallel", &Params::new()).unwrap();
    for p in pair.domain.grid(7, 7) {
        let c = parallel_transversal_criterion(&pair, p).unwrap();
        assert!(c.parallel_residual < 1e-10);
        assert!((c.lambda - 2.0).abs() < 1e-8);
        let r = spherical_rank(&pair, p).unwrap();
        assert_eq!(r.rank, 2, "{p}");
        assert!(r.consistent());
    }
    assert!(make_parallel_pair(1.0, 0.3).is_ok());
}

/// Each spoiler fails exactly its own condition, with a witness.
#[test]
fn spoilers_fail_exactly_their_condition() {
    let cfg = ReportConfig {
        conclusions: false,
        ..ReportConfig::with_grid(10, 10)
    };
    for (i, id) in ["1°", "2°", "3°", "4°", "5°", "6°", "7°"].iter().enumerate() {
        let name = format!("spoiler-{}", i + 1);
        let pair = make_pair(&name, &Params::new()).unwrap();
        let rep = backlund_condition_report(&pair, &cfg);
        assert_eq!(rep.failing(), vec![*id], "{name}");
        assert!(rep.condition(id).unwrap().witness.is_some());
    }
    let classical = make_pair("classical", &Params::new()).unwrap();
    assert!(backlund_condition_report(&classical, &cfg).all_satisfied());
}

#[test]
fn a00_entries() {
    let pos = make_a00("a00-positive", &Params::new()).unwrap();
    assert_eq!(pos.w, 1.0);
    assert!(make_a00("a00-positive", &params(&[("x", 1.0)])).is_err());
}
