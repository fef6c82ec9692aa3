//! Built-in surfaces, surface pairs and normal-form states, addressed by name with a
//! parameter schema.

mod classical;
pub mod surfaces;
pub mod synthetic;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use classical::{classical_domain, make_classical_pair, VALIDATION_TOL};
pub use synthetic::{
    focal_congruence, make_parallel_pair, DesignedTransversals, FocalCongruence, PlaneChoice, Scaling, FOCAL_DOMAIN,
    PARALLEL_DOMAIN, PARALLEL_SLOPE,
};

use crate::backlund::{A00State, SurfacePair};
use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::geometry::{Domain, ScalarField, SurfaceMap};

/// What an entry builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Surface,
    Pair,
    /// A state of the `A = Â = 0` normal form.
    NormalForm,
}

/// One parameter of an entry; values must lie in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub doc: &'static str,
}

/// A named catalog entry with its parameter schema and expected invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub summary: &'static str,
    pub params: Vec<ParamSpec>,
    /// Expected behaviour (which checks pass or fail).
    pub notes: &'static str,
}

const OPEN_EPS: f64 = 1e-9;

fn sigma() -> ParamSpec {
    ParamSpec {
        name: "sigma",
        default: PI / 3.0,
        min: OPEN_EPS,
        max: PI - OPEN_EPS,
        doc: "angle between the unit normals, σ ∈ (0, π)",
    }
}

fn length() -> ParamSpec {
    ParamSpec {
        name: "L",
        default: 1.0,
        min: 1e-6,
        max: 1e6,
        doc: "distance |f̂ − f|",
    }
}

fn graph_bounds() -> Vec<ParamSpec> {
    let p = |name, default, doc| ParamSpec {
        name,
        default,
        min: -1e6,
        max: 1e6,
        doc,
    };
    vec![
        p("u0", -1.0, "lower u bound"),
        p("u1", 1.0, "upper u bound"),
        p("v0", -1.0, "lower v bound"),
        p("v1", 1.0, "upper v bound"),
    ]
}

/// All catalog entries, in listing order.
pub fn entries() -> Vec<CatalogEntry> {
    use EntryKind::*;
    let e = |name, kind, summary, params, notes| CatalogEntry {
        name,
        kind,
        summary,
        params,
        notes,
    };
    vec![
        e(
            "elliptic-paraboloid",
            Surface,
            "(u, v, (u² + v²)/2) on [−1, 1]²",
            vec![],
            "Blaschke normal e₃; flat induced connection",
        ),
        e(
            "hyperbolic-paraboloid",
            Surface,
            "(u, v, (u² − v²)/2) on [−1, 1]²",
            vec![],
            "indefinite Blaschke metric",
        ),
        e(
            "unit-sphere",
            Surface,
            "longitude/latitude chart, |v| ≤ 1.2",
            vec![],
            "Blaschke normal −position",
        ),
        e(
            "pseudosphere",
            Surface,
            "(sech u cos v, sech u sin v, u − tanh u), u ∈ [0.5, 2.5]",
            vec![],
            "Gaussian curvature −1",
        ),
        e(
            "graph",
            Surface,
            "(u, v, g(u, v)) for an expression g",
            graph_bounds(),
            "requires an expression",
        ),
        e(
            "classical",
            Pair,
            "classical Bäcklund pair of K = −sin²σ/L² surfaces, unit normals as transversals",
            vec![sigma(), length()],
            "all of 1°–7° hold for σ ≠ π/2; ψ = 1; Euclidean case",
        ),
        e(
            "parallel",
            Pair,
            "focal surfaces of a line congruence with ξ = e₃, ξ̂ = e₃/λ; HĤ = β⁴ at the center for k = −1/4",
            vec![
                ParamSpec {
                    name: "lambda",
                    default: 2.0,
                    min: -1e3,
                    max: 1e3,
                    doc: "proportionality factor λ (nonzero)",
                },
                ParamSpec {
                    name: "k",
                    default: 0.3,
                    min: -5.0,
                    max: 5.0,
                    doc: "congruence offset k in φ = k + (u − v)/2",
                },
            ],
            "parallel transversals; conformal iff det h det ĥ = β⁴",
        ),
        e(
            "spoiler-1",
            Pair,
            "f̂ − f = (1, u, v) over a paraboloid",
            vec![],
            "fails only 1°",
        ),
        e(
            "spoiler-2",
            Pair,
            "f̂ − f = L(1, 0, v) over z = uv",
            vec![length()],
            "fails only 2°",
        ),
        e(
            "spoiler-3",
            Pair,
            "classical pair with ξ̂ = ξ",
            vec![sigma(), length()],
            "fails only 3°",
        ),
        e(
            "spoiler-4",
            Pair,
            "classical pair with ξ̂ scaled by 1 + u/10",
            vec![sigma(), length()],
            "fails only 4°",
        ),
        e(
            "spoiler-5",
            Pair,
            "focal pair with designed transversals",
            vec![],
            "fails only 5°",
        ),
        e(
            "spoiler-6",
            Pair,
            "classical pair, transversals in a tilted plane",
            vec![sigma(), length()],
            "fails only 6°",
        ),
        e(
            "spoiler-7",
            Pair,
            "classical pair, transversal scales a(u), c(v)",
            vec![sigma(), length()],
            "fails only 7°",
        ),
        e(
            "rescaled",
            Pair,
            "classical pair with ξ multiplied by a constant c",
            vec![
                sigma(),
                length(),
                ParamSpec {
                    name: "c",
                    default: 1.3,
                    min: -1e3,
                    max: 1e3,
                    doc: "scale factor (nonzero)",
                },
            ],
            "the surfaces are unchanged, so ψ stays 1",
        ),
        e(
            "offset",
            Pair,
            "paraboloid and its translate along ξ = e₃",
            vec![],
            "fails tangency",
        ),
        e(
            "constant-direction",
            Pair,
            "cylinder z = v² and its translate by e₁/2",
            vec![],
            "W = 0; spherical rank 0",
        ),
        e(
            "mixed-convexity",
            Pair,
            "elliptic over hyperbolic paraboloid",
            vec![],
            "ε ≠ ε̂ for Blaschke normals",
        ),
        e(
            "saddle-stack",
            Pair,
            "two stacked hyperbolic paraboloids",
            vec![],
            "Â + εA = 0 for Blaschke normals",
        ),
        e(
            "a00-positive",
            NormalForm,
            "H = 2, e^{2γ} = F(x + ky) built so that α is constant",
            vec![],
            "∇ locally symmetric (α constant)",
        ),
        e(
            "a00-negative",
            NormalForm,
            "γ = 0.3x + 0.5y + 0.1xy, H = 1 + 0.2x + 0.1y²",
            vec![],
            "neither α nor β constant",
        ),
    ]
}

/// Look up an entry by name.
pub fn entry(name: &str) -> Result<CatalogEntry> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// Parameter values given by name; missing ones take their defaults.
pub type Params = BTreeMap<String, f64>;

/// Resolve `given` against the schema of `entry`: reject unknown names and out-of-range values,
/// fill in defaults.
pub fn resolve_params(entry: &CatalogEntry, given: &Params) -> Result<Params> {
    for name in given.keys() {
        if !entry.params.iter().any(|p| p.name == name) {
            return Err(Error::UnknownParam {
                entry: entry.name.to_string(),
                param: name.clone(),
            });
        }
    }
    let mut out = Params::new();
    for spec in &entry.params {
        let value = given.get(spec.name).copied().unwrap_or(spec.default);
        if !(value >= spec.min && value <= spec.max) {
            return Err(Error::ParamOutOfRange {
                name: spec.name.to_string(),
                value,
            });
        }
        out.insert(spec.name.to_string(), value);
    }
    Ok(out)
}

fn kind_mismatch(name: &str) -> Error {
    Error::UnknownEntry(name.to_string())
}

/// Build a surface entry. `expression` is required for `graph` and ignored otherwise.
pub fn make_surface(name: &str, params: &Params, expression: Option<&str>) -> Result<SurfaceMap> {
    let e = entry(name)?;
    if e.kind != EntryKind::Surface {
        return Err(kind_mismatch(name));
    }
    let p = resolve_params(&e, params)?;
    Ok(match name {
        "elliptic-paraboloid" => surfaces::elliptic_paraboloid(),
        "hyperbolic-paraboloid" => surfaces::hyperbolic_paraboloid(),
        "unit-sphere" => surfaces::unit_sphere(),
        "pseudosphere" => surfaces::pseudosphere(),
        "graph" => {
            let src = expression.ok_or_else(|| Error::ConstructionFailed("graph requires an expression".into()))?;
            let g = parse_expr(src)?;
            let (u0, u1, v0, v1) = (p["u0"], p["u1"], p["v0"], p["v1"]);
            if !(u0 < u1) {
                return Err(Error::ParamOutOfRange {
                    name: "u1".into(),
                    value: u1,
                });
            }
            if !(v0 < v1) {
                return Err(Error::ParamOutOfRange {
                    name: "v1".into(),
                    value: v1,
                });
            }
            surfaces::graph(&format!("graph z = {src}"), g, Domain::new(u0, u1, v0, v1))
        }
        _ => unreachable!("entry list and builder disagree"),
    })
}

fn nonzero(name: &str, value: f64) -> Result<f64> {
    if value == 0.0 {
        Err(Error::ParamOutOfRange {
            name: name.into(),
            value,
        })
    } else {
        Ok(value)
    }
}

/// Build a pair entry.
pub fn make_pair(name: &str, params: &Params) -> Result<SurfacePair> {
    let e = entry(name)?;
    if e.kind != EntryKind::Pair {
        return Err(kind_mismatch(name));
    }
    let p = resolve_params(&e, params)?;
    let sl = || (p["sigma"], p["L"]);
    Ok(match name {
        "classical" => make_classical_pair(sl().0, sl().1)?,
        "parallel" => make_parallel_pair(nonzero("lambda", p["lambda"])?, p["k"])?,
        "spoiler-1" => synthetic::spoiler_1(),
        "spoiler-2" => synthetic::spoiler_2(p["L"]),
        "spoiler-3" => synthetic::spoiler_3(sl().0, sl().1)?,
        "spoiler-4" => synthetic::spoiler_4(sl().0, sl().1)?,
        "spoiler-5" => synthetic::spoiler_5(),
        "spoiler-6" => synthetic::spoiler_6(sl().0, sl().1)?,
        "spoiler-7" => synthetic::spoiler_7(sl().0, sl().1)?,
        "rescaled" => synthetic::rescaled_classical(sl().0, sl().1, nonzero("c", p["c"])?)?,
        "offset" => synthetic::transversal_offset(),
        "constant-direction" => synthetic::constant_direction(),
        "mixed-convexity" => synthetic::mixed_convexity(),
        "saddle-stack" => synthetic::saddle_stack(),
        _ => unreachable!("entry list and builder disagree"),
    })
}

/// Build a normal-form state entry.
pub fn make_a00(name: &str, params: &Params) -> Result<A00State> {
    let e = entry(name)?;
    if e.kind != EntryKind::NormalForm {
        return Err(kind_mismatch(name));
    }
    resolve_params(&e, params)?;
    Ok(match name {
        "a00-positive" => a00_positive(),
        "a00-negative" => a00_negative(),
        _ => unreachable!("entry list and builder disagree"),
    })
}

/// `H = 2`, `W = 1`, `e^{2γ} = F(s)` with `s = x + ky`, `k = 0.7`,
/// `F = (Q + √(Q² + 4W²Hk²))/2` and `Q = s²/2 + s + 1/2`. For this `F` the defining equation
/// gives a constant `α`, so `∇` is locally symmetric.
pub fn a00_positive() -> A00State {
    const K: f64 = 0.7;
    const H: f64 = 2.0;
    const W: f64 = 1.0;
    let gamma = ScalarField::new(|p, k| {
        let (x, y) = p.vars(k);
        let s = x + y * K;
        let q = s * s * 0.5 + s + 0.5;
        let f = (q + (q * q + 4.0 * W * W * H * K * K).sqrt()?) * 0.5;
        Ok(f.ln()? * 0.5)
    });
    A00State::manufactured(gamma, ScalarField::constant(H), W, Domain::new(0.1, 0.9, 0.1, 0.9))
}

/// `γ = 0.3x + 0.5y + 0.1xy`, `H = 1 + 0.2x + 0.1y²`: a generic state.
pub fn a00_negative() -> A00State {
    let gamma = ScalarField::new(|p, k| {
        let (x, y) = p.vars(k);
        Ok(x * 0.3 + y * 0.5 + x * y * 0.1)
    });
    let h = ScalarField::new(|p, k| {
        let (x, y) = p.vars(k);
        Ok(x * 0.2 + y * y * 0.1 + 1.0)
    });
    A00State::manufactured(gamma, h, 1.0, Domain::new(0.1, 0.9, 0.1, 0.9))
}
