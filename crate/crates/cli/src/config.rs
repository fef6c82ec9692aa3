//! Run configuration: the `NxM` grid spec, the `key = value` config file, and validation of the
//! merged settings.

use std::collections::BTreeMap;
use std::path::PathBuf;

use abdg_core::backlund::{DEFAULT_TOL_ALG, DEFAULT_TOL_DIFF};
use abdg_core::catalog::{self, EntryKind, Params};

/// Smallest accepted grid size per direction.
pub const MIN_GRID: usize = 8;
/// Largest accepted grid size per direction.
pub const MAX_GRID: usize = 4096;
/// Accepted jet orders.
pub const ORDER_RANGE: std::ops::RangeInclusive<usize> = 3..=6;
/// Default grid.
pub const DEFAULT_GRID: (usize, usize) = (16, 16);
/// Default jet order.
pub const DEFAULT_ORDER: usize = 4;

/// A configuration problem (exit code 2).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid grid spec {0:?}: expected NxM with integers")]
    GridSyntax(String),
    #[error("grid {nu}x{nv} is out of range: each side must be in {MIN_GRID}..={MAX_GRID}")]
    GridRange { nu: usize, nv: usize },
    #[error("config line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },
    #[error("config line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {msg}")]
    BadValue { key: String, value: String, msg: String },
    #[error("select exactly one of --pair or --surface")]
    Selection,
    #[error("{0}")]
    Catalog(String),
    #[error("jet order {0} is outside {lo}..={hi}", lo = ORDER_RANGE.start(), hi = ORDER_RANGE.end())]
    Order(usize),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error("check {check:?} needs a {needs}, but {name:?} is a {has}")]
    CheckNotApplicable {
        check: String,
        needs: &'static str,
        name: String,
        has: &'static str,
    },
}

/// Parse a grid spec `NxM` (`N`, `M` decimal integers, `x` or `X`, surrounding whitespace
/// allowed) and enforce the size limits.
pub fn parse_grid(spec: &str) -> Result<(usize, usize), ConfigError> {
    let syntax = || ConfigError::GridSyntax(spec.to_string());
    let s = spec.trim();
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(syntax)?;
    let num = |t: &str| -> Result<usize, ConfigError> {
        let t = t.trim();
        if t.is_empty() || !t.bytes().all(|c| c.is_ascii_digit()) {
            return Err(syntax());
        }
        t.parse::<usize>().map_err(|_| syntax())
    };
    let (nu, nv) = (num(a)?, num(b)?);
    if !(MIN_GRID..=MAX_GRID).contains(&nu) || !(MIN_GRID..=MAX_GRID).contains(&nv) {
        return Err(ConfigError::GridRange { nu, nv });
    }
    Ok((nu, nv))
}

/// Keys accepted in a config file; `param.NAME` keys are accepted in addition.
pub const CONFIG_KEYS: &[&str] = &[
    "pair", "surface", "expr", "sigma", "L", "grid", "order", "tol-alg", "tol-diff", "checks", "out", "csv",
];

/// Parse a `key = value` config file. Blank lines and lines starting with `#` are skipped;
/// keys must be known and unique; values are trimmed and may be empty only for `expr`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| ConfigError::ConfigSyntax {
            line,
            msg: "expected key = value".into(),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::ConfigSyntax {
                line,
                msg: "empty key".into(),
            });
        }
        let known = CONFIG_KEYS.contains(&k)
            || k.strip_prefix("param.")
                .is_some_and(|n| !n.is_empty() && !n.contains(char::is_whitespace));
        if !known {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: k.to_string(),
            });
        }
    }
    Ok(out)
}

/// The checks a run can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Gw,
    Blaschke,
    Psi,
    Rank,
    Conditions,
    Curvature,
    Metric,
    A00,
    ChernTerng,
    BlaschkePair,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Gw,
        Check::Blaschke,
        Check::Psi,
        Check::Rank,
        Check::Conditions,
        Check::Curvature,
        Check::Metric,
        Check::A00,
        Check::ChernTerng,
        Check::BlaschkePair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Gw => "gw",
            Check::Blaschke => "blaschke",
            Check::Psi => "psi",
            Check::Rank => "rank",
            Check::Conditions => "conditions",
            Check::Curvature => "curvature",
            Check::Metric => "metric",
            Check::A00 => "a00",
            Check::ChernTerng => "chern-terng",
            Check::BlaschkePair => "blaschke-pair",
        }
    }

    pub fn parse(s: &str) -> Result<Check, ConfigError> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::UnknownCheck(s.to_string()))
    }

    /// Entry kinds the check applies to.
    pub fn applies_to(self, kind: EntryKind) -> bool {
        use EntryKind::*;
        match self {
            Check::Gw | Check::Blaschke | Check::Curvature | Check::ChernTerng => matches!(kind, Surface | Pair),
            Check::Psi | Check::Rank | Check::Conditions | Check::Metric | Check::BlaschkePair => kind == Pair,
            Check::A00 => kind == NormalForm,
        }
    }

    fn needs(self) -> &'static str {
        match self {
            Check::A00 => "normal-form entry",
            Check::Gw | Check::Blaschke | Check::Curvature | Check::ChernTerng => "surface or pair",
            _ => "pair",
        }
    }
}

/// Parse a comma-separated check list (duplicates removed, order kept).
pub fn parse_checks(list: &str) -> Result<Vec<Check>, ConfigError> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let c = Check::parse(item)?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Default checks per entry kind.
pub fn default_checks(kind: EntryKind) -> Vec<Check> {
    match kind {
        EntryKind::Surface => vec![Check::Gw, Check::Blaschke],
        EntryKind::Pair => vec![Check::Conditions],
        EntryKind::NormalForm => vec![Check::A00],
    }
}

pub fn kind_name(kind: EntryKind) -> &'static str {
    match kind {
        EntryKind::Surface => "surface",
        EntryKind::Pair => "pair",
        EntryKind::NormalForm => "normal-form",
    }
}

/// Settings before validation; every field optional so that flags can override the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawSettings {
    pub pair: Option<String>,
    pub surface: Option<String>,
    pub expr: Option<String>,
    pub params: BTreeMap<String, String>,
    pub grid: Option<String>,
    pub order: Option<String>,
    pub tol_alg: Option<String>,
    pub tol_diff: Option<String>,
    pub checks: Option<String>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl RawSettings {
    /// Settings from a parsed config file.
    pub fn from_config(map: &BTreeMap<String, String>) -> Self {
        let mut s = RawSettings::default();
        for (k, v) in map {
            let v = v.clone();
            match k.as_str() {
                "pair" => s.pair = Some(v),
                "surface" => s.surface = Some(v),
                "expr" => s.expr = Some(v),
                "grid" => s.grid = Some(v),
                "order" => s.order = Some(v),
                "tol-alg" => s.tol_alg = Some(v),
                "tol-diff" => s.tol_diff = Some(v),
                "checks" => s.checks = Some(v),
                "out" => s.out = Some(v.into()),
                "csv" => s.csv = Some(v.into()),
                "sigma" | "L" => {
                    s.params.insert(k.clone(), v);
                }
                other => {
                    let name = other.strip_prefix("param.").unwrap_or(other);
                    s.params.insert(name.to_string(), v);
                }
            }
        }
        s
    }

    /// `self` with every field set in `over` replaced (parameters merged by name).
    pub fn overridden_by(mut self, over: RawSettings) -> Self {
        // a selection on the command line replaces the file's selection entirely
        if over.pair.is_some() || over.surface.is_some() {
            self.pair = over.pair;
            self.surface = over.surface;
        }
        macro_rules! take {
            ($($f:ident),*) => {$(if over.$f.is_some() { self.$f = over.$f; })*};
        }
        take!(expr, grid, order, tol_alg, tol_diff, checks, out, csv);
        self.params.extend(over.params);
        self
    }
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub kind: EntryKind,
    pub params: Params,
    pub expr: Option<String>,
    pub grid: (usize, usize),
    pub order: usize,
    pub tol_alg: f64,
    pub tol_diff: f64,
    pub checks: Vec<Check>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    let bad = |msg: &str| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        msg: msg.to_string(),
    };
    let x: f64 = value.trim().parse().map_err(|_| bad("not a number"))?;
    if !x.is_finite() {
        return Err(bad("not finite"));
    }
    Ok(x)
}

fn tolerance(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x = number(key, value)?;
    if x <= 0.0 {
        return Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            msg: "must be positive".into(),
        });
    }
    Ok(x)
}

impl RunConfig {
    /// Validate raw settings against the catalog and the limits.
    pub fn from_raw(raw: RawSettings) -> Result<RunConfig, ConfigError> {
        let name = match (&raw.pair, &raw.surface) {
            (Some(n), None) | (None, Some(n)) => n.clone(),
            _ => return Err(ConfigError::Selection),
        };
        let entry = catalog::entry(&name).map_err(|e| ConfigError::Catalog(e.to_string()))?;
        let expected_pair = raw.pair.is_some();
        let is_surface = entry.kind == EntryKind::Surface;
        if expected_pair == is_surface {
            let flag = if expected_pair { "--pair" } else { "--surface" };
            return Err(ConfigError::Catalog(format!(
                "{name:?} is a {} entry and cannot be selected with {flag}",
                kind_name(entry.kind)
            )));
        }
        let mut given = Params::new();
        for (k, v) in &raw.params {
            given.insert(k.clone(), number(k, v)?);
        }
        let params = catalog::resolve_params(&entry, &given).map_err(|e| ConfigError::Catalog(e.to_string()))?;
        let grid = match &raw.grid {
            Some(g) => parse_grid(g)?,
            None => DEFAULT_GRID,
        };
        let order = match &raw.order {
            Some(o) => o.trim().parse::<usize>().map_err(|_| ConfigError::BadValue {
                key: "order".into(),
                value: o.clone(),
                msg: "not an integer".into(),
            })?,
            None => DEFAULT_ORDER,
        };
        if !ORDER_RANGE.contains(&order) {
            return Err(ConfigError::Order(order));
        }
        let tol_alg = raw
            .tol_alg
            .as_deref()
            .map_or(Ok(DEFAULT_TOL_ALG), |v| tolerance("tol-alg", v))?;
        let tol_diff = raw
            .tol_diff
            .as_deref()
            .map_or(Ok(DEFAULT_TOL_DIFF), |v| tolerance("tol-diff", v))?;
        let checks = match &raw.checks {
            Some(list) => parse_checks(list)?,
            None => default_checks(entry.kind),
        };
        if checks.is_empty() {
            return Err(ConfigError::BadValue {
                key: "checks".into(),
                value: raw.checks.unwrap_or_default(),
                msg: "no checks requested".into(),
            });
        }
        for c in &checks {
            if !c.applies_to(entry.kind) {
                return Err(ConfigError::CheckNotApplicable {
                    check: c.name().into(),
                    needs: c.needs(),
                    name,
                    has: kind_name(entry.kind),
                });
            }
        }
        if name == "graph" && raw.expr.is_none() {
            return Err(ConfigError::BadValue {
                key: "expr".into(),
                value: String::new(),
                msg: "the graph surface needs --expr".into(),
            });
        }
        Ok(RunConfig {
            name,
            kind: entry.kind,
            params,
            expr: raw.expr,
            grid,
            order,
            tol_alg,
            tol_diff,
            checks,
            out: raw.out,
            csv: raw.csv,
        })
    }
}
