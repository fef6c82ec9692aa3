//! End-to-end tests of the `abdg` binary.

use std::path::Path;
use std::process::{Command, Output};

use abdg_core::report::{read_report, Report};

fn abdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abdg"))
        .args(args)
        .env("ABDG_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report_of(o: &Output) -> Report {
    read_report(std::str::from_utf8(&o.stdout).unwrap()).expect("valid report on stdout")
}

fn check<'a>(r: &'a Report, name: &str) -> &'a abdg_core::report::CheckRecord {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn classical_pair_conditions_and_curvature() {
    let o = abdg(&[
        "check",
        "--pair",
        "classical",
        "--sigma",
        "1.0472",
        "--L",
        "1.0",
        "--grid",
        "64x64",
        "--checks",
        "conditions,curvature",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report_of(&o);
    assert!(r.all_satisfied);
    assert_eq!(r.grid, [64, 64]);
    let cond = check(&r, "conditions");
    assert!(cond.satisfied);
    let ids: Vec<_> = cond.parts.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(ids.len(), 7, "{ids:?}");
    assert!(cond.parts.iter().all(|p| p.satisfied));
    assert!(check(&r, "curvature").satisfied);
}

#[test]
fn elliptic_paraboloid_blaschke() {
    let o = abdg(&["check", "--surface", "elliptic-paraboloid", "--checks", "blaschke"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let b = check(&report_of(&o), "blaschke").clone();
    assert!(b.satisfied && b.worst_residual < 1e-8, "{b:?}");
}

#[test]
fn malformed_grid_is_a_configuration_error() {
    for grid in ["0x64", "64", "8x", "7x8", "axb", "64×64"] {
        let o = abdg(&["check", "--pair", "classical", "--grid", grid]);
        assert_eq!(code(&o), 2, "grid {grid:?}");
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("error"),
            "grid {grid:?}: diagnostic expected"
        );
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn other_configuration_errors() {
    let cases: &[&[&str]] = &[
        &["check", "--pair", "no-such-pair"],
        &["check", "--pair", "classical", "--order", "9"],
        &["check", "--pair", "classical", "--sigma", "0"],
        &["check", "--pair", "classical", "--tol-alg", "-1"],
        &["check", "--pair", "classical", "--checks", "bogus"],
        &["check", "--surface", "unit-sphere", "--checks", "psi"],
        &["check", "--pair", "classical", "--param", "nonsense"],
        &["check", "--config", "/nonexistent/abdg.conf"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(code(&abdg(args)), 2, "{args:?}");
    }
}

#[test]
fn failing_check_exits_one_and_names_the_condition() {
    let o = abdg(&["check", "--pair", "spoiler-4", "--grid", "12x12"]);
    assert_eq!(code(&o), 1);
    let r = report_of(&o);
    assert!(!r.all_satisfied);
    let cond = check(&r, "conditions");
    let failing: Vec<_> = cond
        .parts
        .iter()
        .filter(|p| !p.satisfied)
        .map(|p| p.name.as_str())
        .collect();
    assert_eq!(failing.len(), 1, "{failing:?}");
    assert!(failing[0].contains('4'), "{failing:?}");
    assert!(cond
        .parts
        .iter()
        .find(|p| !p.satisfied)
        .unwrap()
        .witness_point
        .is_some());
}

#[test]
fn construction_error_exits_three() {
    let o = abdg(&["check", "--surface", "graph", "--expr", "u + ("]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot build"));
}

#[test]
fn config_file_with_flag_override_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("report.json");
    let csv_path = dir.path().join("grid.csv");
    std::fs::write(
        &conf,
        format!(
            "# classical pair\npair = classical\nsigma = 1.0472\ngrid = 8x8\nchecks = psi\nout = {}\ncsv = {}\n",
            out.display(),
            csv_path.display()
        ),
    )
    .unwrap();
    let o = abdg(&["check", "--config", conf.to_str().unwrap(), "--grid", "10x9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty(), "report goes to --out");
    let r = read_report(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.grid, [10, 9], "flag overrides the file");
    assert_eq!(r.subject.params["sigma"].to_string(), "1.0472");
    let psi = r.summaries.psi.as_ref().expect("ψ summary");
    assert!((psi.min - 1.0).abs() < 1e-6 && (psi.max - 1.0).abs() < 1e-6);

    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    let headers: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert!(headers.iter().any(|h| h == "psi"), "{headers:?}");
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 90);
    let col = headers.iter().position(|h| h == "psi").unwrap();
    for row in &rows {
        let v: f64 = row[col].parse().unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }
}

#[test]
fn malformed_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "pair classical\n",
        "unknown = 1\n",
        "pair = classical\npair = classical\n",
    ] {
        let conf = dir.path().join("bad.conf");
        std::fs::write(&conf, text).unwrap();
        assert_eq!(
            code(&abdg(&["check", "--config", conf.to_str().unwrap()])),
            2,
            "{text:?}"
        );
    }
}

fn run_to(dir: &Path, name: &str, threads: &str) -> Vec<u8> {
    let out = dir.join(name);
    let o = Command::new(env!("CARGO_BIN_EXE_abdg"))
        .args([
            "check",
            "--pair",
            "spoiler-6",
            "--grid",
            "12x10",
            "--checks",
            "conditions,psi,rank,metric",
        ])
        .arg("--out")
        .arg(&out)
        .env("ABDG_THREADS", threads)
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    std::fs::read(out).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to(dir.path(), "a.json", "1");
    let b = run_to(dir.path(), "b.json", "1");
    let c = run_to(dir.path(), "c.json", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"schema_version\": \"1.0\""));
}

#[test]
fn list_and_schema() {
    let o = abdg(&["list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "classical",
        "spoiler-7",
        "parallel",
        "elliptic-paraboloid",
        "a00-positive",
    ] {
        assert!(text.contains(name), "{name} missing from list");
    }
    let o = abdg(&["list", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| a.len() >= 10));

    let o = abdg(&["schema"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("schema_version"));
}

#[test]
fn bad_thread_cap_is_a_configuration_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_abdg"))
        .args(["check", "--pair", "classical"])
        .env("ABDG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
