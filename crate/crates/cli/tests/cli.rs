use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scheme-periods"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn tmp(name: &str) -> String {
    std::env::temp_dir()
        .join(format!("scheme-periods-{}-{name}", std::process::id()))
        .display()
        .to_string()
}

#[test]
fn models_listing() {
    let out = run(&["models"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 4);
    let v = json(&run(&["models", "--format", "json"]));
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["linear", "cubic", "vl", "top"]);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&run(&["models", "--bogus"])), 2);
    assert_eq!(code(&run(&["periods", "--model", "nope", "-n", "3"])), 2);
}

#[test]
fn linear_midpoint_periods() {
    let out = run(&[
        "periods", "--model", "linear", "--scheme", "midpoint", "-n", "15", "--x0", "0,1",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "roots-found");
    assert_eq!(v["config"]["n"], 15);
    let t = v["certificates"][0]["value"].as_f64().unwrap();
    assert!((t - 6.3767).abs() < 5e-4, "{t}");
    let coeffs = v["eliminant"].as_array().unwrap();
    for c in coeffs {
        let s = c.as_str().unwrap();
        let digits = s.strip_prefix('-').unwrap_or(s);
        assert!(!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()), "{s}");
    }
}

#[test]
fn euler_has_no_periods() {
    let out = run(&[
        "periods", "--model", "linear", "--scheme", "euler", "-n", "10", "--x0", "0,1",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["status"], "certified-empty");
}

#[test]
fn cubic_midpoint_two_certificates() {
    let out = run(&[
        "periods", "--model", "cubic", "--scheme", "midpoint", "-n", "5", "--x0", "0,1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["certificates"].as_array().unwrap().len(), 2);
}

#[test]
fn budget_from_the_environment() {
    let out = bin()
        .args(["periods", "--model", "cubic", "-n", "5", "--strategy", "groebner"])
        .env("SCHEME_PERIODS_MAX_REDUCTIONS", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["status"], "budget-exhausted");
}

#[test]
fn periods_round_trip_through_orbit() {
    let path = tmp("linear.json");
    assert_eq!(
        code(&run(&["periods", "--model", "linear", "-n", "15", "-o", &path])),
        0
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for root in 0..v["certificates"].as_array().unwrap().len() {
        let out = run(&["orbit", "--from", &path, "--root", &root.to_string()]);
        assert_eq!(code(&out), 0);
        let err = String::from_utf8_lossy(&out.stderr);
        let residual: f64 = err.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!(residual < 1e-10, "root {root}: {residual}");
        let csv = String::from_utf8_lossy(&out.stdout);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "k,t,x,y");
        assert_eq!(rows.len(), 17);
        if root == 0 {
            for row in &rows[1..] {
                let f: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
                assert!((f[2].hypot(f[3]) - 1.0).abs() < 1e-12);
            }
        }
    }
    std::fs::remove_file(path).ok();
}

#[test]
fn long_volterra_lotka_orbit() {
    let out = run(&[
        "orbit", "--model", "vl", "--scheme", "kahan", "--dt", "0.30083", "--count", "400",
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8_lossy(&out.stdout);
    assert_eq!(csv.lines().count(), 402);
    for row in csv.lines().skip(1) {
        let f: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(f[2] > 0.0 && f[3] > 0.0);
    }
}

#[test]
fn oracle_periods() {
    let vl = json(&run(&["oracle", "--model", "vl", "--x0", "1,2"]));
    assert!((vl["period"].as_f64().unwrap() - 3.24).abs() < 0.01);
    let lin = json(&run(&["oracle", "--model", "linear", "--x0", "0,1"]));
    assert!((lin["period"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-6);
    assert_eq!(code(&run(&["oracle", "--model", "vl", "--horizon", "1"])), 1);
}

#[test]
fn top_boundary_shooting() {
    let out = run(&["shoot", "--model", "top", "--eps", "1e-1", "-n", "12", "--boundary"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["outcomes"].as_array().unwrap().len() >= 3);
    let found: Vec<f64> = v["distinct_converged"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_f64().unwrap())
        .collect();
    for want in [22.952, 42.569] {
        assert!(
            found.iter().any(|t| (t - want).abs() < 5e-3 * want),
            "{want} not in {found:?}"
        );
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["periods", "--model", "vl", "-n", "4"];
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(strip(json(&run(&args))), strip(json(&run(&args))));
}
