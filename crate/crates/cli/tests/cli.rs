use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use realgap_core::bss::RunOutcome;
use realgap_core::number::Rational;
use serde_json::Value;
use tempfile::TempDir;

fn realgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realgap"))
        .args(args)
        .env_remove("REALGAP_NODE_BUDGET")
        .env_remove("REALGAP_MAX_STEPS")
        .env_remove("REALGAP_QUERY_BUDGET")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn rat(v: &Value) -> Rational {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn solve_lasso2_soft_threshold() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"A": [["1", "0"]], "y": ["1"], "lambda": "1/2"}"#);
    let out = realgap(&["solve", "lasso2", s(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(rat(&v["minimizer"][0]), Rational::frac(3, 4));
    assert_eq!(rat(&v["minimizer"][1]), Rational::zero());
    assert_eq!(v["certificate"]["verdict"]["status"], "valid");
    assert_eq!(v["trace"]["events"], 1);
}

#[test]
fn solve_bp_large_radius_gives_origin() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"A": [["1", "2", "0"]], "y": ["1/2"], "epsilon": "1/2"}"#);
    let path = dir.path().join("out.json");
    let out = realgap(&["solve", "bp", s(&inst), "-o", s(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["certificate"]["kind"], "feasible_origin");
    for x in v["minimizer"].as_array().unwrap() {
        assert_eq!(rat(&x["a"]), Rational::zero());
        assert_eq!(rat(&x["b"]), Rational::zero());
    }
}

#[test]
fn malformed_instance_exits_2_naming_field() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"A": [["1", "0"]], "y": ["one"], "lambda": "1/2"}"#);
    let out = realgap(&["solve", "lasso2", s(&inst)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`y`"));

    let inst = write(&dir, "j.json", r#"{"A": [["1", "0"]], "y": ["1"], "lambda": "1/2"}"#);
    let out = realgap(&["solve", "bp", s(&inst)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`epsilon`"));

    let out = realgap(&["solve", "bp", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_bpa_brackets_bp_and_respects_budget() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"A": [["1", "1"]], "y": ["1"], "epsilon": "1/8"}"#);
    let out = realgap(&["solve", "bpa", s(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["status"], "converged");
    let lo = rat(&v["result"]["objective_lower"]);
    let hi = rat(&v["result"]["objective_upper"]);
    // BP optimum is 7/8; γ = 1/16, tol = 1/32
    let slack = Rational::frac(3, 32);
    assert!(&lo - &slack <= Rational::frac(7, 8) && Rational::frac(7, 8) <= &hi + &slack);

    let out = Command::new(env!("CARGO_BIN_EXE_realgap"))
        .args(["solve", "bpa", s(&inst)])
        .env("REALGAP_NODE_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["result"]["status"], "budget");
}

#[test]
fn transparency_demo_flags_naive_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (j1, j2, c1) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("a.csv"));
    let out = realgap(&["transparency-demo", "--json", s(&j1), "--csv", s(&c1)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = realgap(&["transparency-demo", "--json", s(&j2)]);
    assert_eq!(out.status.code(), Some(0));
    let (a, b) = (fs::read(&j1).unwrap(), fs::read(&j2).unwrap());
    assert_eq!(a, b, "reports differ across reruns");

    let v: Value = serde_json::from_slice(&a).unwrap();
    let find = |map: &str, input: &str| {
        v["verdicts"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["map"].as_str().unwrap().starts_with(map) && r["input"] == input)
            .unwrap()["verdict"]
            .clone()
    };
    assert_eq!(find("naive", "t=1"), "violation");
    assert_eq!(find("exact", "t=3/2"), "consistent");
    assert_eq!(v["metrics"]["instance_violations"], 0);
    assert!(v["metrics"]["max_variants_beyond_jump"].as_u64().unwrap() >= 2);
    assert_eq!(v["config_digest"].as_str().unwrap().len(), 64);
    assert!(fs::read_to_string(&c1).unwrap().starts_with("map,input,variant,verdict,output,error\n"));
}

#[test]
fn transparency_demo_config_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"variants": 1}"#);
    assert_eq!(realgap(&["transparency-demo", "--config", s(&cfg)]).status.code(), Some(2));
    let cfg = write(&dir, "d.json", r#"{"k": 8, "colour": "red"}"#);
    let out = realgap(&["transparency-demo", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    let cfg = write(&dir, "e.json", r#"{"instances": {"source": "file", "path": "/nonexistent.json"}}"#);
    assert_eq!(realgap(&["transparency-demo", "--config", s(&cfg)]).status.code(), Some(2));
}

#[test]
fn transparency_demo_reads_inline_instance() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"k": 12, "variants": 4, "points": ["3/2"],
            "instances": {"source": "inline", "instance": {"A": [["1", "1/2", "0"]], "y": ["1"], "epsilon": "1/4"}}}"#,
    );
    let out = realgap(&["transparency-demo", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["metrics"]["instances"], 1);
    assert!(v["verdicts"].as_array().unwrap().iter().any(|r| r["map"].as_str().unwrap().starts_with("exact-bp")));
}

#[test]
fn bernstein_curve_rows() {
    let dir = TempDir::new().unwrap();
    let (csv, svg) = (dir.path().join("c.csv"), dir.path().join("c.svg"));
    let out = realgap(&["bernstein-curve", "--degrees", "2,4,16,64,256", "--csv", s(&csv), "--svg", s(&svg)]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], "2");
    assert_eq!(rows[0][6], "1/2");
    let errors: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
    for r in &rows {
        let (measured, envelope): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(measured <= envelope);
    }
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let out = realgap(&["bernstein-curve", "--degrees", ""]);
    assert_eq!(out.status.code(), Some(2));
    let out = realgap(&["bernstein-curve", "--degrees", "16,4"]);
    assert_eq!(out.status.code(), Some(2));
}

const ABS_NET: &str = r#"{"layers": [
    {"W": [["1"], ["-1"]], "b": ["0", "0"]},
    {"W": [["1", "1"]], "b": ["0"]}
]}"#;

#[test]
fn bss_compile_and_run_abs_net() {
    let dir = TempDir::new().unwrap();
    let net = write(&dir, "net.json", ABS_NET);
    let prog = dir.path().join("prog.json");
    assert_eq!(realgap(&["bss", "compile-net", s(&net), "-o", s(&prog)]).status.code(), Some(0));

    let trace = dir.path().join("trace.json");
    let out = realgap(&["bss", "run", s(&prog), "--input", "-2", "--trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");

    let outcome: RunOutcome = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(outcome.trace.replay(), outcome.final_state);
    assert_eq!(outcome.outputs, vec![Rational::from_int(2)]);

    let out = realgap(&["bss", "run", s(&prog), "--input", "1/2,-3/4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bss_runtime_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let looping = write(
        &dir,
        "loop.json",
        r#"{"nodes": [
            {"kind": "input", "count": 1, "next": 1},
            {"kind": "branch", "reg": 0, "pred": "eq0", "then": 1, "else": 2},
            {"kind": "output", "regs": [0]}
        ]}"#,
    );
    let out = Command::new(env!("CARGO_BIN_EXE_realgap"))
        .args(["bss", "run", s(&looping), "--input", "0"])
        .env("REALGAP_MAX_STEPS", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("100 steps"));

    let malformed = write(&dir, "bad.json", r#"{"nodes": [{"kind": "input", "count": 1, "next": 7}]}"#);
    let out = realgap(&["bss", "run", s(&malformed), "--input", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node 0"));
}

#[test]
fn pi_oracle_precision() {
    let out = realgap(&["pi", "-k", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let q: Rational = text.lines().next().unwrap().parse().unwrap();
    assert!((q.to_f64() - std::f64::consts::PI).abs() <= 2f64.powi(-40));
}
