mod common;

use std::process::{Command, Output};

use common::fixture;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pushsplit"))
        .args(args)
        .env_remove("PUSHSPLIT_PRIMES")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.code().is_some(), "killed");
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)))
}

#[test]
fn split_text_output() {
    let o = run(&["split", "--n", "4", "--k", "2", "--l", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("table {0: 1, 1: 10, 2: 5}"), "{s}");
    assert!(s.contains("delta = 2"));
    assert!(s.contains("rank = 16"));
    let o = run(&["split", "--n", "4", "--k", "1", "--l", "3"]);
    assert!(stdout(&o).contains("table {-3: 1}"));
}

#[test]
fn split_against_endomorphism_file() {
    let endo = fixture("power42.endo");
    let o = run(&["split", "--endo", &endo, "--l", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("matches closed form"));
    let v = json(&["split", "--endo", &endo, "--l", "2", "--json"]);
    assert_eq!(v["endo"]["agrees"], Value::Bool(true));
    assert_eq!(v["multiplicities"], v["endo"]["multiplicities"]);
}

#[test]
fn split_negative_twist_and_exact_mode() {
    let a = json(&["split", "--n", "2", "--k", "3", "--l", "-4", "--json"]);
    assert_eq!(a["support"], serde_json::json!([2, 3]));
    let endo = fixture("power42.endo");
    let o = run(&["split", "--endo", &endo, "--l", "0", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(exact)"));
}

#[test]
fn primes_can_be_overridden() {
    let endo = fixture("power42.endo");
    let o = Command::new(env!("CARGO_BIN_EXE_pushsplit"))
        .args(["verify-endo", &endo])
        .env("PUSHSPLIT_PRIMES", "1000003,998244353")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("modular:1000003,998244353"));
    let o = Command::new(env!("CARGO_BIN_EXE_pushsplit"))
        .args(["verify-endo", &endo])
        .env("PUSHSPLIT_PRIMES", "12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_endo_verdicts_and_exit_codes() {
    let o = run(&["verify-endo", &fixture("power42.endo")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("FINITE"));
    let o = run(&["verify-endo", &fixture("degenerate12.endo")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT_FINITE"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.endo");
    std::fs::write(&bad, "n = 1\nk = 2\nf0 = y0^2 + y9\nf1 = y1^2\n").unwrap();
    let o = run(&["verify-endo", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3, column 13"), "{err}");
}

#[test]
fn random_endomorphisms_are_reproducible() {
    let args = [
        "verify-endo",
        "--random",
        "--n",
        "2",
        "--k",
        "2",
        "--seed",
        "11",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "FINITE");
    assert_eq!(v["seed"], 11);
    let c = run(&[
        "verify-endo",
        "--random",
        "--n",
        "2",
        "--k",
        "2",
        "--seed",
        "12",
        "--json",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn pullback_reports() {
    let v = json(&[
        "pullback", "--model", "ci:2,2@4", "--k", "2", "--lrange", "-2..4", "--json",
    ]);
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["degree"], 16);
    let h2 = v["cohomology"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["l"] == 0 && c["i"] == 2)
        .unwrap();
    assert_eq!(h2["h"], 35);
    assert_eq!(v["hyperplane_section"]["h0_oy_prime_1"], 4);
    assert_eq!(v["completeness"]["status"], "APPLICABLE");

    let v = json(&["pullback", "--model", "p4", "--k", "2", "--json"]);
    assert_eq!(v["degree"], 1);
    let chi0 = v["euler"].as_array().unwrap().iter().find(|e| e["l"] == 0).unwrap();
    assert_eq!(chi0["chi"], 1);

    let o = run(&["pullback", "--model", "ci:2,2@4", "--k", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["completeness"]["status"], "NOT_APPLICABLE");
    assert_eq!(v["hyperplane_section"]["status"], "NOT_APPLICABLE");
    assert_eq!(v["cohomology"].as_array().unwrap().len(), 3 * 5);
}

#[test]
fn pullback_exit_codes() {
    let two = format!("table:{}", fixture("two_lines_p3.table"));
    let o = run(&["pullback", "--model", &two, "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["pullback", "--model", "ci:2,2@", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["pullback", "--model", "table:/nonexistent/x.table", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let plane = format!("table:{}", fixture("plane_p4.table"));
    let o = run(&["pullback", "--model", &plane, "--k", "2", "--lrange", "0..40"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["pullback", "--model", "p4", "--k", "2", "--lrange", "3..1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_has_one_row_per_entry() {
    let o = run(&[
        "pullback", "--model", "ci:2,2@4", "--k", "2", "--lrange", "0..3", "--csv",
    ]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("sheaf,i,l,h"));
    let rows: Vec<&str> = lines.collect();
    let o_rows = rows.iter().filter(|r| r.starts_with("O,")).count();
    assert_eq!(o_rows, 3 * 4);
    assert!(rows.contains(&"O,2,0,35"));
}

#[test]
fn adjoint_reports() {
    let o = run(&["adjoint", "--model", "plane@4", "--k", "2", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["surface"]["del_pezzo_exception"], true);
    assert_eq!(v["surface"]["e_prime"], -1);
    assert_eq!(v["surface"]["degree_prime"], 4);

    let v = json(&["adjoint", "--model", "ci:2,2@4", "--k", "2", "--json"]);
    assert_eq!(v["surface"]["e_prime"], 3);
    assert_eq!(v["surface"]["k_squared"], 144);
    assert_eq!(v["surface"]["canonical_very_ample"], true);

    let o = run(&["adjoint", "--model", "ci:3@4", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => !n.is_f64(),
        Value::Array(a) => a.iter().all(no_floats),
        Value::Object(o) => o.values().all(no_floats),
        _ => true,
    }
}

#[test]
fn json_round_trips_byte_identically() {
    let cases: [&[&str]; 4] = [
        &["split", "--n", "3", "--k", "2", "--l", "-1", "--json"],
        &["pullback", "--model", "ci:2,3@4", "--k", "2", "--json"],
        &["adjoint", "--model", "plane@4", "--k", "3", "--json"],
        &[
            "verify-endo",
            "--json",
            "--random",
            "--n",
            "1",
            "--k",
            "3",
            "--seed",
            "2",
        ],
    ];
    for args in cases {
        let raw = stdout(&run(args));
        let v: Value = serde_json::from_str(&raw).unwrap();
        assert_eq!(pushsplit_core::cli::canonical_json(&v), raw, "{args:?}");
        assert!(raw.contains("\"report_version\""));
        assert!(no_floats(&v), "{args:?}");
    }
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("out.json");
    std::fs::write(
        &cfg,
        format!(
            "# split via config\nn = 4\nk = 2\nl = 0\nformat = json\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run(&["split", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rank"], 16);

    // flags override the file
    let o = run(&["split", "--config", cfg.to_str().unwrap(), "--l", "1", "--output", "-"]);
    assert_eq!(o.status.code(), Some(0));

    std::fs::write(&cfg, "n = 4\ncolour = red\n").unwrap();
    let o = run(&["split", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_arguments_are_input_errors() {
    assert_eq!(run(&["split", "--n", "4"]).status.code(), Some(2));
    assert_eq!(run(&["pullback", "--k", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify-endo"]).status.code(), Some(2));
}
