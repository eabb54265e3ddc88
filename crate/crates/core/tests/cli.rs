use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liesym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn detgen_lists_thirteen_equations() {
    let o = run(&["detgen", &fixture("sm.sys")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let eqs: Vec<&str> = out.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(eqs.len(), 13);
    assert!(eqs.iter().any(|l| l.ends_with("] xi_y + 2*phi_x = 0")));
    assert!(eqs.iter().any(|l| l.ends_with("] phi_y = 0")));
    assert!(out.contains("# 13 equations"));
}

#[test]
fn cross_check_flags_one_equation() {
    let out = stdout(&run(&["detgen", "--cross-check", &fixture("sm.sys")]));
    assert!(out.contains("# model equation list: DIFFER"));
    assert!(out.contains("#   reference only: xi_y + phi_x = 0"));
    assert!(out.contains("#   generated only: xi_y + 2*phi_x = 0"));
    assert_eq!(out.matches(": agree").count(), 4);
}

#[test]
fn solve_reports_ten_fields() {
    let o = run(&["solve", &fixture("sm.sys"), "--degree", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("dimension: 10\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("# e")).count(), 10);
    assert_eq!(out.lines().filter(|l| l.starts_with("xi = ")).count(), 10);
}

#[test]
fn sweep_output() {
    let out = stdout(&run(&["solve", &fixture("sm.sys"), "--sweep", "2", "3"]));
    assert_eq!(out, "degree 2: dimension 10\ndegree 3: dimension 10\nstacked rank: 10\n");
}

#[test]
fn every_generator_verifies() {
    for k in 1..=10 {
        let o = run(&["verify", &fixture("sm.sys"), &fixture(&format!("gen{k}.vf"))]);
        assert_eq!(o.status.code(), Some(0), "gen{k}");
        assert_eq!(stdout(&o), "symmetry: true\n");
    }
}

#[test]
fn non_symmetry_exits_one() {
    let o = run(&["verify", &fixture("sm.sys"), &fixture("bad.vf")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("symmetry: false\n"));
    assert!(out.contains("phi_y = 0"));
}

#[test]
fn syntax_error_exits_two_with_span() {
    let o = run(&["detgen", &fixture("syntax_error.sys")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("syntax_error.sys:2:9:"));
}

#[test]
fn usage_errors_exit_two() {
    let sm = fixture("sm.sys");
    assert_eq!(run(&["detgen", "/nonexistent/x.sys"]).status.code(), Some(2));
    assert_eq!(run(&["solve", &sm, "--degree", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve", &sm, "--sweep", "4", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["closure", &sm, "--point", "1", "a", "1"]).status.code(), Some(2));
    assert_eq!(run(&["closure", &fixture("symbolic.sys")]).status.code(), Some(2));
    assert_eq!(run(&["solve", &fixture("symbolic.sys")]).status.code(), Some(2));
}

#[test]
fn degenerate_system_exits_three() {
    let o = run(&["detgen", &fixture("degenerate.sys")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("F2 is identically zero"));
}

#[test]
fn vanishing_pivot_exits_three() {
    let sys = fixture("pivot.sys");
    let o = run(&["closure", &sys]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pivot obligation: u != 0"));
    let o = run(&["closure", &sys, "--point", "1", "1", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("pivot u vanishes"));
}

#[test]
fn closure_reconstructs_generators() {
    let o = run(&["closure", &fixture("sm.sys"), "--check", &fixture("gen10.vf"), "--point", "2", "-1/3", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("reduced: 50 of 50"));
    assert!(out.contains("pivot obligations: none"));
    assert!(out.contains("reconstruction: 60 of 60 equal"));
}

#[test]
fn algebra_reports_spot_constants() {
    let o = run(&["algebra", &fixture("sm.sys"), "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for l in ["closed: true", "antisymmetric: true", "jacobi: true"] {
        assert!(out.lines().any(|x| x == l), "{l}");
    }
}

#[test]
fn json_document_shape() {
    let o = run(&["--json", "verify", &fixture("sm.sys"), &fixture("bad.vf")]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["system"]["F2"], "1");
    assert_eq!(v["result"]["symmetry"], false);
    assert_eq!(v["result"]["violated"][0]["equation"], "phi_y = 0");
    assert!(v["diagnostics"].is_array());

    let o = run(&["--json", "detgen", &fixture("syntax_error.sys")]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exit_code"], 2);
}

#[test]
fn output_is_deterministic() {
    let sm = fixture("sm.sys");
    for args in [
        vec!["detgen", "--cross-check", sm.as_str()],
        vec!["algebra", sm.as_str()],
        vec!["--json", "closure", sm.as_str()],
    ] {
        let a = run(&args).stdout;
        let b = run(&args).stdout;
        assert_eq!(a, b);
        let mut threaded = vec!["--threads", "3"];
        threaded.extend(&args);
        assert_eq!(run(&threaded).stdout, a);
    }
}
