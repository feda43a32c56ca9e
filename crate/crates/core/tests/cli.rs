use std::path::Path;
use std::process::Command;

use alqe::cli::run;
use alqe::semantics::{io, prime_field_vector_space};
use serde_json::Value;

fn alqe(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("alqe").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn f2_files(dir: &Path) -> (String, String) {
    let m = prime_field_vector_space(2).unwrap();
    let half = m.with_scaled_metric(&alqe::rational::frac(1, 2));
    (write(dir, "f2.json", &io::to_json(&m)), write(dir, "f2_half.json", &io::to_json(&half)))
}

#[test]
fn qe_example_verifies() {
    let (code, out, _) = alqe(&["qe", "--q", "2", "--n", "1", "--formula", "sup y. (d(x,y)+d(y,0))", "--verify"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "2 - |x|");
    assert!(lines[1].starts_with("verify PASS"));
}

#[test]
fn a13_reports_witness_and_fails() {
    let (code, out, _) = alqe(&["odag", "check", "--axiom", "A13", "--trials", "1000", "--seed", "1"]);
    assert_eq!(code, 1);
    assert!(out.contains("(x,y) = (-1,1)"), "{out}");
    assert!(out.contains("lhs = 0, rhs = 1"), "{out}");
}

#[test]
fn a13_json_witness_uses_rational_strings() {
    let (code, out, _) = alqe(&["--json", "odag", "check", "--axiom", "A13", "--trials", "10", "--seed", "1"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    let cx = &v["axioms"][0]["counterexample"];
    assert_eq!(cx["assignment"]["x"], "-1");
    assert_eq!(cx["assignment"]["y"], "1");
    assert_eq!(cx["rhs"], "1");
}

#[test]
fn passing_axiom_exits_zero() {
    let (code, out, _) = alqe(&["odag", "check", "--axiom", "A8", "--trials", "50", "--seed", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("A8 PASS"));
}

#[test]
fn eval_validate_and_ultramean() {
    let dir = tempfile::tempdir().unwrap();
    let (f2, half) = f2_files(dir.path());
    let (code, out, _) = alqe(&["eval", "--structure", &f2, "--formula", "sup x. d(x,0)"]);
    assert_eq!((code, out.trim()), (0, "1"));
    let (code, out, _) = alqe(&["eval", "--structure", &half, "--formula", "|x| + 1/3", "--assign", "x=1"]);
    assert_eq!((code, out.trim()), (0, "5/6"));

    let (code, out, _) = alqe(&["validate", "--structure", &f2, "--condition", "sup x. |x| <= 1"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = alqe(&["validate", "--structure", &f2, "--condition", "1 <= inf x. |x|"]);
    assert_eq!(code, 1);
    assert!(out.contains("fails"));

    let mean = dir.path().join("mean.json").display().to_string();
    let args = [
        "ultramean", "--structure", &f2, "--weight", "1/2", "--structure", &half, "--weight", "1/2", "--out", &mean,
        "--los", "sup x. |x|",
    ];
    let (code, out, _) = alqe(&args);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("mean 3/4 vs weighted 3/4 PASS"));
    let (code, out, _) = alqe(&["validate", "--structure", &mean]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn usage_and_file_errors_exit_two() {
    assert_eq!(alqe(&["nonsense"]).0, 2);
    assert_eq!(alqe(&["eval", "--structure", "/nonexistent.json", "--formula", "1"]).0, 2);
    assert_eq!(alqe(&["qe", "--q", "4", "--n", "1", "--formula", "|x|"]).0, 2);
    assert_eq!(alqe(&["qe", "--q", "2", "--n", "1", "--formula", "|x| /\\ |x|"]).0, 2);
    assert_eq!(alqe(&["odag", "check", "--axiom", "A14"]).0, 2);
    let (code, _, err) = alqe(&["scan-primes", "--formula", "1", "--primes", "2,9"]);
    assert_eq!(code, 2);
    assert!(err.contains("9 is not prime"));
}

#[test]
fn scan_primes_examples() {
    let (code, out, _) = alqe(&["scan-primes", "--formula", "|1+1|", "--primes", "2..7"]);
    assert_eq!(code, 0);
    for line in ["p = 2: 0", "p = 3: 1", "p = 5: 1", "p = 7: 1", "constant 1 from p = 3 onward"] {
        assert!(out.contains(line), "{out}");
    }
    assert!(out.contains("not models of ACF_p"));
    let (_, out, _) = alqe(&["scan-primes", "--formula", "inf x. d(x*x, 1+1)", "--primes", "3,7"]);
    assert!(out.contains("p = 3: 1") && out.contains("p = 7: 0"), "{out}");
    let (_, out, _) = alqe(&["--json", "scan-primes", "--formula", "1", "--primes", "2..13"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["values"].as_array().unwrap().iter().all(|r| r["value"] == "1"));
}

#[test]
fn typespace_cloud_extremes_and_separation() {
    let dir = tempfile::tempdir().unwrap();
    let (f2, _) = f2_files(dir.path());
    let frag = write(dir.path(), "pairs.frag", "|x1|\n|x2|\n|x1 + x2| @qf\nsup y. |x1 - y|\n");
    let (code, out, _) = alqe(&["typespace", "--structure", &f2, "--fragment", &frag, "--n", "2", "--extremes", "--separate", "qf"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("4 extreme points"));
    assert!(out.contains("separated on this cloud by qf coordinates [1,2,3]"));

    let consts = write(dir.path(), "const.frag", "1\nd(x1,x2) @general\n");
    let (code, out, _) = alqe(&["typespace", "--structure", &f2, "--fragment", &consts, "--n", "2", "--separate", "qf"]);
    assert_eq!(code, 1);
    assert!(out.contains("not separated"));

    let (code, _, err) = alqe(&["typespace", "--structure", &f2, "--fragment", &consts, "--n", "2", "--separate", "atomic"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn riesz_commands() {
    let dir = tempfile::tempdir().unwrap();
    let fs = write(dir.path(), "two.txt", "|x|\n|y|\n");
    let (code, out, _) = alqe(&["riesz", "expand", "--op", "join", "--formulas", &fs]);
    assert_eq!((code, out.trim()), (0, "d(x,0) + d(y,0) + -1*d(x,0) /\\ d(y,0)"));
    let (code, out, _) = alqe(&["riesz", "expand", "--op", "meet", "--formulas", &fs]);
    assert_eq!((code, out.trim()), (0, "d(x,0) + d(y,0) + -1*d(x,0) \\/ d(y,0)"));
    assert_eq!(alqe(&["riesz", "identity", "--weights", "1/2,1/3,1/6"]).0, 0);
    assert_eq!(alqe(&["riesz", "identity", "--weights", "1/2,1/2", "--literal"]).0, 1);
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "odag", "check", "--axiom", "all", "--trials", "20", "--seed", "9"];
    assert_eq!(alqe(&args), alqe(&args));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_alqe");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["qe", "--q", "3", "--n", "1", "--formula", "inf y. d(x,y)"]), Some(0));
    assert_eq!(status(&["odag", "check", "--axiom", "A13", "--trials", "5"]), Some(1));
    assert_eq!(status(&["qe", "--q", "3"]), Some(2));
    let out = Command::new(bin).args(["model", "ring", "--q", "3"]).output().unwrap();
    let m = io::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(m.size(), 3);
}
