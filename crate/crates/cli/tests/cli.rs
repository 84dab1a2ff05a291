//! End-to-end tests of the command-line surface: exit codes, report
//! determinism, and the file formats.

use assert_cmd::Command;
use predicates::prelude::*;
use std::io::Write;

fn szh() -> Command {
    Command::cargo_bin("szh").unwrap()
}

fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

const IDENTITY_WIRE: &str =
    r#"{"nodes":[],"wires":[["b0","b1"]],"inputs":["b0"],"outputs":["b1"],"scalar":[1.0,0.0]}"#;

const HADAMARD: &str = r#"{"nodes":[{"id":0,"kind":"h","label_re":-1.0,"label_im":0.0}],"wires":[["n0:0","b0"],["n0:1","b1"]],"inputs":["b0"],"outputs":["b1"],"scalar":[1.0,0.0]}"#;

#[test]
fn eval_identity_wire() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "id.json", IDENTITY_WIRE);
    szh()
        .args(["eval"])
        .arg(&f)
        .assert()
        .success()
        .stdout(predicate::str::contains(
            "+1.000000+0.000000i, +0.000000+0.000000i",
        ));
}

#[test]
fn eval_hadamard_matches_gate() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "had.json", HADAMARD);
    szh()
        .args(["eval"])
        .arg(&f)
        .assert()
        .success()
        .stdout(predicate::str::contains("+0.707107"))
        .stdout(predicate::str::contains("-0.707107"));
}

#[test]
fn eval_oversized_is_a_capacity_error() {
    // 30 parallel wires exceed the default limit when lowered via --limit
    let mut wires = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for k in 0..30 {
        wires.push(format!("[\"b{}\",\"b{}\"]", 2 * k, 2 * k + 1));
        inputs.push(format!("\"b{}\"", 2 * k));
        outputs.push(format!("\"b{}\"", 2 * k + 1));
    }
    let json = format!(
        "{{\"nodes\":[],\"wires\":[{}],\"inputs\":[{}],\"outputs\":[{}],\"scalar\":[1.0,0.0]}}",
        wires.join(","),
        inputs.join(","),
        outputs.join(",")
    );
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "wide.json", &json);
    szh()
        .args(["--limit", "24", "eval"])
        .arg(&f)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("capacity"));
}

#[test]
fn check_zs2_passes() {
    szh()
        .args(["check", "zs2"])
        .assert()
        .success()
        .stdout(predicate::str::contains("pass"));
}

#[test]
fn check_unknown_rule_is_usage_error() {
    szh().args(["check", "zs9"]).assert().code(2);
}

#[test]
fn transform_fourier_hand_example() {
    // f = (1, i): canonical branch gives fhat = (-i, i)
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(
        &dir,
        "f.json",
        r#"{"n":1,"values":[{"theta_num":0,"theta_den":1},{"theta_num":1,"theta_den":2}]}"#,
    );
    szh()
        .args(["transform", "fourier"])
        .arg(&f)
        .assert()
        .success()
        .stdout(predicate::str::contains("exp(i pi 3/2)"))
        .stdout(predicate::str::contains("exp(i pi 1/2)"));
}

#[test]
fn transform_symmetric_binomial() {
    // the omega gadget profile at n = 3
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(
        &dir,
        "g.json",
        r#"[{"theta_num":0,"theta_den":1},{"theta_num":1,"theta_den":4},{"theta_num":0,"theta_den":1},{"theta_num":1,"theta_den":4}]"#,
    );
    szh()
        .args(["transform", "binomial"])
        .arg(&f)
        .assert()
        .success()
        .stdout(predicate::str::contains("exp(i pi 1/4)"))
        .stdout(predicate::str::contains("exp(i pi 3/2)"))
        .stdout(predicate::str::contains("exp(i pi 1)"));
}

#[test]
fn transform_diagram_output_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(
        &dir,
        "f.json",
        r#"{"n":1,"values":[{"theta_num":0,"theta_den":1},{"theta_num":1,"theta_den":2}]}"#,
    );
    let out = szh()
        .args(["transform", "mobius", "--diagram"])
        .arg(&f)
        .output()
        .unwrap();
    assert!(out.status.success());
    let diagram = String::from_utf8(out.stdout).unwrap();
    let d = write_file(&dir, "d.json", diagram.trim());
    // diag(1, i) has an i in the bottom-right corner
    szh()
        .args(["eval"])
        .arg(&d)
        .assert()
        .success()
        .stdout(predicate::str::contains("+0.000000+1.000000i"));
}

#[test]
fn nest_verify_good_and_perturbed() {
    let dir = tempfile::tempdir().unwrap();
    // a pair phase gadget at -1 composed with itself is the identity
    let good = r#"{"n":2,"terms":[
        {"kind":"phase_gadget","support":3,"lambda":{"theta_num":1,"theta_den":1}},
        {"kind":"phase_gadget","support":3,"lambda":{"theta_num":1,"theta_den":1}}],
        "claimed_scalar":{"theta_num":0,"theta_den":1}}"#;
    let f = write_file(&dir, "good.json", good);
    szh()
        .args(["nest", "verify"])
        .arg(&f)
        .assert()
        .success()
        .stdout(predicate::str::contains("identity: true"));

    let bad = r#"{"n":2,"terms":[
        {"kind":"phase_gadget","support":3,"lambda":{"theta_num":1,"theta_den":1}}],
        "claimed_scalar":{"theta_num":0,"theta_den":1}}"#;
    let f = write_file(&dir, "bad.json", bad);
    szh()
        .args(["nest", "verify"])
        .arg(&f)
        .assert()
        .code(1)
        .stdout(predicate::str::contains("identity: false"))
        .stdout(predicate::str::contains("witness"));
}

#[test]
fn mine_finds_the_trivial_identity() {
    szh()
        .args(["mine", "2", "--den", "2", "--weights", "1,2"])
        .assert()
        .success()
        .stdout(predicate::str::contains("identities on 2 wires"));
}

#[test]
fn json_reports_are_deterministic() {
    let run = || {
        szh()
            .args(["--json", "--seed", "11", "check", "m", "--seeds", "3"])
            .output()
            .unwrap()
            .stdout
    };
    let a = run();
    let b = run();
    assert!(!a.is_empty());
    assert_eq!(a, b, "reports must be byte-identical for a fixed seed");
}

#[test]
fn config_file_sets_format_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_file(&dir, "szh.conf", "format = json\nseed = 5\n");
    let out = szh()
        .args(["--config"])
        .arg(&cfg)
        .args(["check", "u"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.trim_start().starts_with('{'),
        "config file should switch to json"
    );
    assert!(text.contains("\"seed\":5"));
}

#[test]
fn export_dot_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(&dir, "had.json", HADAMARD);
    let a = szh().args(["export"]).arg(&f).output().unwrap().stdout;
    let b = szh().args(["export"]).arg(&f).output().unwrap().stdout;
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("H(-1)"));
    assert!(text.contains("graph diagram"));
}

#[test]
fn check_failure_exit_code_via_bad_tolerance() {
    // an absurdly tight tolerance makes float-level rounding count as failure
    szh()
        .args(["--tol", "1e-30", "check", "lc", "--seeds", "1"])
        .assert()
        .code(predicate::eq(1));
}

#[test]
fn list_names_everything() {
    szh()
        .args(["list"])
        .assert()
        .success()
        .stdout(predicate::str::contains("zs1"))
        .stdout(predicate::str::contains("hadamard-flip"))
        .stdout(predicate::str::contains("fourier"));
}
