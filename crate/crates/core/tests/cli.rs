//! End-to-end runs of the binary against the shipped fixture files.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouptrellis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_grouptrellis"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_fixture_and_errors() {
    let out = run(&["validate", fixture("fix_b.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("|B| = 4"));

    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, "{\"sigma\": [[0]]").unwrap();
    let out = run(&["validate", truncated.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"sigma": [[0,1],[1,0]], "alphabet": [[0]], "branches": [[0,0,0]]}"#,
    )
    .unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("left state"));
}

#[test]
fn analyze_fixtures_and_noncontrollable() {
    let out = run(&["analyze", fixture("fix_b.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("controllability index: 1"));
    assert!(text.contains("bank automorphisms (formula): 2"));

    let out = run(&["analyze", fixture("fix_c.json").to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("controllability index: 2"));
    assert!(text.contains("bank automorphisms (formula): 2"));

    let out = run(&["analyze", fixture("frozen.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn analyze_output_is_deterministic() {
    let a = run(&["analyze", fixture("fix_e.json").to_str().unwrap()]);
    let b = run(&["analyze", fixture("fix_e.json").to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn encode_track_round_trip() {
    let path = fixture("fix_b.json");
    let file = path.to_str().unwrap();
    // Impulse input produces the generator path.
    let out = run_with_stdin(&["encode", file], "1\n0\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1\n2\n");
    // Tracking that path recovers the inputs.
    let out = run_with_stdin(&["track", file], "1\n2\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1\n0\n");
    // Empty stream in, empty stream out.
    let out = run_with_stdin(&["encode", file], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    // Bad symbols exit 5.
    let out = run_with_stdin(&["encode", file], "banana\n");
    assert_eq!(out.status.code(), Some(5));
    let out = run_with_stdin(&["track", file], "1\n1\n");
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn aut_reports_counts() {
    let out = run(&["aut", fixture("fix_b.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("bank automorphisms (formula): 2"));
    assert!(text.contains("enumerated: 2"));
    assert!(text.contains("beta[0][1]"));

    let out = run(&[
        "aut",
        fixture("fix_e.json").to_str().unwrap(),
        "--report",
        "machine",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["automorphism_count"], "8");
}

#[test]
fn expand_and_classcheck() {
    let file = fixture("s3_chain.json");
    let out = run(&["expand", file.to_str().unwrap(), "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0 1\n");

    let out = run(&["classcheck", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS expansion class group"));

    let out = run(&["expand", file.to_str().unwrap(), "99"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn verify_all_fixtures_pass() {
    for name in ["fix_a.json", "fix_b.json", "fix_c.json", "fix_e.json"] {
        let out = run(&["verify", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let text = stdout(&out);
        assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 9);
        assert!(!text.contains("FAIL"));
    }
}

#[test]
fn verify_corrupted_basis_names_the_failure() {
    let out = run(&[
        "verify",
        fixture("fix_b.json").to_str().unwrap(),
        "--corrupt-basis",
    ]);
    assert_eq!(out.status.code(), Some(6));
    let text = stdout(&out);
    assert!(text.contains("FAIL component transversals"));
}

#[test]
fn verify_with_revlex_basis() {
    let out = run(&[
        "verify",
        fixture("fix_e.json").to_str().unwrap(),
        "--basis-chooser",
        "revlex",
    ]);
    assert_eq!(out.status.code(), Some(0));
}
