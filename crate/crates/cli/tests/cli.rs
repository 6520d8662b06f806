use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpcobar")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn differential_of_v1_squared() {
    let o = run(&["d", "--module", "sphere:9", "--expr", "v1^2 i[9]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-3 * (2 v1 h1 - 3 h1^2) (x) i[9]");
}

#[test]
fn excess_example() {
    let o = run(&["excess", "--expr", "h1^3 (x) h1"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn e7_even_j_is_zero() {
    let o = run(&["groups", "--space", "e7", "--j", "4", "--delta", "2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["v2j"]["factors"], serde_json::json!([]));
    assert_eq!(v["v2jm1"]["factors"], serde_json::json!([]));
    assert_eq!(v["ambiguous"], false);
}

#[test]
fn delta_is_mandatory() {
    assert_eq!(run(&["groups", "--space", "e7", "--j", "3"]).status.code(), Some(2));
    assert_eq!(run(&["groups", "--space", "e7", "--j", "3", "--delta", "4"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["parse-check", "--expr", "w1 h1"]).status.code(), Some(2));
    assert_eq!(run(&["--p", "4", "dump-structure"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["derive-T", "--json"]);
    let b = run(&["derive-T", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_paper_negative_control_and_cap() {
    let o = run(&["verify-paper", "--flip-convention", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entry = v["entries"].as_array().unwrap().iter().find(|e| e["id"] == "right-unit-v1").unwrap();
    assert_eq!(entry["status"], "fail");

    let o = run(&["--degree-cap", "16", "verify-paper"]);
    let text = stdout(&o);
    assert!(text.contains("skipped: truncated chain-t6"));
    assert!(text.contains("PASS right-unit-v1"));
}

#[test]
fn comodule_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("bpcobar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.txt");
    std::fs::write(&path, "grammar-v1\ngen a 10\ngen b 14\ncoaction b: 1 * b + (-h1) * a\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["parse-check", "--file", p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("round trip: ok"));
    let o = run(&["d", "--module", p, "--expr", "x[14]"]);
    assert_eq!(stdout(&o).trim(), "h1 (x) x[10]");
    std::fs::remove_dir_all(&dir).unwrap();
}
