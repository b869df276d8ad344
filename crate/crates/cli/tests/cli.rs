use std::io::Write;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn resring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resring")).args(args).output().unwrap()
}

fn resring_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_resring"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn counter_is_cyclic() {
    let o = resring(&["nilpotent", &data("counter8.w")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("VERDICT: cyclic"));
    let o = resring(&["nilpotent", "--naive", "--max-iter", "20", &data("counter8.w")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("F^8 contains a cycle"));
}

#[test]
fn unify_keeps_names() {
    let o = resring(&["unify", "f(X)", "f(g(Y))"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("{X ↦ g(Y)}"));
    let o = resring(&["unify", "f(X)", "g(X)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("VERDICT: not unifiable"));
}

#[test]
fn product_of_files() {
    let o = resring(&["product", &data("hg.w"), &data("gf.w")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("h(X0) <- f(X0)"));
    let o = resring(&["product", &data("gf.w"), &data("hg.w")]);
    assert!(stdout(&o).contains("VERDICT: zero"));
}

#[test]
fn circuits_and_queries() {
    let o = resring(&["cvp-eval", &data("one_gate.ckt")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("1\n"));
    assert_eq!(code(&resring(&["cvp-eval", &data("zero_gate.ckt")])), 1);
    assert_eq!(code(&resring(&["cvp-eval", &data("mixed.ckt")])), 0);
    for (ckt, expected) in [("one_gate.ckt", 0), ("zero_gate.ckt", 1), ("mixed.ckt", 0)] {
        let encoded = resring(&["cvp-encode", &data(ckt)]);
        assert_eq!(code(&encoded), 0);
        let o = resring_stdin(&["query", "-"], &encoded.stdout);
        assert_eq!(code(&o), expected, "{ckt}");
        let o = resring_stdin(&["query", "--oracle", "-"], &encoded.stdout);
        assert_eq!(code(&o), expected, "{ckt} oracle");
    }
    let o = resring(&["query", "--oracle", "--depth", "4", &data("derive.q")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("g(f(c))"));
    assert_eq!(code(&resring(&["query", "--oracle", "--depth", "1", &data("derive.q")])), 1);
}

#[test]
fn machines() {
    let aut = data("parens.aut");
    assert_eq!(code(&resring(&["simulate", &aut, "aabb"])), 0);
    assert_eq!(code(&resring(&["simulate", &aut, "abb"])), 1);
    let obs = resring(&["encode-automaton", &aut]);
    assert_eq!(code(&obs), 0);
    let o = resring_stdin(&["check-obs", "-"], &obs.stdout);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&resring_stdin(&["accept", "-", "ab"], &obs.stdout)), 0);
    assert_eq!(code(&resring_stdin(&["accept", "-", "ba"], &obs.stdout)), 1);
    assert_eq!(code(&resring(&["accept", &data("bounce.w"), "a"])), 1);
    let o = resring(&["reduce", &data("bounce.w"), "a"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| l.contains("_c")));
    let o = resring(&["word-rep", "ab", "ab"]);
    assert_eq!(stdout(&o).lines().count(), 6);
    assert_eq!(code(&resring(&["word-rep", "a", "ab"])), 2);
    assert_eq!(code(&resring(&["check-obs", &data("counter8.w")])), 1);
}

#[test]
fn saturate_and_flatten() {
    let o = resring(&["saturate", &data("counter8.w")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().count() >= 4);
    let o = resring(&["flatten", &data("counter8.w")]);
    assert_eq!(stdout(&o).lines().count(), 3 + 5 + 7 + 7);
    let o = resring(&["--flatten-threshold", "1", "nilpotent", &data("counter8.w")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn json_matches_text() {
    let o = resring(&["--json", "nilpotent", &data("counter8.w")]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "cyclic");
    assert_eq!(v["yes"], false);
    let o = resring(&["--json", "--jobs", "2", "simulate", &data("parens.aut"), "ab"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "accept");
    assert!(v["details"]["explored"].as_u64().unwrap() > 0);
}

#[test]
fn errors_exit_two_with_location() {
    let dir = std::env::temp_dir().join(format!("resring-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.w");
    std::fs::write(&bad, "f(X) <- g(X)\nf(X <- g(X)\n").unwrap();
    let o = resring(&["nilpotent", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.w:2:"), "{err}");
    let o = resring(&["saturate", &data("bounce.w")]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&resring(&["nilpotent", "missing.w"])), 2);
    assert_eq!(code(&resring(&["frobnicate"])), 2);
}
