use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn leavitt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leavitt"))
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
fn validate_valid_file() {
    let o = leavitt(&["validate", "--graph", &fixture("loop.graph")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("vertices: 1"));
}

#[test]
fn dangling_edge_cites_line() {
    let o = leavitt(&["validate", "--graph", &fixture("dangling.graph")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_an_error() {
    let o = leavitt(&["validate", "--graph", &fixture("no-such.graph")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cycle_in_t_is_a_hypothesis_violation() {
    let o = leavitt(&["validate", "--graph", &fixture("tcycle.graph"), "--t0", "u,w"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("T acyclic: fail (cycle"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(leavitt(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        leavitt(&["mul", "--graph", &fixture("loop.graph")]).status.code(),
        Some(1)
    );
    let bad_ring = leavitt(&["relations", "--graph", &fixture("loop.graph"), "--ring", "zmod:1"]);
    assert_eq!(bad_ring.status.code(), Some(1));
    assert_eq!(leavitt(&["--help"]).status.code(), Some(0));
    assert_eq!(leavitt(&["--version"]).status.code(), Some(0));
}

#[test]
fn mul_examples() {
    let g = fixture("loop.graph");
    let o = leavitt(&["mul", "--graph", &g, "p(v)", "p(v)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("word: p(v)\n"));

    let o = leavitt(&["mul", "--graph", &g, "st(e)", "s(e)"]);
    assert!(stdout(&o).contains("word: p(v)\n"));

    let g = fixture("outsplit.graph");
    let o = leavitt(&["mul", "--graph", &g, "s(x1)", "s(x2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("word: 0\n"));
}

#[test]
fn mul_prints_graded_components() {
    let g = fixture("loop.graph");
    let o = leavitt(&["mul", "--graph", &g, "--format", "kv", "s(e) + st(e)", "s(e) + st(e)"]);
    let out = stdout(&o);
    assert!(out.contains("degree.-2 = 1*Z(v,e.e)\n"), "{out}");
    assert!(out.contains("degree.0 = 2*Z(v,v)\n"));
    assert!(out.contains("degree.2 = 1*Z(e.e,v)\n"));
}

#[test]
fn bad_word_is_a_parse_error() {
    let g = fixture("loop.graph");
    assert_eq!(leavitt(&["grade", "--graph", &g, "s(e"]).status.code(), Some(2));
    assert_eq!(leavitt(&["grade", "--graph", &g, "s(nope)"]).status.code(), Some(2));
}

#[test]
fn grade_over_zmod() {
    let g = fixture("loop.graph");
    let o = leavitt(&["grade", "--graph", &g, "--ring", "zmod:4", "4*s(e) + 2*st(e)"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("ring: zmod:4"));
    assert!(out.contains("degrees: 1\n"), "{out}");
}

#[test]
fn relations_pass() {
    for f in ["loop.graph", "outsplit.graph", "loop_collapse.graph", "chain.graph"] {
        let o = leavitt(&["relations", "--graph", &fixture(f), "--ring", "q"]);
        assert_eq!(o.status.code(), Some(0), "{f}");
        assert!(stdout(&o).ends_with("result: pass\n"));
    }
}

#[test]
fn loop_collapse_fixture() {
    let g = fixture("loop_collapse.graph");
    let o = leavitt(&["collapse", "--graph", &g, "--t0", "w"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("edge: [e1.e2] v <- v"));
    assert!(out.contains("== groupoid-iso ==") && out.ends_with("result: pass\n"));

    let o = leavitt(&["morita-check", "--graph", &g, "--t0", "w"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("edge: [e1.e2] v <- v"));
}

#[test]
fn invalid_t0_exits_nonzero() {
    let g = fixture("chain.graph");
    // u is a source, so it may not be collapsed.
    assert_eq!(
        leavitt(&["collapse", "--graph", &g, "--t0", "u"]).status.code(),
        Some(3)
    );
    assert_eq!(
        leavitt(&["morita-check", "--graph", &g, "--t0", "u"]).status.code(),
        Some(3)
    );
    // Collapsing everything leaves no F.
    let lp = fixture("loop.graph");
    assert_eq!(
        leavitt(&["collapse", "--graph", &lp, "--t0", "v"]).status.code(),
        Some(3)
    );
    assert_eq!(
        leavitt(&["collapse", "--graph", &lp, "--t0", "q"]).status.code(),
        Some(2)
    );
}

#[test]
fn kv_reports_are_byte_identical() {
    let g = fixture("outsplit.graph");
    let args = [
        "morita-check",
        "--graph",
        &g,
        "--t0",
        "t",
        "--ring",
        "zmod:4",
        "--seed",
        "17",
        "--format",
        "kv",
    ];
    let a = leavitt(&args);
    let b = leavitt(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.starts_with("[hypotheses]\n"));
    assert!(out.lines().all(|l| l.starts_with('[') || l.contains(" = ")));
}
