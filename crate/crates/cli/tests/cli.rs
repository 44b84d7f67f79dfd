//! Black-box tests of the installed binary: exit codes, determinism, and
//! the documented example invocations.

use std::process::{Command, Output};

fn ctxkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = ctxkit(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn exit_code(args: &[&str]) -> i32 {
    ctxkit(args).status.code().expect("no signal")
}

#[test]
fn examples_list_names_all_five_fixtures() {
    let names = stdout_of(&["examples", "list"]);
    assert_eq!(
        names.lines().collect::<Vec<_>>(),
        vec!["prbox", "hardy", "product", "qorder-zx", "cbd-prbox"]
    );
}

#[test]
fn examples_show_and_write_agree() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["prbox", "hardy", "product", "qorder-zx", "cbd-prbox"] {
        let shown = stdout_of(&["examples", "show", name]);
        let path = dir.path().join(name);
        let path_str = path.to_str().unwrap();
        stdout_of(&["examples", "write", name, path_str]);
        assert_eq!(shown, std::fs::read_to_string(&path).unwrap());
        assert!(shown.ends_with('\n'));
    }
}

#[test]
fn prbox_report_states_the_expected_verdicts() {
    let text = stdout_of(&["analyze", "prbox", "--checks", "signalling,strong,lp"]);
    assert!(text.contains("signalling: none"));
    assert!(text.contains("strong: strongly contextual"));
    assert!(text.contains("lp: infeasible"));
}

#[test]
fn hardy_report_names_the_witness_pair() {
    let text = stdout_of(&["analyze", "hardy", "--checks", "logical,strong"]);
    assert!(text.contains("logical: contextual"));
    assert!(text.contains("a1=0,b1=0 in context a1,b1"));
    assert!(text.contains("strong: not strongly contextual (global section "));
}

#[test]
fn qorder_zx_report_has_zero_qq_and_unit_influence() {
    let text = stdout_of(&["analyze", "qorder-zx", "--checks", "qq,cbd"]);
    assert!(text.contains("cbd: noncontextual (direct influence 1)"));
    assert!(text.contains("qq: q = 0"));
}

#[test]
fn checks_run_in_fixed_order_regardless_of_request_order() {
    let forward = stdout_of(&["analyze", "prbox", "--checks", "signalling,lp"]);
    let backward = stdout_of(&["analyze", "prbox", "--checks", "lp,signalling"]);
    assert_eq!(forward, backward);
    let signalling_at = forward.find("signalling:").unwrap();
    let lp_at = forward.find("lp:").unwrap();
    assert!(signalling_at < lp_at);
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    for target in ["prbox", "hardy", "product", "qorder-zx", "cbd-prbox"] {
        let first = stdout_of(&["analyze", target, "--format", "json"]);
        let second = stdout_of(&["analyze", target, "--format", "json"]);
        assert_eq!(first, second, "nondeterministic report for {target}");
        serde_json::from_str::<serde_json::Value>(&first).expect("valid JSON");
    }
}

#[test]
fn written_example_analyzes_identically_to_the_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hardy.json");
    let path_str = path.to_str().unwrap();
    stdout_of(&["examples", "write", "hardy", path_str]);
    let from_file = stdout_of(&["analyze", path_str, "--format", "json"]);
    let builtin = stdout_of(&["analyze", "hardy", "--format", "json"]);
    assert_eq!(from_file, builtin);
}

#[test]
fn gen_qorder_reproduces_the_zx_example_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let generated = dir.path().join("gen.json");
    let reference = dir.path().join("ref.json");
    stdout_of(&[
        "gen-qorder",
        "--state",
        "1,0",
        "--proj-a",
        "1,0,0,0",
        "--proj-b",
        "1/2,1/2,1/2,1/2",
        "-o",
        generated.to_str().unwrap(),
    ]);
    stdout_of(&["examples", "write", "qorder-zx", reference.to_str().unwrap()]);
    assert_eq!(
        std::fs::read(&generated).unwrap(),
        std::fs::read(&reference).unwrap()
    );
}

#[test]
fn commuting_projectors_give_identical_order_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("commuting.json");
    stdout_of(&[
        "gen-qorder",
        "--state",
        "3/5,4/5",
        "--proj-a",
        "1,0,0,0",
        "--proj-b",
        "1,0,0,0",
        "-o",
        path.to_str().unwrap(),
    ]);
    let sys = ctxkit::cbd::parse_cbd(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let view = ctxkit::cbd::order_effect_view(&sys).unwrap();
    assert_eq!(view.table_ab, view.table_ba);
    assert!(ctxkit::cbd::qq_statistic(&view) == ctxkit::ratio(0, 1));
}

#[test]
fn exit_codes_follow_the_documented_contract() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    let not_json = write("bad.json", "not json");
    assert_eq!(exit_code(&["analyze", not_json.to_str().unwrap()]), 2);

    let unknown_shape = write("odd.json", "{\"weird\": 1}");
    assert_eq!(exit_code(&["analyze", unknown_shape.to_str().unwrap()]), 2);

    // Well-formed JSON violating a model invariant: weights not summing
    // to one.
    let invalid = write(
        "invalid.json",
        r#"{"contents":["a","b"],"contexts":[
            {"id":"AB","measures":["a","b"],"table":{"1,1":"1/2"}},
            {"id":"BA","measures":["b","a"],"table":{"1,1":"1"}}]}"#,
    );
    assert_eq!(exit_code(&["analyze", invalid.to_str().unwrap()]), 3);

    assert_eq!(exit_code(&["analyze", "prbox", "--checks", "qq"]), 3);
    assert_eq!(exit_code(&["analyze", "qorder-zx", "--checks", "lp"]), 3);
    assert_eq!(exit_code(&["analyze", "prbox", "--checks", "nope"]), 3);
    assert_eq!(
        exit_code(&["analyze", "prbox", "--checks", "lp", "--max-columns", "2"]),
        4
    );
    assert_eq!(exit_code(&["analyze", "/does/not/exist.json"]), 1);
    assert_eq!(exit_code(&["examples", "show", "nope"]), 3);

    // Generator validation failures: a non-projector matrix and a
    // malformed rational.
    assert_eq!(
        exit_code(&[
            "gen-qorder",
            "--state",
            "1,0",
            "--proj-a",
            "1,0,0,1/3",
            "--proj-b",
            "1,0,0,0",
            "-o",
            dir.path().join("out.json").to_str().unwrap(),
        ]),
        3
    );
    assert_eq!(
        exit_code(&[
            "gen-qorder",
            "--state",
            "1,zz",
            "--proj-a",
            "1,0,0,0",
            "--proj-b",
            "1,0,0,0",
            "-o",
            dir.path().join("out.json").to_str().unwrap(),
        ]),
        2
    );
}

#[test]
fn default_checks_cover_the_input_kind() {
    let scenario = stdout_of(&["analyze", "product"]);
    for head in [
        "signalling:",
        "logical:",
        "strong:",
        "lp:",
        "fraction:",
        "cech:",
    ] {
        assert!(scenario.contains(head), "missing {head} in default report");
    }
    let order = stdout_of(&["analyze", "qorder-zx"]);
    assert!(order.contains("cbd:"));
    assert!(order.contains("qq:"));
    let cyclic = stdout_of(&["analyze", "cbd-prbox"]);
    assert!(cyclic.contains("cbd:"));
    assert!(!cyclic.contains("qq:"));
}

#[test]
fn signalling_input_reports_confounded_fraction_instead_of_failing() {
    let text = stdout_of(&["analyze", "hardy", "--checks", "fraction"]);
    assert!(text.contains("fraction: confounded by signalling"));
}
