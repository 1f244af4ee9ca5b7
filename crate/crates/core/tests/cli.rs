use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn subk0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subk0")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn kgroup_reports_thue_morse_as_json() {
    let o = subk0(&["kgroup", &path("thue_morse.sub")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in [
        "schema_version",
        "alphabet",
        "triples",
        "beta_matrix",
        "delta_rank",
        "b_rank",
        "stable_rank",
        "torsion",
        "char_poly",
        "stable_matrix",
        "order_unit",
        "perron_eigenvalue",
        "checks",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["stable_rank"], 2);
    assert_eq!(v["delta_rank"], 3);
    assert_eq!(v["triples"].as_array().unwrap().len(), 6);
    assert_eq!(v["torsion"].as_array().unwrap().len(), 0);
    assert_eq!(v["checks"]["delta_in_b"], true);
}

#[test]
fn kgroup_text_for_fibonacci() {
    let o = subk0(&["kgroup", "--format", "text", &path("fibonacci.sub")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x^2 - x - 1"), "{}", stdout(&o));
}

#[test]
fn verify_passes_on_proper_fixture() {
    let o = subk0(&["verify", &path("proper_aab_abb.sub")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(!out.contains("FAIL"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("PASS proper_collapse")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("PASS vershik_cycle")), "{out}");
}

#[test]
fn periodic_input_is_a_precondition_error() {
    for cmd in ["kgroup", "info", "verify"] {
        let o = subk0(&[cmd, &path("periodic.sub")]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("periodic substitution"), "{cmd}: {}", stderr(&o));
    }
}

#[test]
fn reducible_input_is_a_precondition_error() {
    let o = subk0(&["kgroup", &path("reducible.sub")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("primitive"), "{}", stderr(&o));
}

#[test]
fn malformed_input_is_a_parse_error() {
    let o = subk0(&["info", &path("malformed.sub")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn knobs_out_of_range_are_rejected() {
    assert_eq!(subk0(&["kgroup", "--levels", "9", &path("thue_morse.sub")]).status.code(), Some(1));
    assert_eq!(subk0(&["kgroup", "--max-k", "17", &path("thue_morse.sub")]).status.code(), Some(1));
    assert_eq!(subk0(&["kgroup", "--levels", "0", &path("thue_morse.sub")]).status.code(), Some(1));
}

#[test]
fn missing_file_is_an_error() {
    let o = subk0(&["info", "/nonexistent/input.sub"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["kgroup", path("thue_morse.sub").leak()],
        vec!["verify", path("fibonacci.sub").leak()],
        vec!["export-dot", "--triple", path("thue_morse.sub").leak()],
        vec!["classical", "--format", "json", path("proper_aab_abb.sub").leak()],
    ] {
        let a: Vec<&str> = args.iter().map(|s| &**s).collect();
        assert_eq!(stdout(&subk0(&a)), stdout(&subk0(&a)), "{a:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let o = subk0(&["kgroup", "--out", target.to_str().unwrap(), &path("fibonacci.sub")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["stable_rank"], 2);
}

#[test]
fn export_dot_renders_levels() {
    let o = subk0(&["export-dot", "--levels", "2", &path("fibonacci.sub")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("digraph bratteli {"));
    assert!(out.contains("L2_0"));
    assert!(!out.contains("L3_0"));
    let tripled = stdout(&subk0(&["export-dot", "--triple", &path("fibonacci.sub")]));
    assert!(tripled.contains("a.b.a"));
}

#[test]
fn dot_format_is_only_for_export() {
    assert_eq!(subk0(&["kgroup", "--format", "dot", &path("fibonacci.sub")]).status.code(), Some(1));
}

#[test]
fn info_and_triple_describe_input() {
    let o = subk0(&["info", &path("thue_morse.sub")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("primitive: true"));
    assert!(out.contains("aperiodicity: aperiodic"));
    let o = subk0(&["triple", "--format", "json", &path("fibonacci.sub")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["triples"].as_array().unwrap().len(), 4);
}

#[test]
fn help_exits_zero() {
    assert_eq!(subk0(&["--help"]).status.code(), Some(0));
}
