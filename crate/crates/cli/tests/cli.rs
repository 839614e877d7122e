use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tilespec::app::{exit, exit_code};
use tilespec::report::CheckReport;
use tilespec_core::group::haar_weights;
use tilespec_core::lattice::subgroup_from_generators;
use tilespec_core::tiling::{check_all, InstanceDump, Verdict};
use tilespec_core::{Arithmetic, Element, Group, Rational, SetOnGroup};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tilespec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_all_true_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "a.json",
        r#"{"group": "Z4", "lattice": {"generators": [[2]]}, "omega": [[0], [1]]}"#,
    );
    for extra in [&[][..], &["--exact"][..]] {
        let mut args = vec![
            "check",
            "--instance",
            p.to_str().unwrap(),
            "--format",
            "json",
        ];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(exit::ALL_TRUE), "{}", stderr(&o));
        let r: CheckReport = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(r.verdicts(), [true; 5]);
        assert!(r.witnesses.is_empty());
    }
}

#[test]
fn check_all_false_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "b.json",
        r#"{"group": [4], "lattice": [[2]], "omega": [0, 2], "measure": "7/3"}"#,
    );
    let o = run(&[
        "check",
        "--instance",
        p.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(exit::ALL_FALSE));
    let r: CheckReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.verdicts(), [false; 5]);
    assert_eq!(r.witnesses.len(), 5);
    assert_eq!(r.measure, "7/3");
    let text = run(&["check", "--instance", p.to_str().unwrap()]);
    assert_eq!(text.status.code(), Some(exit::ALL_FALSE));
    assert!(stdout(&text).contains("verdicts agree"));
}

#[test]
fn disagreement_maps_to_two() {
    let g = Group::cyclic(4).unwrap();
    let h = subgroup_from_generators(&g, &[Element(vec![2])]).unwrap();
    let omega = SetOnGroup::from_indices(&g, [0, 1]);
    let mc = haar_weights(&g, Rational::from_integer(1)).unwrap();
    let mut r = check_all(&omega, &h, &mc, Arithmetic::Exact).unwrap();
    assert_eq!(exit_code(&r), exit::ALL_TRUE);
    r.verdicts[3] = Verdict {
        holds: false,
        witness: None,
    };
    r.defect = Some(InstanceDump {
        factors: vec![4],
        generators: vec![Element(vec![2])],
        omega: omega.elements(),
        group_weight: [1, 1],
    });
    assert_eq!(exit_code(&r), exit::DEFECT);
    let report = CheckReport::new(&g, Rational::from_integer(1), &r);
    assert!(!report.consistent);
    assert!(report.to_text().contains("DEFECT"));
}

#[test]
fn input_errors_exit_64_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "range.json",
            r#"{"group": "Z4", "lattice": [[2]], "omega": [[0], [9]]}"#,
            "$.omega[1][0]",
        ),
        (
            "syntax.json",
            "{\"group\": \"Z4\",\n \"omega\": [0,, 1]}",
            ":2:",
        ),
        (
            "schema.json",
            r#"{"group": "Z4", "lattice": {"generators": [[2]]}, "omega": [[0]], "bogus": 1}"#,
            "$.bogus",
        ),
        (
            "nolattice.json",
            r#"{"group": "Z4", "omega": [[0]]}"#,
            "lattice",
        ),
        (
            "group.json",
            r#"{"group": "Z4xQ2", "lattice": [], "omega": [[0, 0]]}"#,
            "$.group",
        ),
    ];
    for (name, text, needle) in cases {
        let p = write(dir.path(), name, text);
        let o = run(&["check", "--instance", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(exit::INPUT), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let o = run(&["check", "--instance", "/nonexistent/x.json"]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
    let o = run(&["search", "general", "--group", "Z6", "--size", "4"]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
    assert!(stderr(&o).contains("does not divide"));
    let o = run(&["search", "tiles", "--group", "Z4", "--generator", "7"]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "r.json",
        r#"{"group": "Z2xZ6", "lattice": [[1, 3]], "omega": [[0, 0], [0, 1], [1, 5]]}"#,
    );
    for mode in [&[][..], &["--exact"][..]] {
        let mut args = vec![
            "check",
            "--instance",
            p.to_str().unwrap(),
            "--format",
            "json",
        ];
        args.extend_from_slice(mode);
        let text = stdout(&run(&args));
        let parsed: CheckReport = serde_json::from_str(&text).unwrap();
        let again: CheckReport = serde_json::from_str(&parsed.to_json()).unwrap();
        assert_eq!(parsed, again);
        assert_eq!(parsed.to_json(), text.trim_end());
        let v: Value = serde_json::from_str(&text).unwrap();
        for key in ["c1", "c2", "c3", "c4", "c5", "witnesses", "mode"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}

fn result_lines(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with("{\"summary\""))
        .map(String::from)
        .collect()
}

fn summary(o: &Output) -> Value {
    let line = stdout(o).lines().last().unwrap().to_string();
    serde_json::from_str::<Value>(&line).unwrap()["summary"].clone()
}

#[test]
fn search_tiles_in_lexicographic_choice_order() {
    let o = run(&["search", "tiles", "--group", "Z4", "--generator", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        result_lines(&o),
        ["[[0],[1]]", "[[0],[3]]", "[[1],[2]]", "[[2],[3]]"]
    );
    assert_eq!(summary(&o)["completion"], "exhausted");
    let o = run(&[
        "search",
        "tiles",
        "--group",
        "Z6",
        "--generator",
        "3",
        "--max-results",
        "5",
    ]);
    assert_eq!(result_lines(&o).len(), 5);
    assert_eq!(summary(&o)["completion"], "truncated");
    assert_eq!(summary(&o)["expected_total"], "8");
}

#[test]
fn search_output_ignores_worker_count() {
    let args = [
        "search", "spectra", "--group", "Z2xZ8", "--omega", "0,0", "--omega", "0,1", "--omega",
        "1,0", "--omega", "1,1",
    ];
    let one = run(&[&args[..], &["--jobs", "1"]].concat());
    let many = run(&[&args[..], &["--jobs", "4"]].concat());
    assert!(!result_lines(&one).is_empty());
    assert_eq!(result_lines(&one), result_lines(&many));
    let capped1 = run(&[&args[..], &["--jobs", "1", "--max-results", "3"]].concat());
    let capped4 = run(&[&args[..], &["--jobs", "4", "--max-results", "3"]].concat());
    assert_eq!(result_lines(&capped1), result_lines(&one)[..3]);
    assert_eq!(result_lines(&capped1), result_lines(&capped4));

    let g1 = run(&[
        "search", "general", "--group", "Z12", "--size", "4", "--jobs", "1",
    ]);
    let g4 = run(&[
        "search", "general", "--group", "Z12", "--size", "4", "--jobs", "4",
    ]);
    assert_eq!(result_lines(&g1), result_lines(&g4));
    assert_eq!(summary(&g1)["completion"], "exhausted");
}

#[test]
fn spectra_example() {
    let o = run(&[
        "search", "spectra", "--group", "Z4", "--omega", "0", "--omega", "1",
    ]);
    assert_eq!(result_lines(&o), ["[[0],[2]]"]);
}

#[test]
fn fuglede_report_document() {
    let o = run(&["search", "fuglede", "--group", "Z4", "--size", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = result_lines(&o);
    assert_eq!(lines.len(), 1);
    let doc: Value = serde_json::from_str(&lines[0]).unwrap();
    assert_eq!(doc["subsets"], 3);
    assert_eq!(doc["agrees"], true);
    assert_eq!(
        doc["symmetric_difference"]["tile_not_spectral"],
        Value::Array(vec![])
    );

    let o = run(&[
        "search",
        "fuglede",
        "--family",
        "cyclic",
        "--max-order",
        "8",
    ]);
    assert_eq!(summary(&o)["disagreements"], 0);
    assert_eq!(result_lines(&o).len(), 5);
}

#[test]
fn time_budget_truncates() {
    let o = run(&[
        "search",
        "fuglede",
        "--family",
        "all",
        "--max-order",
        "40",
        "--time-budget-ms",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary(&o)["completion"], "truncated");
}

#[test]
fn reduce_zd_writes_a_checkable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reduced.json");
    let o = run(&[
        "reduce-zd",
        "--matrix",
        "[[1,1],[-1,1]]",
        "--omega",
        "[[0,0],[1,0]]",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("tiles: true"));
    let c = run(&["check", "--instance", out.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(exit::ALL_TRUE));

    let input = write(
        dir.path(),
        "zd.json",
        r#"{"matrix": [[2,0],[0,2]], "omega": [[0,0],[0,1],[1,0],[0,2]]}"#,
    );
    let o = run(&["reduce-zd", "--input", input.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["source"]["tiles"], false);
    assert_eq!(v["source"]["multiplicity"], serde_json::json!([2, 1, 1, 0]));

    let o = run(&[
        "reduce-zd",
        "--matrix",
        "[[1,2],[2,4]]",
        "--omega",
        "[[0,0]]",
    ]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
    assert!(stderr(&o).contains("singular"));
    let o = run(&[
        "reduce-zd",
        "--matrix",
        "[[1,0],[0,x]]",
        "--omega",
        "[[0,0]]",
    ]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
}

#[test]
fn selftest_order_8_passes() {
    let o = run(&["selftest", "--max-order", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["five_way"]["defects"], Value::Array(vec![]));
    let o = run(&["selftest", "--max-order", "99"]);
    assert_eq!(o.status.code(), Some(exit::INPUT));
}

#[test]
fn float_and_exact_verdicts_match_on_selftest_corpus() {
    let float = tilespec::selftest::verdicts(10, Arithmetic::Float);
    let exact = tilespec::selftest::verdicts(10, Arithmetic::Exact);
    assert_eq!(float.len(), exact.len());
    assert!(float == exact);
}
