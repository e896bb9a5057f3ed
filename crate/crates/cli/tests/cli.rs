use std::process::{Command, Output};

use galled_census_core::io::{parse_dist_csv, CacheFile, DistTable};
use galled_census_core::one_component::NTable;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galled-census"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn galled_total_at_ten() {
    assert_eq!(stdout(&["galled", "--n", "10"]), "19327089427089478650\n");
}

#[test]
fn one_component_csv_example() {
    assert_eq!(
        stdout(&["dist", "--family", "one-component", "--n", "2", "--format", "csv"]),
        "k,probability_num,probability_den\n0,3,6\n1,2,6\n2,1,6\n"
    );
}

#[test]
fn limit_pmf_six_digits() {
    assert_eq!(stdout(&["limit-pmf", "--j", "0", "--k", "0"]), "0.416862\n");
    assert_eq!(stdout(&["limit-pmf", "--j", "1", "--k", "-2"]), "0\n");
}

#[test]
fn joint_dist_parses_back_exactly() {
    let csv = parse_dist_csv(&stdout(&["dist", "--family", "galled", "--n", "7", "--format", "csv"])).unwrap();
    assert_eq!(csv.denominator.to_string(), "167357180970");
    let json = DistTable::from_json(&stdout(&["dist", "--family", "galled", "--n", "7", "--format", "json"])).unwrap();
    assert_eq!(json.rows, csv.rows);
    assert_eq!(json.weights(), csv.weights());
}

#[test]
fn dup_dist_json() {
    let d = DistTable::from_json(&stdout(&["dist", "--family", "dup", "--n", "2", "--format", "json"])).unwrap();
    let counts: Vec<String> = d.rows.iter().map(|r| r.count.to_string()).collect();
    assert_eq!(counts, ["6", "4", "1"]);
    assert_eq!(d.total.to_string(), "11");
}

#[test]
fn counts_by_statistic() {
    assert_eq!(stdout(&["one-component", "--n", "2", "--by-retic"]), "0 1\n1 2\n2 3\n");
    assert_eq!(stdout(&["dup", "--n", "2"]), "11\n");
    assert_eq!(stdout(&["fdu", "--n", "3"]), "168\n");
    assert_eq!(stdout(&["max-retic", "--n", "7"]), "7577955\n");
    assert_eq!(stdout(&["bounds", "--n", "3"]), "lower 240\nexact 240\nupper 276\n");
    let joint = stdout(&["galled", "--n", "7", "--joint"]);
    assert!(joint.lines().any(|l| l == "8 1 18868231935"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["report", "--ns", "5,8"][..],
        &["galled", "--n", "6", "--by-retic"],
        &["check", "--suite", "tables", "--max-n", "6"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn checks_pass() {
    for suite in ["tables", "bounds", "oracle", "conjecture"] {
        let out = stdout(&["check", "--suite", suite, "--max-n", "6"]);
        assert!(!out.contains("FAIL"), "{suite}: {out}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["galled"]).status.code(), Some(2));
    assert_eq!(run(&["galled", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--family", "trees", "--n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["report", "--ns", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["asympt", "--family", "one-component-near-max", "--n", "9"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--suite", "oracle", "--max-n", "9"]).status.code(), Some(3));
    assert_eq!(run(&["galled", "--n", "61", "--joint"]).status.code(), Some(3));
}

#[test]
fn asympt_reports_gap() {
    let out = stdout(&["asympt", "--family", "one-component", "--n", "7"]);
    let gap: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("gap "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((gap - 0.0642).abs() < 1e-3);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.json");
    let p = path.to_str().unwrap();
    let first = stdout(&["--cache", p, "dup", "--n", "12"]);
    let file = CacheFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file.b_table().unwrap().unwrap().n_max(), 13);
    assert!(file.n_table().unwrap().is_none());

    assert_eq!(stdout(&["--cache", p, "dup", "--n", "12"]), first);
    stdout(&["--cache", p, "galled", "--n", "9"]);
    let file = CacheFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file.n_table().unwrap().unwrap(), NTable::build(10).unwrap());

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["--cache", p, "galled", "--n", "3"]).status.code(), Some(1));
}
