use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use permatrellis::cli::run_captured;
use permatrellis::matrix::parse_matrix;
use permatrellis::oracles::permanent_naive;
use permatrellis::scalar::format_rational;
use serde_json::Value;
use tempfile::NamedTempFile;

fn file_with(text: &str) -> (NamedTempFile, PathBuf) {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    let path = f.path().to_path_buf();
    (f, path)
}

fn json_of(args: &[&str]) -> Value {
    let out = run_captured(std::iter::once("permatrellis").chain(args.iter().copied())).unwrap();
    serde_json::from_str(&out).unwrap()
}

#[test]
fn perm_agrees_across_methods() {
    let (_f, p) = file_with("1, 2\n3, 4\n");
    let p = p.to_str().unwrap();
    for method in [
        "trellis",
        "trellis-norm",
        "naive",
        "ryser",
        "ryser-gray",
        "nw",
        "glynn",
        "sparse",
    ] {
        let v = json_of(&["perm", p, "--method", method]);
        assert_eq!(v["value"], "10", "{method}");
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["command"], "perm");
    }
    assert_eq!(json_of(&["perm", p, "--domain", "float"])["value"], "10.0");
}

#[test]
fn perm_reports_trellis_counts() {
    let (_f, p) = file_with("1, 1, 1\n1, 1, 1\n1, 1, 1\n");
    let v = json_of(&["perm", p.to_str().unwrap()]);
    assert_eq!(v["value"], "6");
    assert_eq!(v["mults"], 9);
    assert_eq!(v["adds"], 5);
    assert_eq!(v["peak_width"], 3);
}

#[test]
fn repeated_matches_the_expanded_matrix() {
    let (_f, p) = file_with(r#"{"rows": [["1", "2", "3"], ["4", "5/2", "6"]], "mults": [2, 1]}"#);
    let v = json_of(&["repeated", p.to_str().unwrap()]);
    let full = parse_matrix("1, 2, 3\n1, 2, 3\n4, 5/2, 6\n").unwrap();
    assert_eq!(v["value"], format_rational(&permanent_naive(&full).unwrap()));
}

#[test]
fn orderstats_minimum_of_two() {
    let (_f, p) = file_with(r#"{"ranks": [1], "cdf": [["1/2"], ["1/2"]]}"#);
    let v = json_of(&["orderstats", p.to_str().unwrap()]);
    assert_eq!(v["probability"], "3/4");
}

#[test]
fn tsp_on_unit_distances() {
    let (_f, p) = file_with(r#"{"n": 4, "entries": [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]]}"#);
    let v = json_of(&["tsp", p.to_str().unwrap()]);
    assert_eq!(v["length"], "4.0");
    assert_eq!(v["tour"].as_array().unwrap().len(), 5);
    assert!(json_of(&["tsp", p.to_str().unwrap(), "--no-tour"])["tour"].is_null());
}

#[test]
fn opcount_table_rows_agree() {
    let out = run_captured(["permatrellis", "tables", "--range", "2..12"]).unwrap();
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let headers = r.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (mf, mm, af, am) = (
        col("mults_formula"),
        col("mults_measured"),
        col("adds_formula"),
        col("adds_measured"),
    );
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[mf], rec[mm], "{rec:?}");
        assert_eq!(rec[af], rec[am], "{rec:?}");
        rows += 1;
    }
    assert!(rows >= 11);
}

#[test]
fn sparse_bench_reports_the_exact_bound() {
    let v = json_of(&[
        "--seed",
        "3",
        "sparse-bench",
        "--n",
        "8",
        "--d",
        "2",
        "--trials",
        "5",
        "--emit",
        "json",
    ]);
    assert_eq!(v["report"]["trials"], 5);
    assert!(v["report"]["mean_vertices"].as_f64().unwrap() > 0.0);
    assert!(v["expected_vertices_u_exact"].is_string());
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_permatrellis"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    let (_a, good) = file_with("1, 2\n3, 4\n");
    let (_b, garbled) = file_with("1, 2\n3, x\n");
    let (_c, ragged) = file_with("1, 2\n3\n");
    assert_eq!(exit_code(&["perm", good.to_str().unwrap()]), 0);
    assert_eq!(exit_code(&["perm", garbled.to_str().unwrap()]), 2);
    assert_eq!(exit_code(&["perm", ragged.to_str().unwrap()]), 3);
    assert_eq!(exit_code(&["tsp", good.to_str().unwrap()]), 3);
    assert_eq!(exit_code(&["perm", "/nonexistent/matrix.json"]), 1);
    assert_eq!(exit_code(&["no-such-command"]), 2);
}
