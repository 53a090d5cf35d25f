use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const DATA: &str = "a,b,c,d\n0,1,2,0.5\n1,0,-1,1.5\n2,2,0.5,-1\n-1,0.5,1,0\n";
const EXPR: &str = "x1*x2 + sin(x3) - exp(0.2*x1*x4)";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcgame"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("d.csv"), DATA).unwrap();
    dir
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn values(v: &Value, k: usize) -> Vec<f64> {
    v["results"][k]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn exact_shapley_is_efficient_and_repeatable() {
    let dir = setup();
    let args = [
        "exact",
        "shapley",
        "--expression",
        EXPR,
        "--data",
        "d.csv",
        "--all-rows",
    ];
    let first = run(dir.path(), &args);
    let second = run(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    let v = json(&first);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
    let single = run(
        dir.path(),
        &[
            "exact",
            "shapley",
            "--expression",
            EXPR,
            "--data",
            "d.csv",
            "--row",
            "2",
        ],
    );
    let sum: f64 = values(&v, 1).iter().sum();
    assert!((sum - v["results"][1]["sum"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(values(&json(&single), 0), values(&v, 1));
}

#[test]
fn monte_carlo_output_is_seeded() {
    let dir = setup();
    let args = |seed: &'static str| {
        [
            "explain",
            "owen",
            "--expression",
            EXPR,
            "--data",
            "d.csv",
            "--point",
            "-1,2,0.5,1",
            "--partition",
            "[[1,2],[3,4]]",
            "--iterations",
            "300",
            "--seed",
            seed,
        ]
    };
    let a = run(dir.path(), &args("5"));
    let b = run(dir.path(), &args("5"));
    let c = run(dir.path(), &args("6"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(values(&json(&a), 0), values(&json(&c), 0));
    assert_eq!(
        json(&a)["results"][0]["stderr"].as_array().unwrap().len(),
        4
    );
}

#[test]
fn two_step_with_singletons_equals_quotient() {
    let dir = setup();
    let common = [
        "--expression",
        EXPR,
        "--data",
        "d.csv",
        "--row",
        "3",
        "--partition",
        "[[1],[2],[3],[4]]",
        "--iterations",
        "200",
    ];
    let two: Vec<&str> = ["explain", "two-step"]
        .iter()
        .chain(&common)
        .copied()
        .collect();
    let quo: Vec<&str> = ["explain", "quotient"]
        .iter()
        .chain(&common)
        .copied()
        .collect();
    assert_eq!(
        values(&json(&run(dir.path(), &two)), 0),
        values(&json(&run(dir.path(), &quo)), 0)
    );
}

#[test]
fn constant_model_gives_zeros() {
    let dir = setup();
    let out = run(
        dir.path(),
        &[
            "explain",
            "banzhaf",
            "--expression",
            "3.5",
            "--data",
            "d.csv",
            "--row",
            "1",
        ],
    );
    let v = json(&out);
    assert_eq!(values(&v, 0), vec![0.0; 4]);
}

#[test]
fn csv_output_has_stderr_columns() {
    let dir = setup();
    let out = run(
        dir.path(),
        &[
            "explain",
            "shapley",
            "--expression",
            EXPR,
            "--data",
            "d.csv",
            "--all-rows",
            "--iterations",
            "50",
            "--format",
            "csv",
            "--output",
            "out.csv",
        ],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "observation,a,b,c,d,a_stderr,b_stderr,c_stderr,d_stderr"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("row 1,"));
}

#[test]
fn exact_beyond_the_limit_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let header: Vec<String> = (1..=21).map(|i| format!("f{i}")).collect();
    let row = vec!["0"; 21].join(",");
    fs::write(
        dir.path().join("wide.csv"),
        format!("{}\n{row}\n", header.join(",")),
    )
    .unwrap();
    let out = run(
        dir.path(),
        &[
            "exact",
            "shapley",
            "--expression",
            "x1",
            "--data",
            "wide.csv",
            "--row",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2^21"), "{err}");
}

#[test]
fn bad_flag_combinations_are_rejected() {
    let dir = setup();
    let base = ["--expression", EXPR, "--data", "d.csv", "--row", "1"];
    let cases: &[&[&str]] = &[
        &["explain", "owen"],
        &["explain", "shapley", "--partition", "[[1,2],[3,4]]"],
        &["explain", "shapley", "--mode", "true", "--iterations", "10"],
        &["explain", "shapley", "--exact", "--seed", "3"],
        &["explain", "shapley", "--iterations", "0"],
        &["explain", "linear"],
        &["explain", "owen", "--partition", "[[1,2],[3]]"],
        &["exact", "shapley", "--row", "9"],
    ];
    for case in cases {
        let args: Vec<&str> = case.iter().chain(&base).copied().collect();
        let out = run(dir.path(), &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn experiment_writes_rows_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &[
            "experiment",
            "1a",
            "--runs",
            "5",
            "--kmax",
            "11",
            "--out-dir",
            "out",
            "--seed",
            "2",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 5);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["runs"], 5);
    assert_eq!(summary["k_grid"], serde_json::json!([512, 1024, 2048]));
    assert_eq!(summary["gamma_parameterization"], "shape-scale");
}

#[test]
fn validate_passes_on_a_sound_configuration() {
    let dir = setup();
    let out = run(
        dir.path(),
        &[
            "validate",
            "--expression",
            EXPR,
            "--data",
            "d.csv",
            "--all-rows",
            "--partition",
            "[[1,3],[2],[4]]",
        ],
    );
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert!(v["checks"].as_array().unwrap().len() >= 4 * 8);
}
