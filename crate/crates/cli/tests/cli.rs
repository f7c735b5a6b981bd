use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const ADJ: &str = "a,b,c,d,e,f\n0,1,1,0,0,0\n1,0,1,0,0,0\n1,1,0,1,0,0\n0,0,1,0,1,1\n0,0,0,1,0,1\n0,0,0,1,1,0\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergm-sampled"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("adj.csv"), ADJ).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    let dir = fixture();
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn bad_arguments_exit_one() {
    let dir = fixture();
    assert_eq!(run(dir.path(), &["fit", "--no-such-flag"]).status.code(), Some(1));
    let out = run(dir.path(), &["sample", "--adjacency", "adj.csv"]);
    assert_eq!(out.status.code(), Some(1), "missing --psi/--seeds");
    let out = run(dir.path(), &["simulate", "--nodes", "4", "--eta", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_exits_two() {
    let dir = fixture();
    let out = run(dir.path(), &["fit", "--adjacency", "absent.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.csv"));
}

#[test]
fn malformed_matrix_exits_two() {
    let dir = fixture();
    fs::write(dir.path().join("bad.csv"), "a,b\n0,1\n0,0\n").unwrap();
    let out = run(dir.path(), &["fit", "--adjacency", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2), "asymmetric undirected matrix");
}

#[test]
fn sample_is_deterministic_given_seed() {
    let dir = fixture();
    let args = ["sample", "--adjacency", "adj.csv", "--design", "trace", "--psi", "0.3", "--rng-seed", "11"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn seed_pair_sample_round_trips_through_fit_missing() {
    let dir = fixture();
    let out = run(
        dir.path(),
        &["sample", "--adjacency", "adj.csv", "--design", "trace", "--waves", "1", "--seeds", "2", "--seed-pair", "1,2", "--out", "p.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let partial: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    // Seeds a, b reach c in one wave; dyads among d, e, f stay unobserved.
    assert!(partial["matrix"][3][4].is_null());
    assert_eq!(partial["matrix"][0][1], 1);
    assert_eq!(partial["matrix"][2][3], 1);

    let out = run(dir.path(), &["fit-missing", "--partial", "p.json", "--draws", "400", "--format", "csv"]);
    assert!(matches!(out.status.code(), Some(0) | Some(3)));
    assert!(stdout(&out).starts_with("parameter,eta_hat"));
}

#[test]
fn ht_refuses_link_tracing() {
    let dir = fixture();
    run(dir.path(), &["sample", "--adjacency", "adj.csv", "--design", "trace", "--psi", "0.4", "--out", "p.json"]);
    let out = run(dir.path(), &["ht", "--partial", "p.json", "--design", "trace", "--psi", "0.4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not observable"));
    assert!(out.stdout.is_empty());
}

#[test]
fn ht_on_ego_sample_reports_total() {
    let dir = fixture();
    run(dir.path(), &["sample", "--adjacency", "adj.csv", "--design", "ego", "--psi", "0.5", "--out", "e.json"]);
    let out = run(dir.path(), &["ht", "--partial", "e.json", "--design", "ego", "--psi", "0.5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "horvitz_thompson");
    assert!(v["result"]["total"].as_f64().unwrap() >= 0.0);
}

#[test]
fn design_prob_of_full_pattern_under_saturated_design() {
    let dir = fixture();
    // The fixture is connected, so saturation from any non-empty seed set observes everything.
    run(dir.path(), &["sample", "--adjacency", "adj.csv", "--design", "trace", "--waves", "sat", "--seeds", "1", "--out", "s.json"]);
    let out = run(
        dir.path(),
        &["design-prob", "--adjacency", "adj.csv", "--observed", "s.json", "--design", "trace", "--waves", "sat", "--psi", "0.3", "--format", "csv"],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let p: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((p - (1.0 - 0.7f64.powi(6))).abs() < 1e-12, "{p}");
}

#[test]
fn simulate_and_mean_value_csv_shapes() {
    let dir = fixture();
    let out = run(dir.path(), &["simulate", "--nodes", "7", "--eta", "-1,0.2", "--terms", "edges,gwesp(0.7781)", "--draws", "5", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert_eq!(text.lines().next().unwrap(), "edges,gwesp(0.7781)");

    let out = run(dir.path(), &["mean-value", "--nodes", "7", "--eta", "0", "--draws", "2000", "--format", "csv"]);
    let text = stdout(&out);
    let mean: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((mean - 10.5).abs() < 1.0, "E[edges] at eta=0 on 21 dyads is 10.5, got {mean}");
}

#[test]
fn kl_of_identical_parameters_is_near_zero() {
    let dir = fixture();
    let out = run(dir.path(), &["kl", "--nodes", "6", "--xi", "-0.5", "--eta", "-0.5", "--draws", "500"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    let se = v["result"]["se"].as_f64().unwrap();
    assert!(value.abs() <= 3.0 * se + 1e-12, "{value} +- {se}");
}

#[test]
fn fit_of_empty_graph_is_degenerate() {
    let dir = fixture();
    fs::write(dir.path().join("empty.csv"), "a,b,c\n0,0,0\n0,0,0\n0,0,0\n").unwrap();
    let out = run(dir.path(), &["fit", "--adjacency", "empty.csv", "--out", "fit.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["degenerate"], true);
}

#[test]
fn study_without_data_reports_data_error() {
    let dir = fixture();
    let out = run(dir.path(), &["study", "--lazega", "nowhere"]);
    assert_eq!(out.status.code(), Some(2));
}
