use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use heavymean::harness::{DistributionRef, EstimatorId, ExperimentConfig, CSV_HEADER};
use heavymean::mechanisms::PrivacyBudget;
use heavymean::moments::{two_point_hard_instance, MomentModel, TestDistribution};
use tempfile::TempDir;

fn heavymean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heavymean")).args(args).env_remove("HEAVYMEAN_SEED").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn write_config(dir: &Path, dist: TestDistribution, n: usize, trials: usize) -> PathBuf {
    let config = ExperimentConfig {
        estimator: EstimatorId::Univariate,
        distribution: DistributionRef::Inline(dist),
        model: MomentModel::unit(2.0, 10.0).unwrap(),
        budget: PrivacyBudget::pure(1.0).unwrap(),
        alpha: 0.2,
        beta: 0.1,
        trials,
        seed: 9,
        n: Some(n),
        constants: Default::default(),
        fallback_below: None,
        grid_cap: None,
    };
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_json()).unwrap();
    path
}

fn constant_column(dir: &Path, value: &str, rows: usize) -> PathBuf {
    let path = dir.join("data.csv");
    std::fs::write(&path, format!("# constant column\n{}", format!("{value}\n").repeat(rows))).unwrap();
    path
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn estimate_1d_reports_a_mean() {
    let dir = TempDir::new().unwrap();
    let data = constant_column(dir.path(), "5", 20_000);
    let args = ["estimate-1d", "--flavor", "pure", "--eps", "1", "--k", "2", "--range", "10", "--alpha", "0.2"];
    let input = data.to_str().unwrap();
    let out = heavymean(&[&args[..], &["--input", input, "--no-sample-check"]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["mean"].as_f64().unwrap().is_finite());
    assert_eq!(v["samples"], 20_000);

    let short = heavymean(&[&args[..], &["--input", input]].concat());
    assert_eq!(code(&short), 2);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let data = constant_column(dir.path(), "1.5", 20_000);
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_heavymean"))
            .args(["estimate-1d", "--flavor", "zcdp", "--rho", "0.5", "--k", "2", "--range", "10", "--alpha", "0.2"])
            .args(["--input", data.to_str().unwrap(), "--no-sample-check"])
            .env("HEAVYMEAN_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b, c) = (run("7"), run("7"), run("8"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn estimate_hd_commands_read_rows() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("points.csv");
    std::fs::write(&path, "0.5, -1\n".repeat(8_000)).unwrap();
    let input = path.to_str().unwrap();
    let run = |command: &str| {
        let args: Vec<&str> = command.split_whitespace().chain(["--input", input]).collect();
        heavymean(&args)
    };
    let zcdp = run("estimate-hd --flavor zcdp --rho 1 --dim 2 --k 2 --range 10 --alpha 0.5 --no-sample-check");
    assert_eq!(code(&zcdp), 0, "{}", String::from_utf8_lossy(&zcdp.stderr));
    assert_eq!(json(&zcdp)["mean"].as_array().unwrap().len(), 2);

    let pure = run("estimate-hd-pure --eps 1 --dim 2 --k 2 --range 10 --alpha 0.5 --no-sample-check");
    assert_eq!(code(&pure), 0, "{}", String::from_utf8_lossy(&pure.stderr));
    assert_eq!(json(&pure)["grid_size"], 25);

    let wrong_dim = run("estimate-hd --flavor zcdp --rho 1 --dim 3 --k 2 --range 10 --alpha 0.5");
    assert_eq!(code(&wrong_dim), 2);
}

#[test]
fn simulate_writes_csv_and_jsonl() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), TestDistribution::PointMass { at: 2.0 }, 5_000, 6);
    let csv = dir.path().join("out.csv");
    let out = heavymean(&["simulate", "--config", config.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.lines().count(), 7);

    let out = heavymean(&["simulate", "--config", config.to_str().unwrap(), "--format", "jsonl"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 6);
    assert!(stdout.lines().all(|l| l.contains("\"schema_version\":1")));
}

#[test]
fn simulate_assert_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (_, hard) = two_point_hard_instance(0.2, 2.0).unwrap();
    let starved = write_config(dir.path(), hard, 1_300, 20);
    let out = heavymean(&["simulate", "--config", starved.to_str().unwrap(), "--assert"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));

    let missing = heavymean(&["simulate", "--config", "/nonexistent/config.json"]);
    assert_eq!(code(&missing), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"estimator": "univariate"}"#).unwrap();
    assert_eq!(code(&heavymean(&["simulate", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn audit_flags_only_the_broken_mechanism() {
    let ok = heavymean(&["audit", "--mechanism", "laplace", "--eps", "1", "--draws", "200000", "--assert"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(json(&ok)["violation"], false);
    let broken =
        heavymean(&["audit", "--mechanism", "laplace-half-noise", "--eps", "1", "--draws", "200000", "--assert"]);
    assert_eq!(code(&broken), 3);
    assert_eq!(code(&heavymean(&["audit", "--mechanism", "nope", "--eps", "1"])), 2);
}

#[test]
fn complexity_prints_one_search_per_alpha() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), TestDistribution::PointMass { at: 0.0 }, 5_000, 10);
    let out = heavymean(&["complexity", "--config", config.to_str().unwrap(), "--alphas", "0.4,0.2", "--refine", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["searches"].as_array().unwrap().len(), 2);
    assert!(v["fit"].is_null());
}
