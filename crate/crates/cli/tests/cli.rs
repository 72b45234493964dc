use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rdsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsa")).args(args).env("RUST_LOG", "warn").output().expect("binary runs")
}

fn synth(dir: &Path) {
    let out = rdsa(&[
        "synth",
        "--nodes",
        "60",
        "--clusters",
        "3",
        "--features",
        "30",
        "--seed",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

const SMALL: [&str; 4] = ["--epochs", "4", "--hidden", "16,8"];

#[test]
fn train_writes_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let run = tmp.path().join("run");
    synth(&data);
    let mut args = vec!["train", "--dataset", data.to_str().unwrap(), "--out", run.to_str().unwrap()];
    args.extend(SMALL);
    let out = rdsa(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for f in ["history.jsonl", "checkpoint.bin", "predictions.txt", "embeddings.csv", "summary.json"] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let history = fs::read_to_string(run.join("history.jsonl")).unwrap();
    let lines: Vec<Value> = history.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["epoch"], 0);
    assert!(lines[3]["losses"]["total"].as_f64().unwrap().is_finite());

    let preds = fs::read_to_string(run.join("predictions.txt")).unwrap();
    assert_eq!(preds.lines().count(), 60);
    assert!(preds.lines().all(|l| l.parse::<usize>().unwrap() < 3));
    let emb = fs::read_to_string(run.join("embeddings.csv")).unwrap();
    assert_eq!(emb.lines().next().unwrap().split(',').count(), 8);

    let scores: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(scores["acc"].as_f64().unwrap() > 0.0);
}

#[test]
fn eval_scores_relabeled_prediction_as_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = tmp.path().join("truth.txt");
    let pred = tmp.path().join("pred.txt");
    fs::write(&truth, "0\n0\n1\n1\n2\n2\n").unwrap();
    fs::write(&pred, "5\n5\n3\n3\n0\n0\n").unwrap();
    let out = rdsa(&["eval", "--pred", pred.to_str().unwrap(), "--truth", truth.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["acc", "nmi", "ari", "f1"] {
        assert!((v[key].as_f64().unwrap() - 1.0).abs() < 1e-12, "{key}");
    }
}

#[test]
fn eval_known_partial_match() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = tmp.path().join("truth.txt");
    let pred = tmp.path().join("pred.txt");
    fs::write(&truth, "0\n0\n1\n1\n").unwrap();
    fs::write(&pred, "0\n0\n0\n1\n").unwrap();
    let out = rdsa(&["eval", "--pred", pred.to_str().unwrap(), "--truth", truth.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["acc"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn input_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = tmp.path().join("truth.txt");
    let pred = tmp.path().join("pred.txt");
    fs::write(&truth, "0\n1\n").unwrap();
    fs::write(&pred, "0\n").unwrap();
    let out = rdsa(&["eval", "--pred", pred.to_str().unwrap(), "--truth", truth.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = tmp.path().join("nowhere");
    let run = tmp.path().join("r");
    let out = rdsa(&["train", "--dataset", missing.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn divergence_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let run = tmp.path().join("r");
    let mut args = vec!["train", "--dataset", data.to_str().unwrap(), "--out", run.to_str().unwrap()];
    args.extend(SMALL);
    args.extend(["--lr", "1e300"]);
    let out = rdsa(&args);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn experiment_reports_noise_and_degradation() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let clean = tmp.path().join("clean.json");
    let noisy = tmp.path().join("noisy.json");
    let d = data.to_str().unwrap();

    let mut args = vec!["experiment", "--dataset", d, "--seeds", "2", "--out", clean.to_str().unwrap()];
    args.extend(SMALL);
    assert!(rdsa(&args).status.success());

    let mut args = vec![
        "experiment",
        "--dataset",
        d,
        "--seeds",
        "2",
        "--noise",
        "1",
        "--baseline",
        clean.to_str().unwrap(),
        "--out",
        noisy.to_str().unwrap(),
    ];
    args.extend(SMALL);
    let out = rdsa(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report: Value = serde_json::from_str(&fs::read_to_string(&noisy).unwrap()).unwrap();
    let per_seed = report["per_seed"].as_array().unwrap();
    assert_eq!(per_seed.len(), 2);
    // 60 nodes at average degree 4 -> 120 edges, level I adds 36
    assert_eq!(per_seed[0]["added_edges"], 36);
    assert!(report["degradation"].is_object());
    assert!(report["metrics"]["acc"]["mean"].as_f64().unwrap() <= 100.0);
}

#[test]
fn sweep_covers_inclusive_range() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let out_path = tmp.path().join("sweep.json");
    let mut args =
        vec!["sweep", "--dataset", data.to_str().unwrap(), "--sigma", "0:1:0.5", "--out", out_path.to_str().unwrap()];
    args.extend(SMALL);
    let out = rdsa(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let sigmas: Vec<f64> = report["points"].as_array().unwrap().iter().map(|p| p["sigma"].as_f64().unwrap()).collect();
    assert_eq!(sigmas, vec![0.0, 0.5, 1.0]);
}

#[test]
fn bad_sigma_range_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let out = rdsa(&["sweep", "--dataset", data.to_str().unwrap(), "--sigma", "1:0:x", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
}
