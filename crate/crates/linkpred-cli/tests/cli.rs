//! End-to-end tests of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

fn linkpred(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkpred"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn predict_with_zero_penalty_reproduces_the_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.txt"), "0 1\n1 2\n").unwrap();
    let out = linkpred(
        &[
            "predict",
            "--input",
            "edges.txt",
            "--n",
            "3",
            "--lambda",
            "0",
            "--similarity",
            "jaccard",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scores = read(&dir.path().join("run/scores.csv"));
    let lines: Vec<&str> = scores.lines().collect();
    assert_eq!(lines[0], "i,j,score");
    assert_eq!(lines.len(), 4); // header + 3 unordered pairs
    // observed pairs rank first with scores within ridge of 1
    for line in &lines[1..3] {
        let score: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((score - 1.0).abs() < 1e-6, "line {line}");
    }
    let absent: f64 = lines[3].rsplit(',').next().unwrap().parse().unwrap();
    assert!(absent.abs() < 1e-6);
    let manifest = read(&dir.path().join("run/manifest.txt"));
    assert!(manifest.contains("criterion=full"));
}

#[test]
fn predict_is_deterministic_given_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.txt"), "0 1\n1 2\n2 3\n3 4\n").unwrap();
    for run in ["a", "b"] {
        let out = linkpred(
            &[
                "predict",
                "--input",
                "edges.txt",
                "--n",
                "5",
                "--similarity",
                "fraction-match",
                "--seed",
                "11",
                "--out",
                run,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        read(&dir.path().join("a/scores.csv")),
        read(&dir.path().join("b/scores.csv"))
    );
    assert_eq!(
        read(&dir.path().join("a/manifest.txt")).replace("out=a", "out="),
        read(&dir.path().join("b/manifest.txt")).replace("out=b", "out=")
    );
    // cross-validation ran (no --lambda) and recorded its table
    assert!(dir.path().join("a/cv.csv").exists());
}

#[test]
fn mask_switches_to_the_partial_criterion() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.txt"), "0 1\n1 2\n").unwrap();
    std::fs::write(dir.path().join("mask.txt"), "0 1\n0 2\n").unwrap();
    let out = linkpred(
        &[
            "predict",
            "--input",
            "edges.txt",
            "--n",
            "3",
            "--lambda",
            "2",
            "--similarity",
            "jaccard",
            "--mask",
            "mask.txt",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read(&dir.path().join("run/manifest.txt"));
    assert!(manifest.contains("criterion=partial"));
}

#[test]
fn covariate_similarity_records_the_effective_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.txt"), "0 1\n").unwrap();
    std::fs::write(dir.path().join("x.csv"), "0.0,0.0\n1.0,0.0\n0.0,2.0\n").unwrap();
    let out = linkpred(
        &[
            "predict",
            "--input",
            "edges.txt",
            "--n",
            "3",
            "--lambda",
            "1",
            "--covariates",
            "x.csv",
            "--truncate",
            "0",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read(&dir.path().join("run/manifest.txt"));
    assert!(manifest.contains("similarity=covariates"));
    // distances 1, 2, sqrt(5): median 2, sigma = 0.5
    assert!(manifest.contains("sigma_effective=0.5"));
}

#[test]
fn tune_prints_and_records_the_selected_lambda() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.txt"), "0 1\n1 2\n2 3\n0 3\n").unwrap();
    let out = linkpred(
        &[
            "tune",
            "--input",
            "edges.txt",
            "--n",
            "4",
            "--similarity",
            "jaccard",
            "--lambda-grid",
            "0,1,100",
            "--cv-folds",
            "3",
            "--seed",
            "5",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("best_lambda="));
    let cv = read(&dir.path().join("run/cv.csv"));
    assert_eq!(cv.lines().count(), 4); // header + 3 grid rows
    let manifest = read(&dir.path().join("run/manifest.txt"));
    assert!(manifest.contains("best_lambda="));
}

#[test]
fn simulate_writes_curves_and_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let out = linkpred(
        &[
            "simulate",
            "--model",
            "a'",
            "--n",
            "30",
            "--alpha",
            "0.5",
            "--reps",
            "3",
            "--lambda",
            "900",
            "--seed",
            "3",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["full", "partial", "truep"] {
        for rep in 0..3 {
            assert!(dir.path().join(format!("sim/roc_{name}_rep{rep}.csv")).exists());
        }
        let avg = read(&dir.path().join(format!("sim/roc_{name}_avg.csv")));
        assert!(avg.starts_with("fpr,tpr\n"));
        assert!(avg.trim_end().lines().last().unwrap().starts_with("# auc="));
    }
    let manifest = read(&dir.path().join("sim/manifest.txt"));
    assert!(manifest.contains("family=a'"));
    assert!(manifest.contains("lambda_rep2=900"));
}

#[test]
fn simulate_with_full_observation_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = linkpred(
        &[
            "simulate",
            "--model",
            "a'",
            "--n",
            "20",
            "--alpha",
            "1",
            "--reps",
            "1",
            "--lambda",
            "400",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("evaluate"), "stderr: {stderr}");
    assert!(stderr.contains("test set"), "stderr: {stderr}");
}

#[test]
fn simulate_rejects_flipping_beta() {
    let dir = tempfile::tempdir().unwrap();
    let out = linkpred(
        &[
            "simulate", "--model", "c", "--n", "10", "--alpha", "0.5", "--beta", "0.9",
            "--lambda", "1", "--out", "sim",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
}

#[test]
fn sbm_with_oracle_similarity() {
    let dir = tempfile::tempdir().unwrap();
    let out = linkpred(
        &[
            "simulate",
            "--model",
            "sbm",
            "--n",
            "24",
            "--alpha",
            "0.6",
            "--reps",
            "2",
            "--sbm-blocks",
            "2",
            "--sbm-within",
            "0.8",
            "--sbm-between",
            "0.05",
            "--oracle-w",
            "--lambda",
            "576",
            "--seed",
            "9",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read(&dir.path().join("sim/manifest.txt"));
    assert!(manifest.contains("similarity=oracle"));
    // strong planted structure with the oracle similarity predicts well
    let auc_line = manifest
        .lines()
        .find(|l| l.starts_with("auc_partial_mean="))
        .unwrap();
    let auc: f64 = auc_line.split('=').nth(1).unwrap().parse().unwrap();
    assert!(auc > 0.7, "oracle-similarity AUC {auc}");
}

#[test]
fn evaluate_prints_auc_and_flags_degenerate_truth() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("truth.txt"), "0 1\n0 2\n").unwrap();
    std::fs::write(dir.path().join("mask.txt"), "0 1\n1 2\n").unwrap();
    std::fs::write(
        dir.path().join("scores.csv"),
        "i,j,score\n0,2,0.9\n0,3,0.4\n1,3,0.2\n2,3,0.1\n",
    )
    .unwrap();
    let out = linkpred(
        &[
            "evaluate",
            "--scores",
            "scores.csv",
            "--truth",
            "truth.txt",
            "--n",
            "4",
            "--mask",
            "mask.txt",
            "--out",
            "eval",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("auc=1"), "stdout: {stdout}");
    assert!(read(&dir.path().join("eval/roc.csv")).contains("# auc=1"));

    // all-negative truth on the test set is a clean error
    std::fs::write(dir.path().join("empty.txt"), "").unwrap();
    let out = linkpred(
        &[
            "evaluate",
            "--scores",
            "scores.csv",
            "--truth",
            "empty.txt",
            "--n",
            "4",
            "--mask",
            "mask.txt",
            "--out",
            "eval2",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn dimension_mismatch_names_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.txt"), "0 9\n").unwrap();
    let out = linkpred(
        &[
            "predict", "--input", "edges.txt", "--n", "3", "--lambda", "0", "--out", "run",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("input:"), "stderr: {stderr}");
    assert!(stderr.contains("out of range"), "stderr: {stderr}");
}
