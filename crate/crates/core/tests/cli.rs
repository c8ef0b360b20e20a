use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uaknn"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path) -> std::path::PathBuf {
    let data = dir.join("data.csv");
    let status = bin()
        .args(["gen-synthetic", "--m", "120", "--n", "8", "--l", "3", "--seed", "4", "--out", s(&data)])
        .status()
        .unwrap();
    assert!(status.success());
    data
}

#[test]
fn evaluate_writes_metric_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen(dir.path());
    let out = dir.path().join("out");
    let output = bin()
        .args(["evaluate", "--data", s(&data), "--n-features", "8", "--algo", "uaknn,knn"])
        .args(["--folds", "3", "--reps", "1", "--extreme-labels=0.02", "--out", s(&out)])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next(), Some("algorithm,metric,mean,std"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * (6 + 6 + 2));
    assert!(rows.iter().any(|r| r.starts_with("uaknn,cosine,")));
    assert!(rows.iter().any(|r| r.starts_with("knn,sliced_kl,")));
    let pvalues = std::fs::read_to_string(out.join("pvalues.csv")).unwrap();
    assert!(pvalues.starts_with("algorithm_a,algorithm_b,metric,p_value\n"));
    assert!(out.join("timing.csv").exists());
}

#[test]
fn predict_writes_distributions() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen(dir.path());
    let query = dir.path().join("q.csv");
    std::fs::write(&query, "1,0,0,0,0,0,0,0\n0,1,0,0,0,0,0,0.5\n").unwrap();
    let out = dir.path().join("pred.csv");
    let status = bin()
        .args(["predict", "--data", s(&data), "--n-features", "8", "--algo", "wuaknn"])
        .args(["--query", s(&query), "--out", s(&out)])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y0,y1,y2");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let sum: f64 = line.split(',').map(|v| v.parse::<f64>().unwrap()).sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen(dir.path());
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();

    // usage errors
    assert_eq!(code(&["evaluate", "--frobnicate"]), Some(2));
    assert_eq!(code(&["evaluate", "--data", s(&data), "--n-features", "8", "--out", "x"]), Some(2));
    // missing file
    assert_eq!(
        code(&["stats", "--data", s(&dir.path().join("missing.csv")), "--n-features", "8"]),
        Some(2)
    );
    // malformed cell
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2,0.5,0.5\n1,x,0.5,0.5\n").unwrap();
    assert_eq!(code(&["stats", "--data", s(&bad), "--n-features", "2"]), Some(2));
    // invalid distribution
    std::fs::write(&bad, "1,2,0.5,0.6\n").unwrap();
    assert_eq!(code(&["stats", "--data", s(&bad), "--n-features", "2"]), Some(3));
    // invalid configuration
    assert_eq!(
        code(&["evaluate", "--data", s(&data), "--n-features", "8", "--algo", "uaknn", "--variance", "0", "--out", "x"]),
        Some(3)
    );
    assert_eq!(code(&["stats", "--data", s(&data), "--n-features", "8"]), Some(0));
    assert_eq!(code(&["--help"]), Some(0));
}
