use std::path::Path;
use std::process::Command;

fn bsec(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_bsec")).args(args).output().unwrap();
    out.status.code().unwrap()
}

fn quadratic_catalog(dir: &Path, scale: f64) -> String {
    let path = dir.join(format!("catalog_{scale}.json"));
    let text = format!(
        r#"[{{"kind": "quadratic", "parameters": {{"mu": 0.99, "Lambda": 4.0}},
            "region": {{"type": "box", "lo": [-1.0, 0.0], "hi": [1.0, 0.5]}}, "scale": {scale}}}]"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sweep_writes_reports_and_report_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = bsec(&["sweep", "--problem", "radial", "--hmax", "0.25", "--spacing", "0.0078125", "--width", "2", "--out", out]);
    assert!(code == 0 || code == 1, "exit code {code}");
    for f in ["report.csv", "report.json", "solution.csv"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert_eq!(bsec(&["report", "--in", out]), code);
}

#[test]
fn verify_barriers_accepts_quadratic_and_rejects_scaled_copy() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol");
    let sol = sol.to_str().unwrap();
    assert_eq!(bsec(&["solve", "--problem", "radial", "--spacing", "0.03125", "--width", "2", "--out", sol]), 0);

    let good = quadratic_catalog(dir.path(), 1.0);
    let out = dir.path().join("good");
    assert_eq!(bsec(&["verify-barriers", "--catalog", &good, "--solution", sol, "--out", out.to_str().unwrap()]), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("barrier_report.json")).unwrap()).unwrap();
    assert_eq!(report[0]["pass"], true);

    let bad = quadratic_catalog(dir.path(), 10.0);
    let out = dir.path().join("bad");
    assert_eq!(bsec(&["verify-barriers", "--catalog", &bad, "--solution", sol, "--out", out.to_str().unwrap()]), 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("barrier_report.json")).unwrap()).unwrap();
    assert!(report[0]["error"].as_str().unwrap().contains("boundary"));
}

#[test]
fn unknown_problem_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let code = bsec(&["solve", "--problem", "no-such-problem", "--spacing", "0.1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2);
}
