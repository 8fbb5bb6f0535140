use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

/// Runs the binary and returns the exit code and the parsed report.
fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_conslaw")).args(args).output().expect("binary runs");
    let report = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().expect("exit code"), report)
}

fn assert_envelope(report: &Value, command: &str, verdict: &str) {
    assert_eq!(report["schema"], "1");
    assert_eq!(report["command"], command);
    assert_eq!(report["verdict"], verdict);
    assert!(report["wall_time_seconds"].as_f64().is_some());
}

fn without_wall_time(mut report: Value) -> Value {
    report.as_object_mut().unwrap().remove("wall_time_seconds");
    report
}

#[test]
fn verify_lemma_random_psi() {
    let (code, report) = run(&["verify-lemma", "--n", "3", "--m", "2", "--random-psi", "7"]);
    assert_eq!(code, 0);
    assert_envelope(&report, "verify-lemma", "pass");
    assert_eq!(report["results"]["arithmetic"], "exact");
    assert_eq!(report["results"]["lemma"]["certificate"]["rank"], 3);
}

#[test]
fn verify_lemma_from_file() {
    let (code, report) = run(&["verify-lemma", "--psi", &data("psi_3x2.json")]);
    assert_eq!(code, 0);
    assert_envelope(&report, "verify-lemma", "pass");
    let (code, report) = run(&["verify-lemma", "--psi", &data("psi_2x2_unnormalized.json")]);
    assert_eq!(code, 0);
    assert!(report["results"]["normalization"].is_object());
}

#[test]
fn invalid_inputs_exit_two() {
    let (code, report) = run(&["verify-lemma", "--n", "3", "--m", "2", "--kappa", "0", "--random-psi", "1"]);
    assert_eq!(code, 2);
    assert_envelope(&report, "verify-lemma", "invalid-input");
    assert!(report["error"].as_str().is_some());
    assert!(report.get("results").is_none());

    let (code, _) = run(&["verify-lemma", "--psi", "/nonexistent/psi.json"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["ledger", "--n", "1", "--m", "3"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["emt-audit", "--input", &data("singular.json")]);
    assert_eq!(code, 2);
    let (code, _) = run(&["emt-audit", "--input", &data("sphere.json"), "--backend", "exact"]);
    assert_eq!(code, 2);
}

#[test]
fn ledger_report() {
    let (code, report) = run(&["ledger", "--n", "3", "--m", "4"]);
    assert_eq!(code, 0);
    assert_envelope(&report, "ledger", "pass");
    let ledger = &report["results"]["ledger"];
    assert_eq!(ledger["dim_k"], 18);
    assert_eq!(ledger["codim_v"], ledger["character_sum"]);
}

#[test]
fn flag_reports() {
    for args in [
        vec!["flag", "--psi", &data("psi_3x2.json")[..]],
        vec!["flag", "--psi", &data("psi_2x2_curvature.json")[..]],
        vec!["flag", "--n", "4", "--m", "3", "--random-psi", "2"],
    ] {
        let (code, report) = run(&args);
        assert_eq!(code, 0, "{args:?}: {report}");
        assert_envelope(&report, "flag", "pass");
    }
}

#[test]
fn emt_audits() {
    let (code, report) = run(&["emt-audit", "--input", &data("flat_constant.json")]);
    assert_eq!(code, 0);
    assert_envelope(&report, "emt-audit", "pass");
    assert_eq!(report["results"]["arithmetic"], "exact");
    assert_eq!(report["results"]["equivalence"]["max_residual_exact"], "0");

    let (code, report) = run(&["emt-audit", "--input", &data("sphere.json")]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["arithmetic"], "numeric");
    assert!(report["results"]["equivalence"]["max_residual"].as_f64().unwrap() < 1e-6);

    for backend in ["exact", "numeric"] {
        let (code, report) = run(&["emt-audit", "--input", &data("conformal_nonconserved.json"), "--backend", backend]);
        assert_eq!(code, 0, "{backend}");
        assert_eq!(report["results"]["arithmetic"], backend);
        assert_eq!(report["results"]["equivalence"]["conserved"], false);
    }
}

#[test]
fn sweep_passes_and_detects_corruption() {
    let args = ["sweep", "--n-range", "2..3", "--m-range", "2..3", "--seeds", "3"];
    let (code, report) = run(&args);
    assert_eq!(code, 0);
    assert_envelope(&report, "sweep", "pass");
    let cells = report["results"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 12);
    assert!(cells.iter().all(|c| c["pass"] == true));

    let mut corrupted = args.to_vec();
    corrupted.push("--corrupt");
    let (code, report) = run(&corrupted);
    assert_eq!(code, 1);
    assert_envelope(&report, "sweep", "violation");
    let cells = report["results"]["cells"].as_array().unwrap();
    assert!(cells.iter().all(|c| c["pass"] == false));
    for c in cells.iter().filter(|c| c["n"] == 3) {
        assert_eq!(c["deficit"], serde_json::json!([3, 2]));
    }
}

#[test]
fn empty_sweep_passes_with_warning() {
    let out = Command::new(env!("CARGO_BIN_EXE_conslaw"))
        .args(["sweep", "--n-range", "4..3", "--m-range", "2..2", "--seeds", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["warnings"][0].as_str().unwrap().contains("empty sweep"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty sweep"));
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let path_str = path.to_string_lossy().into_owned();
    let out = Command::new(env!("CARGO_BIN_EXE_conslaw"))
        .args(["--output", &path_str, "flag", "--n", "3", "--m", "3", "--random-psi", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let first: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let (_, second) = run(&["flag", "--n", "3", "--m", "3", "--random-psi", "5"]);
    assert_eq!(without_wall_time(first), without_wall_time(second));

    let sweep = ["sweep", "--n-range", "2..3", "--m-range", "2..3", "--seeds", "2", "--seed-base", "40"];
    assert_eq!(without_wall_time(run(&sweep).1), without_wall_time(run(&sweep).1));
}
