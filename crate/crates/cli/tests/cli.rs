use std::path::Path;
use std::process::{Command, Output};

use opsysdual_cli::{CliError, RunReport, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, EXIT_UNDECIDED};
use serde_json::Value;

fn run(cert_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opsysdual"))
        .arg("--cert-dir")
        .arg(cert_dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_run(cert_dir: &Path, args: &[&str]) -> (i32, RunReport) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(cert_dir, &full);
    let report =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), report)
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["--help"]), EXIT_OK);
    assert_eq!(code(&["d-norm", "--help"]), EXIT_OK);
    assert_eq!(code(&["--version"]), EXIT_OK);
    assert_eq!(code(&["norm", "--system", "m:2", "--element", "unit"]), EXIT_OK);
    assert_eq!(code(&["frobnicate"]), EXIT_INVALID);
    assert_eq!(code(&["norm", "--system", "m:2"]), EXIT_INVALID);
    assert_eq!(
        code(&["norm", "--system", "m:2", "--element", "unit", "--bogus"]),
        EXIT_INVALID
    );
    assert_eq!(
        code(&["norm", "--system", "nowhere:7", "--element", "unit"]),
        EXIT_INVALID
    );
    assert_eq!(
        code(&["--tol", "0", "norm", "--system", "m:2", "--element", "unit"]),
        EXIT_INVALID
    );
    assert_eq!(
        code(&["--seed", "0xZZ", "norm", "--system", "m:2", "--element", "unit"]),
        EXIT_INVALID
    );
    assert_eq!(
        code(&["wittstock", "--system", "m:2", "--functional", "trace"]),
        EXIT_INVALID
    );
    let err = run(dir.path(), &["frobnicate"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("Usage"));
}

#[test]
fn solver_failures_are_undecided() {
    let e = CliError::from(opsysdual::Error::Solver("no convergence".into()));
    assert_eq!(e.exit_code(), EXIT_UNDECIDED);
}

#[test]
fn json_report_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = json_run(dir.path(), &["d-norm", "--system", "m:2", "--functional", "entry:0:0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.command, "d-norm");
    assert_eq!(r.inputs_digest.len(), 64);
    assert_eq!(r.outputs["d_norm"].as_f64(), Some(1.0));
    assert!(!r.certificates.is_empty());
    for c in &r.certificates {
        let name = Path::new(c).file_name().unwrap().to_str().unwrap();
        assert!(
            name.starts_with(&format!("d-norm-{}-", &r.inputs_digest[..12])),
            "{name}"
        );
        assert!(Path::new(c).is_file());
    }

    let (_, c) = json_run(
        dir.path(),
        &["cone-check", "--system", "offdiag-m2", "--element", "[[0,1],[1,0]]"],
    );
    assert_eq!(c.outputs["member"], Value::Bool(false));

    let text = run(
        dir.path(),
        &["norm", "--system", "linfty:2", "--element", "[[2,0],[0,-0.5]]"],
    );
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.lines().any(|l| l == "norm: 2.000000000"), "{text}");
}

#[test]
fn verdict_on_linfty() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = json_run(dir.path(), &["verdict", "--system", "linfty:3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.outputs["r_hat"].as_f64(), Some(1.0));
}

#[test]
fn csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ratios.csv");
    let csv_s = csv.to_str().unwrap();
    for _ in 0..2 {
        let out = run(
            dir.path(),
            &[
                "--level",
                "2",
                "--restarts",
                "4",
                "report",
                "--system",
                "linfty:2",
                "--random",
                "2",
                "--csv",
                csv_s,
            ],
        );
        assert_eq!(
            out.status.code(),
            Some(EXIT_OK),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut rd = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "system",
            "functional-digest",
            "dual_norm",
            "d_norm",
            "ratio",
            "level",
            "method",
            "residual"
        ]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 4 && rows.len() % 2 == 0);
    let half = rows.len() / 2;
    assert_eq!(rows[..half], rows[half..], "appended runs differ");
    for r in &rows {
        assert_eq!(&r[0], "linfty:2");
        let ratio: f64 = r[4].parse().unwrap();
        assert!((1.0 - 1e-6..=4.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn runs_are_deterministic() {
    let args = ["ratio", "--system", "m:2", "--functional", "random:9:2"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (_, ra) = json_run(a.path(), &args);
    let (_, rb) = json_run(b.path(), &args);
    assert_eq!(ra.outputs, rb.outputs);
    assert_eq!(ra.inputs_digest, rb.inputs_digest);
    assert_eq!(ra.certificates.len(), rb.certificates.len());
    for (x, y) in ra.certificates.iter().zip(&rb.certificates) {
        assert_eq!(std::fs::read_to_string(x).unwrap(), std::fs::read_to_string(y).unwrap());
    }
    let (_, other) = json_run(
        a.path(),
        &["--seed", "7", "ratio", "--system", "m:2", "--functional", "random:9:2"],
    );
    assert_ne!(other.inputs_digest, ra.inputs_digest);
}

#[test]
fn verify_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let certs = dir.path().join("c");
    let (_, r) = json_run(&certs, &["ratio", "--system", "linfty:2", "--functional", "[1,-0.5]"]);
    let (code, v) = json_run(&certs, &["report", "--verify-cert", certs.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.outputs["failed"].as_u64(), Some(0));
    assert_eq!(v.outputs["verified"].as_u64(), Some(r.certificates.len() as u64));

    let path = &r.certificates[0];
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let claimed = cert["claimed"].as_f64().unwrap();
    cert["claimed"] = Value::from(claimed + 0.25);
    std::fs::write(path, cert.to_string()).unwrap();
    let (code, v) = json_run(&certs, &["report", "--verify-cert", path]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert_eq!(v.outputs["failed"].as_u64(), Some(1));
}
