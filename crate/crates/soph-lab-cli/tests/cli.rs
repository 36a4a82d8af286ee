//! End-to-end runs of the binary: the enumerate/tables/query/verify/export
//! flow, determinism across worker counts, and the exit-code contract
//! (0 ok, 2 usage, 3 missing prerequisite, 4 computation failure).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_soph-lab"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_code(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).to_string())
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn enumerate_into(dir: &Path, lmax: u32) {
    run_ok(&[
        "enumerate",
        "--lmax",
        &lmax.to_string(),
        "--tmax",
        "512",
        "--out",
        dir.to_str().unwrap(),
    ]);
}

#[test]
fn full_flow_enumerate_tables_query_verify_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let enumerate = run_ok(&["enumerate", "--lmax", "10", "--tmax", "512", "--out", out]);
    let text = stdout(&enumerate);
    assert!(text.contains("records: "));
    assert!(text.contains("kraft: "));
    assert!(dir.path().join("records.csv").exists());
    assert!(dir.path().join("records.csv.manifest").exists());

    let tables = run_ok(&["tables", "--out", out]);
    assert!(stdout(&tables).contains("k_table.csv"));
    assert!(dir.path().join("bb.csv").exists());
    assert!(dir.path().join("qp/omega.csv").exists());
    assert!(dir.path().join("qk/tn.csv").exists());

    // The pinned query example: K of the empty string is 4.
    let q = run_ok(&["query", "--out", out, "k", "e"]);
    assert_eq!(stdout(&q).trim(), "4");

    let q = run_ok(&["query", "--out", out, "k", "0"]);
    assert_eq!(stdout(&q).trim(), "6");

    let q = run_ok(&["query", "--out", out, "--mode", "qp", "soph", "0"]);
    let text = stdout(&q);
    assert!(text.contains("kC[0] = "));
    assert!(text.contains("kPrime = "));
    assert!(text.contains("d = "));

    let q = run_ok(&["query", "--out", out, "--mode", "qp", "m", "e"]);
    assert!(stdout(&q).trim().ends_with(&format!("/2^{}", 4)) || stdout(&q).contains("/2^"));

    let q = run_ok(&["query", "--out", out, "bb", "6"]);
    assert_eq!(stdout(&q).trim(), "out=2 time=2");

    let verify = run_ok(&["verify", "--out", out, "--suite", "all", "--cond-sample", "3"]);
    assert!(stdout(&verify).contains("T1: ExactPass"));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    for id in ["L2", "L3", "C1", "C2", "C3", "L4", "L7", "L8", "C5", "L9", "L11", "P2", "P3", "P4", "T1", "W5", "W6", "W12"] {
        assert!(report.contains(&format!("\"lemma\": \"{id}\"")), "missing {id}");
    }

    let export = run_ok(&["export", "--out", out]);
    assert!(stdout(&export).contains("soph.csv"));
    assert!(dir.path().join("qp/soph.csv").exists());
    assert!(dir.path().join("qk/statistic_4.csv").exists() || dir.path().join("qk/soph.csv").exists());
}

#[test]
fn verify_accepts_a_json_report_path() {
    let dir = tempfile::tempdir().unwrap();
    enumerate_into(dir.path(), 8);
    let report = dir.path().join("report.json");
    run_ok(&[
        "verify",
        "--out",
        report.to_str().unwrap(),
        "--suite",
        "L8,T1",
        "--cond-sample",
        "2",
    ]);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"lemma\": \"L8\""));
    assert!(!text.contains("\"lemma\": \"L2\""));
}

#[test]
fn reruns_and_worker_counts_reproduce_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_ok(&["enumerate", "--lmax", "12", "--tmax", "512", "--workers", "1", "--out", a.path().to_str().unwrap()]);
    run_ok(&["enumerate", "--lmax", "12", "--tmax", "512", "--workers", "8", "--out", b.path().to_str().unwrap()]);
    let ra = std::fs::read(a.path().join("records.csv")).unwrap();
    let rb = std::fs::read(b.path().join("records.csv")).unwrap();
    assert_eq!(ra, rb);

    // Verify twice: byte-identical reports.
    for d in [&a, &b] {
        run_ok(&["verify", "--out", d.path().to_str().unwrap(), "--suite", "L2,L8,P4", "--cond-sample", "2"]);
    }
    let va = std::fs::read(a.path().join("report.json")).unwrap();
    let vb = std::fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(va, vb);
}

#[test]
fn empty_domain_run_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&["enumerate", "--lmax", "0", "--tmax", "16", "--out", dir.path().to_str().unwrap()]);
    assert!(stdout(&out).contains("records: 0"));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    // 2: clap usage error.
    let (code, _) = run_code(&["enumerate", "--lmax", "not-a-number", "--tmax", "16", "--out", out]);
    assert_eq!(code, 2);

    // 2: bad bit string in a query.
    enumerate_into(dir.path(), 8);
    let (code, err) = run_code(&["query", "--out", out, "k", "012"]);
    assert_eq!(code, 2, "{err}");

    // 2: unknown lemma id.
    let (code, _) = run_code(&["verify", "--out", out, "--suite", "L99"]);
    assert_eq!(code, 2);

    // 3: missing records.
    let missing = dir.path().join("nowhere");
    let (code, err) = run_code(&["tables", "--out", missing.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");

    // 4: corrupted records file.
    let records = dir.path().join("records.csv");
    let body = std::fs::read_to_string(&records).unwrap();
    std::fs::write(&records, &body[..body.len() - 4]).unwrap();
    let (code, err) = run_code(&["tables", "--out", out]);
    assert_eq!(code, 4, "{err}");
}

#[test]
fn mixing_configs_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    enumerate_into(dir.path(), 8);
    run_ok(&["export", "--out", out, "--cmax", "8"]);
    // Same derivation params: fine.
    run_ok(&["export", "--out", out, "--cmax", "8"]);
    // Different cmax changes the config hash: refused.
    let (code, err) = run_code(&["export", "--out", out, "--cmax", "4"]);
    assert_eq!(code, 4);
    assert!(err.contains("config"), "{err}");

    // Reports under a changed config are refused too.
    run_ok(&["verify", "--out", out, "--suite", "L8", "--cond-sample", "2"]);
    run_ok(&["verify", "--out", out, "--suite", "L8", "--cond-sample", "2"]);
    let (code, err) = run_code(&["verify", "--out", out, "--suite", "L8", "--cond-sample", "3"]);
    assert_eq!(code, 4);
    assert!(err.contains("config"), "{err}");
}
