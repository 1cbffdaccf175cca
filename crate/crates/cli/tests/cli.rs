//! End-to-end checks of the `luxsec` binary: exit codes, config validation,
//! and byte-stable output across runs and worker counts.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_luxsec"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("luxsec-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn run_small_campaign_succeeds() {
    let dir = temp_dir("run");
    let out = dir.join("out");
    let status = bin()
        .args(["run", "--trials", "3", "--mode", "combined", "--seed", "7"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for file in ["trials.csv", "summary.csv", "manifest.json"] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let trials = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    assert!(trials.starts_with("trial,mode,n_elements,snr_db,c_t,r_t,r_u,feasible,iters"));
    assert_eq!(trials.lines().count(), 4); // header + 3 trials
}

#[test]
fn csv_rows_parse_back_losslessly() {
    let dir = temp_dir("roundtrip");
    let out = dir.join("out");
    assert!(bin()
        .args(["run", "--trials", "4", "--mode", "irs_only", "--seed", "3"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let trials = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    for line in trials.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9);
        for float_col in [3, 4, 5, 6] {
            let v: f64 = fields[float_col].parse().expect("float column parses");
            // Reformatting at 9 significant digits reproduces the text.
            assert_eq!(format!("{v:.8e}"), fields[float_col]);
        }
    }
}

#[test]
fn missing_config_exits_2() {
    let status = bin()
        .args(["run", "--config", "/definitely/not/here.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_config_exits_2_and_names_field() {
    let dir = temp_dir("invalid");
    let cfg = write_config(&dir, "bad.json", r#"{"trials": 0}"#);
    let output = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("trials"), "stderr: {stderr}");
}

#[test]
fn infeasible_campaign_exits_3() {
    let dir = temp_dir("infeasible");
    // Rate minimums far beyond anything the channel can deliver.
    let cfg = write_config(
        &dir,
        "hard.json",
        r#"{"rate_min_bps_hz": {"trusted": 50, "untrusted": 50}, "trials": 3, "snr_tx_db": 60}"#,
    );
    let out = dir.join("out");
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--mode")
        .arg("combined")
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    // Rows were still emitted for inspection.
    assert!(out.join("trials.csv").exists());
}

#[test]
fn unwritable_output_exits_4() {
    let status = bin()
        .args(["run", "--trials", "1", "--mode", "combined", "--out", "/proc/luxsec-denied"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn check_validates_and_echoes() {
    let dir = temp_dir("check");
    let cfg = write_config(&dir, "ok.json", r#"{"n_elements": 16, "seed": 5}"#);
    let output = bin().arg("check").arg("--config").arg(&cfg).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("16 elements"), "stdout: {stdout}");
    assert!(stdout.contains("seed 5"), "stdout: {stdout}");
}

#[test]
fn oracle_subcommand_reports_gap() {
    let dir = temp_dir("oracle");
    let cfg = write_config(&dir, "small.json", r#"{"n_elements": 4, "trials": 1}"#);
    let output = bin()
        .arg("oracle")
        .arg("--config")
        .arg(&cfg)
        .args(["--trial", "2", "--grid", "51"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("optimizer:"), "stdout: {stdout}");
    assert!(stdout.contains("oracle:"), "stdout: {stdout}");
}

#[test]
fn oracle_subcommand_rejects_large_banks() {
    let status = bin().args(["oracle", "--trial", "0"]).status().unwrap();
    // Default scenario has 40 elements; the exhaustive check must refuse.
    assert_eq!(status.code(), Some(2));
}

#[test]
fn run_with_oracle_flag_emits_gap_columns() {
    let dir = temp_dir("oraclerun");
    let cfg = write_config(&dir, "small.json", r#"{"n_elements": 4}"#);
    let out = dir.join("out");
    assert!(bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .args(["--trials", "3", "--mode", "combined", "--oracle"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let trials = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    let header = trials.lines().next().unwrap();
    assert!(header.ends_with("oracle_c_t,oracle_gap"), "header: {header}");
}

#[test]
fn bad_threads_env_exits_2() {
    let status = bin()
        .args(["run", "--trials", "1"])
        .env("LUXSEC_THREADS", "many")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn reruns_and_thread_counts_produce_identical_bytes() {
    let dir = temp_dir("determinism");
    let mut outputs = Vec::new();
    for (tag, threads) in [("a", "1"), ("b", "1"), ("c", "2")] {
        let out = dir.join(tag);
        let status = bin()
            .args(["run", "--trials", "6", "--mode", "all", "--seed", "11"])
            .arg("--out")
            .arg(&out)
            .env("LUXSEC_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            std::fs::read(out.join("trials.csv")).unwrap(),
            std::fs::read(out.join("summary.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1], "re-run changed the CSV bytes");
    assert_eq!(outputs[0], outputs[2], "worker count changed the CSV bytes");
}
