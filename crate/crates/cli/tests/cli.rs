use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pc-spectra"));
    cmd.env_remove("PC_SPECTRA_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn pc-spectra")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn legacy_spectrum_has_five_clusters() {
    let o = run(&[
        "spectrum", "--family", "legacy", "--L", "10", "--alpha", "0", "--gamma", "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("index,re_lambda,im_lambda,cluster_id,multiplicity\r\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 10);
    let ids: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(ids.len(), 5);
    assert!(rows.iter().all(|r| r[4] == "2"));

    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(summary["distinct"], 5);
}

#[test]
fn off_coalescence_spectrum_is_simple() {
    let o = run(&[
        "spectrum",
        "--family",
        "legacy",
        "--L",
        "10",
        "--gamma",
        "2.5",
        "--precision",
        "double",
    ]);
    assert!(o.status.success());
    assert!(rows(&stdout(&o)).iter().all(|r| r[4] == "1"));
}

fn build_random(dir: &Path, seed: &str, gamma: &str) -> std::path::PathBuf {
    let path = dir.join(format!("spec_{seed}_{gamma}.json"));
    let o = run(&[
        "build",
        "--family",
        "random",
        "--k",
        "5",
        "--alpha",
        "-1.2",
        "--delta",
        "1.1",
        "--gamma",
        gamma,
        "--seed",
        seed,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["command"], "build");
    path
}

#[test]
fn verify_random_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = build_random(dir.path(), "7", "1");
    let o = run(&["verify", "--spec", spec.to_str().unwrap()]);
    assert!(o.status.success());
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["certified"], true);
    assert_eq!(cert["mode"], "symbolic");
    assert!(cert["residual"].as_f64().unwrap() < 1e-8);

    // Certification failing is an answer, not an error.
    let spec = build_random(dir.path(), "7", "1.3");
    let o = run(&["verify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["certified"], false);
}

#[test]
fn verify_four_wise() {
    let o = run(&[
        "verify", "--family", "d", "--L", "12", "--gamma1", "2", "--gamma2", "1", "--gamma3", "2", "--order", "4",
    ]);
    assert!(o.status.success());
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["certified"], true);
    assert_eq!(cert["order"], 4);
}

#[test]
fn spec_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = build_random(dir.path(), "11", "1");
    let second = dir.path().join("again.json");
    let o = run(&[
        "build",
        "--spec",
        first.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn outputs_are_deterministic_and_worker_independent() {
    let args = [
        "nonortho",
        "--family",
        "b",
        "--L",
        "12",
        "--J1",
        "1",
        "--J2",
        "1.5",
        "--gamma-grid",
        "0:6:13",
    ];
    let one = bin().args(args).args(["--workers", "1"]).output().unwrap();
    let again = bin().args(args).args(["--workers", "1"]).output().unwrap();
    let many = bin().args(args).args(["--workers", "3"]).output().unwrap();
    let env = bin()
        .args(args)
        .args(["--workers", "1"])
        .env("PC_SPECTRA_WORKERS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, env.stdout);

    let a = run(&["build", "--family", "random", "--k", "4", "--seed", "5"]);
    let b = run(&["build", "--family", "random", "--k", "4", "--seed", "5"]);
    let c = run(&["build", "--family", "random", "--k", "4", "--seed", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn nonortho_peaks_at_coalescence() {
    let o = run(&[
        "nonortho",
        "--family",
        "b",
        "--L",
        "10",
        "--J1",
        "1.5",
        "--J2",
        "1",
        "--gamma-grid",
        "0:6:13",
    ]);
    let sweep = rows(&stdout(&o));
    let peak = sweep
        .iter()
        .max_by(|a, b| a[2].parse::<f64>().unwrap().total_cmp(&b[2].parse().unwrap()))
        .unwrap();
    assert_eq!(peak[0], "3");
    assert_eq!(peak[3], "5");

    let o = run(&[
        "nonortho",
        "--family",
        "b",
        "--L",
        "10",
        "--J1",
        "1.5",
        "--J2",
        "1",
        "--gamma",
        "3",
        "--heatmap",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("mu,nu,abs_U\r\n"));
    assert_eq!(rows(&text).len(), 100);
}

#[test]
fn dynamics_writes_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dyn.csv");
    let o = run(&[
        "dynamics",
        "--family",
        "b",
        "--L",
        "10",
        "--J1",
        "1",
        "--J2",
        "1.5",
        "--gamma-grid",
        "1:3:3",
        "--t-final",
        "4",
        "--state",
        "uniform-site",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&std::fs::read_to_string(&out).unwrap());
    let summary = rows.last().unwrap();
    assert_eq!(summary[0], "summary");
    let traces: Vec<_> = rows.iter().filter(|r| r[0] == "trace").collect();
    assert_eq!(traces.len(), 3 * 5);
    let finals: Vec<f64> = traces
        .iter()
        .filter(|r| r[2] == "4")
        .map(|r| r[3].parse().unwrap())
        .collect();
    let min = finals.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(summary[3].parse::<f64>().unwrap(), min);

    let line: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(line["state"], "uniform-site");
}

#[test]
fn sweep_over_hopping() {
    let o = run(&[
        "sweep",
        "--family",
        "b",
        "--L",
        "12",
        "--J2",
        "1",
        "--gamma",
        "2",
        "--param",
        "J1",
        "--grid",
        "0.5:2.5:5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1] == "6" && r[2] == "true"));
}

#[test]
fn preset_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["preset-run", "fig7", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(line["result"]["distinct_at_1"], 3);
    let rows = rows(&std::fs::read_to_string(dir.path().join("fig7_distinct.csv")).unwrap());
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[50], ["1", "3"]);
}

#[test]
fn exit_codes() {
    // Invalid configurations.
    assert_eq!(run(&["spectrum", "--family", "b", "--L", "10"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--L", "10"]).status.code(), Some(1));
    assert_eq!(
        run(&["spectrum", "--family", "legacy", "--L", "9", "--gamma", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "spectrum",
            "--family",
            "legacy",
            "--L",
            "10",
            "--gamma",
            "1",
            "--tol-distinct",
            "0"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "nonortho",
            "--family",
            "b",
            "--L",
            "10",
            "--J1",
            "1",
            "--J2",
            "1",
            "--gamma-grid",
            "0:1:0"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(run(&["preset-run", "fig3"]).status.code(), Some(1));
    assert_eq!(
        bin()
            .args(["spectrum", "--family", "legacy", "--L", "4", "--gamma", "1"])
            .env("PC_SPECTRA_WORKERS", "x")
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );

    assert_eq!(
        run(&["spectrum", "--family", "legacy", "--L", "10", "--gamma", "NaN"])
            .status
            .code(),
        Some(1)
    );

    // An integration step far too large for the spectrum is a numerical failure.
    let o = run(&[
        "dynamics",
        "--family",
        "legacy",
        "--L",
        "10",
        "--gamma",
        "1",
        "--dt",
        "2",
        "--t-final",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
