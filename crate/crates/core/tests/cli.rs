use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn exner(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exner-bench"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bench_with_defaults_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["bench"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["snapshot.csv", "exact.csv", "report.json", "plot.gp"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let csv = fs::read_to_string(dir.path().join("snapshot.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,h,u,z_b,eta,q_b"));
    assert_eq!(csv.lines().count(), 501);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["cells"], 500);
    assert_eq!(report["final_time"], 7.0);
    assert!(report["norms"]["h"]["rel_l1"].as_f64().unwrap() <= 2e-2);
}

#[test]
fn snapshot_csv_is_bit_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "bench", "--cells", "80", "--tend", "0.5", "--scheme", "rusanov",
    ];
    assert_eq!(exner(&args, a.path()).status.code(), Some(0));
    assert_eq!(exner(&args, b.path()).status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("snapshot.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn missing_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["bench", "--config", "/nonexistent/exner.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exner.cfg"));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "cells = 40\nmanning = 0.03\n").unwrap();
    let o = exner(&["bench", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`manning`"), "{}", stderr(&o));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# coarse quick run\ncells = 40\ntend = 0.25\nscheme = relaxation\n",
    )
    .unwrap();
    let o = exner(
        &["bench", "--config", cfg.to_str().unwrap(), "--cells", "60"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("snapshot.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61);
}

#[test]
fn invalid_flag_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["bench", "--scheme", "godunov"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("godunov"));
}

#[test]
fn violated_bounds_are_all_listed() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["bench", "--cells", "1", "--cfl", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("cells") && err.contains("cfl"), "{err}");
}

#[test]
fn cfl_ten_is_a_numerical_failure() {
    for scheme in ["relaxation", "rusanov"] {
        let dir = tempfile::tempdir().unwrap();
        let o = exner(&["bench", "--cfl", "10", "--scheme", scheme], dir.path());
        assert_eq!(o.status.code(), Some(3), "{scheme}: {}", stderr(&o));
        assert!(stderr(&o).contains("cell"), "{}", stderr(&o));
    }
}

#[test]
fn failed_threshold_exits_1_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    // transmissive ends starve the bed of its inflowing sediment
    let o = exner(
        &["bench", "--bc", "transmissive", "--cells", "100"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL"));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn exact_dump_flux_column_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["exact-dump", "--cells", "5", "--times", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("exact_t0.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!((r[5] - (0.005 * r[0] + 0.005)).abs() <= 1e-15, "{r:?}");
        assert!((r[4] - (r[1] + r[3])).abs() <= 1e-15);
    }
}

#[test]
fn exact_dump_without_times_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dump");
    let o = exner(&["exact-dump"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert!(!out.exists());
}

#[test]
fn exact_dump_outside_validity_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["exact-dump", "--xmin", "-3", "--times", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("validity domain"), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_records_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["verify", "--seed", "11", "--samples", "30"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 11);
    assert_eq!(report["samples"], 30);
}

#[test]
fn converge_defaults_to_unit_final_time() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["converge", "--levels", "25,50,100"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("convergence.json")).unwrap())
            .unwrap();
    assert_eq!(report["config"]["t_end"], 1.0);
    assert_eq!(report["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn converge_rejects_two_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = exner(&["converge", "--levels", "100,200"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
