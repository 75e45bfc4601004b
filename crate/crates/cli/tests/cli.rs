use std::path::Path;
use std::process::{Command, Output};

fn adfcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adfcs")).args(args).output().expect("binary runs")
}

fn out_dir(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn alpha_writes_csv_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let o = adfcs(&[
        "alpha", "--n", "8", "--depth", "3,5", "--observable", "1 4", "--observable", "2 3 6 9", "--method", "exact_dp",
        "--method", "k_product", "--out", out_dir(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "alpha.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# adfcs "));
    assert_eq!(lines.next().unwrap(), "n,d,S,method,alpha,stderr");
    assert_eq!(lines.count(), 2 * 2 * 2);
}

#[test]
fn depth_prints_json() {
    let o = adfcs(&["depth", "--n", "10", "--observable", "kitaev mu=2 delta=1 t=0.4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mode"], "search");
    assert!(v["d_star"].as_u64().unwrap() <= 3);
    assert_eq!(v["per_term_alpha"].as_array().unwrap().len(), 10 + 2 * 9);

    let o = adfcs(&["depth", "--mode", "formula", "--n", "10", "--d-int", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["d_star"], 9);
    assert_eq!(v["calibration_constant"], 2.0);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 10\nshots = 100, 10\n").unwrap();
    let o = adfcs(&["sweep-error", "--config", cfg.to_str().unwrap(), "--observable", "1 2"]);
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(&cfg, "n = 10\nbogus = 1\n").unwrap();
    let o = adfcs(&["alpha", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(adfcs(&["kitaev", "--n", "7"]).status.code(), Some(2));
    assert_eq!(adfcs(&["alpha", "--observable", "1 2", "--method", "nope"]).status.code(), Some(2));
    assert_eq!(adfcs(&["estimate", "--backend", "sparse"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("a.cfg");
    std::fs::write(&cfg, "n = 6\ndepths = 1, 3\nobservables = 1 2\n").unwrap();
    let o = adfcs(&["alpha", "--config", cfg.to_str().unwrap(), "--depth", "5", "--out", out_dir(dir.path())]);
    assert!(o.status.success());
    let csv = read(dir.path(), "alpha.csv");
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("6,5,1 2,exact_dp,"));
}

#[test]
fn sweep_is_identical_across_worker_counts() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (dir, workers) in dirs.iter().zip(["1", "8"]) {
        let o = adfcs(&[
            "sweep-error", "--n", "6", "--depth", "3,5", "--observable", "1 6", "--observable", "2 3 4 9", "--shots",
            "10,40", "--reps", "5", "--seed", "17", "--workers", workers, "--out", out_dir(dir.path()),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read(dirs[0].path(), "error_sweep.csv"), read(dirs[1].path(), "error_sweep.csv"));
}

#[test]
fn kitaev_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = adfcs(&["kitaev", "--n", "6", "--shots", "20,60", "--reps", "3", "--out", out_dir(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "kitaev.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "n,d,label,shots,reps,estimate,abs_error,mean_estimate,rmse,truth");
    assert_eq!(csv.lines().count(), 2 + 2 * 2);
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "kitaev_summary.json")).unwrap();
    assert_eq!(v["mu"], 2.0);
    assert_eq!(v["d_int"], 3);
}

#[test]
fn estimate_on_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let o = adfcs(&[
        "estimate", "--state", "vacuum", "--n", "4", "--depth", "3", "--observable", "1 2", "--shots", "100,1000",
        "--median-of-means", "10", "--out", out_dir(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "estimate.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "observable_id,n,d,shots,alpha,mean_re,mean_im,emp_var");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn alpha_curves_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = adfcs(&[
        "alpha-curves", "--n", "8", "--depth", "3,4,5", "--observable", "1 4", "--observable", "3 12", "--out",
        out_dir(dir.path()),
    ]);
    assert!(o.status.success());
    let csv = read(dir.path(), "alpha_curves.csv");
    assert_eq!(csv.lines().count(), 2 + 2 * 3);
}

#[test]
fn validate_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = adfcs(&["validate", "--out", out_dir(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "validation.json")).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["tolerance"].is_number() && c["measured"].is_number()));
    // non-gating entries may fail without failing the run
    assert!(checks.iter().filter(|c| c["passed"] == false).all(|c| c["gating"] == false));
}
