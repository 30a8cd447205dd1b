use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

use zakharov_core::breakdown::{BreakdownReport, COLUMNS};
use zakharov_core::spectral::besov_norm;

fn zakharov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zakharov")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn meta(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap()
}

fn rows(dir: &Path) -> Vec<zakharov_core::breakdown::MonitorSample> {
    BreakdownReport::read_samples(fs::read_to_string(dir.join("report.csv")).unwrap().as_bytes()).unwrap()
}

#[test]
fn rest_run_has_constant_taylor_sign() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &format!("n=32\nM=24\ng=2\ndt=0.05\nT=1\nscenario=rest\nout={}\n", out.display()));
    let o = zakharov(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let samples = rows(&out);
    assert_eq!(samples.len(), 21);
    assert!(samples.iter().all(|s| (s.ts_inf - 2.0).abs() < 1e-12 && s.kappa_lp == 0.0));
    assert_eq!(meta(&out)["termination"], "normal");
    assert!(out.join("snapshot_initial.txt").exists() && out.join("snapshot_final.txt").exists());
}

#[test]
fn linear_wave_run_conserves_energy_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let body = "n=32\nM=32\ndt=0.01\nT=0.5\nscenario=linear_wave(1, 0.01)\nsample_stride=5\n";
    let cfg = write_config(tmp.path(), body);
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for d in &dirs {
        let o = zakharov(&["run", "--config", &cfg, "--out", &d.display().to_string()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let samples = rows(&dirs[0]);
    assert_eq!(samples.len(), 11);
    assert!(samples.iter().all(|s| s.is_finite()));
    let m = meta(&dirs[0]);
    assert_eq!(m["energy_within_tol"], true, "{m}");
    let report = |d: &Path| fs::read(d.join("report.csv")).unwrap();
    assert_eq!(report(&dirs[0]), report(&dirs[1]));
    assert_eq!(fs::read(dirs[0].join("snapshot_final.txt")).unwrap(), fs::read(dirs[1].join("snapshot_final.txt")).unwrap());
}

#[test]
fn huge_step_exits_with_blow_up() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        &format!("n=32\nM=16\ndt=50\nT=1000\nscenario=steep_cosine(1, 0.2)\nout={}\n", out.display()),
    );
    let o = zakharov(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let m = meta(&out);
    assert_eq!(m["termination"], "blow_up_detected");
    assert!(m["blow_up_time"].is_number(), "{m}");
    // Partial report stays well-formed.
    let text = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(text.ends_with('\n'));
    assert!(text.lines().all(|l| l.split(',').count() == COLUMNS.len()));
    assert!(!rows(&out).is_empty());
}

#[test]
fn config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "p=2\n");
    let o = zakharov(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p > 2d"));

    let cfg = write_config(tmp.path(), "n=32\n\nspeed=3\n");
    let o = zakharov(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let cfg = write_config(tmp.path(), "n=32\n");
    let o = zakharov(&["run", "--config", &cfg, "--preset", "tsunami"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_errors_exit_five() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.cfg").display().to_string();
    assert_eq!(zakharov(&["run", "--config", &missing]).status.code(), Some(5));
    assert_eq!(zakharov(&["norms", "--input", &missing, "--besov", "1,2,2"]).status.code(), Some(5));
}

#[test]
fn norms_of_saved_snapshot() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &format!("n=32\nM=16\ndt=0.1\nT=0.1\nscenario=linear_wave(2, 0.5)\nout={}\n", out.display()));
    assert_eq!(zakharov(&["run", "--config", &cfg]).status.code(), Some(0));
    let snap = out.join("snapshot_initial.txt");
    let o = zakharov(&["norms", "--input", &snap.display().to_string(), "--besov", "1,inf,inf"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let eta_line = stdout.lines().find(|l| l.starts_with("eta")).unwrap();
    let value: f64 = eta_line.rsplit(' ').next().unwrap().parse().unwrap();
    // The mode k = 2 lies in block 1 only: 2^{1·1}·0.5 = 1.
    assert!((value - 1.0).abs() < 1e-12, "{stdout}");
    let grid = zakharov_core::Grid::unit_1d(32).unwrap();
    let eta = zakharov_core::RealField::from_fn(grid, |x| 0.5 * (2.0 * x[0]).cos());
    assert!((besov_norm(&eta, 1.0, f64::INFINITY, f64::INFINITY).unwrap() - value).abs() < 1e-12);
    assert_eq!(zakharov(&["norms", "--input", &snap.display().to_string(), "--besov", "1,0.5,2"]).status.code(), Some(2));
}

#[test]
fn check_runs_a_single_criterion() {
    let o = zakharov(&["check", "--suite", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("PASS [ 6]"), "{stdout}");
    assert_eq!(zakharov(&["check", "--suite", "no_such_suite"]).status.code(), Some(2));
}
