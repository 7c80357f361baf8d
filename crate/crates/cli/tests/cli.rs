//! End-to-end exercises of the `ssns` binary: exit-code taxonomy, file
//! formats, and the solve -> diagnose round trip on a small grid.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ssns() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssns"))
}

fn run(args: &[&str]) -> Output {
    ssns().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, body).unwrap();
    path
}

fn small_config(dir: &Path, trace: &Path) -> String {
    format!(
        "grid.n = 32\n\
         grid.L = 8.0\n\
         data.trace_file = {}\n\
         solver.mu_schedule = 0.1,0.4,0.7,1.0\n\
         solver.theta = 0.5\n\
         solver.anderson_depth = 3\n\
         solver.tol = 1e-5\n\
         solver.max_iter = 60\n\
         output.dir = {}\n",
        trace.display(),
        dir.join("out").display()
    )
}

#[test]
fn unknown_config_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "grid.n = 32\ngrid.L = 8.0\ndata.trace_file = x\noutput.dir = o\nbogus.key = 1\n",
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn missing_trace_file_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &small_config(tmp.path(), Path::new("/nonexistent/trace.txt")),
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn kernel_check_preconditions_and_bands() {
    // radius below 8: precondition error
    let out = run(&["kernel-check", "--alpha", "4", "--beta", "4", "--radii", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // bad exponent
    let out = run(&["kernel-check", "--alpha", "2", "--beta", "4", "--radii", "16,32"]);
    assert_eq!(out.status.code(), Some(2));
    // passing band (also checked in the acceptance suite at all pairs)
    let out = run(&["kernel-check", "--alpha", "4", "--beta", "4", "--radii", "16,32"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("alpha,beta,R,I,expected_ratio,measured_ratio"));
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn landau_parameter_guard_and_output() {
    let out = run(&["landau", "--b", "0.5", "--out", "/tmp/never.ssns"]);
    assert_eq!(out.status.code(), Some(2));

    let tmp = tempfile::tempdir().unwrap();
    let field = tmp.path().join("landau.ssns");
    let out = run(&[
        "landau",
        "--b",
        "2.0",
        "--out",
        field.to_str().unwrap(),
        "--n",
        "32",
        "--box-half-width",
        "8.0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(field.is_file());
    assert!(tmp.path().join("landau_pressure.ssns").is_file());

    // homogeneity spot check on the stored samples
    let v: ssns_core::RealField64 =
        ssns_core::io::read_field_file(&field).unwrap();
    let a = ssns_core::interp::tricubic3(&v, [1.0, 0.5, 0.25]);
    let b = ssns_core::interp::tricubic3(&v, [2.0, 1.0, 0.5]);
    for d in 0..3 {
        assert!((a[d] - 2.0 * b[d]).abs() < 0.05 * a[d].abs().max(0.1));
    }

    // near-singular parameter: finite values, no NaN
    let f2 = tmp.path().join("landau_tight.ssns");
    let out = run(&[
        "landau",
        "--b",
        "1.01",
        "--out",
        f2.to_str().unwrap(),
        "--n",
        "32",
        "--box-half-width",
        "8.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v2: ssns_core::RealField64 = ssns_core::io::read_field_file(&f2).unwrap();
    assert!(v2.is_finite());
}

#[test]
fn zero_trace_solves_to_zero_fields() {
    let tmp = tempfile::tempdir().unwrap();
    // zero trace on the smallest grid
    let mut trace = String::new();
    for i in 0..8 {
        for j in 0..16 {
            let theta = (i as f64 + 0.5) * std::f64::consts::PI / 8.0;
            let phi = 2.0 * std::f64::consts::PI * j as f64 / 16.0;
            trace.push_str(&format!("{theta:.17e} {phi:.17e} 0.0 0.0 0.0\n"));
        }
    }
    let trace_path = tmp.path().join("zero.txt");
    fs::write(&trace_path, trace).unwrap();
    let cfg = write_config(tmp.path(), &small_config(tmp.path(), &trace_path));
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v: ssns_core::RealField64 =
        ssns_core::io::read_field_file(&tmp.path().join("out/v.ssns")).unwrap();
    assert!(v.data.iter().all(|&x| x == 0.0));
    let summary = fs::read_to_string(tmp.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("status=complete"));
    assert!(summary.contains("config_hash="));
}

#[test]
fn solve_then_diagnose_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &small_config(tmp.path(), &fixture("rotational_16x32.txt")),
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out_dir = tmp.path().join("out");
    for f in ["u.ssns", "v.ssns", "p.ssns", "u0.ssns", "iterations.csv", "summary.txt", "trace.txt"] {
        assert!(out_dir.join(f).is_file(), "missing {f}");
    }
    let iters = fs::read_to_string(out_dir.join("iterations.csv")).unwrap();
    assert!(iters.starts_with("mu,iter,fp_residual,x_norm"));
    assert!(iters.lines().count() > 4);

    // scaling check passes on any solution (interpolation-only identity)
    let out = run(&["diagnose", out_dir.to_str().unwrap(), "--checks", "scaling"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(report.contains("scaling"));
    assert!(report.lines().next().unwrap().starts_with("# config_hash="));

    // unknown check name is a config error
    let out = run(&["diagnose", out_dir.to_str().unwrap(), "--checks", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    // corrupted field file: format error
    let mut bytes = fs::read(out_dir.join("u.ssns")).unwrap();
    bytes[0] = b'X';
    fs::write(out_dir.join("u.ssns"), bytes).unwrap();
    let out = run(&["diagnose", out_dir.to_str().unwrap(), "--checks", "scaling"]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");

    // missing file: exit 3
    fs::remove_file(out_dir.join("u.ssns")).unwrap();
    let out = run(&["diagnose", out_dir.to_str().unwrap(), "--checks", "scaling"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_is_deterministic_for_fixed_config() {
    let tmp = tempfile::tempdir().unwrap();
    let base = small_config(tmp.path(), &fixture("rotational_16x32.txt"));
    let cfg = write_config(tmp.path(), &base);
    let dir1 = tmp.path().join("run1");
    let dir2 = tmp.path().join("run2");
    for dir in [&dir1, &dir2] {
        let out = run(&[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    let a = fs::read(dir1.join("u.ssns")).unwrap();
    let b = fs::read(dir2.join("u.ssns")).unwrap();
    assert_eq!(a, b, "identical config must produce bit-identical fields");
}

#[test]
fn decay_fit_runs_on_stored_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let field = tmp.path().join("landau.ssns");
    let out = run(&[
        "landau",
        "--b",
        "3.0",
        "--out",
        field.to_str().unwrap(),
        "--n",
        "32",
        "--box-half-width",
        "8.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "decay-fit",
        "--field",
        field.to_str().unwrap(),
        "--r-min",
        "2.0",
        "--r-max",
        "4.0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    // the jet is (-1)-homogeneous: field exponent near 1
    let line = stdout.lines().nth(1).unwrap();
    let exponent: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((exponent - 1.0).abs() < 0.15, "landau decay exponent {exponent}");
}

#[test]
fn bad_threads_env_exits_2() {
    let out = ssns()
        .env("SSNS_THREADS", "zero")
        .args(["landau", "--b", "2.0", "--out", "/tmp/x.ssns"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
