use std::path::Path;
use std::process::{Command, Output};

use gcg::io::{parse_field, parse_history_csv};
use gcg::diagnostics::Report;

fn gcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcg")).args(args).output().expect("binary runs")
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["run", "--out-dir", out];
    args.extend_from_slice(extra);
    gcg(&args)
}

#[test]
fn list_is_sorted_and_complete() {
    let out = gcg(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["parabolic-ex", "parabolic-ex-1d", "stadler-ex1", "stadler-ex3"]);
}

#[test]
fn unknown_problem_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--problem", "stadler-ex9"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("stadler-ex9"));
    assert!(err.contains("parabolic-ex-1d"), "listing is shown: {err}");
}

#[test]
fn bad_flags_and_values_are_usage_errors() {
    assert_eq!(gcg(&["run", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(gcg(&["run", "--problem", "stadler-ex1", "--alpha", "0.9"]).status.code(), Some(1));
    assert_eq!(gcg(&["run", "--problem", "stadler-ex1", "--n", "abc"]).status.code(), Some(1));
    assert_eq!(gcg(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = run_into(&blocker.join("sub"), &["--problem", "parabolic-ex-1d", "--n", "8", "--nt", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_config_is_an_io_error() {
    assert_eq!(gcg(&["run", "--config", "/nonexistent/cfg.txt"]).status.code(), Some(3));
}

#[test]
fn runs_are_byte_identical_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--problem", "stadler-ex3", "--n", "12"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run_into(&a, &args).status.success());
    assert!(run_into(&b, &args).status.success());
    for f in ["history.csv", "control.txt", "report.txt"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }

    let csv = std::fs::read_to_string(a.join("history.csv")).unwrap();
    let history = parse_history_csv(&csv).unwrap();
    let report = Report::parse(&std::fs::read_to_string(a.join("report.txt")).unwrap()).unwrap();
    let iterations: usize = report.get("iterations").unwrap().parse().unwrap();
    assert_eq!(history.len(), iterations + 1);
    assert_eq!(csv.lines().count(), iterations + 2);
    assert!(history.iter().all(|r| r.err_u.is_some() && r.err_v.is_some()));
    assert_eq!(report.get_f64("final_j").unwrap(), history.last().unwrap().j_value);

    let (header, values) = parse_field(&std::fs::read_to_string(a.join("control.txt")).unwrap()).unwrap();
    assert_eq!(header.len(), 144);
    assert!(values.iter().all(|v| v.is_finite()));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# quick run\nproblem = parabolic-ex-1d\nn = 10\nnt = 8\nmax_iter = 2\ndiagnostics = false\n").unwrap();
    let out = run_into(&dir.path().join("o"), &["--config", cfg.to_str().unwrap(), "--n", "12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.get("n"), Some("12"));
    assert_eq!(report.get("nt"), Some("8"));
    assert_eq!(report.get("max_iter"), Some("2"));
    assert_eq!(report.get("tol"), Some("1e-10"));
    assert!(report.get("kappa_hat").is_none());
}

#[test]
fn batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfgs = Vec::new();
    for (i, n) in [8, 10, 12].iter().enumerate() {
        let path = dir.path().join(format!("c{i}.cfg"));
        let out = dir.path().join(format!("batch{i}"));
        std::fs::write(&path, format!("problem = parabolic-ex-1d\nn = {n}\nnt = 10\nout_dir = {}\n", out.display())).unwrap();
        cfgs.push(path);
    }
    let mut args = vec!["batch", "--jobs", "3"];
    args.extend(cfgs.iter().map(|p| p.to_str().unwrap()));
    let out = gcg(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);

    let single = dir.path().join("single");
    assert!(run_into(&single, &["--problem", "parabolic-ex-1d", "--n", "10", "--nt", "10"]).status.success());
    assert_eq!(
        std::fs::read(single.join("history.csv")).unwrap(),
        std::fs::read(dir.path().join("batch1").join("history.csv")).unwrap()
    );
}

#[test]
fn parabolic_run_writes_a_time_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--problem", "parabolic-ex-1d", "--n", "16", "--nt", "12"]);
    assert!(out.status.success());
    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(profile.lines().next(), Some("m,t,u_norm,p_norm"));
    assert_eq!(profile.lines().count(), 13);
}
