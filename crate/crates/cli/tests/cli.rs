use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qnk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnk")).args(args).output().expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn strip_wall_time(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"wall_time\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn qybe_report_has_twenty_passing_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = qnk(&["--suite", "qybe", "--nk", "3,1", "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let r = report(&out);
    let records = r["records"].as_array().unwrap();
    assert_eq!(records.len(), 20);
    for rec in records {
        assert_eq!(rec["check_id"], "qybe.residual");
        assert_eq!(rec["metric"], "residual");
        assert_eq!(rec["pass"], true);
        for key in ["n", "k", "eta_re", "eta_im", "tau_re", "tau_im", "matrix", "value", "tol"] {
            assert!(rec.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(r["summary"]["failed"], 0);
    assert_eq!(r["seed"], 42);
}

#[test]
fn identical_config_gives_identical_report_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let run = qnk(&["--suite", "all", "--nk", "3,2", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let [a, b] = paths.map(|p| std::fs::read_to_string(p).unwrap());
    assert!(a.contains("\"wall_time\""));
    assert_eq!(strip_wall_time(&a), strip_wall_time(&b));
}

#[test]
fn floats_are_written_with_seventeen_digits() {
    let run = qnk(&["--suite", "qybe", "--nk", "2,1", "--tau", "0.1,1.0", "--eta", "0.13,0.21"]);
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.contains("\"tau_re\": 1.0000000000000001e-1"), "{text}");
    assert!(text.contains("\"eta_im\": 2.0999999999999999e-1"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["--suite", "all"][..],
        &["--nk", "4,2"],
        &["--nk", "3,1", "--tau", "0.0,0.01"],
        &["--nk", "3,1", "--tol-override", "unknown.check=1"],
        &["--nk", "3,1", "--matrices", "sideways"],
        &["--suite", "nonsense", "--nk", "3,1"],
    ] {
        let run = qnk(args);
        assert_eq!(run.status.code(), Some(2), "{args:?}");
        assert!(!run.stderr.is_empty());
    }
}

#[test]
fn matrix_file_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "# generators\n0 -1 1 0\n1 2 3 4\n").unwrap();
    let spec = format!("file:{}", path.display());
    let run = qnk(&["--suite", "modular", "--nk", "3,1", "--matrices", &spec]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 3"));
}

#[test]
fn matrix_file_drives_the_modular_suite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "0 -1 1 0\n1,1,0,1  # translation\n").unwrap();
    let out = dir.path().join("r.json");
    let spec = format!("file:{}", path.display());
    let run = qnk(&["--suite", "modular", "--nk", "3,1", "--matrices", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let r = report(&out);
    let records = r["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[0]["matrix"], serde_json::json!([0, -1, 1, 0]));
    assert_eq!(records[0]["metric"], "rank");
    assert_eq!(records[1]["metric"], "angle");
}

#[test]
fn failing_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = qnk(&[
        "--suite", "qybe", "--nk", "3,1", "--tol-override", "qybe.residual=1e-300", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["summary"]["failed"], 20);
    let tol = r["config"]["tolerances"]["qybe.residual"].as_f64().unwrap();
    assert!((tol / 1e-300 - 1.0).abs() < 1e-15);
}
