use std::path::Path;
use std::process::{Command, Output};

use numpost::experiments::{io, ExperimentConfig, Problem};

fn numpost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numpost")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_prints_report() {
    let out = numpost(&["bound"]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let k0 = r["k0_admissible"].as_f64().unwrap();
    assert!((k0 - 0.144_613_169_690_25).abs() < 1e-12);

    let out = numpost(&["bound", "--n", "1", "--sigma", "1", "--two-decimals"]);
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((r["k0_admissible"].as_f64().unwrap() - 0.12).abs() < 1e-15);
}

#[test]
fn bound_rejects_bad_input() {
    let out = numpost(&["bound", "--n", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be"));
}

#[test]
fn gen_data_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(numpost(&["gen-data", "--seed", "5", "--out", path(&a)]).status.success());
    assert!(numpost(&["gen-data", "--seed", "5", "--out", path(&b)]).status.success());
    let read = |d: &Path| std::fs::read_to_string(d.join("data.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn run_ode_writes_outputs_and_compare_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = numpost(&["run-ode", "--iterations", "400", "--seed", "3", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.json", "data.json", "trace_fine.csv", "trace_adaptive.csv", "histogram.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let (names, trace) = io::read_trace_csv(&dir.path().join("trace_fine.csv")).unwrap();
    assert_eq!(names, ["r", "K"]);
    assert_eq!(trace.len(), 320);

    let cmp = dir.path().join("cmp");
    let out = numpost(&[
        "compare",
        path(&dir.path().join("trace_fine.csv")),
        path(&dir.path().join("trace_adaptive.csv")),
        "--out",
        path(&cmp),
    ]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(cmp.join("comparison.json")).unwrap()).unwrap();
    assert_eq!(r["marginals"].as_array().unwrap().len(), 2);
}

#[test]
fn unmet_tolerance_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::logistic();
    if let Problem::Logistic(s) = &mut c.problem {
        s.max_halvings = 1;
    }
    let cfg = dir.path().join("config.json");
    io::write_json(&cfg, &c).unwrap();
    let base = ["run-ode", "--config", path(&cfg), "--iterations", "100", "--adaptive", "--tolerance", "1e-12"];

    let out = numpost(&[&base[..], &["--out", path(&dir.path().join("strict"))]].concat());
    assert_eq!(out.status.code(), Some(2));
    let out = numpost(&[&base[..], &["--allow-unmet", "--out", path(&dir.path().join("lenient"))]].concat());
    assert!(out.status.success());
    assert!(!dir.path().join("lenient/trace_fine.csv").exists());
}

#[test]
fn run_pde_rejects_logistic_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    io::write_json(&cfg, &ExperimentConfig::logistic()).unwrap();
    let out = numpost(&["run-pde", "--config", path(&cfg), "--out", path(dir.path())]);
    assert!(!out.status.success());
}
