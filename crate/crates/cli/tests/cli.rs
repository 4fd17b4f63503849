//! End-to-end runs of the `caplab` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use caplab::harness::{Direction, Hypothesis, InequalityReport};
use caplab_cli::config::Task;
use caplab_cli::run::TaskOutcome;
use caplab_cli::{exit_status, ScenarioRun};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/schwarzschild-identities.toml");

fn caplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caplab")).args(args).output().expect("binary runs")
}

fn run(config: &Path, out: &Path) -> Output {
    caplab(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Every file but the manifest, by relative path.
fn payload(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for sub in ["report", "data"] {
        let mut names: Vec<_> = fs::read_dir(dir.join(sub)).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        for p in names {
            out.push((format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()), fs::read(&p).unwrap()));
        }
    }
    out.push(("summary.csv".into(), fs::read(dir.join("summary.csv")).unwrap()));
    out
}

#[test]
fn golden_scenario_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = run(Path::new(GOLDEN), &a);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(run(Path::new(GOLDEN), &b).status.success());
    let (pa, pb) = (payload(&a), payload(&b));
    assert!(pa.len() > 10);
    assert_eq!(pa, pb);

    let summary = fs::read_to_string(a.join("summary.csv")).unwrap();
    assert!(summary.starts_with("task,status,quantity,value,satisfied\n"));
    assert!(!summary.contains(",error,"), "{summary}");
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["created_unix"].as_u64().is_some());
    assert_eq!(manifest["files"].as_array().unwrap().len(), pa.len());

    let diff = caplab(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(diff.status.success());
    let text = String::from_utf8(diff.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0.0")), "{text}");
}

#[test]
fn diff_rejects_bundles_of_different_scenarios() {
    let tmp = tempfile::tempdir().unwrap();
    let other = fs::read_to_string(GOLDEN).unwrap().replace("id = \"schwarzschild-identities\"", "id = \"renamed\"");
    let cfg = write(tmp.path(), "renamed.toml", &other);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(caplab(&["capacity", "--config", GOLDEN, "--out", a.to_str().unwrap()]).status.success());
    assert!(caplab(&["capacity", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]).status.success());
    let diff = caplab(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(diff.status.code(), Some(2));
    assert!(stderr(&diff).contains("scenario ids differ"), "{}", stderr(&diff));
}

#[test]
fn glue_with_larger_inner_mass_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "id = \"bad-glue\"\ntasks = [\"glue\"]\n\n[metric]\nkind = \"schwarzschild\"\nm = 2.0\n\n\
                [boundary]\nkind = \"sphere\"\nr0 = 1.0\n\n[glue]\nm = 1.0\nm_prime = 2.0\n";
    let cfg = write(tmp.path(), "bad.toml", text);
    let o = run(&cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.toml:") && err.contains("m_prime"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_keys_are_reported_with_a_line() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "id = \"typo\"\ntasks = [\"capacity\"]\n[metric]\nkind = \"schwarzschild\"\nmass = 2.0\n";
    let cfg = write(tmp.path(), "typo.toml", text);
    let o = run(&cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("typo.toml:"), "{}", stderr(&o));
}

#[test]
fn verify_subcommand_selects_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = caplab(&["verify", "--config", GOLDEN, "--out", out.to_str().unwrap(), "--name", "bray-miao"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let reports: Vec<_> = fs::read_dir(out.join("report")).unwrap().collect();
    assert_eq!(reports.len(), 1);
    let bad = caplab(&["verify", "--config", GOLDEN, "--out", out.to_str().unwrap(), "--name", "nonsense"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_status_follows_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let o = caplab(&["verify", "--config", GOLDEN, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let report = |lhs: f64, holds: bool| {
        let h = vec![Hypothesis { condition: "synthetic".into(), holds }];
        InequalityReport::new("synthetic", h, lhs, 1.0, Direction::AtMost, 1e-12)
    };
    let outcome = |task: Task, r: InequalityReport| TaskOutcome {
        task,
        report: serde_json::Value::Null,
        data: None,
        grid: None,
        summary: Vec::new(),
        inequalities: vec![r],
        error: None,
    };
    let batch = |o: TaskOutcome| vec![ScenarioRun { id: "s".into(), out_dir: PathBuf::new(), outcomes: vec![o] }];
    let verify = || Task::Verify("lc1".into());
    assert_eq!(exit_status(&batch(outcome(verify(), report(2.0, true)))), 1);
    // a failed hypothesis only records values
    assert_eq!(exit_status(&batch(outcome(verify(), report(2.0, false)))), 0);
    assert_eq!(exit_status(&batch(outcome(verify(), report(0.5, true)))), 0);
    // symmetrization reports are informational
    assert_eq!(exit_status(&batch(outcome(Task::Symmetrize, report(2.0, true)))), 0);
}

#[test]
fn batch_runs_write_one_bundle_per_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let other = fs::read_to_string(GOLDEN).unwrap().replace("id = \"schwarzschild-identities\"", "id = \"second\"");
    let cfg = write(tmp.path(), "second.toml", &other);
    let out = tmp.path().join("batch");
    let o =
        caplab(&["capacity", "--config", GOLDEN, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("schwarzschild-identities/summary.csv").exists());
    assert!(out.join("second/summary.csv").exists());
}
