//! Report bundles on disk and their comparison.
//!
//! ```text
//! <out>/summary.csv
//! <out>/report/<NN>-<task>.json
//! <out>/data/<NN>-<task>.csv   (and .bin for meridian grids)
//! <out>/manifest.json          (the only file carrying a timestamp)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::run::TaskOutcome;

pub fn file_stem(index: usize, outcome: &TaskOutcome) -> String {
    format!("{:02}-{}", index + 1, outcome.task.slug())
}

pub fn summary_csv(outcomes: &[TaskOutcome]) -> String {
    let mut s = String::from("task,status,quantity,value,satisfied\n");
    for row in outcomes.iter().flat_map(|o| &o.summary) {
        let sat = row.satisfied.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{:?},{}", row.task, row.status, row.quantity, row.value, sat);
    }
    s
}

/// Writes the bundle and returns the files written, relative to `out`.
pub fn write_bundle(out: &Path, scenario_id: &str, config: &Path, outcomes: &[TaskOutcome]) -> io::Result<Vec<String>> {
    fs::create_dir_all(out.join("report"))?;
    fs::create_dir_all(out.join("data"))?;
    let mut files = vec!["summary.csv".to_string()];
    fs::write(out.join("summary.csv"), summary_csv(outcomes))?;
    for (k, o) in outcomes.iter().enumerate() {
        let stem = file_stem(k, o);
        let report = format!("report/{stem}.json");
        fs::write(out.join(&report), serde_json::to_string_pretty(&o.report).map_err(io::Error::other)? + "\n")?;
        files.push(report);
        if let Some(data) = &o.data {
            let name = format!("data/{stem}.csv");
            fs::write(out.join(&name), data)?;
            files.push(name);
        }
        if let Some(grid) = &o.grid {
            let name = format!("data/{stem}.bin");
            fs::write(out.join(&name), grid)?;
            files.push(name);
        }
    }
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "scenario": scenario_id,
        "config": config.display().to_string(),
        "created_unix": created,
        "version": env!("CARGO_PKG_VERSION"),
        "files": files,
    });
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest).map_err(io::Error::other)? + "\n")?;
    Ok(files)
}

/// One compared number.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffEntry {
    pub report: String,
    pub path: String,
    pub a: f64,
    pub b: f64,
    /// `|a - b| / max(|a|, |b|)`, 0 when both vanish.
    pub relative: f64,
}

#[derive(Debug)]
pub enum DiffError {
    Io(PathBuf, io::Error),
    Json(PathBuf, serde_json::Error),
    Mismatch(String),
}

impl std::fmt::Display for DiffError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiffError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            DiffError::Json(p, e) => write!(f, "{}: {e}", p.display()),
            DiffError::Mismatch(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for DiffError {}

fn read_reports(dir: &Path) -> Result<BTreeMap<String, Value>, DiffError> {
    let rd = dir.join("report");
    let mut out = BTreeMap::new();
    let entries = fs::read_dir(&rd).map_err(|e| DiffError::Io(rd.clone(), e))?;
    for entry in entries {
        let path = entry.map_err(|e| DiffError::Io(rd.clone(), e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&path).map_err(|e| DiffError::Io(path.clone(), e))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| DiffError::Json(path.clone(), e))?;
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            out.insert(name, v);
        }
    }
    Ok(out)
}

fn walk(report: &str, path: &str, a: &Value, b: &Value, out: &mut Vec<DiffEntry>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let scale = x.abs().max(y.abs());
            let relative = if scale == 0.0 { 0.0 } else { (x - y).abs() / scale };
            out.push(DiffEntry { report: report.into(), path: path.into(), a: x, b: y, relative });
        }
        (Value::Object(x), Value::Object(y)) => {
            for (k, v) in x {
                if let Some(w) = y.get(k) {
                    walk(report, &format!("{path}.{k}"), v, w, out);
                }
            }
        }
        // arrays are compared only when their shapes agree
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (k, (v, w)) in x.iter().zip(y).enumerate() {
                walk(report, &format!("{path}[{k}]"), v, w, out);
            }
        }
        _ => {}
    }
}

/// Relative differences of every number the two bundles share. The
/// bundles must come from the same scenario id and metric.
pub fn diff_bundles(a: &Path, b: &Path) -> Result<Vec<DiffEntry>, DiffError> {
    let (ra, rb) = (read_reports(a)?, read_reports(b)?);
    let mut out = Vec::new();
    for (name, va) in &ra {
        let Some(vb) = rb.get(name) else { continue };
        if va["scenario"] != vb["scenario"] {
            return Err(DiffError::Mismatch(format!(
                "scenario ids differ in {name}: {} vs {}",
                va["scenario"], vb["scenario"]
            )));
        }
        if va["metric"] != vb["metric"] {
            return Err(DiffError::Mismatch(format!("metrics differ in {name}")));
        }
        walk(name, "result", &va["result"], &vb["result"], &mut out);
    }
    if ra.keys().all(|k| !rb.contains_key(k)) {
        return Err(DiffError::Mismatch("the bundles share no reports".into()));
    }
    Ok(out)
}

pub fn diff_csv(entries: &[DiffEntry]) -> String {
    let mut s = String::from("report,path,a,b,relative\n");
    for e in entries {
        let _ = writeln!(s, "{},{},{:?},{:?},{:?}", e.report, e.path, e.a, e.b, e.relative);
    }
    s
}
