//! Scenario runner for the caplab workbench: reads TOML scenarios, runs
//! their tasks and writes report bundles.

pub mod bundle;
pub mod config;
pub mod run;

use std::path::{Path, PathBuf};

use config::{Scenario, Task};
use run::{Runner, TaskOutcome};

/// Result of one scenario in a batch.
#[derive(Debug)]
pub struct ScenarioRun {
    pub id: String,
    pub out_dir: PathBuf,
    pub outcomes: Vec<TaskOutcome>,
}

impl ScenarioRun {
    pub fn has_violation(&self) -> bool {
        self.outcomes.iter().any(TaskOutcome::has_violation)
    }
}

/// Process exit status for a finished batch: 1 when any verifier found a
/// violated inequality whose hypotheses hold, 0 otherwise. Configuration
/// and I/O failures (2) never reach this point.
pub fn exit_status(runs: &[ScenarioRun]) -> u8 {
    u8::from(runs.iter().any(ScenarioRun::has_violation))
}

/// Restricts a scenario to one kind of task. When the scenario lists none
/// of that kind, the bare task runs instead (every verifier is named, so
/// `verify` falls back to the identity suite).
pub fn select_tasks(scenario: &mut Scenario, keep: impl Fn(&Task) -> bool, fallback: Task) {
    let kept: Vec<Task> = scenario.tasks.iter().filter(|t| keep(t)).cloned().collect();
    scenario.tasks = if kept.is_empty() { vec![fallback] } else { kept };
}

/// Runs scenarios concurrently, one thread each; tasks within a scenario
/// run in order. With several scenarios each bundle goes to `out/<id>`.
pub fn run_batch(scenarios: &[(PathBuf, Scenario)], out: &Path) -> std::io::Result<Vec<ScenarioRun>> {
    let nested = scenarios.len() > 1;
    let results: Vec<std::io::Result<ScenarioRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|(path, sc)| {
                s.spawn(move || {
                    let dir = if nested { out.join(&sc.id) } else { out.to_path_buf() };
                    let outcomes = Runner::new(sc).run_all();
                    bundle::write_bundle(&dir, &sc.id, path, &outcomes)?;
                    Ok(ScenarioRun { id: sc.id.clone(), out_dir: dir, outcomes })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    results.into_iter().collect()
}

/// The bundled golden scenario.
pub const GOLDEN_SCENARIO: &str = include_str!("../scenarios/schwarzschild-identities.toml");

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/scenarios.md")]
mod book_scenarios {}
