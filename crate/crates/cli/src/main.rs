use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use caplab_cli::bundle::{diff_bundles, diff_csv};
use caplab_cli::config::{parse_grid, Scenario, Task};
use caplab_cli::{exit_status, run_batch, select_tasks};

#[derive(Parser)]
#[command(name = "caplab", version, about = "Capacity, quasi-local mass and Lambda-invariant workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario file; repeat to run a batch concurrently.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Output directory for the report bundle.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Meridian grid as NxM (radial by angular cells).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Linear-solver tolerance for meridian solves.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of the scenario.
    Run(ScenarioArgs),
    /// Capacity solves only.
    Capacity(ScenarioArgs),
    /// Quasi-local quantities of the boundary.
    Quasilocal(ScenarioArgs),
    /// Rearrangement onto symmetric spheres.
    Symmetrize(ScenarioArgs),
    /// Inequality verifiers.
    Verify {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Verifier to run (repeatable); defaults to those in the scenario.
        #[arg(long)]
        name: Vec<String>,
    },
    /// The glued Schwarzschild example.
    Glue(ScenarioArgs),
    /// Sweep over coordinate spheres.
    Sweep(ScenarioArgs),
    /// Compare two bundles of the same scenario.
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Write the comparison as CSV instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(
    args: &ScenarioArgs,
    restrict: &dyn Fn(&mut Scenario) -> Result<(), String>,
) -> Result<Vec<(PathBuf, Scenario)>, String> {
    let mut out = Vec::new();
    for path in &args.configs {
        let mut s = Scenario::load(path).map_err(|e| e.to_string())?;
        if let Some(g) = args.grid {
            if g.0 < 64 || g.1 < 64 {
                return Err(format!("grid {}x{} is below the 64x64 minimum", g.0, g.1));
            }
            s.numerics.grid = g;
        }
        if let Some(t) = args.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tolerance must be positive, got {t}"));
            }
            s.numerics.solver_tol = t;
        }
        restrict(&mut s).map_err(|e| format!("{}: {e}", path.display()))?;
        out.push((path.clone(), s));
    }
    Ok(out)
}

fn execute(args: &ScenarioArgs, restrict: &dyn Fn(&mut Scenario) -> Result<(), String>) -> ExitCode {
    let scenarios = match load(args, restrict) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let runs = match run_batch(&scenarios, &args.out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: writing {}: {e}", args.out.display());
            return ExitCode::from(2);
        }
    };
    for run in &runs {
        println!("{} -> {}", run.id, run.out_dir.display());
        for o in &run.outcomes {
            let task = String::from(o.task.clone());
            match &o.error {
                Some(e) => println!("  {task:<24} error: {e}"),
                None if o.has_violation() => println!("  {task:<24} VIOLATED"),
                None => println!("  {task:<24} ok"),
            }
        }
    }
    ExitCode::from(exit_status(&runs))
}

fn only(kind: fn(&Task) -> bool, fallback: Task) -> impl Fn(&mut Scenario) -> Result<(), String> {
    move |s: &mut Scenario| {
        select_tasks(s, kind, fallback.clone());
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => execute(&args, &|_| Ok(())),
        Command::Capacity(args) => execute(&args, &only(|t| *t == Task::Capacity, Task::Capacity)),
        Command::Quasilocal(args) => execute(&args, &only(|t| *t == Task::Quasilocal, Task::Quasilocal)),
        Command::Symmetrize(args) => execute(&args, &only(|t| *t == Task::Symmetrize, Task::Symmetrize)),
        Command::Glue(args) => execute(&args, &|s| {
            if s.glue.is_none() {
                return Err("the glue task needs a [glue] table".into());
            }
            select_tasks(s, |t| *t == Task::Glue, Task::Glue);
            Ok(())
        }),
        Command::Sweep(args) => execute(&args, &only(|t| *t == Task::Sweep, Task::Sweep)),
        Command::Verify { args, name } => execute(&args, &|s| {
            if name.is_empty() {
                select_tasks(s, |t| matches!(t, Task::Verify(_)), Task::Verify("identities".into()));
                return Ok(());
            }
            s.tasks = name.iter().map(|n| Task::parse(&format!("verify:{n}"))).collect::<Result<_, _>>()?;
            Ok(())
        }),
        Command::Diff { a, b, out } => match diff_bundles(&a, &b) {
            Ok(entries) => {
                let csv = diff_csv(&entries);
                match out {
                    Some(path) => {
                        if let Err(e) = std::fs::write(&path, csv) {
                            eprintln!("error: {}: {e}", path.display());
                            return ExitCode::from(2);
                        }
                    }
                    None => print!("{csv}"),
                }
                let worst = entries.iter().map(|e| e.relative).fold(0.0, f64::max);
                eprintln!("{} quantities compared, largest relative difference {worst:e}", entries.len());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
