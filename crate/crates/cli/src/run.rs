//! Executes a scenario's tasks in order, caching the capacity solve.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use caplab::capacity::{
    capacity_axisym_fd, capacity_harmonically_flat, capacity_radial, default_thresholds, extract_level_sets, gridio,
    AxisymDomainSpec, CapacitySolution, FdOptions, Potential,
};
use caplab::gluing::{adm_vs_lambda, corner_jump_check, corner_jump_check_mirrored, GluedManifold};
use caplab::harness::{self, BlowdownBoundary, Direction, InequalityReport};
use caplab::quasilocal::{embed_revolution, induced_metric, quasilocal_report, MeanCurvatureConvention};
use caplab::surface::MeridianCurve;
use caplab::symmetrization::{rearranged_energy, szego_schwarzschild_compare, IsoperimetricProfile};
use caplab::{Error, Result};

use crate::config::{MetricModel, Scenario, Task};

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub task: String,
    pub status: String,
    pub quantity: String,
    pub value: f64,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskOutcome {
    pub task: Task,
    /// JSON payload; deterministic for a given scenario.
    pub report: Value,
    /// Plot-ready CSV, when the task has one.
    pub data: Option<String>,
    /// Binary potential grid, for meridian capacity solves.
    pub grid: Option<Vec<u8>>,
    pub summary: Vec<SummaryRow>,
    pub inequalities: Vec<InequalityReport>,
    pub error: Option<String>,
}

impl TaskOutcome {
    /// Hypotheses held but the inequality failed, in a verify task.
    pub fn has_violation(&self) -> bool {
        matches!(self.task, Task::Verify(_)) && self.inequalities.iter().any(InequalityReport::is_violation)
    }
}

/// Everything a task returns before it is wrapped into an outcome.
#[derive(Default)]
struct Output {
    result: Value,
    data: Option<String>,
    grid: Option<Vec<u8>>,
    quantities: Vec<(String, f64)>,
    inequalities: Vec<InequalityReport>,
}

pub struct Runner<'a> {
    scenario: &'a Scenario,
    capacity: Option<CapacitySolution>,
}

impl<'a> Runner<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self { scenario, capacity: None }
    }

    pub fn run_all(mut self) -> Vec<TaskOutcome> {
        let tasks = self.scenario.tasks.clone();
        tasks.into_iter().map(|t| self.run(t)).collect()
    }

    pub fn run(&mut self, task: Task) -> TaskOutcome {
        let name = String::from(task.clone());
        let outcome = match &task {
            Task::Capacity => self.capacity_task(),
            Task::Quasilocal => self.quasilocal_task(),
            Task::Symmetrize => self.symmetrize_task(),
            Task::Verify(v) => self.verify_task(v),
            Task::Glue => self.glue_task(),
            Task::Sweep => self.sweep_task(),
        };
        let s = self.scenario;
        let mut report = json!({
            "scenario": s.id,
            "task": name,
            "metric": s.metric,
            "boundary": s.boundary,
            "numerics": s.numerics,
        });
        match outcome {
            Ok(out) => {
                report["status"] = json!("ok");
                report["result"] = out.result;
                let mut summary: Vec<SummaryRow> = out
                    .quantities
                    .into_iter()
                    .map(|(q, v)| SummaryRow {
                        task: name.clone(),
                        status: "ok".into(),
                        quantity: q,
                        value: v,
                        satisfied: None,
                    })
                    .collect();
                summary.extend(out.inequalities.iter().map(|r| SummaryRow {
                    task: name.clone(),
                    status: "ok".into(),
                    quantity: format!("{}.gap", r.name),
                    value: r.gap,
                    satisfied: Some(r.satisfied),
                }));
                TaskOutcome {
                    task,
                    report,
                    data: out.data,
                    grid: out.grid,
                    summary,
                    inequalities: out.inequalities,
                    error: None,
                }
            }
            Err(e) => {
                report["status"] = json!("error");
                report["error"] = json!(e.to_string());
                let summary = vec![SummaryRow {
                    task: name,
                    status: "error".into(),
                    quantity: "error".into(),
                    value: f64::NAN,
                    satisfied: None,
                }];
                TaskOutcome {
                    task,
                    report,
                    data: None,
                    grid: None,
                    summary,
                    inequalities: vec![],
                    error: Some(e.to_string()),
                }
            }
        }
    }

    fn boundary(&self) -> Result<MeridianCurve> {
        self.scenario.build_boundary()
    }

    fn solve(&mut self) -> Result<&CapacitySolution> {
        if self.capacity.is_none() {
            let metric = self.scenario.build_metric()?;
            let boundary = self.boundary()?;
            let sol = match (&boundary, &metric) {
                (MeridianCurve::Sphere { r0 }, _) => capacity_radial(&metric.warped(), *r0)?,
                (_, MetricModel::Conformal(m)) => {
                    let n = &self.scenario.numerics;
                    let (_, hi) = boundary.radius_range();
                    let mut domain = AxisymDomainSpec::new(boundary, m.clone(), n.grid);
                    domain.truncation_radius = n.truncation_factor * hi;
                    domain.options = FdOptions {
                        solver_tol: n.solver_tol,
                        estimate_grid_error: n.estimate_grid_error,
                        estimate_truncation_error: n.estimate_truncation_error,
                        spread_factor: n.spread_factor,
                    };
                    capacity_axisym_fd(&domain)?
                }
                (_, MetricModel::Warped(_)) => {
                    return Err(Error::InvalidInput("non-spherical boundaries need a conformally flat metric".into()))
                }
            };
            self.capacity = Some(sol);
        }
        Ok(self.capacity.as_ref().expect("just solved"))
    }

    fn capacity_task(&mut self) -> Result<Output> {
        let metric = self.scenario.build_metric()?;
        let sol = self.solve()?.clone();
        let closed_form = match (&metric, &sol.potential) {
            (MetricModel::Conformal(m), Potential::Radial(p)) => capacity_harmonically_flat(m, p.r0).ok(),
            _ => None,
        };
        let mut quantities =
            vec![("capacity".to_string(), sol.capacity), ("error_estimate".to_string(), sol.error_estimate())];
        if let Some(c) = closed_form {
            quantities.push(("closed_form".into(), c));
        }
        let (data, grid) = match &sol.potential {
            Potential::Radial(p) => {
                let mut s = String::from("r,phi\n");
                for (r, phi) in &p.samples {
                    let _ = writeln!(s, "{r:.17e},{phi:.17e}");
                }
                (s, None)
            }
            Potential::Meridian(f) => {
                let mut s = String::from("rho,z,phi\n");
                for i in 0..=f.nx {
                    for j in 0..=f.ntheta {
                        let (r, t) = (f.radius(i, j), f.theta(j));
                        let _ = writeln!(s, "{:.17e},{:.17e},{:.17e}", r * t.sin(), r * t.cos(), f.at(i, j));
                    }
                }
                (s, Some(gridio::write_grid(f)))
            }
        };
        let result = json!({
            "capacity": sol.capacity,
            "closed_form": closed_form,
            "error_estimate": sol.error_estimate(),
            "grid_error": sol.grid_error,
            "truncation_error": sol.truncation_error,
            "energy_capacity": sol.energy_capacity,
            "flux_samples": sol.flux_samples,
            "flux_spread": sol.flux_spread,
            "asymptotic_coefficient": sol.asymptotic_coefficient,
            "solver_iterations": sol.solver_iterations,
        });
        Ok(Output { result, data: Some(data), grid, quantities, inequalities: vec![] })
    }

    fn quasilocal_task(&mut self) -> Result<Output> {
        let metric = self.scenario.build_metric()?;
        let metric = metric.conformal()?;
        let boundary = self.boundary()?;
        let q = quasilocal_report(metric, &boundary, MeanCurvatureConvention::TowardInfinity)?;
        let induced = induced_metric(metric, &boundary)?;
        let data = embed_revolution(&induced).ok().map(|e| {
            let mut s = String::from("s,rho,z\n");
            for ((s_k, r), z) in induced.arclength().iter().zip(e.rho()).zip(e.z()) {
                let _ = writeln!(s, "{s_k:.17e},{r:.17e},{z:.17e}");
            }
            s
        });
        let mut quantities = vec![
            ("area".to_string(), q.area),
            ("area_radius".to_string(), q.area_radius),
            ("total_h_g".to_string(), q.total_h_g),
            ("hawking".to_string(), q.hawking),
        ];
        if let Some(l) = q.lambda {
            quantities.push(("lambda".into(), l));
        }
        if let Some(b) = q.brown_york {
            quantities.push(("brown_york".into(), b));
        }
        Ok(Output {
            result: serde_json::to_value(&q).map_err(json_err)?,
            data,
            grid: None,
            quantities,
            inequalities: vec![],
        })
    }

    fn profile(&self) -> Result<IsoperimetricProfile> {
        match self.scenario.schwarzschild_mass() {
            Some(m) => IsoperimetricProfile::schwarzschild(m),
            None => {
                let metric = self.scenario.build_metric()?;
                IsoperimetricProfile::from_metric(
                    metric.conformal()?.clone(),
                    self.scenario.verify.assert_isoperimetric,
                )
            }
        }
    }

    fn symmetrize_task(&mut self) -> Result<Output> {
        let profile = self.profile()?;
        let count = self.scenario.numerics.thresholds;
        let sol = self.solve()?.clone();
        let levels = extract_level_sets(&sol, &default_thresholds(&sol, count))?;
        let res = rearranged_energy(&levels, &profile)?;
        let mut data = String::from("t,volume,volume_rate\n");
        for ((t, v), r) in res.thresholds.iter().zip(&res.volumes).zip(&res.volume_rates) {
            let _ = writeln!(data, "{t:.17e},{v:.17e},{r:.17e}");
        }
        let mut inequalities = Vec::new();
        if let Some(m) = self.scenario.schwarzschild_mass() {
            inequalities.push(szego_schwarzschild_compare(&sol, m)?);
        }
        let quantities = vec![
            ("original_capacity".to_string(), res.original_capacity),
            ("symmetrized_capacity".to_string(), res.symmetrized_capacity),
            ("gap".to_string(), res.gap),
            ("chain_monotone".to_string(), if res.chain_monotone { 1.0 } else { 0.0 }),
        ];
        let result = json!({ "symmetrization": res, "comparisons": inequalities });
        Ok(Output { result, data: Some(data), grid: None, quantities, inequalities })
    }

    fn verify_task(&mut self, name: &str) -> Result<Output> {
        let reports = self.verify_reports(name)?;
        let result = serde_json::to_value(&reports).map_err(json_err)?;
        Ok(Output {
            result,
            data: Some(harness::reports_to_csv(&reports)),
            grid: None,
            quantities: vec![],
            inequalities: reports,
        })
    }

    fn verify_reports(&mut self, name: &str) -> Result<Vec<InequalityReport>> {
        let scenario = self.scenario;
        let metric_model = scenario.build_metric()?;
        let boundary = self.boundary()?;
        let boundary_q = |metric: &caplab::geometry::RadialConformalMetric| {
            quasilocal_report(metric, &boundary, MeanCurvatureConvention::TowardInfinity)
        };
        Ok(match name {
            "identities" => {
                let m = scenario.schwarzschild_mass().expect("validated at load");
                let MeridianCurve::Sphere { r0 } = boundary else {
                    return Err(Error::InvalidInput("identities are stated for coordinate spheres".into()));
                };
                let mut out = harness::verify_schwarzschild_identities(m, r0)?;
                if m > 0.0 {
                    let (c, p) = harness::verify_mass_capacity_and_penrose(metric_model.conformal()?)?;
                    out.extend([c, p]);
                }
                out
            }
            "lc1" => {
                let q = boundary_q(metric_model.conformal()?)?;
                vec![harness::verify_lc1(self.solve()?, &q)?]
            }
            "bray-miao" => {
                let q = boundary_q(metric_model.conformal()?)?;
                vec![harness::verify_bray_miao(self.solve()?, &q)?]
            }
            "upper-bounds" => {
                let q = boundary_q(metric_model.conformal()?)?;
                vec![harness::verify_capacity_upper_bounds(self.solve()?, &q)?]
            }
            "mass-capacity" => {
                let (c, p) = harness::verify_mass_capacity_and_penrose(metric_model.conformal()?)?;
                vec![c, p]
            }
            "lc2" | "corollaries" => {
                let metric = metric_model.conformal()?.clone();
                let q = boundary_q(&metric)?;
                let sol = self.solve()?.clone();
                let mut out = Vec::new();
                for &c in &scenario.verify.c {
                    let levels = extract_level_sets(&sol, &[2.0 - 2.0 * c])?;
                    let level = &levels.levels[0];
                    if name == "lc2" {
                        let lq = quasilocal_report(&metric, &level.curve, MeanCurvatureConvention::TowardInfinity)?;
                        let mut r = harness::verify_lc2(&sol, &q, c, level, &lq)?;
                        r.name = format!("lc2[c={c}]");
                        out.push(r);
                    } else {
                        let m = scenario.schwarzschild_mass().ok_or_else(|| {
                            Error::InvalidInput("the corollaries compare against Schwarzschild".into())
                        })?;
                        let (a, mut b) = harness::verify_schwarzschild_corollaries(&sol, m, c, level)?;
                        b.name = format!("{}[c={c}]", b.name);
                        if out.is_empty() {
                            out.push(a);
                        }
                        out.push(b);
                    }
                }
                out
            }
            "szego" => {
                let m = scenario
                    .schwarzschild_mass()
                    .ok_or_else(|| Error::InvalidInput("the Szegő comparison is against Schwarzschild".into()))?;
                vec![szego_schwarzschild_compare(self.solve()?, m)?]
            }
            "rigidity" => {
                let c = scenario.verify.rigidity_c;
                let (blowdown, tol) = match (scenario.schwarzschild_mass(), &boundary) {
                    (Some(m), MeridianCurve::Sphere { r0 }) if m != 0.0 => {
                        (BlowdownBoundary::schwarzschild(m, *r0)?, harness::CLOSED_FORM_TOLERANCE)
                    }
                    _ => {
                        let sol = self.solve()?;
                        let rel = (sol.error_estimate() / sol.capacity).max(harness::CLOSED_FORM_TOLERANCE);
                        (BlowdownBoundary::from_inverted(sol)?, rel)
                    }
                };
                let b = harness::rigidity_bounds_check(&blowdown, c, 0.0);
                let scale = |v: f64| (5.0 * tol * v.abs()).max(harness::CLOSED_FORM_TOLERANCE);
                vec![
                    InequalityReport::new(
                        "rigidity_sup",
                        vec![],
                        b.sup,
                        b.sup_bound,
                        Direction::AtLeast,
                        scale(b.sup_bound),
                    ),
                    InequalityReport::new(
                        "rigidity_inf",
                        vec![],
                        b.inf,
                        b.inf_bound,
                        Direction::AtMost,
                        scale(b.inf_bound),
                    ),
                ]
            }
            other => return Err(Error::InvalidInput(format!("unknown verifier {other}"))),
        })
    }

    fn glue_task(&mut self) -> Result<Output> {
        let spec = self.scenario.glue.ok_or_else(|| Error::InvalidInput("missing [glue] table".into()))?;
        let g = GluedManifold::new(spec.m, spec.m_prime)?;
        let corner = corner_jump_check(&g)?;
        let mirrored = corner_jump_check_mirrored(&g)?;
        let adm = adm_vs_lambda(&g)?;
        let quantities = vec![
            ("interface_radius".to_string(), g.interface_radius),
            ("h_plus".to_string(), corner.h_plus),
            ("h_minus".to_string(), corner.h_minus),
        ];
        let result = json!({ "glued": g, "corner": corner, "mirrored_corner": mirrored, "adm_vs_lambda": adm });
        Ok(Output { result, data: None, grid: None, quantities, inequalities: vec![adm] })
    }

    fn sweep_task(&mut self) -> Result<Output> {
        let metric = self.scenario.build_metric()?;
        let metric = metric.conformal()?;
        let mut data = String::from("r0,capacity,lambda,mean_h_over_8pi,gap\n");
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for r0 in self.scenario.sweep_radii() {
            let c = capacity_radial(&metric.clone().into(), r0)?.capacity;
            let q = quasilocal_report(metric, &MeridianCurve::sphere(r0), MeanCurvatureConvention::TowardInfinity)?;
            let lambda = q.lambda.ok_or(Error::LambdaUnavailable { min_gauss: q.min_gauss })?;
            let h = q.mean_h_over_8pi();
            let gap = lambda + h - 2.0 * c;
            worst = worst.max(gap.abs());
            let _ = writeln!(data, "{r0:.17e},{c:.17e},{lambda:.17e},{h:.17e},{gap:.17e}");
            rows.push(json!({ "r0": r0, "capacity": c, "lambda": lambda, "mean_h_over_8pi": h, "gap": gap }));
        }
        let result = json!({ "rows": rows, "max_abs_gap": worst });
        Ok(Output {
            result,
            data: Some(data),
            grid: None,
            quantities: vec![("max_abs_gap".into(), worst)],
            inequalities: vec![],
        })
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidInput(format!("serialization failed: {e}"))
}
