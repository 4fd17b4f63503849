//! Inequality verifiers.
//!
//! Each verifier evaluates its hypotheses first, then both sides, and
//! reports the gap with the orientation that makes "satisfied" mean
//! `gap >= -tolerance`. A report whose hypotheses fail records its values
//! but is never marked satisfied.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::capacity::{boundary_gradient, capacity_harmonically_flat, capacity_radial, CapacitySolution, LevelSet};
use crate::error::{Error, Result};
use crate::geometry::{adm_mass, locate_horizon, scalar_curvature_radial, RadialConformalMetric, SchwarzschildSpec};
use crate::numerics;
use crate::quasilocal::{quasilocal_report, MeanCurvatureConvention, QuasiLocalReport};
use crate::surface::{flat_mean_curvature, MeridianCurve};
use crate::symmetrization::IsoperimetricProfile;

/// Equality tolerance on closed-form and quadrature paths.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub condition: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub hypotheses: Vec<Hypothesis>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub equality_within: bool,
    pub satisfied: bool,
    pub notes: Vec<String>,
}

/// Which side is expected to be larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `lhs <= rhs`; gap is `rhs - lhs`.
    AtMost,
    /// `lhs >= rhs`; gap is `lhs - rhs`.
    AtLeast,
}

impl InequalityReport {
    pub fn new(
        name: &str,
        hypotheses: Vec<Hypothesis>,
        lhs: f64,
        rhs: f64,
        direction: Direction,
        tolerance: f64,
    ) -> Self {
        let gap = match direction {
            Direction::AtMost => rhs - lhs,
            Direction::AtLeast => lhs - rhs,
        };
        let hold = hypotheses.iter().all(|h| h.holds);
        let mut notes = Vec::new();
        for h in hypotheses.iter().filter(|h| !h.holds) {
            notes.push(format!("hypothesis violated: {}", h.condition));
        }
        Self {
            name: name.to_string(),
            hypotheses,
            lhs,
            rhs,
            gap,
            tolerance,
            equality_within: gap.abs() <= tolerance,
            satisfied: hold && gap >= -tolerance,
            notes,
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    /// True when the hypotheses hold but the inequality does not.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_hold() && !self.satisfied
    }

    /// A two-sided check: satisfied only when `|lhs - rhs| <= tolerance`.
    pub fn identity(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut r = Self::new(name, Vec::new(), lhs, rhs, Direction::AtMost, tolerance);
        r.satisfied = r.equality_within;
        r
    }

    fn note(mut self, text: &str) -> Self {
        self.notes.push(text.to_string());
        self
    }

    pub const CSV_HEADER: &'static str = "name,lhs,rhs,gap,tolerance,satisfied";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{}", self.name, self.lhs, self.rhs, self.gap, self.tolerance, self.satisfied)
    }
}

pub fn reports_to_csv(reports: &[InequalityReport]) -> String {
    let mut s = String::from(InequalityReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

fn hyp(condition: &str, holds: bool) -> Hypothesis {
    Hypothesis { condition: condition.to_string(), holds }
}

/// Absolute tolerance on a capacity: `5x` the reported numerical error for
/// grid solutions, the closed-form tolerance otherwise.
pub fn capacity_tolerance(sol: &CapacitySolution) -> f64 {
    if sol.grid_error.is_some() || sol.truncation_error.is_some() {
        (5.0 * sol.error_estimate()).max(CLOSED_FORM_TOLERANCE)
    } else {
        CLOSED_FORM_TOLERANCE
    }
}

fn require_convention(q: &QuasiLocalReport) -> Result<()> {
    if q.normal != MeanCurvatureConvention::TowardInfinity {
        return Err(Error::MixedConvention {
            expected: MeanCurvatureConvention::TowardInfinity.to_string(),
            found: q.normal.to_string(),
        });
    }
    Ok(())
}

/// `R(g) >= 0` on a log grid from the domain start outward.
pub fn scalar_curvature_nonnegative(metric: &RadialConformalMetric) -> bool {
    numerics::logspace(metric.r_b, 1e4 * metric.r_b.max(1.0), 400).into_iter().all(|r| {
        let u = metric.u(r);
        // relative to the curvature scale u^-4 r^-2 of the sphere at r
        scalar_curvature_radial(metric, r).map(|s| s * u.powi(4) * r * r >= -1e-10).unwrap_or(false)
    })
}

/// Whether `pred(H(theta), value)` holds at every sample.
fn pointwise(q: &QuasiLocalReport, theta: &[f64], values: &[f64], pred: impl Fn(f64, f64) -> bool) -> bool {
    theta.iter().zip(values).all(|(&t, &v)| pred(q.h_g_at(t), v))
}

/// `2C <= Lambda + (1/8 pi) int H_g`, with `H_g < 4 |grad phi|` on the
/// boundary.
pub fn verify_lc1(sol: &CapacitySolution, q: &QuasiLocalReport) -> Result<InequalityReport> {
    require_convention(q)?;
    let lambda = q.lambda.ok_or(Error::LambdaUnavailable { min_gauss: q.min_gauss })?;
    let grad = boundary_gradient(sol)?;
    let (metric, _) = sol.boundary_geometry()?;
    let hypotheses = vec![
        hyp("H_g < 4|grad phi| on the boundary", pointwise(q, &grad.theta, &grad.grad_phi, |h, g| h < 4.0 * g)),
        hyp("nonnegative scalar curvature", scalar_curvature_nonnegative(&metric)),
    ];
    let tol = 2.0 * capacity_tolerance(sol);
    Ok(InequalityReport::new(
        "lc1",
        hypotheses,
        2.0 * sol.capacity,
        lambda + q.mean_h_over_8pi(),
        Direction::AtMost,
        tol,
    ))
}

/// `C/c <= Lambda(S_c) - (1/8 pi) int_{S_c} H_g` on the level set
/// `S_c = {(2 - phi)/2 = c}`.
pub fn verify_lc2(
    sol: &CapacitySolution,
    boundary: &QuasiLocalReport,
    c: f64,
    level: &LevelSet,
    level_report: &QuasiLocalReport,
) -> Result<InequalityReport> {
    require_convention(boundary)?;
    require_convention(level_report)?;
    if (level.t - (2.0 - 2.0 * c)).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("level t = {} is not 2 - 2c for c = {c}", level.t)));
    }
    let lambda = level_report.lambda.ok_or(Error::LambdaUnavailable { min_gauss: level_report.min_gauss })?;
    let (metric, _) = sol.boundary_geometry()?;
    let hypotheses = vec![
        hyp("c in (1/2, 1)", c > 0.5 && c < 1.0),
        hyp("boundary mean curvature nonpositive", boundary.max_h_g <= 1e-8),
        hyp("c is a regular value", level.min_gradient > 0.0),
        hyp(
            "H_g > -4|grad log u| on S_c",
            pointwise(level_report, &level.gradient_theta, &level.gradient, |h, g| h > -4.0 * g / (2.0 * c)),
        ),
        hyp("nonnegative scalar curvature", scalar_curvature_nonnegative(&metric)),
    ];
    let lhs = sol.capacity / c;
    let rhs = lambda - level_report.mean_h_over_8pi();
    let tol = capacity_tolerance(sol) / c;
    Ok(InequalityReport::new("lc2", hypotheses, lhs, rhs, Direction::AtMost, tol)
        .note("equality rigidity at fixed c is not asserted"))
}

/// Bray–Miao: `C <= sqrt(|S|/16 pi) (1 + sqrt((1/16 pi) int H^2))`.
pub fn verify_bray_miao(sol: &CapacitySolution, q: &QuasiLocalReport) -> Result<InequalityReport> {
    require_convention(q)?;
    let (metric, _) = sol.boundary_geometry()?;
    let hypotheses = vec![
        hyp("connected boundary", true),
        hyp("nonnegative scalar curvature", scalar_curvature_nonnegative(&metric)),
    ];
    let rhs = (q.area / (16.0 * PI)).sqrt() * (1.0 + (q.total_h_sq / (16.0 * PI)).sqrt());
    Ok(InequalityReport::new("bray_miao", hypotheses, sol.capacity, rhs, Direction::AtMost, capacity_tolerance(sol)))
}

fn horizon_capacity(metric: &RadialConformalMetric, r: f64) -> Result<f64> {
    match capacity_harmonically_flat(metric, r) {
        Ok(c) => Ok(c),
        Err(Error::NotHarmonicallyFlat { .. }) => Ok(capacity_radial(&metric.clone().into(), r)?.capacity),
        Err(e) => Err(e),
    }
}

/// Mass–capacity `C <= m_ADM` for the coordinate sphere `r0`, flagging
/// whether it is a horizon.
pub fn verify_mass_capacity_at(metric: &RadialConformalMetric, r0: f64) -> Result<InequalityReport> {
    let h = metric.mean_curvature(r0)?;
    let hypotheses = vec![
        hyp("boundary is a horizon", h.abs() * metric.area_radius(r0)? <= 1e-8),
        hyp("nonnegative scalar curvature", scalar_curvature_nonnegative(metric)),
    ];
    let c = horizon_capacity(metric, r0)?;
    Ok(InequalityReport::new(
        "mass_capacity",
        hypotheses,
        c,
        adm_mass(metric)?,
        Direction::AtMost,
        CLOSED_FORM_TOLERANCE,
    ))
}

/// Mass–capacity and Penrose at the outermost horizon.
pub fn verify_mass_capacity_and_penrose(
    metric: &RadialConformalMetric,
) -> Result<(InequalityReport, InequalityReport)> {
    let rh = locate_horizon(metric).ok_or(Error::NoHorizon)?;
    let capacity = verify_mass_capacity_at(metric, rh)?;
    let mass = capacity.rhs;
    // outer-minimizing: area radius increasing outside the horizon
    let outer_min = numerics::logspace(rh * (1.0 + 1e-6), 1e4 * rh.max(1.0), 400).windows(2).all(|w| {
        let a = |r: f64| metric.u(r).powi(2) * r;
        a(w[1]) > a(w[0])
    });
    let area = 4.0 * PI * metric.area_radius(rh)?.powi(2);
    let hypotheses = vec![
        hyp("outer-minimizing horizon", outer_min),
        hyp("nonnegative scalar curvature", scalar_curvature_nonnegative(metric)),
    ];
    let penrose = InequalityReport::new(
        "penrose",
        hypotheses,
        (area / (16.0 * PI)).sqrt(),
        mass,
        Direction::AtMost,
        CLOSED_FORM_TOLERANCE,
    );
    Ok((capacity, penrose))
}

fn is_flat(metric: &RadialConformalMetric) -> bool {
    metric.profile.as_laurent().is_some_and(|l| l.terms == [(1.0, 0.0)])
}

/// Upper bounds on capacity by `int H0`: at a horizon (`C <= (1/16 pi)
/// int H0`), for `0 < H_g < 4|grad phi|` (`C <= (1/8 pi) int H0`), and
/// Szegő's bound for convex surfaces in flat space.
pub fn verify_capacity_upper_bounds(sol: &CapacitySolution, q: &QuasiLocalReport) -> Result<InequalityReport> {
    require_convention(q)?;
    let (metric, curve) = sol.boundary_geometry()?;
    let total_h0 = match (q.total_h_g0, q.min_gauss > 0.0) {
        (Some(h0), true) => h0,
        _ => return Err(Error::NoApplicableHypothesis("boundary lacks positive Gauss curvature".into())),
    };
    let scale = q.area_radius;
    let tol = capacity_tolerance(sol);
    let nonneg = hyp("nonnegative scalar curvature", scalar_curvature_nonnegative(&metric));
    if q.min_h_g.abs() * scale <= 1e-8 && q.max_h_g.abs() * scale <= 1e-8 {
        let hs = vec![hyp("boundary is a horizon", true), hyp("positive Gauss curvature", true), nonneg];
        return Ok(InequalityReport::new(
            "capacity_horizon_h0",
            hs,
            sol.capacity,
            total_h0 / (16.0 * PI),
            Direction::AtMost,
            tol,
        ));
    }
    if is_flat(&metric) {
        let convex = (0..=200).all(|k| {
            let t = PI * k as f64 / 200.0;
            flat_mean_curvature(curve.eval(t), t, k == 0 || k == 200) > 0.0
        });
        let hs = vec![hyp("convex boundary in flat space", convex)];
        return Ok(InequalityReport::new("szego", hs, sol.capacity, total_h0 / (8.0 * PI), Direction::AtMost, tol));
    }
    let grad = boundary_gradient(sol)?;
    if q.min_h_g > 0.0 {
        let hs = vec![
            hyp("0 < H_g < 4|grad phi|", pointwise(q, &grad.theta, &grad.grad_phi, |h, g| h > 0.0 && h < 4.0 * g)),
            hyp("positive Gauss curvature", true),
            nonneg,
        ];
        return Ok(InequalityReport::new(
            "capacity_mean_convex_h0",
            hs,
            sol.capacity,
            total_h0 / (8.0 * PI),
            Direction::AtMost,
            tol,
        ));
    }
    Err(Error::NoApplicableHypothesis("boundary is neither a horizon nor mean convex".into()))
}

/// The two Schwarzschild comparisons against rotationally symmetric
/// spheres of equal signed volume: total mean curvature of the boundary,
/// and Brown–York mass of the level set `S_c`.
pub fn verify_schwarzschild_corollaries(
    sol: &CapacitySolution,
    m: f64,
    c: f64,
    level: &LevelSet,
) -> Result<(InequalityReport, InequalityReport)> {
    let (metric, curve) = sol.boundary_geometry()?;
    let profile = IsoperimetricProfile::schwarzschild(m)?;
    let q = quasilocal_report(&metric, &curve, MeanCurvatureConvention::TowardInfinity)?;
    let grad = boundary_gradient(sol)?;
    let (rmin, _) = curve.radius_range();
    let tol = 2.0 * capacity_tolerance(sol);

    let star = profile.symmetric_counterpart_of(&curve)?;
    let q_star = quasilocal_report(&metric, &MeridianCurve::sphere(star.r0), MeanCurvatureConvention::TowardInfinity)?;
    let total = |q: &QuasiLocalReport| q.total_h_g0.map(|h0| (h0 + q.total_h_g) / (8.0 * PI));
    let hs = vec![
        hyp("positive Gauss curvature", q.min_gauss > 0.0),
        hyp("H_g < 4|grad phi| on the boundary", pointwise(&q, &grad.theta, &grad.grad_phi, |h, g| h < 4.0 * g)),
        hyp("boundary encloses the horizon", rmin >= 0.5 * m * (1.0 - 1e-12)),
    ];
    let lhs = total(&q_star).ok_or(Error::LambdaUnavailable { min_gauss: q_star.min_gauss })?;
    let rhs = total(&q).ok_or(Error::LambdaUnavailable { min_gauss: q.min_gauss })?;
    let mean = InequalityReport::new("schwarzschild_total_mean_curvature", hs, lhs, rhs, Direction::AtMost, tol);

    if (level.t - (2.0 - 2.0 * c)).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("level t = {} is not 2 - 2c for c = {c}", level.t)));
    }
    let qc = quasilocal_report(&metric, &level.curve, MeanCurvatureConvention::TowardInfinity)?;
    let star_c = profile.symmetric_counterpart_of(&level.curve)?;
    let qc_star =
        quasilocal_report(&metric, &MeridianCurve::sphere(star_c.r0), MeanCurvatureConvention::TowardInfinity)?;
    let by = qc.brown_york.ok_or(Error::LambdaUnavailable { min_gauss: qc.min_gauss })?;
    let by_star = qc_star.brown_york.ok_or(Error::LambdaUnavailable { min_gauss: qc_star.min_gauss })?;
    let rhs = (1.0 / c - 1.0) * by_star / (by_star / m - 1.0);
    let hs = vec![
        hyp("positive Gauss curvature", q.min_gauss > 0.0),
        hyp("weakly outer trapped boundary", q.max_h_g * q.area_radius <= 1e-8),
        hyp("c in (1/2, 1)", c > 0.5 && c < 1.0),
        hyp("c is a regular value", level.min_gradient > 0.0),
        hyp("S_c has positive Gauss curvature", qc.min_gauss > 0.0),
        hyp(
            "H_g > -4|grad log u| on S_c",
            pointwise(&qc, &level.gradient_theta, &level.gradient, |h, g| h > -4.0 * g / (2.0 * c)),
        ),
    ];
    let by_report = InequalityReport::new("schwarzschild_brown_york", hs, by, rhs, Direction::AtLeast, tol / c);
    Ok((mean, by_report))
}

/// Unique positive root of `A(2-n) x^{2-n} + b x + c(n-1)`.
pub fn rigidity_radius(a: f64, b: f64, c: f64, n: u32) -> Result<f64> {
    if !(a > 0.0 && b >= 0.0 && c > 0.0 && n >= 3) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::InvalidInput(format!("need A > 0, b >= 0, c > 0, n >= 3; got {a}, {b}, {c}, {n}")));
    }
    let k = n as f64 - 2.0;
    if b == 0.0 {
        // A k x^{-k} = c (n - 1)
        return Ok((a * k / (c * (n as f64 - 1.0))).powf(1.0 / k));
    }
    let f = |x: f64| -a * k * x.powf(-k) + b * x + c * (n as f64 - 1.0);
    let df = |x: f64| a * k * k * x.powf(-k - 1.0) + b;
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while f(lo) >= 0.0 {
        lo *= 0.5;
    }
    let mut x = numerics::bisect(f, lo, hi, 0.0).ok_or_else(|| Error::Unsolved("rigidity bracket".into()))?;
    // a Newton step removes the last bit of bracket width
    for _ in 0..2 {
        let step = f(x) / df(x);
        if step.is_finite() && (x - step) > 0.0 && f(x - step).abs() < f(x).abs() {
            x -= step;
        }
    }
    Ok(x)
}

/// Closed-form identities of the coordinate sphere `r0` in Schwarzschild,
/// checked against the numerical quasi-local and capacity paths:
/// `C = r0 + m/2`, `2C = Lambda + (1/8 pi) int H`,
/// `(1/8 pi) int (H0 + H) = 2 r0 + m` and `m_H = m`.
pub fn verify_schwarzschild_identities(m: f64, r0: f64) -> Result<Vec<InequalityReport>> {
    let spec = SchwarzschildSpec::with_r_min(m, r0)?;
    let metric = spec.metric();
    let q = quasilocal_report(&metric, &MeridianCurve::sphere(r0), MeanCurvatureConvention::TowardInfinity)?;
    let lambda = q.lambda.ok_or(Error::LambdaUnavailable { min_gauss: q.min_gauss })?;
    let h0 = q.total_h_g0.ok_or(Error::LambdaUnavailable { min_gauss: q.min_gauss })?;
    let closed = r0 + 0.5 * m;
    let cap = capacity_radial(&metric.clone().into(), r0)?.capacity;
    let scale = closed.abs().max(1.0);
    let tol = CLOSED_FORM_TOLERANCE * scale;
    Ok(vec![
        InequalityReport::identity("capacity_closed_form", cap, closed, tol),
        InequalityReport::identity("capacity_lambda_identity", 2.0 * cap, lambda + q.mean_h_over_8pi(), 2.0 * tol),
        InequalityReport::identity(
            "total_mean_curvature_identity",
            (h0 + q.total_h_g) / (8.0 * PI),
            2.0 * r0 + m,
            2.0 * tol,
        ),
        InequalityReport::identity("hawking_mass_constancy", q.hawking, m, 1e-10 * scale),
    ])
}

/// Boundary data of a conformal blowdown: a flat domain star-shaped about
/// the pole `p`, with Green's function `psi = A/d + O(1)` vanishing on the
/// boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowdownBoundary {
    pub a: f64,
    pub theta: Vec<f64>,
    /// Distance from the pole.
    pub radius: Vec<f64>,
    /// Outward normal derivative of `psi`.
    pub normal_derivative: Vec<f64>,
    /// Mean curvature with respect to the outward normal.
    pub mean_curvature: Vec<f64>,
}

impl BlowdownBoundary {
    /// Schwarzschild exterior of the coordinate sphere `r0`: with
    /// `C = r0 + m/2` the blowdown `phi^4 g_m` is the flat ball of radius
    /// `C^2/r0`, and `psi = phi^{-1} - 1 = C/d + m/(2C) - 1`.
    pub fn schwarzschild(m: f64, r0: f64) -> Result<Self> {
        let cap = r0 + 0.5 * m;
        if !(r0 > 0.0 && cap > 0.0) {
            return Err(Error::InvalidInput(format!("invalid sphere r0 = {r0} for m = {m}")));
        }
        let rho = cap * cap / r0;
        Ok(Self {
            a: cap,
            theta: vec![0.0],
            radius: vec![rho],
            normal_derivative: vec![-cap / (rho * rho)],
            mean_curvature: vec![2.0 / rho],
        })
    }

    /// Green's function of the flat domain bounded by `1/r(theta)`, where
    /// `r(theta)` is the boundary of a solved flat exterior problem: the
    /// Kelvin transform gives `psi(y) = |x| (1 - phi(x))` with
    /// `x = y/|y|^2`, so `A = 1` and `|d psi/d nu| = |x|^3 |grad phi|`.
    pub fn from_inverted(sol: &CapacitySolution) -> Result<Self> {
        let (metric, curve) = sol.boundary_geometry()?;
        if !is_flat(&metric) {
            return Err(Error::InvalidInput("the inverted problem must be posed in flat space".into()));
        }
        let grad = boundary_gradient(sol)?;
        let n = grad.theta.len();
        let mut out = Self {
            a: 1.0,
            theta: grad.theta.clone(),
            radius: vec![],
            normal_derivative: vec![],
            mean_curvature: vec![],
        };
        for (j, (&t, &g)) in grad.theta.iter().zip(&grad.grad_phi).enumerate() {
            let (r, r1, r2) = curve.eval(t);
            // derivatives of 1/r
            let rr = (1.0 / r, -r1 / (r * r), 2.0 * r1 * r1 / (r * r * r) - r2 / (r * r));
            out.radius.push(rr.0);
            out.normal_derivative.push(-r.powi(3) * g);
            out.mean_curvature.push(flat_mean_curvature(rr, t, n == 1 || j == 0 || j + 1 == n));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityBounds {
    pub sup: f64,
    pub inf: f64,
    /// `A(2-n) R^{1-n} + c(n-1)/R` with `R` the largest distance to the pole.
    pub sup_bound: f64,
    /// The same at the smallest distance `r`.
    pub inf_bound: f64,
    /// `sup - sup_bound` and `inf_bound - inf`; both nonnegative when the
    /// bounds hold.
    pub sup_margin: f64,
    pub inf_margin: f64,
    pub holds: bool,
}

/// Evaluates `d psi/d nu + c H` on the boundary and compares its extremes
/// with the Euclidean-ball values at the enclosing and enclosed radii
/// (dimension 3).
pub fn rigidity_bounds_check(b: &BlowdownBoundary, c: f64, tolerance: f64) -> RigidityBounds {
    let vals: Vec<f64> = b.normal_derivative.iter().zip(&b.mean_curvature).map(|(d, h)| d + c * h).collect();
    let sup = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let big = b.radius.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let small = b.radius.iter().copied().fold(f64::INFINITY, f64::min);
    let ball = |r: f64| -b.a / (r * r) + 2.0 * c / r;
    let (sup_bound, inf_bound) = (ball(big), ball(small));
    let (sup_margin, inf_margin) = (sup - sup_bound, inf_bound - inf);
    RigidityBounds {
        sup,
        inf,
        sup_bound,
        inf_bound,
        sup_margin,
        inf_margin,
        holds: sup_margin >= -tolerance && inf_margin >= -tolerance,
    }
}
