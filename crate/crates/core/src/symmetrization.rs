//! Schwarz-type symmetrization in rotationally symmetric manifolds.
//!
//! Volumes are signed and measured from a reference sphere: the horizon
//! in Schwarzschild (so surfaces inside it have negative volume), the
//! origin in flat space. Each volume has a unique coordinate sphere
//! enclosing it, which in Schwarzschild is the isoperimetric surface.

use std::f64::consts::PI;

use serde::Serialize;

use crate::capacity::{capacity_harmonically_flat, capacity_radial, CapacitySolution, LevelSetData};
use crate::error::{Error, Result};
use crate::geometry::{locate_horizon, CoordinateSphere, RadialConformalMetric, SchwarzschildSpec};
use crate::harness::{capacity_tolerance, Direction, Hypothesis, InequalityReport};
use crate::numerics::{self, ChebGrid, Pchip, QuadOptions};
use crate::quasilocal::DEFAULT_NODES;
use crate::surface::MeridianCurve;

/// Volume-to-sphere map of a rotationally symmetric metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoperimetricProfile {
    pub metric: RadialConformalMetric,
    /// Sphere of zero signed volume.
    pub reference_radius: f64,
}

impl IsoperimetricProfile {
    pub fn schwarzschild(m: f64) -> Result<Self> {
        if !(m >= 0.0) {
            return Err(Error::InvalidInput(format!("mass must be nonnegative, got {m}")));
        }
        let spec = SchwarzschildSpec::new(m)?;
        Ok(Self { metric: spec.metric(), reference_radius: 0.5 * m })
    }

    /// A general rotationally symmetric metric. Isoperimetry of its
    /// coordinate spheres cannot be checked here, so the caller asserts
    /// it; the necessary condition that area grows with enclosed volume
    /// is verified.
    pub fn from_metric(metric: RadialConformalMetric, assert_isoperimetric: bool) -> Result<Self> {
        if !assert_isoperimetric {
            return Err(Error::InvalidInput(
                "coordinate spheres must be asserted isoperimetric for a general profile".into(),
            ));
        }
        let reference_radius = locate_horizon(&metric).ok_or(Error::NoHorizon)?;
        let area_radius = |r: f64| metric.u(r).powi(2) * r;
        let grid = numerics::logspace(reference_radius * (1.0 + 1e-6), 1e4 * reference_radius.max(1.0), 400);
        if let Some(w) = grid.windows(2).find(|w| area_radius(w[1]) <= area_radius(w[0])) {
            return Err(Error::InvalidInput(format!("sphere area is not increasing in volume near r = {}", w[0])));
        }
        Ok(Self { metric, reference_radius })
    }

    /// `int_{ref}^r u^6 s^2 ds`.
    fn primitive(&self, r: f64) -> Result<f64> {
        let a = self.reference_radius;
        if let Some(l) = self.metric.profile.as_laurent() {
            return Ok(l.powi(6).mul(&crate::geometry::Laurent::new(vec![(1.0, 2.0)])).integral(a, r));
        }
        let (lo, hi, sign) = if a <= r { (a, r, 1.0) } else { (r, a, -1.0) };
        let v = numerics::integrate(|s| self.metric.u(s).powi(6) * s * s, lo, hi, QuadOptions::default())?;
        Ok(sign * v)
    }

    /// Signed volume enclosed by the coordinate sphere `r`.
    pub fn signed_volume(&self, r: f64) -> Result<f64> {
        self.metric.check(r)?;
        Ok(4.0 * PI * self.primitive(r)?)
    }

    /// Signed volume enclosed by a star-shaped surface.
    pub fn volume_of(&self, curve: &MeridianCurve) -> Result<f64> {
        let grid = ChebGrid::new(DEFAULT_NODES, 0.0, PI);
        let mut v = Vec::with_capacity(grid.len());
        for &t in grid.nodes() {
            let r = curve.radius(t);
            self.metric.check(r)?;
            v.push(self.primitive(r)? * t.sin());
        }
        Ok(2.0 * PI * grid.integrate(&v))
    }

    /// Smallest representable volume: that of the innermost admissible sphere.
    pub fn infimum(&self) -> Result<f64> {
        self.signed_volume(self.metric.r_b)
    }

    pub fn area(&self, r: f64) -> f64 {
        4.0 * PI * self.metric.u(r).powi(4) * r * r
    }

    /// Capacity of the coordinate sphere `r`.
    pub fn capacity(&self, r: f64) -> Result<f64> {
        match capacity_harmonically_flat(&self.metric, r) {
            Ok(c) => Ok(c),
            Err(Error::NotHarmonicallyFlat { .. }) => Ok(capacity_radial(&self.metric.clone().into(), r)?.capacity),
            Err(e) => Err(e),
        }
    }

    pub fn symmetric_counterpart_of(&self, curve: &MeridianCurve) -> Result<CoordinateSphere> {
        symmetric_counterpart(self, self.volume_of(curve)?)
    }
}

/// `4 pi int_{m/2}^{r0} (1 + m/2s)^6 s^2 ds`, negative inside the horizon.
pub fn signed_volume_schwarzschild(m: f64, r0: f64) -> Result<f64> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r0}")));
    }
    let p = IsoperimetricProfile::schwarzschild(m)?;
    Ok(4.0 * PI * p.primitive(r0)?)
}

/// The coordinate sphere enclosing signed volume `v`.
pub fn symmetric_counterpart(profile: &IsoperimetricProfile, v: f64) -> Result<CoordinateSphere> {
    let infimum = profile.infimum()?;
    if !(v >= infimum) {
        return Err(Error::VolumeOutOfRange { volume: v, infimum });
    }
    let f = |r: f64| profile.signed_volume(r).map(|x| x - v).unwrap_or(f64::NAN);
    let lo = profile.metric.r_b;
    let mut hi = profile.reference_radius.max(lo) * 2.0 + 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let r = numerics::bisect(f, lo, hi, 0.0).ok_or_else(|| Error::Unsolved("volume bracket".into()))?;
    Ok(CoordinateSphere::new(r))
}

/// `(3V/4pi)^{1/3}`: the capacity of the flat ball of volume `V`.
pub fn pfs_flat_bound(volume: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::InvalidInput(format!("volume must be positive, got {volume}")));
    }
    Ok((3.0 * volume / (4.0 * PI)).cbrt())
}

/// Outcome of rearranging a capacity potential onto symmetric spheres.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetrizationResult {
    pub original_capacity: f64,
    pub symmetrized_capacity: f64,
    /// Radius of the sphere with the boundary's signed volume.
    pub symmetric_radius: f64,
    /// `[int |S_t*|^2/V', int |S_t|^2/V', 4 pi C]`, each averaged over the
    /// threshold range.
    pub energy_chain: [f64; 3],
    pub gap: f64,
    /// Allowance for the chain comparisons.
    pub tolerance: f64,
    pub chain_monotone: bool,
    /// Largest relative disagreement between the flux formula
    /// `V' = int dsigma/|grad phi|` and the slope of a monotone spline
    /// through the volume samples.
    pub rate_discrepancy: f64,
    pub thresholds: Vec<f64>,
    pub volumes: Vec<f64>,
    pub volume_rates: Vec<f64>,
}

/// Trapezoid mean over non-uniform abscissae.
fn trapezoid_mean(t: &[f64], v: &[f64]) -> f64 {
    let s: f64 = t.windows(2).zip(v.windows(2)).map(|(tw, vw)| 0.5 * (tw[1] - tw[0]) * (vw[0] + vw[1])).sum();
    s / (t[t.len() - 1] - t[0])
}

pub fn rearranged_energy(levels: &LevelSetData, profile: &IsoperimetricProfile) -> Result<SymmetrizationResult> {
    if levels.levels.len() < 32 {
        return Err(Error::InvalidInput(format!("need at least 32 thresholds, got {}", levels.levels.len())));
    }
    let mut sorted: Vec<_> = levels.levels.iter().collect();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let t: Vec<f64> = sorted.iter().map(|l| l.t).collect();
    let mut volumes = Vec::with_capacity(t.len());
    for l in &sorted {
        volumes.push(profile.volume_of(&l.curve)?);
    }
    let scale = volumes.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let violation = volumes.windows(2).map(|w| (w[1] - w[0]) / scale).fold(0.0, f64::max);
    if violation > 1e-9 {
        return Err(Error::NonMonotoneVolume { violation });
    }
    // -dV/dt from the flux formula, cross-checked by a monotone spline
    // through the volume samples (V decreases in t, so the spline runs
    // over -V)
    let rates: Vec<f64> = sorted.iter().map(|l| l.volume_rate).collect();
    let neg: Vec<f64> = volumes.iter().map(|v| -v).collect();
    let spline = Pchip::new(&t, &neg)?;
    let rate_discrepancy = t.iter().zip(&rates).map(|(&x, r)| (spline.derivative(x) - r).abs() / r).fold(0.0, f64::max);
    let mut star = Vec::with_capacity(t.len());
    let mut orig = Vec::with_capacity(t.len());
    for ((l, &v), &rate) in sorted.iter().zip(&volumes).zip(&rates) {
        let s = symmetric_counterpart(profile, v)?;
        star.push(profile.area(s.r0).powi(2) / rate);
        orig.push(l.area.powi(2) / rate);
    }
    let energy_chain = [trapezoid_mean(&t, &star), trapezoid_mean(&t, &orig), 4.0 * PI * levels.capacity];

    let boundary_volume = profile.volume_of(&levels.boundary)?;
    let symmetric = symmetric_counterpart(profile, boundary_volume)?;
    let symmetrized_capacity = profile.capacity(symmetric.r0)?;
    let tolerance = 3.0 * (levels.capacity_error / levels.capacity).max(1e-9) * energy_chain[2];
    let chain_monotone =
        energy_chain[0] <= energy_chain[1] + tolerance && energy_chain[1] <= energy_chain[2] + tolerance;
    Ok(SymmetrizationResult {
        original_capacity: levels.capacity,
        symmetrized_capacity,
        symmetric_radius: symmetric.r0,
        energy_chain,
        gap: levels.capacity - symmetrized_capacity,
        tolerance,
        chain_monotone,
        rate_discrepancy,
        thresholds: t,
        volumes,
        volume_rates: rates,
    })
}

/// `C(S) >= C(S*)` with `S*` the Schwarzschild sphere of equal signed volume.
pub fn szego_schwarzschild_compare(sol: &CapacitySolution, m: f64) -> Result<InequalityReport> {
    let (_, curve) = sol.boundary_geometry()?;
    let profile = IsoperimetricProfile::schwarzschild(m)?;
    let star = profile.symmetric_counterpart_of(&curve)?;
    let (rmin, _) = curve.radius_range();
    let hypotheses =
        vec![Hypothesis { condition: "boundary encloses the horizon".into(), holds: rmin >= 0.5 * m * (1.0 - 1e-12) }];
    Ok(InequalityReport::new(
        "szego_schwarzschild",
        hypotheses,
        sol.capacity,
        star.r0 + 0.5 * m,
        Direction::AtLeast,
        capacity_tolerance(sol),
    ))
}
