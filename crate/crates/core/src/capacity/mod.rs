//! Boundary capacity potential and capacity.
//!
//! The potential `phi` is harmonic outside the boundary, equals 1 on it
//! and vanishes at infinity; the capacity is the flux
//! `(1/4pi) int |grad phi| dsigma` through any surface enclosing the
//! boundary, equivalently the coefficient `C` in `phi ~ C/|x|`.

pub mod fd;
pub mod gridio;
pub mod levelset;
pub mod linalg;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{RadialConformalMetric, WarpedProductMetric};
use crate::numerics::{self, QuadOptions};

pub use fd::{capacity_axisym_fd, AxisymDomainSpec, FdOptions, MeridianField};
pub use levelset::{default_thresholds, extract_level_sets, LevelSet, LevelSetData};

/// Radial potential `phi(r) = I(r) / I(r0)` with `I(r) = int_r^inf f/h^2 ds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialPotential {
    pub metric: WarpedProductMetric,
    pub r0: f64,
    /// `I(r0)`, the reciprocal of the capacity.
    pub total: f64,
    /// `(r, phi(r))` on a log grid out to `1000 r0`.
    pub samples: Vec<(f64, f64)>,
}

impl RadialPotential {
    pub fn value(&self, r: f64) -> Result<f64> {
        if r < self.r0 {
            return Err(Error::DomainViolation { r, start: self.r0 });
        }
        Ok(tail_integral(&self.metric, r)? / self.total)
    }

    /// `|grad phi|_g = 1 / (I(r0) h(r)^2)`.
    pub fn gradient_norm(&self, r: f64) -> f64 {
        let (_, h) = self.metric.eval(r);
        1.0 / (self.total * h * h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Radial(RadialPotential),
    Meridian(MeridianField),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacitySolution {
    pub capacity: f64,
    pub potential: Potential,
    /// `(extraction radius, capacity from the flux there)`.
    pub flux_samples: Vec<(f64, f64)>,
    /// `(max - min) / mean` over the flux samples.
    pub flux_spread: f64,
    pub asymptotic_coefficient: f64,
    /// `E(phi) / 4pi` on the grid; absent for quadrature solutions.
    pub energy_capacity: Option<f64>,
    /// Richardson estimate from a half-resolution solve.
    pub grid_error: Option<f64>,
    /// Change of the capacity when the truncation radius is doubled.
    pub truncation_error: Option<f64>,
    pub solver_iterations: Option<usize>,
}

impl CapacitySolution {
    /// Metric and boundary surface of a conformally flat solution.
    pub fn boundary_geometry(&self) -> Result<(RadialConformalMetric, crate::surface::MeridianCurve)> {
        match &self.potential {
            Potential::Radial(p) => match &p.metric {
                WarpedProductMetric::Conformal(m) => Ok((m.clone(), crate::surface::MeridianCurve::sphere(p.r0))),
                WarpedProductMetric::Explicit { .. } => {
                    Err(Error::InvalidInput("surface geometry needs a conformally flat metric".into()))
                }
            },
            Potential::Meridian(f) => Ok((f.metric.clone(), f.boundary.clone())),
        }
    }

    /// Largest reported numerical error, or 0 for quadrature solutions.
    pub fn error_estimate(&self) -> f64 {
        self.grid_error.unwrap_or(0.0) + self.truncation_error.unwrap_or(0.0)
    }
}

fn tail_integral(metric: &WarpedProductMetric, r: f64) -> Result<f64> {
    numerics::integrate_to_infinity(
        |s| {
            let (f, h) = metric.eval(s);
            f / (h * h)
        },
        r,
        QuadOptions::default(),
    )
}

/// Capacity of the coordinate sphere `r = r0` in a warped product
/// `f^2 dr^2 + h^2 g_S2`, by quadrature of the radial ODE solution.
pub fn capacity_radial(metric: &WarpedProductMetric, r0: f64) -> Result<CapacitySolution> {
    let start = metric.r_b();
    if !(r0 >= start * (1.0 - 1e-14)) || !r0.is_finite() {
        return Err(Error::DomainViolation { r: r0, start });
    }
    let total = tail_integral(metric, r0)?;
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DivergentIntegral(format!("int f/h^2 from {r0} is {total}")));
    }
    let radii = numerics::logspace(r0, 1e3 * r0, 61);
    let mut samples = Vec::with_capacity(radii.len());
    let mut acc = total;
    let mut prev = r0;
    for &r in &radii {
        if r > prev {
            acc -= numerics::integrate(
                |s| {
                    let (f, h) = metric.eval(s);
                    f / (h * h)
                },
                prev,
                r,
                QuadOptions::default(),
            )?;
            prev = r;
        }
        samples.push((r, (acc / total).max(0.0)));
    }
    let capacity = 1.0 / total;
    let potential = RadialPotential { metric: metric.clone(), r0, total, samples };
    let flux_samples: Vec<(f64, f64)> =
        numerics::logspace(r0, 100.0 * r0, 6).into_iter().map(|r| (r, radial_flux(&potential, r))).collect();
    let (_, flux_spread) = fd::spread(&flux_samples);
    let mut sol = CapacitySolution {
        capacity,
        potential: Potential::Radial(potential),
        flux_samples,
        flux_spread,
        asymptotic_coefficient: f64::NAN,
        energy_capacity: None,
        grid_error: None,
        truncation_error: None,
        solver_iterations: None,
    };
    sol.asymptotic_coefficient = asymptotic_fit(&sol)?;
    Ok(sol)
}

/// Closed form `r0 u(r0)` for a round boundary when `u` is harmonic:
/// then `u phi = r0 u(r0) / r` exactly.
pub fn capacity_harmonically_flat(metric: &RadialConformalMetric, r0: f64) -> Result<f64> {
    metric.check(r0)?;
    let (r, residual) = metric.harmonicity_residual();
    if residual > 1e-10 {
        return Err(Error::NotHarmonicallyFlat { r, residual });
    }
    Ok(r0 * metric.u(r0))
}

/// Boundary values of `|grad phi|_g` and of the derived potential
/// `u = (2 - phi)/2` with `|grad log u|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryGradient {
    /// Polar angles of the samples (a single `0` for radial solutions).
    pub theta: Vec<f64>,
    pub grad_phi: Vec<f64>,
    pub derived_u: Vec<f64>,
    pub grad_log_u: Vec<f64>,
}

impl BoundaryGradient {
    pub fn min_grad_phi(&self) -> f64 {
        self.grad_phi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_grad_phi(&self) -> f64 {
        self.grad_phi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn boundary_gradient(sol: &CapacitySolution) -> Result<BoundaryGradient> {
    let (theta, grad_phi) = match &sol.potential {
        Potential::Radial(p) => (vec![0.0], vec![p.gradient_norm(p.r0)]),
        Potential::Meridian(f) => {
            if f.values.is_empty() {
                return Err(Error::Unsolved("empty meridian field".into()));
            }
            let hx = f.hx();
            let mut th = Vec::with_capacity(f.ntheta + 1);
            let mut g = Vec::with_capacity(f.ntheta + 1);
            for j in 0..=f.ntheta {
                let t = f.theta(j);
                let p = f.map(0.0, t);
                let u = f.metric.u(p.r);
                let px = (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) / (2.0 * hx);
                let tilt = (1.0 + (p.r_theta / p.r).powi(2)).sqrt();
                th.push(t);
                g.push((px / p.r_x).abs() * tilt / (u * u));
            }
            (th, g)
        }
    };
    // phi = 1 on the boundary
    let derived_u = vec![0.5; grad_phi.len()];
    let grad_log_u = grad_phi.clone();
    Ok(BoundaryGradient { theta, grad_phi, derived_u, grad_log_u })
}

/// Coefficient `C` of `phi ~ C/|x|`, fitted in the far field and checked
/// against the flux capacity at `1e-3` relative.
pub fn asymptotic_fit(sol: &CapacitySolution) -> Result<f64> {
    let fit = match &sol.potential {
        Potential::Radial(p) => {
            let outer = 100.0 * p.r0.max(p.metric.r_b());
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for r in numerics::logspace(outer, 10.0 * outer, 24) {
                rows.push(vec![1.0, 1.0 / r, 1.0 / (r * r)]);
                rhs.push(r * p.value(r)?);
            }
            numerics::least_squares(&rows, &rhs).ok_or_else(|| Error::Unsolved("singular fit".into()))?[0]
        }
        Potential::Meridian(f) => {
            let (_, hi) = f.boundary.radius_range();
            let lo = (f.truncation_radius / 10.0).max(1.05 * hi);
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for r in numerics::logspace(lo, 0.98 * f.truncation_radius, 24) {
                rows.push(vec![1.0, fd::radial_harmonic(&f.metric, r)?]);
                rhs.push(f.spherical_mean(r));
            }
            numerics::least_squares(&rows, &rhs).ok_or_else(|| Error::Unsolved("singular fit".into()))?[1]
        }
    };
    let relative = (fit - sol.capacity).abs() / sol.capacity;
    if !(fit > 0.0) || relative > 1e-3 {
        return Err(Error::AsymptoticMismatch { fit, flux: sol.capacity, relative });
    }
    Ok(fit)
}

/// Flux capacity `(1/4pi) int |grad phi| dsigma` of a radial potential on
/// the coordinate sphere `r`.
pub fn radial_flux(p: &RadialPotential, r: f64) -> f64 {
    let (_, h) = p.metric.eval(r);
    let area = 4.0 * PI * h * h;
    area * p.gradient_norm(r) / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SchwarzschildSpec;

    fn schw(m: f64) -> WarpedProductMetric {
        SchwarzschildSpec::new(m).unwrap().metric().into()
    }

    #[test]
    fn warped_csv_capacity() {
        let mut text = String::from("r,f,h\n");
        for r in numerics::logspace(1.0, 1000.0, 800) {
            let u: f64 = 1.0 + 1.0 / r;
            text.push_str(&format!("{r},{},{}\n", u * u, u * u * r));
        }
        let warped = crate::geometry::parse_warped_csv(&text).unwrap();
        let sol = capacity_radial(&warped, 1.0).unwrap();
        assert!((sol.capacity - 2.0).abs() < 1e-6, "{}", sol.capacity);
        assert!(sol.boundary_geometry().is_err());
    }

    #[test]
    fn radial_schwarzschild() {
        for (m, r0) in [(2.0, 1.0), (2.0, 0.5), (2.0, 3.0), (0.5, 0.2), (0.0, 3.0)] {
            let s = capacity_radial(&schw(m), r0).unwrap();
            assert!((s.capacity - (r0 + m / 2.0)).abs() < 1e-8, "{m} {r0} {}", s.capacity);
            assert!((s.asymptotic_coefficient - s.capacity).abs() < 1e-6 * s.capacity);
            assert!(s.flux_spread < 1e-12);
        }
    }

    #[test]
    fn radial_potential_closed_form() {
        let s = capacity_radial(&schw(2.0), 1.0).unwrap();
        let Potential::Radial(p) = &s.potential else { unreachable!() };
        for &(r, v) in &p.samples {
            assert!((v - 2.0 / (r + 1.0)).abs() < 1e-10);
        }
        // d/dr [2/(r+1)] at r = 1 is -1/2; |grad phi| = |phi'| / u^2 = 1/8
        assert!((p.gradient_norm(1.0) - 0.125).abs() < 1e-10);
    }

    #[test]
    fn harmonically_flat_closed_form() {
        let m = SchwarzschildSpec::new(2.0).unwrap().metric();
        assert!((capacity_harmonically_flat(&m, 2.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((capacity_harmonically_flat(&m, 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(capacity_harmonically_flat(&RadialConformalMetric::flat(0.5), 1.0).unwrap(), 1.0);
        let bumpy = RadialConformalMetric::new(
            crate::geometry::RadialProfile::laurent(vec![(1.0, 0.0), (1.0, -1.0), (0.3, -3.0)]),
            0.5,
            1.0,
        )
        .unwrap();
        assert!(matches!(capacity_harmonically_flat(&bumpy, 1.0), Err(Error::NotHarmonicallyFlat { .. })));
    }

    #[test]
    fn flat_gradient_is_one() {
        let s = capacity_radial(&RadialConformalMetric::flat(0.5).into(), 1.0).unwrap();
        let g = boundary_gradient(&s).unwrap();
        assert!((g.grad_phi[0] - 1.0).abs() < 1e-12);
    }
}
