//! Capacity potential of an axisymmetric boundary on a meridian grid.
//!
//! The exterior of `r = r_b(theta)` up to the truncation sphere `r = R` is
//! mapped to the unit strip `x in [0, 1]`, `theta in [0, pi]` by
//! `r = r_b(theta) (R / r_b(theta))^x`, so grid lines in `x` are
//! log-spaced along each ray. In these coordinates `Delta_g phi = 0` is
//! `div0(u^2 grad0 phi) = 0`; it is discretized with bilinear finite
//! elements on the energy form, which gives a symmetric positive-definite
//! nine-point system with the symmetry axis handled by the vanishing
//! `sin(theta)` weight. The far field closes with `d_r(u phi) + u phi / r = 0`
//! at `r = R`, exact for the monopole of every harmonically flat metric.

use std::f64::consts::PI;

use serde::Serialize;

use super::linalg::{solve_pcg, CgOptions, Stencil9};
use super::{CapacitySolution, Potential};
use crate::error::{Error, Result};
use crate::geometry::RadialConformalMetric;
use crate::numerics::{self, interp};
use crate::surface::MeridianCurve;

/// Domain of an axisymmetric capacity problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisymDomainSpec {
    pub boundary: MeridianCurve,
    pub metric: RadialConformalMetric,
    pub truncation_radius: f64,
    /// `(n_x, n_theta)`: cell counts along rays and in polar angle.
    pub grid: (usize, usize),
    pub options: FdOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdOptions {
    /// Relative residual target for the linear solve.
    pub solver_tol: f64,
    /// Solve again on the half grid to estimate the discretization error.
    pub estimate_grid_error: bool,
    /// Solve again with the truncation radius doubled.
    pub estimate_truncation_error: bool,
    /// Largest tolerated relative spread of the layer fluxes, as a multiple
    /// of the estimated relative grid error (floored at `1e-4`).
    pub spread_factor: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { solver_tol: 1e-12, estimate_grid_error: true, estimate_truncation_error: false, spread_factor: 10.0 }
    }
}

impl AxisymDomainSpec {
    /// Truncation at `20 max r_b` and default options.
    pub fn new(boundary: MeridianCurve, metric: RadialConformalMetric, grid: (usize, usize)) -> Self {
        let (_, hi) = boundary.radius_range();
        Self { boundary, metric, truncation_radius: 20.0 * hi, grid, options: FdOptions::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.boundary.validate()?;
        let (lo, hi) = self.boundary.radius_range();
        self.metric.check(lo)?;
        if self.truncation_radius < 10.0 * hi * (1.0 - 1e-12) {
            return Err(Error::InvalidInput(format!(
                "truncation radius {} is below 10 x max boundary radius {hi}",
                self.truncation_radius
            )));
        }
        if self.grid.0 < 64 || self.grid.1 < 64 {
            return Err(Error::InvalidInput(format!("grid {:?} is coarser than 64 x 64", self.grid)));
        }
        Ok(())
    }
}

/// Solved potential on the meridian grid, row-major over `(i_x, j_theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeridianField {
    pub boundary: MeridianCurve,
    pub metric: RadialConformalMetric,
    pub truncation_radius: f64,
    pub nx: usize,
    pub ntheta: usize,
    pub values: Vec<f64>,
}

/// Point-wise map data.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MapPoint {
    pub r: f64,
    pub r_x: f64,
    pub r_theta: f64,
}

impl MeridianField {
    pub fn hx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn htheta(&self) -> f64 {
        PI / self.ntheta as f64
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.ntheta + 1) + j]
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.htheta() * j as f64
    }

    pub(crate) fn map(&self, x: f64, theta: f64) -> MapPoint {
        map_point(&self.boundary, self.truncation_radius, x, theta)
    }

    pub fn radius(&self, i: usize, j: usize) -> f64 {
        self.map(self.hx() * i as f64, self.theta(j)).r
    }

    /// Mapped coordinate of radius `r` on the ray at angle `theta`.
    pub fn x_of(&self, r: f64, theta: f64) -> f64 {
        let rb = self.boundary.radius(theta);
        (r / rb).ln() / (self.truncation_radius / rb).ln()
    }

    /// Nodal `(phi_x, phi_theta)` by centred differences (one-sided at the
    /// edges of the strip; zero `phi_theta` on the axis by symmetry).
    pub fn nodal_gradient(&self) -> (Vec<f64>, Vec<f64>) {
        let (nx, nt) = (self.nx, self.ntheta);
        let (hx, ht) = (self.hx(), self.htheta());
        let mut gx = vec![0.0; self.values.len()];
        let mut gt = vec![0.0; self.values.len()];
        for i in 0..=nx {
            for j in 0..=nt {
                let k = i * (nt + 1) + j;
                gx[k] = if i == 0 {
                    (-3.0 * self.at(0, j) + 4.0 * self.at(1, j) - self.at(2, j)) / (2.0 * hx)
                } else if i == nx {
                    (3.0 * self.at(nx, j) - 4.0 * self.at(nx - 1, j) + self.at(nx - 2, j)) / (2.0 * hx)
                } else {
                    (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * hx)
                };
                gt[k] = if j == 0 || j == nt { 0.0 } else { (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * ht) };
            }
        }
        (gx, gt)
    }

    /// Potential at `(r, theta)` by cubic interpolation along the two
    /// neighbouring rays, blended linearly in theta.
    pub fn value_at(&self, r: f64, theta: f64) -> f64 {
        let ht = self.htheta();
        let jf = (theta / ht).clamp(0.0, self.ntheta as f64);
        let j0 = (jf.floor() as usize).min(self.ntheta - 1);
        let w = jf - j0 as f64;
        let ray = |j: usize| {
            let col: Vec<f64> = (0..=self.nx).map(|i| self.at(i, j)).collect();
            let x = self.x_of(r, self.theta(j)).clamp(0.0, 1.0);
            interp::lagrange4_uniform(&col, 0.0, self.hx(), x)
        };
        (1.0 - w) * ray(j0) + w * ray(j0 + 1)
    }

    /// Spherical mean `(1/2) int phi(r, theta) sin(theta) dtheta` on a
    /// coordinate sphere lying inside the grid.
    pub fn spherical_mean(&self, r: f64) -> f64 {
        let ht = self.htheta();
        let mut s = 0.0;
        for j in 0..=self.ntheta {
            let t = self.theta(j);
            let col: Vec<f64> = (0..=self.nx).map(|i| self.at(i, j)).collect();
            let x = self.x_of(r, t);
            let w = if j == 0 || j == self.ntheta { 0.5 } else { 1.0 };
            s += w * t.sin() * interp::lagrange4_uniform(&col, 0.0, self.hx(), x);
        }
        0.5 * s * ht
    }
}

pub(crate) fn map_point(curve: &MeridianCurve, big_r: f64, x: f64, theta: f64) -> MapPoint {
    let (rb, rb1, _) = curve.eval(theta);
    let l = (big_r / rb).ln();
    let r = rb * (x * l).exp();
    MapPoint { r, r_x: r * l, r_theta: r * (1.0 - x) * rb1 / rb }
}

/// Weighted conormal coefficients `(A_xx, A_xtheta, A_thetatheta)` times
/// `2 pi u^2 sin(theta)`, so that the energy density is
/// `A_xx phi_x^2 + 2 A_xt phi_x phi_t + A_tt phi_t^2`.
fn conormal(metric: &RadialConformalMetric, p: MapPoint, theta: f64) -> (f64, f64, f64) {
    let u = metric.profile.value(p.r);
    let w = 2.0 * PI * u * u * theta.sin();
    (w * (p.r * p.r + p.r_theta * p.r_theta) / p.r_x, -w * p.r_theta, w * p.r_x)
}

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

fn assemble(curve: &MeridianCurve, metric: &RadialConformalMetric, big_r: f64, nx: usize, nt: usize) -> Stencil9 {
    let (hx, ht) = (1.0 / nx as f64, PI / nt as f64);
    let mut k = Stencil9::zeros(nx + 1, nt + 1);
    // local node order: (0,0), (1,0), (0,1), (1,1) in (di, dj)
    const OFF: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
    for i in 0..nx {
        for j in 0..nt {
            let mut ke = [[0.0; 4]; 4];
            for &xi in &GAUSS {
                for &eta in &GAUSS {
                    let x = (i as f64 + xi) * hx;
                    let th = (j as f64 + eta) * ht;
                    let p = map_point(curve, big_r, x, th);
                    let (axx, axt, att) = conormal(metric, p, th);
                    let grads: [(f64, f64); 4] = [
                        (-(1.0 - eta) / hx, -(1.0 - xi) / ht),
                        ((1.0 - eta) / hx, -xi / ht),
                        (-eta / hx, (1.0 - xi) / ht),
                        (eta / hx, xi / ht),
                    ];
                    let wq = 0.25 * hx * ht;
                    for a in 0..4 {
                        for b in 0..4 {
                            let (ax, at) = grads[a];
                            let (bx, bt) = grads[b];
                            ke[a][b] += wq * (axx * ax * bx + axt * (ax * bt + at * bx) + att * at * bt);
                        }
                    }
                }
            }
            for a in 0..4 {
                for b in 0..4 {
                    let (ia, ja) = (i + OFF[a].0, j + OFF[a].1);
                    let (ib, jb) = (i + OFF[b].0, j + OFF[b].1);
                    k.add(ia, ja, ib as isize - ia as isize, jb as isize - ja as isize, ke[a][b]);
                }
            }
        }
    }
    // Robin closure on the truncation sphere: int u^2 kappa phi v dA
    let (u, u1, _) = metric.profile.eval(big_r);
    let kappa = 1.0 / big_r + u1 / u;
    for j in 0..nt {
        let mut me = [[0.0; 2]; 2];
        for &eta in &GAUSS {
            let th = (j as f64 + eta) * ht;
            let w = 0.5 * ht * 2.0 * PI * big_r * big_r * u * u * kappa * th.sin();
            let n = [1.0 - eta, eta];
            for a in 0..2 {
                for b in 0..2 {
                    me[a][b] += w * n[a] * n[b];
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                k.add(nx, j + a, 0, b as isize - a as isize, me[a][b]);
            }
        }
    }
    k
}

/// One discrete solve; no error estimation.
pub(crate) struct RawSolve {
    pub field: MeridianField,
    pub layer_flux: Vec<(f64, f64)>,
    pub energy_capacity: f64,
    pub iterations: usize,
}

pub(crate) fn solve_once(
    curve: &MeridianCurve,
    metric: &RadialConformalMetric,
    big_r: f64,
    nx: usize,
    nt: usize,
    tol: f64,
) -> Result<RawSolve> {
    let k = assemble(curve, metric, big_r, nx, nt);
    let n = (nx + 1) * (nt + 1);
    let mut phi = vec![0.0; n];
    // initial guess: the exact monopole of harmonically flat metrics
    for j in 0..=nt {
        let th = PI * j as f64 / nt as f64;
        let rb = curve.radius(th);
        let ub = metric.profile.value(rb);
        for i in 0..=nx {
            let r = map_point(curve, big_r, i as f64 / nx as f64, th).r;
            phi[i * (nt + 1) + j] = if i == 0 { 1.0 } else { ub * rb / (metric.profile.value(r) * r) };
        }
    }
    let b = vec![0.0; n];
    let report = solve_pcg(&k, 1, &mut phi, &b, CgOptions { rel_tol: tol, ..CgOptions::default() })?;
    let energy_capacity = k.quadratic_form(&phi) / (4.0 * PI);
    let field = MeridianField {
        boundary: curve.clone(),
        metric: metric.clone(),
        truncation_radius: big_r,
        nx,
        ntheta: nt,
        values: phi,
    };
    let layer_flux = extraction_layers(nx).into_iter().map(|i| layer_capacity(&field, i)).collect();
    Ok(RawSolve { field, layer_flux, energy_capacity, iterations: report.iterations })
}

/// Cell rows whose mid-lines carry the flux samples: six rows spread over
/// the middle of the strip.
fn extraction_layers(nx: usize) -> Vec<usize> {
    let mut rows: Vec<usize> =
        [0.15, 0.29, 0.43, 0.57, 0.71, 0.85].iter().map(|f| ((f * nx as f64) as usize).min(nx - 1)).collect();
    rows.dedup();
    rows
}

/// `(mean radius, capacity)` from the flux through the mid-line of cell row `i`.
fn layer_capacity(f: &MeridianField, i: usize) -> (f64, f64) {
    let (hx, ht) = (f.hx(), f.htheta());
    let x = (i as f64 + 0.5) * hx;
    let mut flux = 0.0;
    let mut radius = 0.0;
    for j in 0..f.ntheta {
        let th = (j as f64 + 0.5) * ht;
        let p = f.map(x, th);
        let (axx, axt, _) = conormal(&f.metric, p, th);
        let px = 0.5 * ((f.at(i + 1, j) - f.at(i, j)) + (f.at(i + 1, j + 1) - f.at(i, j + 1))) / hx;
        let pt = 0.5 * ((f.at(i, j + 1) - f.at(i, j)) + (f.at(i + 1, j + 1) - f.at(i + 1, j))) / ht;
        flux += (axx * px + axt * pt) * ht;
        radius += 0.5 * p.r * th.sin() * ht;
    }
    (radius, -flux / (4.0 * PI))
}

/// Relative spread `(max - min) / mean` of the layer capacities.
pub(crate) fn spread(samples: &[(f64, f64)]) -> (f64, f64) {
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64;
    let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.1), b.max(s.1)));
    (mean, (hi - lo) / mean.abs())
}

/// `int_r^inf ds / (s^2 u^2)`: the radial harmonic function of the metric.
pub(crate) fn radial_harmonic(metric: &RadialConformalMetric, r: f64) -> Result<f64> {
    numerics::integrate_to_infinity(
        |s| {
            let u = metric.profile.value(s);
            1.0 / (s * s * u * u)
        },
        r,
        numerics::QuadOptions::default(),
    )
}

/// Solves the axisymmetric capacity problem.
pub fn capacity_axisym_fd(domain: &AxisymDomainSpec) -> Result<CapacitySolution> {
    domain.validate()?;
    solve_validated(domain)
}

pub(crate) fn solve_validated(domain: &AxisymDomainSpec) -> Result<CapacitySolution> {
    let (nx, nt) = domain.grid;
    let opts = domain.options;
    let main = solve_once(&domain.boundary, &domain.metric, domain.truncation_radius, nx, nt, opts.solver_tol)?;
    let (capacity, layer_spread) = spread(&main.layer_flux);
    let grid_error = if opts.estimate_grid_error {
        let coarse =
            solve_once(&domain.boundary, &domain.metric, domain.truncation_radius, nx / 2, nt / 2, opts.solver_tol)?;
        let (c2, _) = spread(&coarse.layer_flux);
        Some((capacity - c2).abs() / 3.0)
    } else {
        None
    };
    let tolerance = opts.spread_factor * grid_error.map(|e| e / capacity).unwrap_or(0.0).max(1e-4);
    if layer_spread > tolerance {
        return Err(Error::FluxSpread { spread: layer_spread, tolerance });
    }
    let truncation_error = if opts.estimate_truncation_error {
        let big = 2.0 * domain.truncation_radius;
        let (lo, _) = domain.boundary.radius_range();
        let stretch = (big / lo).ln() / (domain.truncation_radius / lo).ln();
        let nx2 = ((nx as f64) * stretch).ceil() as usize;
        let far = solve_once(&domain.boundary, &domain.metric, big, nx2, nt, opts.solver_tol)?;
        Some((spread(&far.layer_flux).0 - capacity).abs())
    } else {
        None
    };
    let mut sol = CapacitySolution {
        capacity,
        potential: Potential::Meridian(main.field),
        flux_samples: main.layer_flux,
        flux_spread: layer_spread,
        asymptotic_coefficient: f64::NAN,
        energy_capacity: Some(main.energy_capacity),
        grid_error,
        truncation_error,
        solver_iterations: Some(main.iterations),
    };
    sol.asymptotic_coefficient = super::asymptotic_fit(&sol)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_sphere() {
        let d = AxisymDomainSpec::new(MeridianCurve::sphere(3.0), RadialConformalMetric::flat(0.5), (128, 64));
        let s = capacity_axisym_fd(&d).unwrap();
        assert!((s.capacity - 3.0).abs() < 0.01 * 3.0, "{}", s.capacity);
        assert!(s.flux_spread < 1e-3);
        assert!((s.asymptotic_coefficient - s.capacity).abs() < 1e-3 * s.capacity);
        let f = match &s.potential {
            Potential::Meridian(f) => f,
            _ => unreachable!(),
        };
        assert!(f.values[(f.ntheta + 1)..].iter().all(|v| *v > 0.0 && *v < 1.0));
    }
}
