//! Level sets `{phi = t}` of a solved potential.
//!
//! On the meridian grid each ray `theta_j` is searched for its crossing of
//! `t`; a ray crossing more than once means the level set is not
//! star-shaped about the origin and is rejected. The crossings are joined
//! by a clamped spline in theta, which is then handed to the surface
//! geometry code for area and to the radial volume primitive for volume.

use std::f64::consts::PI;

use serde::Serialize;

use super::{radial_flux, CapacitySolution, MeridianField, Potential, RadialPotential};
use crate::error::{Error, Result};
use crate::geometry::{locate_horizon, volume_primitive, RadialConformalMetric, WarpedProductMetric};
use crate::numerics::{self, interp, ChebGrid, QuadOptions};
use crate::quasilocal::DEFAULT_NODES;
use crate::surface::{MeridianCurve, SampledCurve, SurfaceSamples};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    pub t: f64,
    pub curve: MeridianCurve,
    /// `g`-area.
    pub area: f64,
    /// `g`-volume between the boundary and the level set.
    pub volume: f64,
    /// Volume measured from the horizon, when the metric has one:
    /// negative for level sets inside it.
    pub signed_volume: Option<f64>,
    /// `(1/4pi) int |grad phi| dsigma`.
    pub flux: f64,
    /// `-dV/dt = int dsigma / |grad phi|`.
    pub volume_rate: f64,
    pub min_gradient: f64,
    /// `|grad phi|_g` samples on the level set at polar angles `gradient_theta`.
    pub gradient_theta: Vec<f64>,
    pub gradient: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetData {
    pub levels: Vec<LevelSet>,
    /// Boundary surface and capacity of the solution the levels came from.
    pub boundary: MeridianCurve,
    pub capacity: f64,
    pub capacity_error: f64,
}

impl LevelSetData {
    pub fn thresholds(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.t).collect()
    }

    /// Largest increase of `V` as `t` increases, relative to the volume
    /// scale; zero when `V` is monotone decreasing in `t`.
    pub fn monotonicity_violation(&self) -> f64 {
        let mut sorted: Vec<&LevelSet> = self.levels.iter().collect();
        sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
        let scale = sorted.iter().map(|l| l.volume.abs()).fold(0.0, f64::max).max(1e-300);
        sorted.windows(2).map(|w| (w[1].volume - w[0].volume).max(0.0) / scale).fold(0.0, f64::max)
    }
}

/// `count` Chebyshev-spaced thresholds in `(t_lo, 0.98)`, where `t_lo`
/// keeps every level set inside the truncation sphere.
pub fn default_thresholds(sol: &CapacitySolution, count: usize) -> Vec<f64> {
    let t_lo = match &sol.potential {
        Potential::Radial(_) => 0.02,
        Potential::Meridian(f) => {
            let outer = (0..=f.ntheta).map(|j| f.at(f.nx, j)).fold(0.0, f64::max);
            (1.05 * outer).max(0.02)
        }
    };
    numerics::chebyshev_points(t_lo, 0.98, count)
}

pub fn extract_level_sets(sol: &CapacitySolution, thresholds: &[f64]) -> Result<LevelSetData> {
    let mut levels = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidInput(format!("threshold {t} outside (0, 1)")));
        }
        let level = match &sol.potential {
            Potential::Radial(p) => radial_level(p, t)?,
            Potential::Meridian(f) => meridian_level(f, t)?,
        };
        // regular value check, relative to the mean gradient 4 pi C / area
        let scale = 4.0 * PI * sol.capacity / level.area;
        if level.min_gradient < 1e-4 * scale {
            return Err(Error::NearCriticalLevel { t, min_gradient: level.min_gradient });
        }
        levels.push(level);
    }
    let boundary = match &sol.potential {
        Potential::Radial(p) => MeridianCurve::sphere(p.r0),
        Potential::Meridian(f) => f.boundary.clone(),
    };
    Ok(LevelSetData { levels, boundary, capacity: sol.capacity, capacity_error: sol.error_estimate() })
}

fn radial_level(p: &RadialPotential, t: f64) -> Result<LevelSet> {
    let phi = |r: f64| p.value(r).unwrap_or(f64::NAN) - t;
    let mut hi = 2.0 * p.r0;
    while phi(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 * p.r0 {
            return Err(Error::BadContour { t });
        }
    }
    let r = numerics::bisect(phi, p.r0, hi, 1e-14 * hi).ok_or(Error::BadContour { t })?;
    let (_, h) = p.metric.eval(r);
    let area = 4.0 * PI * h * h;
    let shell = |a: f64, b: f64| -> Result<f64> {
        match &p.metric {
            WarpedProductMetric::Conformal(m) => Ok(4.0 * PI * volume_primitive(m, a, b)?),
            w => {
                let v = numerics::integrate(
                    |s| {
                        let (f, h) = w.eval(s);
                        f * h * h
                    },
                    a.min(b),
                    a.max(b),
                    QuadOptions::default(),
                )?;
                Ok(4.0 * PI * v * (b - a).signum())
            }
        }
    };
    let volume = shell(p.r0, r)?;
    let signed_volume = match &p.metric {
        WarpedProductMetric::Conformal(m) => match locate_horizon(m) {
            Some(rh) => Some(shell(rh, r)?),
            None => None,
        },
        _ => None,
    };
    let grad = p.gradient_norm(r);
    Ok(LevelSet {
        t,
        curve: MeridianCurve::sphere(r),
        area,
        volume,
        signed_volume,
        flux: radial_flux(p, r),
        volume_rate: area / grad,
        min_gradient: grad,
        gradient_theta: vec![0.0],
        gradient: vec![grad],
    })
}

/// Crossing of `t` along ray `j`, as a mapped coordinate `x`.
fn ray_crossing(f: &MeridianField, j: usize, t: f64) -> Result<f64> {
    let col: Vec<f64> = (0..=f.nx).map(|i| f.at(i, j)).collect();
    let mut found = None;
    for i in 0..f.nx {
        let (a, b) = (col[i] - t, col[i + 1] - t);
        if a >= 0.0 && b < 0.0 {
            if found.is_some() {
                return Err(Error::BadContour { t });
            }
            found = Some(i);
        } else if a < 0.0 && b >= 0.0 {
            return Err(Error::BadContour { t });
        }
    }
    let i = found.ok_or(Error::BadContour { t })?;
    let hx = f.hx();
    let g = |x: f64| interp::lagrange4_uniform(&col, 0.0, hx, x) - t;
    let (lo, hi) = (i as f64 * hx, (i + 1) as f64 * hx);
    // the cubic may overshoot the bracket slightly; fall back to linear
    numerics::bisect(g, lo, hi, 1e-14)
        .or_else(|| Some(lo + hx * (col[i] - t) / (col[i] - col[i + 1])))
        .ok_or(Error::BadContour { t })
}

/// Rows next to the axis carry an `O(h^2)` error that is harmless for
/// fluxes (the area element vanishes there) but puts a kink into `r(theta)`,
/// i.e. spurious curvature at the poles. The first `AXIS_ROWS` samples at
/// each pole are replaced by the even fit `a + b s^2 + c s^4` in the
/// distance `s` to the pole, through the next `AXIS_FIT` samples.
const AXIS_ROWS: usize = 3;
const AXIS_FIT: usize = 6;

fn smooth_axis(theta: &[f64], r: &mut [f64]) {
    let n = theta.len();
    if n < 2 * (AXIS_ROWS + AXIS_FIT) + 1 {
        return;
    }
    let poles = [(0..n).collect::<Vec<_>>(), (0..n).rev().collect()];
    for (k, order) in poles.iter().enumerate() {
        let pole = if k == 0 { 0.0 } else { PI };
        let s = |j: usize| (theta[j] - pole).abs();
        let fit = &order[AXIS_ROWS..AXIS_ROWS + AXIS_FIT];
        let rows: Vec<Vec<f64>> = fit.iter().map(|&j| vec![1.0, s(j).powi(2), s(j).powi(4)]).collect();
        let rhs: Vec<f64> = fit.iter().map(|&j| r[j]).collect();
        if let Some(c) = numerics::least_squares(&rows, &rhs) {
            for &j in &order[..AXIS_ROWS] {
                r[j] = c[0] + c[1] * s(j).powi(2) + c[2] * s(j).powi(4);
            }
        }
    }
}

/// Bilinear interpolation of a nodal field at `(x, theta)`.
fn bilinear(f: &MeridianField, v: &[f64], x: f64, theta: f64) -> f64 {
    let xf = (x / f.hx()).clamp(0.0, f.nx as f64);
    let tf = (theta / f.htheta()).clamp(0.0, f.ntheta as f64);
    let i = (xf.floor() as usize).min(f.nx - 1);
    let j = (tf.floor() as usize).min(f.ntheta - 1);
    let (a, b) = (xf - i as f64, tf - j as f64);
    let at = |i: usize, j: usize| v[i * (f.ntheta + 1) + j];
    (1.0 - a) * (1.0 - b) * at(i, j)
        + a * (1.0 - b) * at(i + 1, j)
        + (1.0 - a) * b * at(i, j + 1)
        + a * b * at(i + 1, j + 1)
}

fn meridian_level(f: &MeridianField, t: f64) -> Result<LevelSet> {
    let theta: Vec<f64> = (0..=f.ntheta).map(|j| f.theta(j)).collect();
    let mut radii = Vec::with_capacity(theta.len());
    for (j, &th) in theta.iter().enumerate() {
        let x = ray_crossing(f, j, t)?;
        radii.push(f.map(x, th).r);
    }
    smooth_axis(&theta, &mut radii);
    let curve = MeridianCurve::Samples(SampledCurve::new(&theta, &radii)?);
    let surf = SurfaceSamples::compute(&f.metric, &curve, DEFAULT_NODES)?;
    let area = surf.area();
    let volume = meridian_volume(&f.metric, &f.boundary, &curve)?;
    let signed_volume = match locate_horizon(&f.metric) {
        Some(rh) => Some(meridian_volume(&f.metric, &MeridianCurve::sphere(rh), &curve)?),
        None => None,
    };
    // flux and volume rate on the level curve, from nodal gradients
    let (gx, gt) = f.nodal_gradient();
    let grid = surf.grid.clone();
    let mut flux_density = Vec::with_capacity(grid.len());
    let mut rate_density = Vec::with_capacity(grid.len());
    let mut gradient = Vec::with_capacity(grid.len());
    for &th in grid.nodes() {
        let (r, r1, _) = curve.eval(th);
        let x = f.x_of(r, th);
        let p = f.map(x, th);
        let (px, pt) = (bilinear(f, &gx, x, th), bilinear(f, &gt, x, th));
        let gxx = (p.r_theta * p.r_theta + p.r * p.r) / (p.r_x * p.r_x * p.r * p.r);
        let gxt = -p.r_theta / (p.r_x * p.r * p.r);
        let gtt = 1.0 / (p.r * p.r);
        let grad0 = (gxx * px * px + 2.0 * gxt * px * pt + gtt * pt * pt).max(0.0).sqrt();
        let u = f.metric.u(r);
        let da0 = r * th.sin() * (r * r + r1 * r1).sqrt();
        flux_density.push(u * u * grad0 * da0);
        rate_density.push(if grad0 > 0.0 { u.powi(6) / grad0 * da0 } else { f64::INFINITY });
        gradient.push(grad0 / (u * u));
    }
    let min_gradient = gradient.iter().copied().fold(f64::INFINITY, f64::min);
    let flux = 2.0 * PI * grid.integrate(&flux_density) / (4.0 * PI);
    let volume_rate = 2.0 * PI * grid.integrate(&rate_density);
    Ok(LevelSet {
        t,
        curve,
        area,
        volume,
        signed_volume,
        flux,
        volume_rate,
        min_gradient,
        gradient_theta: grid.nodes().to_vec(),
        gradient,
    })
}

/// `g`-volume between two star-shaped surfaces, `inner` to `outer`.
pub fn meridian_volume(metric: &RadialConformalMetric, inner: &MeridianCurve, outer: &MeridianCurve) -> Result<f64> {
    let grid = ChebGrid::new(DEFAULT_NODES, 0.0, PI);
    let mut v = Vec::with_capacity(grid.len());
    for &th in grid.nodes() {
        v.push(volume_primitive(metric, inner.radius(th), outer.radius(th))? * th.sin());
    }
    Ok(2.0 * PI * grid.integrate(&v))
}
