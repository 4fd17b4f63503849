//! Axisymmetric closed surfaces given by a meridian `r = r(theta)` in the
//! flat coordinate picture, and their geometry in a conformal metric.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RadialConformalMetric;
use crate::numerics::{ChebGrid, CubicSpline};

/// Meridian `r(theta)`, `theta` in `[0, pi]` measured from the symmetry axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeridianCurve {
    Sphere {
        r0: f64,
    },
    /// Ellipsoid of revolution with the given equatorial and polar semi-axes.
    Spheroid {
        equatorial: f64,
        polar: f64,
    },
    /// `r0 (1 + sum_k c_k mu^{2k})`, `mu = cos(theta)`, `k = 1, 2, ...`.
    MuPolynomial {
        r0: f64,
        coeffs: Vec<f64>,
    },
    Samples(SampledCurve),
}

/// `r(theta)` samples interpolated by a cubic spline with zero end slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct SampledCurve {
    spline: CubicSpline,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    theta: Vec<f64>,
    r: Vec<f64>,
}

impl TryFrom<RawCurve> for SampledCurve {
    type Error = Error;
    fn try_from(raw: RawCurve) -> Result<Self> {
        SampledCurve::new(&raw.theta, &raw.r)
    }
}

impl From<SampledCurve> for RawCurve {
    fn from(c: SampledCurve) -> Self {
        RawCurve { theta: c.spline.knots().to_vec(), r: c.spline.values().to_vec() }
    }
}

impl SampledCurve {
    /// From `(theta, r)` CSV rows running pole to pole.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let cols = crate::geometry::parse_csv_columns(text, 2)?;
        Self::new(&cols[0], &cols[1])
    }

    pub fn new(theta: &[f64], r: &[f64]) -> Result<Self> {
        if theta.len() < 4 {
            return Err(Error::InvalidInput("a sampled meridian needs at least 4 points".into()));
        }
        let (first, last) = (theta[0], theta[theta.len() - 1]);
        if first.abs() > 1e-12 || (last - PI).abs() > 1e-12 {
            return Err(Error::InvalidInput("meridian samples must run from the pole theta = 0 to theta = pi".into()));
        }
        if r.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput("meridian radii must be positive".into()));
        }
        Ok(Self { spline: CubicSpline::clamped(theta, r, 0.0, 0.0)? })
    }

    pub fn theta(&self) -> &[f64] {
        self.spline.knots()
    }

    pub fn radii(&self) -> &[f64] {
        self.spline.values()
    }
}

impl MeridianCurve {
    pub fn sphere(r0: f64) -> Self {
        MeridianCurve::Sphere { r0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            MeridianCurve::Sphere { r0 } => *r0 > 0.0,
            MeridianCurve::Spheroid { equatorial, polar } => *equatorial > 0.0 && *polar > 0.0,
            MeridianCurve::MuPolynomial { r0, .. } => *r0 > 0.0,
            MeridianCurve::Samples(_) => true,
        };
        if !ok {
            return Err(Error::InvalidInput("meridian size parameters must be positive".into()));
        }
        if (0..=400).any(|k| !(self.eval(PI * k as f64 / 400.0).0 > 0.0)) {
            return Err(Error::InvalidInput("meridian radius must stay positive".into()));
        }
        Ok(())
    }

    /// `(r, dr/dtheta, d2r/dtheta2)`.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            MeridianCurve::Sphere { r0 } => (*r0, 0.0, 0.0),
            MeridianCurve::Spheroid { equatorial: a, polar: c } => {
                let (s, co) = theta.sin_cos();
                let k = 1.0 / (a * a) - 1.0 / (c * c);
                let q = s * s / (a * a) + co * co / (c * c);
                let q1 = 2.0 * s * co * k;
                let q2 = 2.0 * (co * co - s * s) * k;
                let r = q.powf(-0.5);
                let r1 = -0.5 * q.powf(-1.5) * q1;
                let r2 = 0.75 * q.powf(-2.5) * q1 * q1 - 0.5 * q.powf(-1.5) * q2;
                (r, r1, r2)
            }
            MeridianCurve::MuPolynomial { r0, coeffs } => {
                let (s, mu) = theta.sin_cos();
                let (mut p, mut p1, mut p2) = (1.0, 0.0, 0.0);
                for (i, c) in coeffs.iter().enumerate() {
                    let n = 2 * (i + 1) as i32;
                    let nf = n as f64;
                    p += c * mu.powi(n);
                    p1 += c * nf * mu.powi(n - 1);
                    p2 += c * nf * (nf - 1.0) * mu.powi(n - 2);
                }
                (r0 * p, -r0 * p1 * s, r0 * (p2 * s * s - p1 * mu))
            }
            MeridianCurve::Samples(c) => c.spline.eval(theta),
        }
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.eval(theta).0
    }

    /// `(min r, max r)` over a fine theta scan.
    pub fn radius_range(&self) -> (f64, f64) {
        (0..=2000)
            .map(|k| self.radius(PI * k as f64 / 2000.0))
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    pub fn is_round(&self) -> bool {
        let (lo, hi) = self.radius_range();
        hi - lo <= 1e-12 * hi
    }

    /// Euclidean volume enclosed, `(2 pi / 3) int r^3 sin(theta)`.
    pub fn flat_volume(&self) -> f64 {
        let g = ChebGrid::new(256, 0.0, PI);
        let v: Vec<f64> = g.nodes().iter().map(|&t| self.radius(t).powi(3) * t.sin()).collect();
        2.0 * PI / 3.0 * g.integrate(&v)
    }
}

/// Flat mean curvature, outward, of the surface `r(theta)` from
/// `(r, r_theta, r_thetatheta)`. On the axis `(r'/r) cot(theta)` is
/// replaced by its limit `r''/r`.
pub fn flat_mean_curvature((r, r1, r2): (f64, f64, f64), theta: f64, on_axis: bool) -> f64 {
    let speed = (r * r + r1 * r1).sqrt();
    // meridian curvature of the planar curve in polar form
    let k1 = (r * r + 2.0 * r1 * r1 - r * r2) / speed.powi(3);
    let k2 = if on_axis {
        (1.0 - r2 / r) / speed
    } else {
        let (s, c) = theta.sin_cos();
        (1.0 - r1 / r * c / s) / speed
    };
    k1 + k2
}

/// Pointwise geometry of an axisymmetric surface in `u^4 g0`, sampled on a
/// Chebyshev–Lobatto grid in theta.
#[derive(Debug, Clone)]
pub struct SurfaceSamples {
    pub grid: ChebGrid,
    /// Coordinate radius.
    pub r: Vec<f64>,
    /// Mean curvature in `g`, normal toward infinity.
    pub h: Vec<f64>,
    /// Flat mean curvature of the coordinate surface.
    pub h_flat: Vec<f64>,
    /// `g`-area density per unit theta (without the `2 pi`).
    pub area_density: Vec<f64>,
    /// Induced metric: distance to the axis and meridian speed, both in `g`.
    pub rho: Vec<f64>,
    pub speed: Vec<f64>,
}

impl SurfaceSamples {
    pub fn compute(metric: &RadialConformalMetric, curve: &MeridianCurve, n: usize) -> Result<Self> {
        curve.validate()?;
        let grid = ChebGrid::new(n, 0.0, PI);
        let len = grid.len();
        let mut out = Self {
            r: Vec::with_capacity(len),
            h: Vec::with_capacity(len),
            h_flat: Vec::with_capacity(len),
            area_density: Vec::with_capacity(len),
            rho: Vec::with_capacity(len),
            speed: Vec::with_capacity(len),
            grid: grid.clone(),
        };
        for (j, &t) in grid.nodes().iter().enumerate() {
            let (r, r1, r2) = curve.eval(t);
            metric.check(r)?;
            let (u, u1, _) = metric.profile.eval(r);
            let speed = (r * r + r1 * r1).sqrt();
            let s = t.sin();
            let h0 = flat_mean_curvature((r, r1, r2), t, j == 0 || j + 1 == len);
            let h = (h0 + 4.0 * u1 / u * r / speed) / (u * u);
            out.r.push(r);
            out.h_flat.push(h0);
            out.h.push(h);
            out.area_density.push(u.powi(4) * r * s * speed);
            out.rho.push(u * u * r * s);
            out.speed.push(u * u * speed);
        }
        Ok(out)
    }

    pub fn area(&self) -> f64 {
        2.0 * PI * self.grid.integrate(&self.area_density)
    }

    pub fn total_mean_curvature(&self) -> f64 {
        let v: Vec<f64> = self.h.iter().zip(&self.area_density).map(|(h, a)| h * a).collect();
        2.0 * PI * self.grid.integrate(&v)
    }

    pub fn total_mean_curvature_sq(&self) -> f64 {
        let v: Vec<f64> = self.h.iter().zip(&self.area_density).map(|(h, a)| h * h * a).collect();
        2.0 * PI * self.grid.integrate(&v)
    }

    pub fn theta(&self) -> &[f64] {
        self.grid.nodes()
    }
}
