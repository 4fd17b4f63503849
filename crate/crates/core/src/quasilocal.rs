//! Surfaces of revolution: abstract metrics, their embeddings in flat space,
//! and the quasi-local quantities built on top (Hawking mass, Brown–York
//! mass, Lambda).
//!
//! A metric `ds^2 + rho(s)^2 dtheta^2` is stored through a meridian
//! parameter `t` in `[0, pi]`: `rho(t)` together with the speed
//! `sigma(t) = ds/dt`, both sampled on a Chebyshev–Lobatto grid. The
//! representation is spectrally accurate for smooth closed spheres.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RadialConformalMetric;
use crate::numerics::{ChebGrid, CubicSpline};
use crate::surface::{MeridianCurve, SurfaceSamples};

/// Default number of Chebyshev intervals along the meridian. Pole
/// curvatures need second derivatives at the interval ends, whose rounding
/// error grows like the fourth power of this number.
pub const DEFAULT_NODES: usize = 96;

/// Which unit normal a mean curvature refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanCurvatureConvention {
    /// Pointing to the asymptotically flat end (also: out of the compact
    /// region between two surfaces, at the outer one).
    #[default]
    TowardInfinity,
    /// Pointing out of the exterior region, into the hole; a round sphere
    /// then has negative mean curvature.
    OutOfExterior,
}

impl MeanCurvatureConvention {
    /// Factor converting a toward-infinity mean curvature into this one.
    pub fn sign(self) -> f64 {
        match self {
            MeanCurvatureConvention::TowardInfinity => 1.0,
            MeanCurvatureConvention::OutOfExterior => -1.0,
        }
    }
}

impl fmt::Display for MeanCurvatureConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeanCurvatureConvention::TowardInfinity => "toward_infinity",
            MeanCurvatureConvention::OutOfExterior => "out_of_exterior",
        })
    }
}

/// Abstract metric `ds^2 + rho^2 dtheta^2` on a sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionSurfaceMetric {
    grid: ChebGrid,
    rho: Vec<f64>,
    speed: Vec<f64>,
}

impl RevolutionSurfaceMetric {
    /// From nodal values of `rho(t)` and `sigma(t)` on `ChebGrid::new(n, 0, pi)`.
    pub fn from_nodes(grid: ChebGrid, mut rho: Vec<f64>, speed: Vec<f64>) -> Result<Self> {
        if grid.len() != rho.len() || grid.len() != speed.len() {
            return Err(Error::InvalidInput("profile length does not match the grid".into()));
        }
        let scale = rho.iter().cloned().fold(0.0, f64::max);
        if !(scale > 0.0) || speed.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidInput("profile must be positive with positive meridian speed".into()));
        }
        let n = rho.len();
        for end in [0, n - 1] {
            if rho[end].abs() > 1e-8 * scale {
                return Err(Error::InvalidInput(format!("profile does not close at a pole (rho = {})", rho[end])));
            }
            rho[end] = 0.0;
        }
        if rho[1..n - 1].iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput("profile vanishes away from the poles".into()));
        }
        let m = Self { grid, rho, speed };
        let slope = m.rho_s();
        if (slope[0] - 1.0).abs() > 1e-4 || (slope[n - 1] + 1.0).abs() > 1e-4 {
            return Err(Error::InvalidInput(format!(
                "profile is singular at a pole (rho' = {} and {})",
                slope[0],
                slope[n - 1]
            )));
        }
        Ok(m)
    }

    pub fn from_fns(n: usize, rho: impl Fn(f64) -> f64, speed: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = ChebGrid::new(n, 0.0, PI);
        let r = grid.nodes().iter().map(|&t| rho(t)).collect();
        let s = grid.nodes().iter().map(|&t| speed(t)).collect();
        Self::from_nodes(grid, r, s)
    }

    pub fn round(radius: f64) -> Result<Self> {
        Self::from_fns(DEFAULT_NODES, |t| radius * t.sin(), |_| radius)
    }

    /// Flat metric of the ellipsoid of revolution with the given semi-axes.
    ///
    /// The speed has complex singularities at distance ~ min/max axis from
    /// the real line, so the node count grows with the aspect ratio.
    pub fn spheroid(equatorial: f64, polar: f64) -> Result<Self> {
        let (a, c) = (equatorial, polar);
        let ratio = a.max(c) / a.min(c);
        let n = DEFAULT_NODES.max((48.0 * ratio).ceil() as usize).min(4096);
        Self::from_fns(n, |t| a * t.sin(), |t| (a * a * t.cos().powi(2) + c * c * t.sin().powi(2)).sqrt())
    }

    /// From `rho` as a function of arclength on `[0, length]`.
    pub fn from_arclength_fn(length: f64, rho: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fns(DEFAULT_NODES, |t| rho(length * t / PI), |_| length / PI)
    }

    /// From `(s, rho)` samples, interpolated by a cubic spline with the
    /// closing slopes `rho'(0) = 1`, `rho'(L) = -1`.
    pub fn from_arclength_samples(s: &[f64], rho: &[f64]) -> Result<Self> {
        if s.is_empty() || s[0].abs() > 1e-12 {
            return Err(Error::InvalidInput("arclength samples must start at s = 0".into()));
        }
        let length = s[s.len() - 1];
        let spline = CubicSpline::clamped(s, rho, 1.0, -1.0)?;
        Self::from_arclength_fn(length, |x| spline.eval(x).0)
    }

    pub fn grid(&self) -> &ChebGrid {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    /// Meridian length `L`.
    pub fn length(&self) -> f64 {
        self.grid.integrate(&self.speed)
    }

    pub fn area(&self) -> f64 {
        let v: Vec<f64> = self.rho.iter().zip(&self.speed).map(|(r, s)| r * s).collect();
        2.0 * PI * self.grid.integrate(&v)
    }

    pub fn area_radius(&self) -> f64 {
        (self.area() / (4.0 * PI)).sqrt()
    }

    /// Arclength at the nodes.
    pub fn arclength(&self) -> Vec<f64> {
        self.grid.cumulative_integral(&self.speed)
    }

    fn rho_t(&self) -> Vec<f64> {
        self.grid.differentiate(&self.rho)
    }

    /// `d rho / ds` at the nodes.
    pub fn rho_s(&self) -> Vec<f64> {
        self.rho_t().iter().zip(&self.speed).map(|(d, s)| d / s).collect()
    }

    /// `rho = sin(t) q(t)`: nodal `q` with its first two derivatives.
    ///
    /// `q` is even about each pole, so its pole values come from Neville
    /// extrapolation in `t^2` over the nearest interior nodes rather than from
    /// a spectral derivative, whose endpoint noise the later derivatives
    /// would amplify.
    fn factored(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.rho.len();
        let nodes = self.grid.nodes();
        let mut q: Vec<f64> =
            (0..n).map(|j| if j == 0 || j == n - 1 { 0.0 } else { self.rho[j] / nodes[j].sin() }).collect();
        let k = 6.min(n / 2 - 1);
        let near: Vec<(f64, f64)> = (1..=k).map(|j| (nodes[j].powi(2), q[j])).collect();
        q[0] = neville_at_zero(&near);
        let far: Vec<(f64, f64)> = (1..=k).map(|j| ((PI - nodes[n - 1 - j]).powi(2), q[n - 1 - j])).collect();
        q[n - 1] = neville_at_zero(&far);
        let q_t = self.grid.differentiate(&q);
        let q_tt = self.grid.differentiate(&q_t);
        (q, q_t, q_tt)
    }

    /// `K = -rho''/rho`, with the pole values taken as limits.
    ///
    /// Written through `rho = sin(t) q(t)` so that no small `rho` is ever
    /// divided into a differentiated quantity.
    pub fn gauss_curvature(&self) -> Vec<f64> {
        let n = self.rho.len();
        let nodes = self.grid.nodes();
        let (q, q_t, q_tt) = self.factored();
        let s_t = self.grid.differentiate(&self.speed);
        let s_tt = self.grid.differentiate(&s_t);
        (0..n)
            .map(|j| {
                let (sg, qj) = (self.speed[j], q[j]);
                let bracket = if j == 0 || j == n - 1 {
                    -1.0 + 3.0 * q_tt[j] / qj - s_tt[j] / sg
                } else {
                    let cot = nodes[j].cos() / nodes[j].sin();
                    -1.0 + 2.0 * cot * q_t[j] / qj + q_tt[j] / qj - (cot + q_t[j] / qj) * s_t[j] / sg
                };
                -bracket / (sg * sg)
            })
            .collect()
    }

    /// `(sigma^2 - rho_t^2)` at the nodes, arranged to avoid cancellation
    /// near the poles where `rho_t` approaches `sigma`.
    fn height_rate_sq(&self) -> Vec<f64> {
        let n = self.rho.len();
        let nodes = self.grid.nodes();
        let (q, q_t, _) = self.factored();
        (0..n)
            .map(|j| {
                if j == 0 || j == n - 1 {
                    return 0.0;
                }
                let (s, c) = nodes[j].sin_cos();
                let sg = self.speed[j];
                (sg - q[j]) * (sg + q[j]) + s * s * (q[j] * q[j] - q_t[j] * q_t[j]) - 2.0 * c * s * q[j] * q_t[j]
            })
            .collect()
    }

    pub fn min_gauss_curvature(&self) -> f64 {
        self.gauss_curvature().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `int K dsigma` by quadrature of the pointwise curvature.
    pub fn total_gauss_curvature(&self) -> f64 {
        let k = self.gauss_curvature();
        let v: Vec<f64> = (0..k.len()).map(|j| k[j] * self.rho[j] * self.speed[j]).collect();
        2.0 * PI * self.grid.integrate(&v)
    }

    /// `(s, rho)` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,rho\n");
        for (s, r) in self.arclength().iter().zip(&self.rho) {
            let _ = writeln!(out, "{s:.17e},{r:.17e}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let mut rho = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Option<Vec<f64>> = line.split(',').map(|c| c.trim().parse().ok()).collect();
            match cols {
                Some(v) if v.len() == 2 => {
                    s.push(v[0]);
                    rho.push(v[1]);
                }
                _ if s.is_empty() && i == 0 => continue,
                _ => return Err(Error::Parse { line: i + 1, message: format!("expected `s,rho`, got {line:?}") }),
            }
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("arclength samples must be strictly increasing".into()));
        }
        Self::from_arclength_samples(&s, &rho)
    }
}

fn neville_at_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|v| v.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Isometric embedding `(rho(t), z(t))` in flat space.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedRevolutionSurface {
    grid: ChebGrid,
    rho: Vec<f64>,
    z: Vec<f64>,
    z_t: Vec<f64>,
}

impl EmbeddedRevolutionSurface {
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn grid(&self) -> &ChebGrid {
        &self.grid
    }

    /// Metric induced by flat space on the embedded surface.
    pub fn induced_metric(&self) -> Result<RevolutionSurfaceMetric> {
        let rho_t = self.grid.differentiate(&self.rho);
        let z_t = self.grid.differentiate(&self.z);
        let speed = rho_t.iter().zip(&z_t).map(|(a, b)| a.hypot(*b)).collect();
        RevolutionSurfaceMetric::from_nodes(self.grid.clone(), self.rho.clone(), speed)
    }

    /// `(t, rho, z)` CSV for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho,z\n");
        for ((t, r), z) in self.grid.nodes().iter().zip(&self.rho).zip(&self.z) {
            let _ = writeln!(out, "{t:.17e},{r:.17e},{z:.17e}");
        }
        out
    }
}

/// Slopes beyond `1 + EMBED_SLACK` are real obstructions. Spectral
/// derivatives of spline-sampled meridians (level sets) overshoot 1 near
/// the poles by up to a few `1e-7`.
const EMBED_SLACK: f64 = 1e-6;

/// `z = int sqrt(sigma^2 - rho_t^2) dt`.
pub fn embed_revolution(m: &RevolutionSurfaceMetric) -> Result<EmbeddedRevolutionSurface> {
    let rho_t = m.rho_t();
    let max_slope = rho_t.iter().zip(&m.speed).map(|(d, s)| (d / s).abs()).fold(0.0, f64::max);
    if max_slope > 1.0 + EMBED_SLACK {
        return Err(Error::NotEmbeddable { max_slope });
    }
    let z_t: Vec<f64> = m.height_rate_sq().into_iter().map(|v| v.max(0.0).sqrt()).collect();
    let z = m.grid.cumulative_integral(&z_t);
    Ok(EmbeddedRevolutionSurface { grid: m.grid.clone(), rho: m.rho.clone(), z, z_t })
}

/// `int H0 dsigma` of the embedding, `2 pi int (z_t - alpha rho_t) dt` with
/// `alpha` the meridian tangent angle (the meridian-curvature part
/// integrated by parts).
pub fn total_euclidean_mean_curvature(e: &EmbeddedRevolutionSurface) -> Result<f64> {
    let rho_t = e.grid.differentiate(&e.rho);
    let height = e.z[e.z.len() - 1] - e.z[0];
    if !(height > 0.0) || e.z_t.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateEmbedding(format!("meridian height {height}")));
    }
    let v: Vec<f64> = rho_t.iter().zip(&e.z_t).map(|(&r, &z)| z - z.atan2(r) * r).collect();
    Ok(2.0 * PI * e.grid.integrate(&v))
}

/// `Lambda = (1/8 pi) int H0` for spheres of positive Gauss curvature.
pub fn lambda_invariant(m: &RevolutionSurfaceMetric) -> Result<f64> {
    let min_gauss = m.min_gauss_curvature();
    if !(min_gauss > 0.0) {
        return Err(Error::LambdaUnavailable { min_gauss });
    }
    Ok(total_euclidean_mean_curvature(&embed_revolution(m)?)? / (8.0 * PI))
}

/// `sqrt(|S|/16 pi) (1 - (1/16 pi) int H^2)`.
pub fn hawking_mass(area: f64, total_h_sq: f64) -> f64 {
    (area / (16.0 * PI)).sqrt() * (1.0 - total_h_sq / (16.0 * PI))
}

/// `(1/8 pi)(int H0 - int H)`; `total_h_g` in whichever convention the
/// caller records.
pub fn brown_york_mass(m: &RevolutionSurfaceMetric, total_h_g: f64) -> Result<f64> {
    let min_gauss = m.min_gauss_curvature();
    if !(min_gauss > 0.0) {
        return Err(Error::LambdaUnavailable { min_gauss });
    }
    let h0 = total_euclidean_mean_curvature(&embed_revolution(m)?)?;
    Ok((h0 - total_h_g) / (8.0 * PI))
}

/// Metric induced by `u^4 g0` on an axisymmetric surface.
pub fn induced_metric(metric: &RadialConformalMetric, curve: &MeridianCurve) -> Result<RevolutionSurfaceMetric> {
    let s = SurfaceSamples::compute(metric, curve, DEFAULT_NODES)?;
    RevolutionSurfaceMetric::from_nodes(s.grid, s.rho, s.speed)
}

/// Quasi-local data of one closed surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiLocalReport {
    pub normal: MeanCurvatureConvention,
    pub area: f64,
    pub area_radius: f64,
    /// `int H_g dsigma` in the recorded convention.
    pub total_h_g: f64,
    pub total_h_sq: f64,
    pub total_h_g0: Option<f64>,
    pub hawking: f64,
    pub brown_york: Option<f64>,
    pub lambda: Option<f64>,
    pub min_gauss: f64,
    pub min_h_g: f64,
    pub max_h_g: f64,
    /// `H_g` in the recorded convention at the Chebyshev–Lobatto nodes
    /// `h_theta` in `[0, pi]`.
    pub h_theta: Vec<f64>,
    pub h_g: Vec<f64>,
}

impl QuasiLocalReport {
    /// `(1/8 pi) int H_g dsigma`.
    pub fn mean_h_over_8pi(&self) -> f64 {
        self.total_h_g / (8.0 * PI)
    }

    /// `H_g` at polar angle `theta`, by Chebyshev interpolation.
    pub fn h_g_at(&self, theta: f64) -> f64 {
        let grid = ChebGrid::new(self.h_theta.len() - 1, 0.0, PI);
        grid.evaluate(&grid.coefficients(&self.h_g), theta)
    }
}

pub fn quasilocal_report(
    metric: &RadialConformalMetric,
    curve: &MeridianCurve,
    normal: MeanCurvatureConvention,
) -> Result<QuasiLocalReport> {
    let s = SurfaceSamples::compute(metric, curve, DEFAULT_NODES)?;
    let sign = normal.sign();
    let area = s.area();
    let total_h_g = sign * s.total_mean_curvature();
    let total_h_sq = s.total_mean_curvature_sq();
    let (min_h, max_h) =
        s.h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), h| (a.min(sign * h), b.max(sign * h)));
    let induced = RevolutionSurfaceMetric::from_nodes(s.grid.clone(), s.rho.clone(), s.speed.clone())?;
    let min_gauss = induced.min_gauss_curvature();
    let total_h_g0 = if min_gauss > 0.0 {
        Some(total_euclidean_mean_curvature(&embed_revolution(&induced)?)?)
    } else {
        embed_revolution(&induced).and_then(|e| total_euclidean_mean_curvature(&e)).ok()
    };
    let lambda = if min_gauss > 0.0 { total_h_g0.map(|h| h / (8.0 * PI)) } else { None };
    Ok(QuasiLocalReport {
        normal,
        area,
        area_radius: (area / (4.0 * PI)).sqrt(),
        total_h_g,
        total_h_sq,
        total_h_g0,
        hawking: hawking_mass(area, total_h_sq),
        brown_york: lambda.map(|l| l - total_h_g / (8.0 * PI)),
        lambda,
        min_gauss,
        min_h_g: min_h,
        max_h_g: max_h,
        h_theta: s.grid.nodes().to_vec(),
        h_g: s.h.iter().map(|h| sign * h).collect(),
    })
}
