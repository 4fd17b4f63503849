//! Rotationally symmetric metric families and their pointwise geometry.
//!
//! Everything here is conformally flat, `g = u^4 g0`, or written as a warped
//! product `g = f^2 dr^2 + h^2 g_round`. Conventions: `u` is dimensionless,
//! radii are coordinate radii of the flat background.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, interp, CubicSpline};

/// Finite sum `sum c_k r^{p_k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Laurent {
    pub terms: Vec<(f64, f64)>,
}

impl Laurent {
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        Self { terms }.simplified()
    }

    fn simplified(mut self) -> Self {
        self.terms.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len());
        for (c, p) in self.terms {
            match out.last_mut() {
                Some(last) if last.1 == p => last.0 += c,
                _ => out.push((c, p)),
            }
        }
        out.retain(|t| t.0 != 0.0);
        Self { terms: out }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * r.powf(p)).sum()
    }

    pub fn d1(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * p * r.powf(p - 1.0)).sum()
    }

    pub fn d2(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * p * (p - 1.0) * r.powf(p - 2.0)).sum()
    }

    /// Flat Laplacian of the radial function, `u'' + 2u'/r`.
    pub fn flat_laplacian(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * p * (p + 1.0) * r.powf(p - 2.0)).sum()
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(a, p) in &self.terms {
            for &(b, q) in &other.terms {
                terms.push((a * b, p + q));
            }
        }
        Laurent::new(terms)
    }

    pub fn powi(&self, n: u32) -> Laurent {
        let mut out = Laurent::new(vec![(1.0, 0.0)]);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Closed-form `int_a^b` of the series.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(
                |&(c, p)| {
                    if p == -1.0 {
                        c * (b / a).ln()
                    } else {
                        c * (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
                    }
                },
            )
            .sum()
    }

    /// `s^{-1} u(1/s)`: maps `r^p` to `s^{-1-p}`.
    pub fn kelvin(&self) -> Laurent {
        Laurent::new(self.terms.iter().map(|&(c, p)| (c, -1.0 - p)).collect())
    }
}

/// Conformal factor samples on a log-uniform grid in `r`.
///
/// Values, first and second log-derivatives are stored at the nodes and
/// interpolated with four-point Lagrange cubics. Beyond the last sample the
/// profile continues as `1 + a/r + b/r^2`, matched in value and slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    x0: f64,
    h: f64,
    u: Vec<f64>,
    #[serde(skip)]
    ux: Vec<f64>,
    #[serde(skip)]
    uxx: Vec<f64>,
    #[serde(skip)]
    tail: (f64, f64),
}

impl SampledProfile {
    /// Samples at `r_k = r_first * ratio^k`.
    pub fn log_uniform(r_first: f64, r_last: f64, u: Vec<f64>) -> Result<Self> {
        if u.len() < 5 {
            return Err(Error::InvalidInput("a sampled profile needs at least 5 samples".into()));
        }
        if !(r_first > 0.0 && r_last > r_first) {
            return Err(Error::InvalidInput("sample radii must be positive and increasing".into()));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite conformal factor sample".into()));
        }
        let x0 = r_first.ln();
        let h = (r_last.ln() - x0) / (u.len() - 1) as f64;
        let ux = interp::uniform_derivative(&u, h);
        let uxx = interp::uniform_derivative(&ux, h);
        let mut s = Self { x0, h, u, ux, uxx, tail: (0.0, 0.0) };
        let big = r_last;
        let (v, dv) = (s.u[s.u.len() - 1], s.ux[s.ux.len() - 1] / big);
        let b = -big * big * (v - 1.0 + big * dv);
        let a = -big * big * dv - 2.0 * b / big;
        s.tail = (a, b);
        Ok(s)
    }

    /// Arbitrary increasing radii; resampled onto a log-uniform grid with the
    /// same number of points through a cubic spline in `ln r`.
    pub fn from_samples(r: &[f64], u: &[f64]) -> Result<Self> {
        if r.len() != u.len() || r.len() < 5 {
            return Err(Error::InvalidInput("need at least 5 (r, u) samples".into()));
        }
        if r[0] <= 0.0 {
            return Err(Error::InvalidInput("sample radii must be positive".into()));
        }
        let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();
        let n = r.len();
        let h = (x[n - 1] - x[0]) / (n - 1) as f64;
        let uniform = x.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
        if uniform {
            return Self::log_uniform(r[0], r[n - 1], u.to_vec());
        }
        let end = |i: [usize; 3]| {
            // slope of the quadratic through three samples at its first node
            let (a, b, c) = (x[i[0]], x[i[1]], x[i[2]]);
            let (fa, fb, fc) = (u[i[0]], u[i[1]], u[i[2]]);
            fa * (2.0 * a - b - c) / ((a - b) * (a - c))
                + fb * (a - c) / ((b - a) * (b - c))
                + fc * (a - b) / ((c - a) * (c - b))
        };
        let spline = CubicSpline::clamped(&x, u, end([0, 1, 2]), end([n - 1, n - 2, n - 3]))?;
        let resampled = (0..n).map(|k| spline.eval(x[0] + h * k as f64).0).collect();
        Self::log_uniform(r[0], r[n - 1], resampled)
    }

    pub fn r_first(&self) -> f64 {
        self.x0.exp()
    }

    pub fn r_last(&self) -> f64 {
        (self.x0 + self.h * (self.u.len() - 1) as f64).exp()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.u.len()).map(|k| (self.x0 + self.h * k as f64).exp()).collect()
    }

    pub fn samples(&self) -> &[f64] {
        &self.u
    }

    fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r > self.r_last() {
            let (a, b) = self.tail;
            return (
                1.0 + a / r + b / (r * r),
                -a / (r * r) - 2.0 * b / (r * r * r),
                2.0 * a / (r * r * r) + 6.0 * b / (r * r * r * r),
            );
        }
        let x = r.ln();
        let v = interp::lagrange4_uniform(&self.u, self.x0, self.h, x);
        let vx = interp::lagrange4_uniform(&self.ux, self.x0, self.h, x);
        let vxx = interp::lagrange4_uniform(&self.uxx, self.x0, self.h, x);
        (v, vx / r, (vxx - vx) / (r * r))
    }
}

/// Radial conformal factor `u(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    Laurent(Laurent),
    Sampled(SampledProfile),
    /// `s^{-1} u(1/s)` of the wrapped profile.
    Inverted {
        inner: Box<RadialProfile>,
    },
}

impl RadialProfile {
    pub fn flat() -> Self {
        RadialProfile::Laurent(Laurent::new(vec![(1.0, 0.0)]))
    }

    pub fn schwarzschild(m: f64) -> Self {
        RadialProfile::Laurent(Laurent::new(vec![(1.0, 0.0), (0.5 * m, -1.0)]))
    }

    pub fn laurent(terms: Vec<(f64, f64)>) -> Self {
        RadialProfile::Laurent(Laurent::new(terms))
    }

    /// Value, first and second derivative.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match self {
            RadialProfile::Laurent(l) => (l.value(r), l.d1(r), l.d2(r)),
            RadialProfile::Sampled(s) => s.eval(r),
            RadialProfile::Inverted { inner } => {
                let s = r;
                let (u, u1, u2) = inner.eval(1.0 / s);
                let (s2, s3) = (s * s, s * s * s);
                (u / s, -u / s2 - u1 / s3, 2.0 * u / s3 + 4.0 * u1 / (s2 * s2) + u2 / (s3 * s2))
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Laurent(l) => l.value(r),
            _ => self.eval(r).0,
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Laurent(l) => l.d1(r),
            _ => self.eval(r).1,
        }
    }

    /// `u'' + 2u'/r`.
    pub fn flat_laplacian(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Laurent(l) => l.flat_laplacian(r),
            _ => {
                let (_, u1, u2) = self.eval(r);
                u2 + 2.0 * u1 / r
            }
        }
    }

    /// Kelvin inversion; an exact involution.
    pub fn kelvin(&self) -> RadialProfile {
        match self {
            RadialProfile::Laurent(l) => RadialProfile::Laurent(l.kelvin()),
            RadialProfile::Inverted { inner } => (**inner).clone(),
            other => RadialProfile::Inverted { inner: Box::new(other.clone()) },
        }
    }

    /// Largest radius carried by sample data, if any.
    pub fn sample_extent(&self) -> Option<f64> {
        match self {
            RadialProfile::Laurent(_) => None,
            RadialProfile::Sampled(s) => Some(s.r_last()),
            RadialProfile::Inverted { .. } => None,
        }
    }

    pub fn as_laurent(&self) -> Option<&Laurent> {
        match self {
            RadialProfile::Laurent(l) => Some(l),
            _ => None,
        }
    }
}

/// Schwarzschild data: `u = 1 + m/(2r)` on `[r_min, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzschildSpec {
    pub m: f64,
    pub r_min: f64,
}

impl SchwarzschildSpec {
    /// Default domain: `r_min = m/16` for `m > 0`, reaching well inside the
    /// horizon so both sides of the reflection symmetry are available.
    /// Negative masses need an explicit `r_min` (see [`Self::with_r_min`]).
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidInput("mass must be finite".into()));
        }
        if m > 0.0 {
            Ok(Self { m, r_min: m / 16.0 })
        } else if m == 0.0 {
            Ok(Self { m, r_min: 1e-9 })
        } else {
            Err(Error::InvalidInput(format!("negative mass {m} needs an explicit r_min above {}", m.abs() / 2.0)))
        }
    }

    pub fn with_r_min(m: f64, r_min: f64) -> Result<Self> {
        if !(r_min > 0.0) || !m.is_finite() {
            return Err(Error::InvalidInput("r_min must be positive".into()));
        }
        if m < 0.0 && r_min <= m.abs() / 2.0 {
            return Err(Error::InvalidInput(format!(
                "for m = {m} the metric degenerates at r = {}; r_min = {r_min} is too small",
                m.abs() / 2.0
            )));
        }
        Ok(Self { m, r_min })
    }

    pub fn horizon_radius(&self) -> Option<f64> {
        (self.m > 0.0).then_some(0.5 * self.m)
    }

    fn check(&self, r0: f64) -> Result<()> {
        if !(r0 >= self.r_min) || !r0.is_finite() {
            return Err(Error::DomainViolation { r: r0, start: self.r_min });
        }
        Ok(())
    }

    pub fn conformal_factor(&self, r: f64) -> f64 {
        1.0 + self.m / (2.0 * r)
    }

    pub fn metric(&self) -> RadialConformalMetric {
        RadialConformalMetric { profile: RadialProfile::schwarzschild(self.m), r_b: self.r_min, tau: 1.0 }
    }
}

/// Coordinate sphere `{ r = r0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoordinateSphere {
    pub r0: f64,
}

impl CoordinateSphere {
    pub fn new(r0: f64) -> Self {
        Self { r0 }
    }
}

/// `(1 + m/(2 r0))^2 r0`.
pub fn area_radius(spec: &SchwarzschildSpec, s: CoordinateSphere) -> Result<f64> {
    spec.check(s.r0)?;
    let u = spec.conformal_factor(s.r0);
    Ok(u * u * s.r0)
}

/// Mean curvature of a coordinate sphere, normal toward the distinguished end.
pub fn mean_curvature_sphere(spec: &SchwarzschildSpec, s: CoordinateSphere) -> Result<f64> {
    spec.check(s.r0)?;
    let q = spec.m / (2.0 * s.r0);
    Ok(2.0 * (1.0 - q) / ((1.0 + q).powi(3) * s.r0))
}

/// Mean curvature `2/r_A` of a flat round sphere of area radius `r_a`.
pub fn euclidean_mean_curvature_round(r_a: f64) -> Result<f64> {
    if !(r_a > 0.0) {
        return Err(Error::InvalidInput(format!("area radius must be positive, got {r_a}")));
    }
    Ok(2.0 / r_a)
}

/// Conformally flat metric `u^4 g0` on `r >= r_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialConformalMetric {
    pub profile: RadialProfile,
    pub r_b: f64,
    pub tau: f64,
}

impl RadialConformalMetric {
    pub fn new(profile: RadialProfile, r_b: f64, tau: f64) -> Result<Self> {
        if !(r_b > 0.0) {
            return Err(Error::InvalidInput(format!("domain start must be positive, got {r_b}")));
        }
        if !(tau > 0.5 && tau <= 1.0) {
            return Err(Error::InvalidInput(format!("decay order must lie in (1/2, 1], got {tau}")));
        }
        if let RadialProfile::Sampled(s) = &profile {
            if r_b < s.r_first() * (1.0 - 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "domain start {r_b} lies below the first sample at {}",
                    s.r_first()
                )));
            }
        }
        let metric = Self { profile, r_b, tau };
        let scan_top = metric.far_radius();
        for r in numerics::logspace(r_b, scan_top, 400) {
            let u = metric.profile.value(r);
            if !(u > 0.0) {
                return Err(Error::InvalidInput(format!("conformal factor {u} is not positive at r = {r}")));
            }
        }
        let far = metric.profile.value(1e6 * scan_top);
        if (far - 1.0).abs() > 1e-3 {
            return Err(Error::InvalidInput(format!("conformal factor does not tend to 1 (u = {far} far out)")));
        }
        Ok(metric)
    }

    pub fn flat(r_b: f64) -> Self {
        Self { profile: RadialProfile::flat(), r_b, tau: 1.0 }
    }

    /// A radius comfortably in the asymptotic region.
    fn far_radius(&self) -> f64 {
        let base = 1e3 * self.r_b.max(1.0);
        match self.profile.sample_extent() {
            Some(top) => base.max(top),
            None => base,
        }
    }

    pub fn check(&self, r: f64) -> Result<()> {
        if !(r >= self.r_b * (1.0 - 1e-14)) || !r.is_finite() {
            return Err(Error::DomainViolation { r, start: self.r_b });
        }
        Ok(())
    }

    pub fn u(&self, r: f64) -> f64 {
        self.profile.value(r)
    }

    /// Area radius `u^2 r` of the coordinate sphere.
    pub fn area_radius(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let u = self.u(r);
        Ok(u * u * r)
    }

    /// Mean curvature of the coordinate sphere, normal toward infinity:
    /// `u^{-2} (2/r + 4 u'/u)`.
    pub fn mean_curvature(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let (u, u1, _) = self.profile.eval(r);
        Ok((2.0 / r + 4.0 * u1 / u) / (u * u))
    }

    /// Mean curvature of the round flat sphere with the same area.
    pub fn euclidean_mean_curvature(&self, r: f64) -> Result<f64> {
        euclidean_mean_curvature_round(self.area_radius(r)?)
    }

    /// Largest `r^2 |laplacian u|` over a log grid; zero for harmonic profiles.
    pub fn harmonicity_residual(&self) -> (f64, f64) {
        if let Some(l) = self.profile.as_laurent() {
            // exact: only r^0 and r^-1 are harmonic
            let bad = l.terms.iter().filter(|t| t.1 != 0.0 && t.1 != -1.0).map(|t| t.0.abs()).sum::<f64>();
            if bad == 0.0 {
                return (self.r_b, 0.0);
            }
        }
        let mut worst = (self.r_b, 0.0);
        for r in numerics::logspace(self.r_b, self.far_radius(), 256) {
            let v = (r * r * self.profile.flat_laplacian(r)).abs();
            if v > worst.1 {
                worst = (r, v);
            }
        }
        worst
    }
}

/// `int_a^b u^6 s^2 ds`, so that the `g`-volume between the coordinate
/// spheres `a` and `b` is `4 pi` times this. Signed: negative for `b < a`.
pub fn volume_primitive(metric: &RadialConformalMetric, a: f64, b: f64) -> Result<f64> {
    metric.check(a.min(b))?;
    if let Some(l) = metric.profile.as_laurent() {
        let density = l.powi(6).mul(&Laurent::new(vec![(1.0, 2.0)]));
        return Ok(density.integral(a, b));
    }
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let v = numerics::integrate(|s| metric.u(s).powi(6) * s * s, lo, hi, numerics::QuadOptions::default())?;
    Ok(sign * v)
}

/// `R(u^4 g0) = -8 u^{-5} (u'' + 2u'/r)`.
pub fn scalar_curvature_radial(metric: &RadialConformalMetric, r: f64) -> Result<f64> {
    metric.check(r)?;
    let u = metric.u(r);
    Ok(-8.0 * metric.profile.flat_laplacian(r) / u.powi(5))
}

/// Richardson fit of `r (u - 1) = a + b/r + c/r^2`; returns `2a`.
pub fn adm_mass(metric: &RadialConformalMetric) -> Result<f64> {
    let mut big = 100.0 * metric.r_b.max(1.0);
    if let Some(top) = metric.profile.sample_extent() {
        big = big.min(top / 8.0).max(metric.r_b);
    }
    let fit = |r0: f64| {
        let rows: Vec<Vec<f64>> = [r0, 2.0 * r0, 4.0 * r0].iter().map(|&r| vec![1.0, 1.0 / r, 1.0 / (r * r)]).collect();
        let rhs: Vec<f64> = [r0, 2.0 * r0, 4.0 * r0].iter().map(|&r| r * (metric.u(r) - 1.0)).collect();
        numerics::least_squares(&rows, &rhs).map(|c| c[0])
    };
    let a1 = fit(big).ok_or_else(|| Error::InvalidInput("singular ADM fit".into()))?;
    let a2 = fit(2.0 * big).ok_or_else(|| Error::InvalidInput("singular ADM fit".into()))?;
    let residual = (a1 - a2).abs();
    let tolerance = 1e-6 * a1.abs().max(1.0);
    if !(residual <= tolerance) {
        return Err(Error::FitResidual { residual, tolerance });
    }
    Ok(2.0 * a2)
}

/// Outermost coordinate radius where `(u^2 r)' = 0`.
pub fn locate_horizon(metric: &RadialConformalMetric) -> Option<f64> {
    let g = |r: f64| {
        let (u, u1, _) = metric.profile.eval(r);
        u * u + 2.0 * r * u * u1
    };
    let top = 1e4 * metric.r_b;
    let grid = numerics::logspace(metric.r_b, top, 512);
    let scale = |r: f64| metric.profile.value(r).powi(2);
    for k in (0..grid.len() - 1).rev() {
        let (a, b) = (grid[k], grid[k + 1]);
        let (ga, gb) = (g(a), g(b));
        if gb.abs() <= 1e-14 * scale(b) {
            return Some(b);
        }
        if ga.signum() != gb.signum() {
            return numerics::bisect(g, a, b, 1e-12 * a.max(1e-300));
        }
    }
    let first = grid[0];
    (g(first).abs() <= 1e-14 * scale(first)).then_some(first)
}

/// Kelvin-inverted profile `v(s) = u(1/s)/s` on `(0, 1/r_b]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertedProfile {
    pub profile: RadialProfile,
    pub s_max: f64,
}

pub fn kelvin_invert(metric: &RadialConformalMetric) -> InvertedProfile {
    InvertedProfile { profile: metric.profile.kelvin(), s_max: 1.0 / metric.r_b }
}

/// Rotationally symmetric metric `f^2 dr^2 + h^2 g_round`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WarpedProductMetric {
    /// `f = u^2`, `h = u^2 r`.
    Conformal(RadialConformalMetric),
    /// `f` and the areal ratio `h/r`, both tending to 1.
    Explicit { f: RadialProfile, h_over_r: RadialProfile, r_b: f64 },
}

impl WarpedProductMetric {
    pub fn explicit(f: RadialProfile, h_over_r: RadialProfile, r_b: f64) -> Result<Self> {
        if !(r_b > 0.0) {
            return Err(Error::InvalidInput("domain start must be positive".into()));
        }
        for r in numerics::logspace(r_b, 1e4 * r_b.max(1.0), 200) {
            if !(f.value(r) > 0.0 && h_over_r.value(r) > 0.0) {
                return Err(Error::InvalidInput(format!("warped profiles must be positive (r = {r})")));
            }
        }
        Ok(WarpedProductMetric::Explicit { f, h_over_r, r_b })
    }

    pub fn r_b(&self) -> f64 {
        match self {
            WarpedProductMetric::Conformal(m) => m.r_b,
            WarpedProductMetric::Explicit { r_b, .. } => *r_b,
        }
    }

    /// `(f(r), h(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self {
            WarpedProductMetric::Conformal(m) => {
                let u = m.u(r);
                (u * u, u * u * r)
            }
            WarpedProductMetric::Explicit { f, h_over_r, .. } => (f.value(r), r * h_over_r.value(r)),
        }
    }
}

impl From<RadialConformalMetric> for WarpedProductMetric {
    fn from(m: RadialConformalMetric) -> Self {
        WarpedProductMetric::Conformal(m)
    }
}

/// Reads a two-column `(r, u)` CSV. A non-numeric first line is taken as a
/// header; `#` starts a comment.
pub fn read_profile_csv(path: &Path) -> Result<SampledProfile> {
    let text = std::fs::read_to_string(path)?;
    parse_profile_csv(&text)
}

pub fn parse_profile_csv(text: &str) -> Result<SampledProfile> {
    let cols = parse_csv_columns(text, 2)?;
    SampledProfile::from_samples(&cols[0], &cols[1])
}

/// Parses `n` numeric columns with a strictly increasing first column. A
/// non-numeric first line is taken as a header; `#` starts a comment.
pub fn parse_csv_columns(text: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut cols = vec![Vec::new(); n];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Option<Vec<f64>> = line.split(',').map(|c| c.trim().parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == n => {
                if let Some(&last) = cols[0].last() {
                    if !(v[0] > last) {
                        return Err(Error::Parse {
                            line: i + 1,
                            message: "first column must be strictly increasing".into(),
                        });
                    }
                }
                for (c, x) in cols.iter_mut().zip(v) {
                    c.push(x);
                }
            }
            _ if cols[0].is_empty() && i == 0 => continue,
            _ => return Err(Error::Parse { line: i + 1, message: format!("expected {n} numbers, got {line:?}") }),
        }
    }
    Ok(cols)
}

/// Reads `(r, f, h)` samples of a warped product; the domain starts at the
/// first radius and the samples continue as a `1 + a/r + b/r^2` tail.
pub fn parse_warped_csv(text: &str) -> Result<WarpedProductMetric> {
    let cols = parse_csv_columns(text, 3)?;
    let f = SampledProfile::from_samples(&cols[0], &cols[1])?;
    let ratio: Vec<f64> = cols[0].iter().zip(&cols[2]).map(|(r, h)| h / r).collect();
    let h = SampledProfile::from_samples(&cols[0], &ratio)?;
    WarpedProductMetric::explicit(RadialProfile::Sampled(f), RadialProfile::Sampled(h), cols[0][0])
}

pub fn write_profile_csv(profile: &SampledProfile) -> String {
    let mut out = String::from("r,u\n");
    for (r, u) in profile.radii().iter().zip(profile.samples()) {
        let _ = writeln!(out, "{r:.17e},{u:.17e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn schwarzschild_sphere_quantities() {
        let s = SchwarzschildSpec::new(2.0).unwrap();
        assert!(close(area_radius(&s, CoordinateSphere::new(1.0)).unwrap(), 4.0, 1e-15));
        assert!(close(area_radius(&s, CoordinateSphere::new(2.0)).unwrap(), 4.5, 1e-15));
        assert_eq!(mean_curvature_sphere(&s, CoordinateSphere::new(1.0)).unwrap(), 0.0);
        assert!(close(mean_curvature_sphere(&s, CoordinateSphere::new(2.0)).unwrap(), 4.0 / 27.0, 1e-15));
        let flat = SchwarzschildSpec::new(0.0).unwrap();
        assert!(close(area_radius(&flat, CoordinateSphere::new(5.0)).unwrap(), 5.0, 1e-15));
        assert!(close(mean_curvature_sphere(&flat, CoordinateSphere::new(1.0)).unwrap(), 2.0, 1e-15));
        assert!(close(euclidean_mean_curvature_round(4.5).unwrap(), 4.0 / 9.0, 1e-15));
        assert!(euclidean_mean_curvature_round(0.0).is_err());
        assert!(matches!(area_radius(&s, CoordinateSphere::new(0.01)), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn general_metric_matches_schwarzschild() {
        let s = SchwarzschildSpec::new(2.0).unwrap();
        let g = s.metric();
        for r0 in [0.3, 1.0, 2.0, 7.0] {
            let h = mean_curvature_sphere(&s, CoordinateSphere::new(r0)).unwrap();
            assert!(close(g.mean_curvature(r0).unwrap(), h, 1e-14));
        }
    }

    #[test]
    fn negative_mass_needs_domain() {
        assert!(SchwarzschildSpec::new(-1.0).is_err());
        assert!(SchwarzschildSpec::with_r_min(-1.0, 0.5).is_err());
        assert!(SchwarzschildSpec::with_r_min(-1.0, 0.6).is_ok());
    }

    #[test]
    fn scalar_curvature_signs() {
        let s = SchwarzschildSpec::new(2.0).unwrap().metric();
        assert_eq!(scalar_curvature_radial(&s, 3.0).unwrap(), 0.0);
        let m =
            RadialConformalMetric::new(RadialProfile::laurent(vec![(1.0, 0.0), (1.0, -1.0), (0.1, -2.0)]), 0.5, 1.0)
                .unwrap();
        assert!(scalar_curvature_radial(&m, 2.0).unwrap() < 0.0);
    }

    #[test]
    fn adm_mass_examples() {
        let m =
            RadialConformalMetric::new(RadialProfile::laurent(vec![(1.0, 0.0), (0.75, -1.0), (1.0, -2.0)]), 0.5, 1.0)
                .unwrap();
        assert!(close(adm_mass(&m).unwrap(), 1.5, 1e-8));
        assert!(adm_mass(&RadialConformalMetric::flat(1.0)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn horizon_examples() {
        let s = SchwarzschildSpec::new(2.0).unwrap().metric();
        assert!(close(locate_horizon(&s).unwrap(), 1.0, 1e-12));
        assert!(locate_horizon(&RadialConformalMetric::flat(0.1)).is_none());
        let p = RadialProfile::laurent(vec![(1.0, 0.0), (1.0, -1.0), (-0.02, -3.0)]);
        let m = RadialConformalMetric::new(p, 0.3, 1.0).unwrap();
        let r = locate_horizon(&m).unwrap();
        let (u, u1, _) = m.profile.eval(r);
        assert!((u * u + 2.0 * r * u * u1).abs() < 1e-10);
        assert!(r > 0.8 && r < 0.9, "{r}");
    }

    #[test]
    fn kelvin_involution() {
        let p = RadialProfile::laurent(vec![(1.0, 0.0), (0.3, -1.0), (0.07, -2.5)]);
        let back = p.kelvin().kelvin();
        assert_eq!(back, p);
        let flat = RadialProfile::flat().kelvin();
        assert!(close(flat.value(0.25), 4.0, 1e-15));
        let radii: Vec<f64> = numerics::logspace(0.5, 50.0, 64);
        let samples: Vec<f64> = radii.iter().map(|&r| p.value(r)).collect();
        let sp = RadialProfile::Sampled(SampledProfile::log_uniform(0.5, 50.0, samples).unwrap());
        let twice = sp.kelvin().kelvin();
        for r in [0.7, 3.3, 20.0] {
            assert!((twice.value(r) - sp.value(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_profile_derivatives() {
        let p = RadialProfile::schwarzschild(2.0);
        let radii = numerics::logspace(0.5, 500.0, 400);
        let samples: Vec<f64> = radii.iter().map(|&r| p.value(r)).collect();
        let sp = RadialProfile::Sampled(SampledProfile::log_uniform(0.5, 500.0, samples).unwrap());
        for r in [0.9, 2.0, 37.0, 2000.0] {
            let (a, b) = (sp.eval(r), p.eval(r));
            assert!(close(a.0, b.0, 1e-9), "{r}");
            assert!((a.1 - b.1).abs() < 1e-6, "{r}");
            assert!((a.2 - b.2).abs() < 1e-4, "{r}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let radii = numerics::logspace(1.0, 100.0, 20);
        let text: String = std::iter::once("r,u\n".to_string())
            .chain(radii.iter().map(|r| format!("{r},{}\n", 1.0 + 0.5 / r)))
            .collect();
        let p = parse_profile_csv(&text).unwrap();
        let again = parse_profile_csv(&write_profile_csv(&p)).unwrap();
        assert_eq!(p.samples(), again.samples());
        assert!(matches!(parse_profile_csv("1,2\n0.5,3\n"), Err(Error::Parse { line: 2, .. })));
    }
}
