//! One-dimensional interpolants: cubic splines, monotone (PCHIP) cubics and
//! four-point Lagrange interpolation on uniform grids.

use crate::error::{Error, Result};

/// Cubic spline with prescribed end slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    /// Clamped spline: `slope_start`, `slope_end` are the end derivatives.
    pub fn clamped(x: &[f64], y: &[f64], slope_start: f64, slope_end: f64) -> Result<Self> {
        check_knots(x, y, 3)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        // Tridiagonal system for the knot second derivatives.
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        b[0] = h[0] / 3.0;
        c[0] = h[0] / 6.0;
        d[0] = (y[1] - y[0]) / h[0] - slope_start;
        for i in 1..n - 1 {
            a[i] = h[i - 1] / 6.0;
            b[i] = (h[i - 1] + h[i]) / 3.0;
            c[i] = h[i] / 6.0;
            d[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        }
        a[n - 1] = h[n - 2] / 6.0;
        b[n - 1] = h[n - 2] / 3.0;
        d[n - 1] = slope_end - (y[n - 1] - y[n - 2]) / h[n - 2];
        let m = solve_tridiagonal(&a, &b, &c, &d);
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    fn locate(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value, first and second derivative at `t` (linear extrapolation of
    /// the end cubic outside the knots).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let d1 =
            (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi + (3.0 * b * b - 1.0) / 6.0 * h * mj;
        let d2 = a * mi + b * mj;
        (v, d1, d2)
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }
}

fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

fn check_knots(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("knot and value lengths differ".into()));
    }
    if x.len() < min {
        return Err(Error::InvalidInput(format!("need at least {min} knots, got {}", x.len())));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("knots must be strictly increasing".into()));
    }
    Ok(())
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        check_knots(x, y, 2)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
            return Ok(Self { x: x.to_vec(), y: y.to_vec(), d });
        }
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self { x: x.to_vec(), y: y.to_vec(), d })
    }

    fn locate(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let d00 = 6.0 * s * s - 6.0 * s;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        (d00 * self.y[i] + d01 * self.y[i + 1]) / h + d10 * self.d[i] + d11 * self.d[i + 1]
    }

    /// Knot slopes.
    pub fn slopes(&self) -> &[f64] {
        &self.d
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Four-point Lagrange interpolation on a uniform grid `x0 + i h`.
pub fn lagrange4_uniform(values: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 4);
    let s = (x - x0) / h;
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64;
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    l0 * values[i] + l1 * values[i + 1] + l2 * values[i + 2] + l3 * values[i + 3]
}

/// Fourth-order finite-difference derivative of uniformly spaced samples;
/// one-sided five-point stencils at the two ends on each side.
pub fn uniform_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least five samples");
    let v = values;
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]
            } else if i < 2 {
                let j = i; // forward stencils
                if j == 0 {
                    -25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]
                } else {
                    -3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]
                }
            } else if i == n - 1 {
                25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]
            } else {
                3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]
            };
            d / (12.0 * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamped_spline_reproduces_cubic() {
        let x: Vec<f64> = (0..9).map(|i| i as f64 * 0.4).collect();
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::clamped(&x, &y, -2.0, 3.0 * 3.2 * 3.2 - 2.0).unwrap();
        let (v, d1, d2) = s.eval(1.37);
        assert!((v - f(1.37)).abs() < 1e-12);
        assert!((d1 - (3.0 * 1.37 * 1.37 - 2.0)).abs() < 1e-11);
        assert!((d2 - 6.0 * 1.37).abs() < 1e-10);
    }

    #[test]
    fn pchip_preserves_monotonicity() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 0.1, 0.2, 5.0, 5.1];
        let p = Pchip::new(&x, &y).unwrap();
        let mut last = -1.0;
        for k in 0..=400 {
            let v = p.value(k as f64 * 0.01);
            assert!(v >= last - 1e-15);
            last = v;
        }
        assert!(p.slopes().iter().all(|d| *d >= 0.0));
    }

    #[test]
    fn fourth_order_derivative() {
        let h = 0.05;
        let v: Vec<f64> = (0..40).map(|i| (i as f64 * h).sin()).collect();
        let d = uniform_derivative(&v, h);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * h).cos()).abs() < 2e-6, "{i}");
        }
    }

    #[test]
    fn lagrange_cubic_exact() {
        let v: Vec<f64> = (0..10).map(|i| (i as f64 * 0.5).powi(3)).collect();
        let x = 2.3;
        assert!((lagrange4_uniform(&v, 0.0, 0.5, x) - x * x * x).abs() < 1e-12);
    }
}
