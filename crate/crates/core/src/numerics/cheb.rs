//! Chebyshev–Lobatto representation of smooth functions on an interval.
//!
//! Used for the meridian parametrizations of surfaces of revolution, where
//! every integrand is smooth on the closed interval and spectral accuracy
//! comes for free.

/// Lobatto grid with `n + 1` nodes on `[a, b]`, ordered from `a` to `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebGrid {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 2, "Chebyshev grid needs at least 3 nodes");
        let nodes = (0..=n)
            .map(|j| {
                let x = -(std::f64::consts::PI * j as f64 / n as f64).cos();
                a + 0.5 * (b - a) * (x + 1.0)
            })
            .collect();
        let weights = clenshaw_curtis_weights(n).into_iter().map(|w| w * 0.5 * (b - a)).collect();
        Self { a, b, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Clenshaw–Curtis quadrature of nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Chebyshev coefficients of the interpolant through nodal values
    /// (ordered from `a` to `b`).
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        let n = self.degree();
        // Node j sits at x = -cos(pi j / n); T_k(-x) = (-1)^k T_k(x).
        let table: Vec<f64> = (0..2 * n).map(|i| (std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
        let mut c = vec![0.0; n + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * table[(k * j) % (2 * n)];
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let scale = if k == 0 || k == n { 1.0 } else { 2.0 };
            *ck = sign * scale * s / n as f64;
        }
        c
    }

    /// Values at the nodes of the interpolant with coefficients `c`.
    pub fn values_from_coefficients(&self, c: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&t| self.evaluate(c, t)).collect()
    }

    /// Clenshaw evaluation of a Chebyshev series at `t` in `[a, b]`.
    pub fn evaluate(&self, c: &[f64], t: f64) -> f64 {
        let x = (2.0 * t - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + c[0]
    }

    /// Coefficients of the derivative with respect to `t`.
    pub fn derivative_coefficients(&self, c: &[f64]) -> Vec<f64> {
        let n = c.len() - 1;
        let mut d = vec![0.0; n + 1];
        if n == 0 {
            return d;
        }
        d[n - 1] = 2.0 * n as f64 * c[n];
        for k in (1..n.saturating_sub(1) + 1).rev() {
            let next = if k < n { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * c[k];
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.b - self.a);
        d.iter_mut().for_each(|v| *v *= scale);
        d
    }

    /// Nodal derivative of nodal values.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let c = self.coefficients(values);
        self.values_from_coefficients(&self.derivative_coefficients(&c))
    }

    /// Nodal values of the running integral `int_a^t f`.
    pub fn cumulative_integral(&self, values: &[f64]) -> Vec<f64> {
        let c = self.coefficients(values);
        let n = c.len() - 1;
        // Integrate termwise in x, then fix the constant so F(a) = 0.
        let mut ic = vec![0.0; n + 2];
        let get = |k: usize| if k <= n { c[k] } else { 0.0 };
        for k in 1..=n + 1 {
            let lower = if k == 1 { 2.0 * get(0) } else { get(k - 1) };
            ic[k] = (lower - get(k + 1)) / (2.0 * k as f64);
        }
        let half = 0.5 * (self.b - self.a);
        ic.iter_mut().for_each(|v| *v *= half);
        // Value at x = -1 is sum (-1)^k ic_k.
        let at_a: f64 = ic.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).sum();
        ic[0] -= at_a;
        self.nodes.iter().map(|&t| self.evaluate(&ic, t)).collect()
    }
}

fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    // Waldvogel's explicit formula on [-1, 1].
    let mut w = vec![0.0; n + 1];
    let pi = std::f64::consts::PI;
    for (j, wj) in w.iter_mut().enumerate() {
        let theta = pi * j as f64 / n as f64;
        let mut s = 0.0;
        for k in 1..=n / 2 {
            let b = if 2 * k == n { 1.0 } else { 2.0 };
            s += b / (4.0 * (k * k) as f64 - 1.0) * (2.0 * k as f64 * theta).cos();
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        *wj = c / n as f64 * (1.0 - s);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_is_spectral() {
        let g = ChebGrid::new(32, 0.0, PI);
        let v: Vec<f64> = g.nodes().iter().map(|t| t.sin() * t.exp()).collect();
        let exact = (1.0 + PI.exp()) / 2.0;
        assert!((g.integrate(&v) - exact).abs() < 1e-13);
    }

    #[test]
    fn derivative_and_cumulative() {
        let g = ChebGrid::new(40, 0.0, PI);
        let v: Vec<f64> = g.nodes().iter().map(|t| (2.0 * t).sin() + t * t).collect();
        let d = g.differentiate(&v);
        for (t, dv) in g.nodes().iter().zip(&d) {
            assert!((dv - (2.0 * (2.0 * t).cos() + 2.0 * t)).abs() < 1e-10);
        }
        let cum = g.cumulative_integral(&v);
        for (t, iv) in g.nodes().iter().zip(&cum) {
            let exact = (1.0 - (2.0 * t).cos()) / 2.0 + t * t * t / 3.0;
            assert!((iv - exact).abs() < 1e-12, "{t} {iv} {exact}");
        }
    }

    #[test]
    fn evaluate_between_nodes() {
        let g = ChebGrid::new(24, -1.0, 2.0);
        let v: Vec<f64> = g.nodes().iter().map(|t| (0.7 * t).cos()).collect();
        let c = g.coefficients(&v);
        assert!((g.evaluate(&c, 0.123) - (0.7f64 * 0.123).cos()).abs() < 1e-14);
    }
}
