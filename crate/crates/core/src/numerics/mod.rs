//! Numerical building blocks shared by the solvers.

pub mod cheb;
pub mod interp;
pub mod quadrature;

pub use cheb::ChebGrid;
pub use interp::{CubicSpline, Pchip};
pub use quadrature::{integrate, integrate_to_infinity, QuadOptions};

/// Bisection for a sign change of `f` on `[lo, hi]`, to absolute width `tol`
/// in the argument.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `count` points log-spaced from `start` to `stop` inclusive.
pub fn logspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// `count` Chebyshev-spaced points strictly inside `(lo, hi)` (Gauss nodes),
/// ascending.
pub fn chebyshev_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..count)
        .map(|k| {
            let x = -((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
            lo + 0.5 * (hi - lo) * (x + 1.0)
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Least squares for a small dense system via normal equations.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = rows.first()?.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, b) in rows.iter().zip(rhs) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * b;
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}
