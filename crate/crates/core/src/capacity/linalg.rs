//! Nine-point stencil matrices on a structured `(nx + 1) x (ny + 1)` node
//! grid and an SSOR-preconditioned conjugate gradient solver.

use crate::error::{Error, Result};

/// Symmetric matrix with a 3x3 stencil per node. Slot `3 * (di + 1) +
/// (dj + 1)` holds the coupling to node `(i + di, j + dj)`.
#[derive(Debug, Clone)]
pub struct Stencil9 {
    pub ni: usize,
    pub nj: usize,
    pub coef: Vec<[f64; 9]>,
}

pub const CENTER: usize = 4;

impl Stencil9 {
    pub fn zeros(ni: usize, nj: usize) -> Self {
        Self { ni, nj, coef: vec![[0.0; 9]; ni * nj] }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nj + j
    }

    /// Adds `v` to entry `((i, j), (i + di, j + dj))`.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, di: isize, dj: isize, v: f64) {
        let k = self.index(i, j);
        self.coef[k][(3 * (di + 1) + (dj + 1)) as usize] += v;
    }

    /// `(K x)` at node `(i, j)` over all neighbours.
    #[inline]
    pub fn row_apply(&self, x: &[f64], i: usize, j: usize) -> f64 {
        let c = &self.coef[self.index(i, j)];
        let mut s = 0.0;
        for di in -1isize..=1 {
            let ii = i as isize + di;
            if ii < 0 || ii >= self.ni as isize {
                continue;
            }
            for dj in -1isize..=1 {
                let jj = j as isize + dj;
                if jj < 0 || jj >= self.nj as isize {
                    continue;
                }
                let w = c[(3 * (di + 1) + (dj + 1)) as usize];
                if w != 0.0 {
                    s += w * x[ii as usize * self.nj + jj as usize];
                }
            }
        }
        s
    }

    /// `x^T K x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.ni {
            for j in 0..self.nj {
                s += x[self.index(i, j)] * self.row_apply(x, i, j);
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub omega: f64,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 20_000, omega: 1.6 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgReport {
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `K x = b` for the free rows `i >= i0`; rows `i < i0` keep their
/// values in `x` (Dirichlet data) and act through the right-hand side.
pub fn solve_pcg(k: &Stencil9, i0: usize, x: &mut [f64], b: &[f64], opts: CgOptions) -> Result<CgReport> {
    let n = x.len();
    let free = |idx: usize| idx / k.nj >= i0;
    // r = b - K x on free rows
    let mut r = vec![0.0; n];
    for i in i0..k.ni {
        for j in 0..k.nj {
            let idx = k.index(i, j);
            r[idx] = b[idx] - k.row_apply(x, i, j);
        }
    }
    let bnorm = {
        let mut s = 0.0;
        for i in i0..k.ni {
            for j in 0..k.nj {
                // scale by the part of b that does not depend on x
                let idx = k.index(i, j);
                let fixed: f64 = dirichlet_part(k, i0, x, i, j);
                s += (b[idx] - fixed).powi(2);
            }
        }
        s.sqrt().max(1e-300)
    };
    let mut z = vec![0.0; n];
    ssor(k, i0, opts.omega, &r, &mut z);
    let mut p = z.clone();
    let mut rz: f64 = (0..n).filter(|&q| free(q)).map(|q| r[q] * z[q]).sum();
    let mut ap = vec![0.0; n];
    let mut res = norm_free(&r, k, i0) / bnorm;
    if res <= opts.rel_tol {
        return Ok(CgReport { iterations: 0, residual: res });
    }
    for it in 1..=opts.max_iter {
        // A p restricted to free rows and columns
        for i in i0..k.ni {
            for j in 0..k.nj {
                ap[k.index(i, j)] = row_apply_free(k, i0, &p, i, j);
            }
        }
        let pap: f64 = (0..n).filter(|&q| free(q)).map(|q| p[q] * ap[q]).sum();
        if !(pap > 0.0) {
            return Err(Error::SolverNonConvergence { iterations: it, residual: res });
        }
        let alpha = rz / pap;
        for q in 0..n {
            if free(q) {
                x[q] += alpha * p[q];
                r[q] -= alpha * ap[q];
            }
        }
        res = norm_free(&r, k, i0) / bnorm;
        if res <= opts.rel_tol {
            return Ok(CgReport { iterations: it, residual: res });
        }
        ssor(k, i0, opts.omega, &r, &mut z);
        let rz_new: f64 = (0..n).filter(|&q| free(q)).map(|q| r[q] * z[q]).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for q in 0..n {
            if free(q) {
                p[q] = z[q] + beta * p[q];
            }
        }
    }
    Err(Error::SolverNonConvergence { iterations: opts.max_iter, residual: res })
}

fn dirichlet_part(k: &Stencil9, i0: usize, x: &[f64], i: usize, j: usize) -> f64 {
    if i0 == 0 || i > i0 {
        return 0.0;
    }
    let c = &k.coef[k.index(i, j)];
    let mut s = 0.0;
    for dj in -1isize..=1 {
        let jj = j as isize + dj;
        if jj >= 0 && jj < k.nj as isize {
            s += c[(dj + 1) as usize] * x[(i - 1) * k.nj + jj as usize];
        }
    }
    s
}

fn norm_free(r: &[f64], k: &Stencil9, i0: usize) -> f64 {
    r[i0 * k.nj..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
fn row_apply_free(k: &Stencil9, i0: usize, x: &[f64], i: usize, j: usize) -> f64 {
    let c = &k.coef[k.index(i, j)];
    let mut s = 0.0;
    for di in -1isize..=1 {
        let ii = i as isize + di;
        if ii < i0 as isize || ii >= k.ni as isize {
            continue;
        }
        for dj in -1isize..=1 {
            let jj = j as isize + dj;
            if jj < 0 || jj >= k.nj as isize {
                continue;
            }
            s += c[(3 * (di + 1) + (dj + 1)) as usize] * x[ii as usize * k.nj + jj as usize];
        }
    }
    s
}

/// Symmetric SOR sweep pair approximating `K^{-1} r` on the free rows.
fn ssor(k: &Stencil9, i0: usize, omega: f64, r: &[f64], z: &mut [f64]) {
    for v in z.iter_mut() {
        *v = 0.0;
    }
    let scale = (2.0 - omega) / omega;
    // forward: (D/omega + L) y = r
    for i in i0..k.ni {
        for j in 0..k.nj {
            let idx = k.index(i, j);
            let c = &k.coef[idx];
            let mut s = r[idx];
            for (di, dj) in [(-1isize, -1isize), (-1, 0), (-1, 1), (0, -1)] {
                let ii = i as isize + di;
                let jj = j as isize + dj;
                if ii < i0 as isize || jj < 0 || jj >= k.nj as isize {
                    continue;
                }
                s -= c[(3 * (di + 1) + (dj + 1)) as usize] * z[ii as usize * k.nj + jj as usize];
            }
            z[idx] = s * omega / c[CENTER];
        }
    }
    // backward: (D/omega + U) z = ((2 - omega)/omega) D y
    for i in i0..k.ni {
        for j in 0..k.nj {
            let idx = k.index(i, j);
            z[idx] *= scale * k.coef[idx][CENTER];
        }
    }
    for i in (i0..k.ni).rev() {
        for j in (0..k.nj).rev() {
            let idx = k.index(i, j);
            let c = &k.coef[idx];
            let mut s = z[idx];
            for (di, dj) in [(1isize, 1isize), (1, 0), (1, -1), (0, 1)] {
                let ii = i as isize + di;
                let jj = j as isize + dj;
                if ii >= k.ni as isize || jj < 0 || jj >= k.nj as isize {
                    continue;
                }
                s -= c[(3 * (di + 1) + (dj + 1)) as usize] * z[ii as usize * k.nj + jj as usize];
            }
            z[idx] = s * omega / c[CENTER];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 5-point Laplacian on a square with unit Dirichlet data on row 0.
    #[test]
    fn pcg_solves_poisson() {
        let (ni, nj) = (20, 15);
        let mut k = Stencil9::zeros(ni, nj);
        for i in 0..ni {
            for j in 0..nj {
                let mut diag = 0.0;
                for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                    let (ii, jj) = (i as isize + di, j as isize + dj);
                    if ii >= 0 && ii < ni as isize && jj >= 0 && jj < nj as isize {
                        k.add(i, j, di, dj, -1.0);
                        diag += 1.0;
                    }
                }
                k.add(i, j, 0, 0, diag + 0.01);
            }
        }
        let mut x = vec![0.0; ni * nj];
        for j in 0..nj {
            x[j] = 1.0;
        }
        let b = vec![0.0; ni * nj];
        let rep = solve_pcg(&k, 1, &mut x, &b, CgOptions::default()).unwrap();
        assert!(rep.residual <= 1e-12);
        for i in 1..ni {
            for j in 0..nj {
                let r = k.row_apply(&x, i, j);
                assert!(r.abs() < 1e-10, "{i} {j} {r}");
            }
        }
    }
}
