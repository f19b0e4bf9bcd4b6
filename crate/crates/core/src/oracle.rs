//! Slow reference computations used by the self-check suite and tests.
//!
//! Nothing here shares code with the production paths: posteriors are
//! recomputed from an explicit Gauss–Jordan inverse and the normal CDF from
//! its power series.

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Point};

/// Inverse of a row-major `n × n` matrix by Gauss–Jordan elimination with
/// partial pivoting.
pub fn dense_inverse(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap();
        let p = m[pivot * n + col];
        if p == 0.0 || !p.is_finite() {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        for k in 0..n {
            m[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f != 0.0 {
                for k in 0..n {
                    m[r * n + k] -= f * m[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    Ok(inv)
}

pub fn mat_vec(a: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum())
        .collect()
}

/// Dot product in roughly twice working precision (error-free
/// transformations on each product and partial sum).
pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let t = s + p;
        let z = t - s;
        c += (s - (t - z)) + (p - z) + pe;
        s = t;
    }
    s + c
}

/// Solve `A w = b` with the explicit inverse plus a few rounds of iterative
/// refinement, residuals taken with [`dot2`].
pub fn refined_solve(a: &[f64], inv: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut w = mat_vec(inv, n, b);
    for _ in 0..4 {
        let r: Vec<f64> = (0..n)
            .map(|i| {
                let row = &a[i * n..(i + 1) * n];
                let mut terms = row.to_vec();
                terms.push(-1.0);
                let mut vals = w.clone();
                vals.push(b[i]);
                -dot2(&terms, &vals)
            })
            .collect();
        let dw = mat_vec(inv, n, &r);
        for (wi, d) in w.iter_mut().zip(dw) {
            *wi += d;
        }
    }
    w
}

/// Posterior mean and variance at `x` via `(K + λ²I)⁻¹` formed explicitly,
/// each solve polished by [`refined_solve`].
pub struct DensePosterior {
    kernel: KernelSpec,
    xs: Vec<Point>,
    a: Vec<f64>,
    inv: Vec<f64>,
    alpha: Vec<f64>,
}

impl DensePosterior {
    pub fn new(kernel: KernelSpec, lambda: f64, xs: &[Point], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = kernel.eval(&xs[i], &xs[j])?;
            }
            a[i * n + i] += lambda * lambda;
        }
        let inv = dense_inverse(&a, n)?;
        let alpha = refined_solve(&a, &inv, n, ys);
        Ok(Self {
            kernel,
            xs: xs.to_vec(),
            a,
            inv,
            alpha,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    fn kx(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.xs.iter().map(|xi| self.kernel.eval(x, xi)).collect()
    }

    pub fn mean(&self, x: &[f64]) -> Result<f64> {
        Ok(dot2(&self.kx(x)?, &self.alpha))
    }

    pub fn variance(&self, x: &[f64]) -> Result<f64> {
        let k = self.kx(x)?;
        let w = refined_solve(&self.a, &self.inv, self.xs.len(), &k);
        Ok(self.kernel.eval(x, x)? - dot2(&k, &w))
    }
}

/// `Φ(x) = ½ + φ(x) Σ x^{2k+1} / (2k+1)!!`, summed until the terms vanish.
/// Accurate to ~1e-15 for `|x| ≤ 8`; tails beyond are returned as 0 or 1.
pub fn normal_cdf_series(x: f64) -> f64 {
    if x < -8.5 {
        return 0.0;
    }
    if x > 8.5 {
        return 1.0;
    }
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut k = 1.0;
    while term.abs() > 1e-300 && term.abs() > sum.abs() * 1e-18 {
        k += 2.0;
        term *= x2 / k;
        sum += term;
    }
    0.5 + sum * (-0.5 * x2).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
