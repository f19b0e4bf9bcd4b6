//! Exact GP posterior inference over a Cholesky factor of `K + λ²I`.
//!
//! The factor is stored row by row so that adding an observation only
//! appends one row; the leading block is never touched.

use crate::error::{Error, Result};
use crate::kernels::{check_dim, check_same_dim, KernelSpec, Point};

/// Variances in `[-VARIANCE_ROUNDOFF, 0)` are clamped to zero.
pub const VARIANCE_ROUNDOFF: f64 = 1e-10;

/// Fitted GP state. Immutable; [`Posterior::update`] returns a new value.
#[derive(Debug, Clone)]
pub struct Posterior {
    kernel: KernelSpec,
    lambda: f64,
    xs: Vec<Point>,
    ys: Vec<f64>,
    /// Row `i` holds `L[i][0..=i]`.
    chol: Vec<Vec<f64>>,
    /// `L⁻¹ Y`
    fwd: Vec<f64>,
    /// `(K + λ²I)⁻¹ Y`
    alpha: Vec<f64>,
}

/// `z(x) = (K + λ²I)⁻¹ k(x, X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

/// Split of the posterior variance into the worst-case noise-free
/// prediction error over the unit RKHS ball and the noise contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceDecomposition {
    pub noise_free_sq: f64,
    pub noise_sq: f64,
}

impl VarianceDecomposition {
    pub fn total(&self) -> f64 {
        self.noise_free_sq + self.noise_sq
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Posterior {
    /// The prior: no observations, `μ₀ = 0`, `σ₀² = k(x, x)`.
    pub fn prior(kernel: KernelSpec, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            kernel,
            lambda,
            xs: Vec::new(),
            ys: Vec::new(),
            chol: Vec::new(),
            fwd: Vec::new(),
            alpha: Vec::new(),
        })
    }

    /// Condition the GP on `(xs, ys)`.
    pub fn fit(kernel: KernelSpec, lambda: f64, xs: Vec<Point>, ys: Vec<f64>) -> Result<Self> {
        check_lambda(lambda)?;
        check_dim(xs.len(), ys.len())?;
        check_same_dim(&xs)?;
        if let Some(index) = ys.iter().position(|y| !y.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let n = xs.len();
        let mut a = kernel.gram(&xs)?;
        let l2 = lambda * lambda;
        for i in 0..n {
            a[i * n + i] += l2;
        }
        let chol = cholesky(&a, n)?;
        let fwd = forward_solve(&chol, &ys);
        let alpha = backward_solve(&chol, &fwd);
        Ok(Self {
            kernel,
            lambda,
            xs,
            ys,
            chol,
            fwd,
            alpha,
        })
    }

    /// Add one observation by extending the Cholesky factor with a new row.
    pub fn update(&self, x_new: Point, y_new: f64) -> Result<Self> {
        if !y_new.is_finite() {
            return Err(Error::NonFinite { index: self.len() });
        }
        if let Some(first) = self.xs.first() {
            check_dim(first.len(), x_new.len())?;
        } else if x_new.is_empty() {
            return Err(Error::InvalidInput(
                "points must have dimension >= 1".into(),
            ));
        }
        let kx = self.kernel.cross(&x_new, &self.xs)?;
        let row = forward_solve(&self.chol, &kx);
        let pivot = self.kernel.eval(&x_new, &x_new)? + self.lambda * self.lambda - dot(&row, &row);
        if !(pivot > 0.0 && pivot.is_finite()) {
            return Err(Error::Cholesky {
                pivot: self.len(),
                value: pivot,
            });
        }
        let d = pivot.sqrt();
        let mut chol = self.chol.clone();
        let mut new_row = row;
        let fwd_new = (y_new - dot(&new_row, &self.fwd)) / d;
        new_row.push(d);
        chol.push(new_row);
        let mut fwd = self.fwd.clone();
        fwd.push(fwd_new);
        let alpha = backward_solve(&chol, &fwd);
        let mut xs = self.xs.clone();
        xs.push(x_new);
        let mut ys = self.ys.clone();
        ys.push(y_new);
        Ok(Self {
            kernel: self.kernel,
            lambda: self.lambda,
            xs,
            ys,
            chol,
            fwd,
            alpha,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.xs
    }

    pub fn observations(&self) -> &[f64] {
        &self.ys
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Row `i` of the lower Cholesky factor, entries `0..=i`.
    pub fn chol_row(&self, i: usize) -> &[f64] {
        &self.chol[i]
    }

    /// Dense lower-triangular factor, row-major `n × n`.
    pub fn chol_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n * n];
        for (i, row) in self.chol.iter().enumerate() {
            out[i * n..i * n + row.len()].copy_from_slice(row);
        }
        out
    }

    pub(crate) fn fwd(&self) -> &[f64] {
        &self.fwd
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        match self.xs.first() {
            Some(first) => check_dim(first.len(), x.len()),
            None => Ok(()),
        }
    }

    /// `(K + λ²I)⁻¹ b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.len(), b.len())?;
        Ok(backward_solve(&self.chol, &forward_solve(&self.chol, b)))
    }

    /// `μ_n(x) = k(x, X)ᵀ α`.
    pub fn mean(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let kx = self.kernel.cross(x, &self.xs)?;
        Ok(dot(&kx, &self.alpha))
    }

    /// `σ_n²(x)`, via a triangular solve against `k(x, X)`.
    pub fn variance(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let kx = self.kernel.cross(x, &self.xs)?;
        let v = forward_solve(&self.chol, &kx);
        clamp_variance(self.kernel.eval(x, x)? - dot(&v, &v))
    }

    pub fn std_dev(&self, x: &[f64]) -> Result<f64> {
        Ok(self.variance(x)?.sqrt())
    }

    pub fn weights(&self, x: &[f64]) -> Result<WeightVector> {
        self.check_point(x)?;
        let kx = self.kernel.cross(x, &self.xs)?;
        Ok(WeightVector(self.solve(&kx)?))
    }

    /// `I(Y_n; f̂) = ½ log det(I + K/λ²) = Σ log L_ii − n log λ`.
    pub fn information_gain(&self) -> f64 {
        let log_diag: f64 = self
            .chol
            .iter()
            .enumerate()
            .map(|(i, row)| row[i].ln())
            .sum();
        (log_diag - self.len() as f64 * self.lambda.ln()).max(0.0)
    }

    /// Noise-free term via the Gram expansion
    /// `k(x,x) − 2 zᵀk(x,X) + zᵀKz`, noise term `λ²‖z‖²`.
    pub fn variance_decomposition(&self, x: &[f64]) -> Result<VarianceDecomposition> {
        self.check_point(x)?;
        let kx = self.kernel.cross(x, &self.xs)?;
        let z = self.solve(&kx)?;
        let n = self.len();
        let gram = self.kernel.gram(&self.xs)?;
        let mut quad = 0.0;
        for i in 0..n {
            quad += z[i] * dot(&gram[i * n..(i + 1) * n], &z);
        }
        let noise_free_sq = self.kernel.eval(x, x)? - 2.0 * dot(&z, &kx) + quad;
        let noise_sq = self.lambda * self.lambda * dot(&z, &z);
        Ok(VarianceDecomposition {
            noise_free_sq: noise_free_sq.max(0.0),
            noise_sq,
        })
    }

    /// `‖μ_n‖_{H_k} = √(αᵀKα)`.
    pub fn mean_rkhs_norm(&self) -> Result<f64> {
        let n = self.len();
        let gram = self.kernel.gram(&self.xs)?;
        let mut quad = 0.0;
        for i in 0..n {
            quad += self.alpha[i] * dot(&gram[i * n..(i + 1) * n], &self.alpha);
        }
        Ok(quad.max(0.0).sqrt())
    }
}

/// `½ log det(I + K/λ²)` for the design `xs`.
pub fn information_gain(kernel: KernelSpec, lambda: f64, xs: &[Point]) -> Result<f64> {
    let ys = vec![0.0; xs.len()];
    Ok(Posterior::fit(kernel, lambda, xs.to_vec(), ys)?.information_gain())
}

pub(crate) fn clamp_variance(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -VARIANCE_ROUNDOFF {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(v))
    }
}

/// Lower Cholesky factor of the row-major SPD matrix `a`.
fn cholesky(a: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
    let mut l: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = vec![0.0; i + 1];
        for j in 0..i {
            let s = a[i * n + j] - dot(&row[..j], &l[j][..j]);
            row[j] = s / l[j][j];
        }
        let s = a[i * n + i] - dot(&row[..i], &row[..i]);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Cholesky { pivot: i, value: s });
        }
        row[i] = s.sqrt();
        l.push(row);
    }
    Ok(l)
}

fn forward_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(b.len());
    for (i, row) in l.iter().enumerate() {
        let s = b[i] - dot(&row[..i], &out);
        out.push(s / row[i]);
    }
    out
}

fn backward_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut out = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for (k, out_k) in out.iter().enumerate().skip(i + 1) {
            s -= l[k][i] * out_k;
        }
        out[i] = s / l[i][i];
    }
    out
}

/// Posterior mean and variance over a fixed candidate set, kept in sync
/// with a growing [`Posterior`] at `O(M·n)` cost per observation.
#[derive(Debug, Clone)]
pub struct CandidatePosterior {
    candidates: Vec<Point>,
    /// `L⁻¹ k(X, c_j)` per candidate.
    proj: Vec<Vec<f64>>,
    prior_var: Vec<f64>,
    proj_sq: Vec<f64>,
    n: usize,
}

impl CandidatePosterior {
    pub fn new(posterior: &Posterior, candidates: &[Point]) -> Result<Self> {
        let kernel = posterior.kernel();
        let mut proj = Vec::with_capacity(candidates.len());
        let mut prior_var = Vec::with_capacity(candidates.len());
        let mut proj_sq = Vec::with_capacity(candidates.len());
        for c in candidates {
            posterior.check_point(c)?;
            let kx = kernel.cross(c, posterior.points())?;
            let v = forward_solve(&posterior.chol, &kx);
            proj_sq.push(dot(&v, &v));
            proj.push(v);
            prior_var.push(kernel.eval(c, c)?);
        }
        Ok(Self {
            candidates: candidates.to_vec(),
            proj,
            prior_var,
            proj_sq,
            n: posterior.len(),
        })
    }

    /// Absorb the last observation of `posterior`, which must extend the
    /// posterior this cache was last synced with by exactly one point.
    pub fn observe(&mut self, posterior: &Posterior) -> Result<()> {
        if posterior.len() != self.n + 1 {
            return Err(Error::InvalidInput(format!(
                "candidate cache at n={} cannot absorb posterior with n={}",
                self.n,
                posterior.len()
            )));
        }
        let kernel = posterior.kernel();
        let x_new = &posterior.points()[self.n];
        let row = posterior.chol_row(self.n);
        let (l, d) = row.split_at(self.n);
        let d = d[0];
        for (j, c) in self.candidates.iter().enumerate() {
            let v = &mut self.proj[j];
            let e = (kernel.eval(x_new, c)? - dot(l, v)) / d;
            v.push(e);
            self.proj_sq[j] += e * e;
        }
        self.n += 1;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn means(&self, posterior: &Posterior) -> Vec<f64> {
        debug_assert_eq!(posterior.len(), self.n);
        self.proj.iter().map(|v| dot(v, posterior.fwd())).collect()
    }

    pub fn variances(&self) -> Result<Vec<f64>> {
        self.prior_var
            .iter()
            .zip(&self.proj_sq)
            .map(|(p, s)| clamp_variance(p - s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn se() -> KernelSpec {
        KernelSpec::se(0.2).unwrap()
    }

    #[test]
    fn prior_has_zero_mean_unit_variance() {
        let p = Posterior::fit(se(), 0.1, vec![], vec![]).unwrap();
        assert_eq!(p.mean(&[0.3]).unwrap(), 0.0);
        assert_eq!(p.variance(&[0.3]).unwrap(), 1.0);
        assert!(p.weights(&[0.3]).unwrap().0.is_empty());
        assert_eq!(p.information_gain(), 0.0);
        let d = p.variance_decomposition(&[0.3]).unwrap();
        assert_eq!((d.noise_free_sq, d.noise_sq), (1.0, 0.0));
    }

    #[test]
    fn single_observation_closed_forms() {
        let p = Posterior::fit(se(), 0.1, vec![vec![0.4]], vec![1.0]).unwrap();
        assert_relative_eq!(p.alpha()[0], 1.0 / 1.01, epsilon = 1e-14);
        assert_relative_eq!(p.mean(&[0.4]).unwrap(), 0.9900990099009901, epsilon = 1e-14);
        assert_relative_eq!(
            p.variance(&[0.4]).unwrap(),
            1.0 - 1.0 / 1.01,
            epsilon = 1e-14
        );
        assert_relative_eq!(p.weights(&[0.4]).unwrap().0[0], 1.0 / 1.01, epsilon = 1e-14);
        assert_relative_eq!(p.information_gain(), 0.5 * 101f64.ln(), epsilon = 1e-12);
        let d = p.variance_decomposition(&[0.4]).unwrap();
        let r = 0.01 / 1.01;
        assert_relative_eq!(d.noise_free_sq, r * r, max_relative = 1e-8);
        assert_relative_eq!(d.noise_sq, 0.01 / (1.01 * 1.01), max_relative = 1e-12);
        assert_relative_eq!(d.total(), 0.00990099009900991, max_relative = 1e-10);
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        assert!(Posterior::fit(se(), 0.0, vec![], vec![]).is_err());
        assert!(Posterior::fit(se(), -1.0, vec![], vec![]).is_err());
        assert!(matches!(
            Posterior::fit(se(), 0.1, vec![vec![0.1]], vec![f64::NAN]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert!(Posterior::fit(se(), 0.1, vec![vec![0.1]], vec![]).is_err());
        let p = Posterior::fit(se(), 0.1, vec![vec![0.1]], vec![0.0]).unwrap();
        assert!(p.update(vec![0.2], f64::INFINITY).is_err());
        assert!(p.update(vec![0.2, 0.3], 1.0).is_err());
        assert!(p.mean(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn update_from_prior_matches_fit() {
        let prior = Posterior::prior(se(), 0.1).unwrap();
        let a = prior.update(vec![0.3], 0.7).unwrap();
        let b = Posterior::fit(se(), 0.1, vec![vec![0.3]], vec![0.7]).unwrap();
        assert_eq!(a.chol_dense(), b.chol_dense());
        assert_eq!(a.alpha(), b.alpha());
    }

    #[test]
    fn update_keeps_leading_block() {
        let p = Posterior::fit(se(), 0.1, vec![vec![0.1], vec![0.5]], vec![1.0, -1.0]).unwrap();
        let q = p.update(vec![0.9], 0.5).unwrap();
        for i in 0..2 {
            assert_eq!(p.chol_row(i), q.chol_row(i));
        }
    }

    #[test]
    fn variance_clamping() {
        assert_eq!(clamp_variance(-5e-11).unwrap(), 0.0);
        assert!(matches!(
            clamp_variance(-1e-9),
            Err(Error::NegativeVariance(_))
        ));
    }

    #[test]
    fn candidate_cache_tracks_posterior() {
        let grid: Vec<Point> = (0..25).map(|i| vec![i as f64 / 24.0]).collect();
        let mut post = Posterior::prior(se(), 0.05).unwrap();
        let mut cache = CandidatePosterior::new(&post, &grid).unwrap();
        for (x, y) in [(0.3, 1.0), (0.71, -0.5), (0.3, 0.8), (0.05, 0.1)] {
            post = post.update(vec![x], y).unwrap();
            cache.observe(&post).unwrap();
        }
        let means = cache.means(&post);
        let vars = cache.variances().unwrap();
        for (j, g) in grid.iter().enumerate() {
            assert_relative_eq!(means[j], post.mean(g).unwrap(), epsilon = 1e-12);
            assert_relative_eq!(vars[j], post.variance(g).unwrap(), epsilon = 1e-12);
        }
        let stale = post
            .update(vec![0.5], 0.0)
            .unwrap()
            .update(vec![0.6], 0.0)
            .unwrap();
        assert!(cache.observe(&stale).is_err());
    }
}
