//! Confidence intervals for RKHS functions from GP posteriors.
//!
//! For a fixed `x` and a design independent of the noise,
//! `f(x) ∈ [μ_n(x) − (B + β(δ))σ_n(x), μ_n(x) + (B + β(δ))σ_n(x)]` with
//! probability at least `1 − δ` on each side. `β` depends on the noise
//! assumption: sub-Gaussian with parameter `R`, or light-tailed with MGF
//! bounded by `exp(ξ₀h²/2)` on `|h| ≤ h₀`.

use crate::error::{Error, Result};
use crate::gp::Posterior;

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// `β(δ) = (R/λ) √(2 log(1/δ))`
pub fn beta_subgaussian(r: f64, lambda: f64, delta: f64) -> Result<f64> {
    check_positive("R", r)?;
    check_positive("lambda", lambda)?;
    check_delta(delta)?;
    Ok(r / lambda * (2.0 * (1.0 / delta).ln()).sqrt())
}

/// `β(δ) = (1/λ) √(2 max(ξ₀, 2 log(1/δ)/h₀²) log(1/δ))`
pub fn beta_lighttail(xi0: f64, h0: f64, lambda: f64, delta: f64) -> Result<f64> {
    check_positive("xi0", xi0)?;
    check_positive("h0", h0)?;
    check_positive("lambda", lambda)?;
    check_delta(delta)?;
    let log_inv = (1.0 / delta).ln();
    let proxy = xi0.max(2.0 * log_inv / (h0 * h0));
    Ok((2.0 * proxy * log_inv).sqrt() / lambda)
}

/// Noise concentration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcentrationParams {
    SubGaussian { r: f64 },
    LightTailed { xi0: f64, h0: f64 },
}

impl ConcentrationParams {
    pub fn sub_gaussian(r: f64) -> Result<Self> {
        check_positive("R", r)?;
        Ok(Self::SubGaussian { r })
    }

    pub fn light_tailed(xi0: f64, h0: f64) -> Result<Self> {
        check_positive("xi0", xi0)?;
        check_positive("h0", h0)?;
        Ok(Self::LightTailed { xi0, h0 })
    }

    pub fn beta(&self, lambda: f64, delta: f64) -> Result<f64> {
        match *self {
            Self::SubGaussian { r } => beta_subgaussian(r, lambda, delta),
            Self::LightTailed { xi0, h0 } => beta_lighttail(xi0, h0, lambda, delta),
        }
    }

    /// A sub-Gaussian proxy scale: `R`, or `√ξ₀` for light-tailed noise.
    pub fn scale(&self) -> f64 {
        match *self {
            Self::SubGaussian { r } => r,
            Self::LightTailed { xi0, .. } => xi0.sqrt(),
        }
    }
}

/// Inputs of the MVR simple-regret bound besides the noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// RKHS norm budget `B`.
    pub b: f64,
    pub delta: f64,
    /// Discretization constant `C`; never quantified, defaults to 1.
    pub c: f64,
    pub d: usize,
}

impl BoundParams {
    pub fn new(b: f64, delta: f64, d: usize) -> Result<Self> {
        Self::with_c(b, delta, 1.0, d)
    }

    pub fn with_c(b: f64, delta: f64, c: f64, d: usize) -> Result<Self> {
        check_positive("B", b)?;
        check_positive("C", c)?;
        check_delta(delta)?;
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        Ok(Self { b, delta, c, d })
    }
}

/// Lower and upper confidence bounds at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
}

impl ConfidenceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// `μ_n(x) ± (B + β)σ_n(x)`.
pub fn conf_bounds(post: &Posterior, x: &[f64], b: f64, beta: f64) -> Result<ConfidenceInterval> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "beta must be >= 0, got {beta}"
        )));
    }
    check_positive("B", b)?;
    let mu = post.mean(x)?;
    let half = (b + beta) * post.std_dev(x)?;
    Ok(ConfidenceInterval {
        lower: mu - half,
        upper: mu + half,
    })
}

/// High-probability bound on the RKHS norm of the posterior mean:
/// `B + √n β(2δ/n)`.
pub fn mu_norm_bound<F>(b: f64, beta: F, n: usize, delta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let inner = 2.0 * delta / n as f64;
    check_delta(inner)?;
    Ok(b + (n as f64).sqrt() * beta(inner)?)
}

/// Right-hand side of the MVR simple-regret bound after `n` rounds:
///
/// `√(2γ/(log(1+1/λ²) N)) (2B + β(δ/3) + β(δ / (3C (B + √N β(2δ/3N))^d N^{d/2}))) + 2/√N`
pub fn regret_bound(
    n: usize,
    gamma_n: f64,
    params: &BoundParams,
    conc: &ConcentrationParams,
    lambda: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    if !(gamma_n >= 0.0 && gamma_n.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "gamma_N must be >= 0, got {gamma_n}"
        )));
    }
    check_positive("lambda", lambda)?;
    let nf = n as f64;
    let beta = |delta: f64| conc.beta(lambda, delta);
    let delta = params.delta;
    let mu_norm = params.b + nf.sqrt() * beta(2.0 * delta / (3.0 * nf))?;
    let disc = 3.0 * params.c * mu_norm.powi(params.d as i32) * nf.powf(params.d as f64 / 2.0);
    let sum = 2.0 * params.b + beta(delta / 3.0)? + beta(delta / disc)?;
    let lead = (2.0 * gamma_n / ((1.0 + 1.0 / (lambda * lambda)).ln() * nf)).sqrt();
    Ok(lead * sum + 2.0 / nf.sqrt())
}

/// Confidence multiplier `B + R √(2(I + 1 + log(1/δ)))` of the
/// self-normalized construction, with the information gain `I` standing in
/// for the maximal information gain.
pub fn chowdhury_beta(b: f64, r: f64, info_gain: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(info_gain >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "information gain must be >= 0, got {info_gain}"
        )));
    }
    Ok(b + r * (2.0 * (info_gain + 1.0 + (1.0 / delta).ln())).sqrt())
}
