//! Observation noise: Gaussian (sub-Gaussian) and Laplace (light-tailed).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::confidence::ConcentrationParams;
use crate::error::{Error, Result};

/// Fraction of the Laplace MGF radius `1/b` used as `h₀`.
pub const DEFAULT_H0_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFamily {
    Gaussian { sigma: f64 },
    Laplace { scale: f64 },
}

/// A zero-mean noise distribution together with the concentration
/// parameters that certify it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    family: NoiseFamily,
    concentration: ConcentrationParams,
}

impl NoiseModel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let r = gaussian_subg_r(sigma)?;
        Ok(Self {
            family: NoiseFamily::Gaussian { sigma },
            concentration: ConcentrationParams::sub_gaussian(r)?,
        })
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        Self::laplace_with_h0_fraction(scale, DEFAULT_H0_FRACTION)
    }

    pub fn laplace_with_h0_fraction(scale: f64, fraction: f64) -> Result<Self> {
        let (h0, xi0) = laplace_lighttail_params_with(scale, fraction)?;
        Ok(Self {
            family: NoiseFamily::Laplace { scale },
            concentration: ConcentrationParams::light_tailed(xi0, h0)?,
        })
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn concentration(&self) -> ConcentrationParams {
        self.concentration
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::Gaussian { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                sigma * z
            }
            NoiseFamily::Laplace { scale } => {
                // u uniform on (-1/2, 1/2); inverse CDF
                let u: f64 = rng.random::<f64>() - 0.5;
                -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
        }
    }

    /// Moment generating function `E[e^{hε}]`; infinite outside its domain.
    pub fn mgf(&self, h: f64) -> f64 {
        match self.family {
            NoiseFamily::Gaussian { sigma } => (sigma * sigma * h * h / 2.0).exp(),
            NoiseFamily::Laplace { scale } => laplace_mgf(scale, h),
        }
    }
}

/// Gaussian noise is sub-Gaussian with `R = σ`.
pub fn gaussian_subg_r(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(sigma)
}

/// `(h₀, ξ₀)` for Laplace noise with scale `b`, using `h₀ = 1/(2b)`:
/// `ξ₀ = M''(h₀) = 224 b² / 27`.
pub fn laplace_lighttail_params(b: f64) -> Result<(f64, f64)> {
    laplace_lighttail_params_with(b, DEFAULT_H0_FRACTION)
}

/// Same with `h₀ = fraction / b`, `0 < fraction < 1`.
pub fn laplace_lighttail_params_with(b: f64, fraction: f64) -> Result<(f64, f64)> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "Laplace scale must be positive, got {b}"
        )));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "h0 fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let h0 = fraction / b;
    Ok((h0, laplace_mgf_second(b, h0)))
}

/// `M(h) = 1 / (1 − b²h²)` for `|h| < 1/b`.
pub fn laplace_mgf(b: f64, h: f64) -> f64 {
    let t = b * b * h * h;
    if t >= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - t)
    }
}

/// `M''(h) = 2b²(1 + 3b²h²) / (1 − b²h²)³`.
pub fn laplace_mgf_second(b: f64, h: f64) -> f64 {
    let t = b * b * h * h;
    2.0 * b * b * (1.0 + 3.0 * t) / (1.0 - t).powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_r_is_sigma() {
        assert_eq!(gaussian_subg_r(0.1).unwrap(), 0.1);
        assert_eq!(gaussian_subg_r(1.0).unwrap(), 1.0);
        assert!(gaussian_subg_r(0.0).is_err());
    }

    #[test]
    fn laplace_params_closed_form() {
        let (h0, xi0) = laplace_lighttail_params(0.1).unwrap();
        assert_relative_eq!(h0, 5.0, epsilon = 1e-12);
        assert_relative_eq!(xi0, 224.0 * 0.01 / 27.0, epsilon = 1e-14);
        let (h0, xi0) = laplace_lighttail_params(1.0).unwrap();
        assert_eq!(h0, 0.5);
        assert_relative_eq!(xi0, 224.0 / 27.0, epsilon = 1e-13);
        assert!(laplace_lighttail_params(-1.0).is_err());
        assert!(laplace_lighttail_params_with(1.0, 1.0).is_err());
    }

    #[test]
    fn laplace_mgf_outside_domain() {
        assert!(laplace_mgf(1.0, 1.0).is_infinite());
        assert_eq!(laplace_mgf(1.0, 0.0), 1.0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let m = NoiseModel::laplace(0.3).unwrap();
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..5).map(|_| m.sample(&mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..5).map(|_| m.sample(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}
