//! Stationary kernels with unit signal variance.
//!
//! Two families are supported: squared exponential and Matérn with
//! half-integer smoothness (1/2, 3/2, 5/2), using the closed forms of the
//! Bessel-function expression. Every kernel satisfies `k(x, x) = 1`.

use crate::error::{Error, Result};

/// A point of the (unit-cube mapped) search domain.
pub type Point = Vec<f64>;

/// Matérn smoothness values with closed-form kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaternNu {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl MaternNu {
    pub fn from_f64(nu: f64) -> Result<Self> {
        if nu == 0.5 {
            Ok(MaternNu::Half)
        } else if nu == 1.5 {
            Ok(MaternNu::ThreeHalves)
        } else if nu == 2.5 {
            Ok(MaternNu::FiveHalves)
        } else {
            Err(Error::InvalidInput(format!(
                "Matérn smoothness must be 0.5, 1.5 or 2.5, got {nu}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            MaternNu::Half => 0.5,
            MaternNu::ThreeHalves => 1.5,
            MaternNu::FiveHalves => 2.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    SquaredExponential,
    Matern(MaternNu),
}

/// Kernel family plus lengthscale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    lengthscale: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscale: f64) -> Result<Self> {
        if !(lengthscale > 0.0 && lengthscale.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "lengthscale must be positive and finite, got {lengthscale}"
            )));
        }
        Ok(Self {
            family,
            lengthscale,
        })
    }

    pub fn se(lengthscale: f64) -> Result<Self> {
        Self::new(KernelFamily::SquaredExponential, lengthscale)
    }

    pub fn matern(nu: f64, lengthscale: f64) -> Result<Self> {
        Self::new(KernelFamily::Matern(MaternNu::from_f64(nu)?), lengthscale)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    /// Kernel value as a function of the Euclidean distance `rho`.
    pub fn eval_distance(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return 1.0;
        }
        let l = self.lengthscale;
        match self.family {
            KernelFamily::SquaredExponential => (-(rho * rho) / (2.0 * l * l)).exp(),
            KernelFamily::Matern(MaternNu::Half) => (-rho / l).exp(),
            KernelFamily::Matern(MaternNu::ThreeHalves) => {
                let s = 3f64.sqrt() * rho / l;
                (1.0 + s) * (-s).exp()
            }
            KernelFamily::Matern(MaternNu::FiveHalves) => {
                let s = 5f64.sqrt() * rho / l;
                (1.0 + s + s * s / 3.0) * (-s).exp()
            }
        }
    }

    /// `k(x, x2)`.
    pub fn eval(&self, x: &[f64], x2: &[f64]) -> Result<f64> {
        check_dim(x.len(), x2.len())?;
        Ok(self.eval_distance(distance(x, x2)))
    }

    /// Gram matrix `k(X, X)`, row-major `n × n`.
    pub fn gram(&self, xs: &[Point]) -> Result<Vec<f64>> {
        let n = xs.len();
        check_same_dim(xs)?;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = 1.0;
            for j in 0..i {
                let v = self.eval_distance(distance(&xs[i], &xs[j]));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Ok(k)
    }

    /// Cross-covariance vector `[k(x, x_1), ..., k(x, x_n)]`.
    pub fn cross(&self, x: &[f64], xs: &[Point]) -> Result<Vec<f64>> {
        xs.iter().map(|xi| self.eval(x, xi)).collect()
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn check_same_dim(xs: &[Point]) -> Result<()> {
    if let Some(first) = xs.first() {
        if first.is_empty() {
            return Err(Error::InvalidInput(
                "points must have dimension >= 1".into(),
            ));
        }
        for x in &xs[1..] {
            check_dim(first.len(), x.len())?;
        }
    }
    Ok(())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn se_at_zero_distance_is_one() {
        for l in [0.01, 0.2, 3.0] {
            let k = KernelSpec::se(l).unwrap();
            assert_eq!(k.eval(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 1.0);
        }
    }

    #[test]
    fn se_one_lengthscale_apart() {
        let k = KernelSpec::se(0.2).unwrap();
        assert_relative_eq!(
            k.eval(&[0.0], &[0.2]).unwrap(),
            0.6065306597126334,
            epsilon = 1e-12
        );
    }

    #[test]
    fn matern_closed_forms_one_lengthscale_apart() {
        let k52 = KernelSpec::matern(2.5, 0.3).unwrap();
        let s5 = 5f64.sqrt();
        let expected = (1.0 + s5 + 5.0 / 3.0) * (-s5).exp();
        assert_relative_eq!(k52.eval(&[0.1], &[0.4]).unwrap(), expected, epsilon = 1e-12);
        assert!((expected - 0.52399).abs() < 1e-5);

        let k12 = KernelSpec::matern(0.5, 0.3).unwrap();
        assert_relative_eq!(
            k12.eval(&[0.1], &[0.4]).unwrap(),
            (-1f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::se(0.0).is_err());
        assert!(KernelSpec::se(-1.0).is_err());
        assert!(KernelSpec::matern(2.0, 0.2).is_err());
        let k = KernelSpec::se(0.2).unwrap();
        assert!(matches!(
            k.eval(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
        assert!(k.gram(&[vec![0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn gram_small_cases() {
        let k = KernelSpec::se(0.2).unwrap();
        assert_eq!(k.gram(&[vec![0.5]]).unwrap(), vec![1.0]);
        assert_eq!(k.gram(&[vec![0.5], vec![0.5]]).unwrap(), vec![1.0; 4]);
        let g = k.gram(&[vec![0.0], vec![0.2]]).unwrap();
        assert_relative_eq!(g[1], 0.6065306597126334, epsilon = 1e-12);
        assert_eq!(g[1], g[2]);
    }

    #[test]
    fn cross_cases() {
        let k = KernelSpec::matern(1.5, 0.2).unwrap();
        let xs = vec![vec![0.1], vec![0.5], vec![0.9]];
        assert_eq!(k.cross(&[0.5], &xs).unwrap()[1], 1.0);
        assert!(k.cross(&[0.5], &[]).unwrap().is_empty());
        let se = KernelSpec::se(0.2).unwrap();
        assert_relative_eq!(
            se.cross(&[0.0], &[vec![0.2]]).unwrap()[0],
            0.6065306597126334,
            epsilon = 1e-12
        );
    }
}
