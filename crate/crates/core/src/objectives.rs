//! Test functions evaluated over a candidate set.
//!
//! * RKHS samples: a GP draw at `m` uniform anchors, smoothed into the
//!   posterior mean `f(·) = k(·, Z)ᵀ w`, whose RKHS norm `√(wᵀK_ZZ w)` is
//!   known exactly.
//! * Hartmann-3 on `[0, 1]³` and Rosenbrock on `[-2.048, 2.048]²` mapped to
//!   the unit square, both negated so that larger is better.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gp::Posterior;
use crate::kernels::{check_dim, KernelSpec, Point};
use crate::policies::CandidateSet;

/// Regularization used to locate the function range before `λ` is known.
pub const RANGE_PROBE_LAMBDA: f64 = 1e-3;
/// Floor on `λ²` for near-constant samples.
pub const LAMBDA_SQ_FLOOR: f64 = 1e-6;
/// Relative jitter on the diagonal when sampling the GP prior.
pub const PRIOR_JITTER: f64 = 1e-10;

const HARTMANN3_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];
const HARTMANN3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.0381, 0.5743, 0.8828],
];

/// Half-width of the Rosenbrock box.
pub const ROSENBROCK_HALF_WIDTH: f64 = 2.048;

/// Negated Hartmann-3 on the unit cube. Maximum ≈ 3.86278.
pub fn hartman3(x: &[f64]) -> Result<f64> {
    check_dim(3, x.len())?;
    let mut total = 0.0;
    for i in 0..4 {
        let inner: f64 = (0..3)
            .map(|j| HARTMANN3_A[i][j] * (x[j] - HARTMANN3_P[i][j]).powi(2))
            .sum();
        total += HARTMANN3_ALPHA[i] * (-inner).exp();
    }
    Ok(total)
}

/// Unit-square coordinate to the raw Rosenbrock box.
pub fn rosenbrock_to_raw(u: f64) -> f64 {
    -ROSENBROCK_HALF_WIDTH + 2.0 * ROSENBROCK_HALF_WIDTH * u
}

/// Raw Rosenbrock coordinate to the unit square.
pub fn rosenbrock_from_raw(x: f64) -> f64 {
    (x + ROSENBROCK_HALF_WIDTH) / (2.0 * ROSENBROCK_HALF_WIDTH)
}

/// Negated 2D Rosenbrock with unit-square inputs. Maximum 0 at the image of (1, 1).
pub fn rosenbrock2d(u: &[f64]) -> Result<f64> {
    check_dim(2, u.len())?;
    let x = rosenbrock_to_raw(u[0]);
    let y = rosenbrock_to_raw(u[1]);
    Ok(-((1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)))
}

/// `f(·) = Σ w_i k(·, z_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RkhsFunction {
    pub kernel: KernelSpec,
    pub anchors: Vec<Point>,
    pub weights: Vec<f64>,
    /// The GP draw at the anchors.
    pub sample: Vec<f64>,
    pub rkhs_norm: f64,
    pub lambda_gen: f64,
}

impl RkhsFunction {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let k = self.kernel.cross(x, &self.anchors)?;
        Ok(k.iter().zip(&self.weights).map(|(a, b)| a * b).sum())
    }

    /// Same draw, different smoothing.
    pub fn resmooth(&self, lambda_gen: f64) -> Result<Self> {
        build_rkhs(
            self.kernel,
            self.anchors.clone(),
            self.sample.clone(),
            lambda_gen,
        )
    }
}

fn build_rkhs(
    kernel: KernelSpec,
    anchors: Vec<Point>,
    sample: Vec<f64>,
    lambda_gen: f64,
) -> Result<RkhsFunction> {
    let post = Posterior::fit(kernel, lambda_gen, anchors.clone(), sample.clone())?;
    let weights = post.alpha().to_vec();
    let rkhs_norm = post.mean_rkhs_norm()?;
    Ok(RkhsFunction {
        kernel,
        anchors,
        weights,
        sample,
        rkhs_norm,
        lambda_gen,
    })
}

/// Draw `m` uniform anchors in `[0, 1]^dim`, a GP sample over them, and
/// return its posterior mean under regularization `lambda_gen`.
pub fn sample_rkhs_function<R: Rng + ?Sized>(
    kernel: KernelSpec,
    m: usize,
    dim: usize,
    lambda_gen: f64,
    rng: &mut R,
) -> Result<RkhsFunction> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 anchors, got {m}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    let anchors: Vec<Point> = (0..m)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    // Cholesky of K + jitter·I, through the posterior factorization.
    let prior = Posterior::fit(kernel, PRIOR_JITTER.sqrt(), anchors.clone(), vec![0.0; m])?;
    let xi: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let sample: Vec<f64> = (0..m)
        .map(|i| prior.chol_row(i).iter().zip(&xi).map(|(l, z)| l * z).sum())
        .collect();
    build_rkhs(kernel, anchors, sample, lambda_gen)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    RkhsSample(RkhsFunction),
    Hartman3,
    Rosenbrock2D,
}

impl ObjectiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::RkhsSample(_) => "rkhs",
            ObjectiveKind::Hartman3 => "hartman3",
            ObjectiveKind::Rosenbrock2D => "rosenbrock",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ObjectiveKind::RkhsSample(f) => f.anchors[0].len(),
            ObjectiveKind::Hartman3 => 3,
            ObjectiveKind::Rosenbrock2D => 2,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            ObjectiveKind::RkhsSample(f) => f.eval(x),
            ObjectiveKind::Hartman3 => hartman3(x),
            ObjectiveKind::Rosenbrock2D => rosenbrock2d(x),
        }
    }
}

/// A test function with its values cached over a candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    kind: ObjectiveKind,
    grid_values: Vec<f64>,
    argmax_index: usize,
    range: f64,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, grid: &CandidateSet) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let grid_values = grid
            .points()
            .iter()
            .map(|x| kind.eval(x))
            .collect::<Result<Vec<_>>>()?;
        if let Some(index) = grid_values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let argmax_index = argmax_first(&grid_values);
        let min = grid_values.iter().copied().fold(f64::INFINITY, f64::min);
        let range = grid_values[argmax_index] - min;
        Ok(Self {
            kind,
            grid_values,
            argmax_index,
            range,
        })
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.kind.eval(x)
    }

    pub fn grid_values(&self) -> &[f64] {
        &self.grid_values
    }

    pub fn value_at(&self, index: usize) -> Result<f64> {
        self.grid_values
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.grid_values.len(),
            })
    }

    pub fn argmax_index(&self) -> usize {
        self.argmax_index
    }

    pub fn max_value(&self) -> f64 {
        self.grid_values[self.argmax_index]
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Exact RKHS norm, known only for RKHS samples.
    pub fn rkhs_norm(&self) -> Option<f64> {
        match &self.kind {
            ObjectiveKind::RkhsSample(f) => Some(f.rkhs_norm),
            _ => None,
        }
    }
}

/// Max minus min of the objective over the grid it was built on.
pub fn function_range(obj: &Objective) -> f64 {
    obj.range()
}

/// `λ = √(max(percent/100 · range, floor))`.
pub fn lambda_from_range(range: f64, percent: f64) -> f64 {
    (percent / 100.0 * range).max(LAMBDA_SQ_FLOOR).sqrt()
}

/// The RKHS generator with `λ` tied to the function range: the draw is
/// first smoothed with [`RANGE_PROBE_LAMBDA`] to measure its range on the
/// grid, `λ² = percent% · range`, and the final function is the posterior
/// mean under that `λ`. Returns the objective and `λ`.
pub fn standard_rkhs_objective<R: Rng + ?Sized>(
    kernel: KernelSpec,
    m: usize,
    grid: &CandidateSet,
    lambda_percent: f64,
    rng: &mut R,
) -> Result<(Objective, f64)> {
    let probe = sample_rkhs_function(kernel, m, grid.dim(), RANGE_PROBE_LAMBDA, rng)?;
    let probe_range = Objective::new(ObjectiveKind::RkhsSample(probe.clone()), grid)?.range();
    let lambda = lambda_from_range(probe_range, lambda_percent);
    let f = probe.resmooth(lambda)?;
    Ok((Objective::new(ObjectiveKind::RkhsSample(f), grid)?, lambda))
}

/// Lowest index of the maximum; NaN entries are never selected.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}
