//! Sequential query policies over a finite candidate set.
//!
//! MVR queries the candidate of largest posterior variance and recommends
//! the maximizer of the posterior mean. The baselines (IGP-UCB, GP-PI and
//! GP-EI) maximize their acquisition over the same candidates. All argmax
//! ties go to the lowest candidate index.

use std::fmt;
use std::str::FromStr;

use libm::erfc;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::confidence::chowdhury_beta;
use crate::error::{Error, Result};
use crate::gp::{CandidatePosterior, Posterior};
use crate::kernels::{check_same_dim, KernelSpec, Point};
use crate::noise::NoiseModel;
use crate::objectives::{argmax_first, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    EvenlySpaced1D,
    UniformRandom { seed: u64 },
}

/// Finite discretization of the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    points: Vec<Point>,
    provenance: Provenance,
}

impl CandidateSet {
    /// `m` evenly spaced points on `[0, 1]`, ascending.
    pub fn evenly_spaced(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        let points = if m == 1 {
            vec![vec![0.5]]
        } else {
            (0..m).map(|i| vec![i as f64 / (m - 1) as f64]).collect()
        };
        Ok(Self {
            points,
            provenance: Provenance::EvenlySpaced1D,
        })
    }

    /// `m` uniform points in `[0, 1]^dim` from a dedicated seed.
    pub fn uniform_random(m: usize, dim: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..m)
            .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
            .collect();
        Ok(Self {
            points,
            provenance: Provenance::UniformRandom { seed },
        })
    }

    /// Arbitrary points in the unit cube.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        check_same_dim(&points)?;
        if points.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidInput(
                "candidates must lie in the unit cube".into(),
            ));
        }
        Ok(Self {
            points,
            provenance: Provenance::UniformRandom { seed: 0 },
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Posterior mean and variance at every candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScores {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl CandidateScores {
    pub fn from_posterior(post: &Posterior, grid: &CandidateSet) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let means = grid
            .points()
            .iter()
            .map(|x| post.mean(x))
            .collect::<Result<_>>()?;
        let variances = grid
            .points()
            .iter()
            .map(|x| post.variance(x))
            .collect::<Result<_>>()?;
        Ok(Self { means, variances })
    }

    fn check(&self) -> Result<()> {
        if self.means.is_empty() {
            Err(Error::EmptyGrid)
        } else {
            Ok(())
        }
    }

    pub fn max_variance(&self) -> Result<usize> {
        self.check()?;
        Ok(argmax_first(&self.variances))
    }

    pub fn max_mean(&self) -> Result<usize> {
        self.check()?;
        Ok(argmax_first(&self.means))
    }

    pub fn ucb(&self, beta_n: f64) -> Result<usize> {
        self.check()?;
        if !(beta_n >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "beta_n must be >= 0, got {beta_n}"
            )));
        }
        Ok(argmax_first(&self.map(|mu, sd| mu + beta_n * sd)))
    }

    pub fn probability_of_improvement(&self, mu_plus: f64, alpha: f64) -> Result<usize> {
        self.check()?;
        check_alpha(alpha)?;
        Ok(argmax_first(
            &self.map(|mu, sd| pi_score(mu, sd, mu_plus, alpha)),
        ))
    }

    pub fn expected_improvement(&self, mu_plus: f64, alpha: f64) -> Result<usize> {
        self.check()?;
        check_alpha(alpha)?;
        Ok(argmax_first(
            &self.map(|mu, sd| ei_score(mu, sd, mu_plus, alpha)),
        ))
    }

    fn map(&self, score: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.means
            .iter()
            .zip(&self.variances)
            .map(|(mu, var)| score(*mu, var.sqrt()))
            .collect()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    Ok(())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `Φ((μ − μ⁺ − α)/σ)`; at `σ = 0` the limit `1[μ − μ⁺ − α > 0]`.
pub fn pi_score(mu: f64, sigma: f64, mu_plus: f64, alpha: f64) -> f64 {
    let kappa = mu - mu_plus - alpha;
    if sigma > 0.0 {
        normal_cdf(kappa / sigma)
    } else if kappa > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `κΦ(κ/σ) + σφ(κ/σ)` with `κ = μ − μ⁺ − α`; at `σ = 0` the limit `max(κ, 0)`.
pub fn ei_score(mu: f64, sigma: f64, mu_plus: f64, alpha: f64) -> f64 {
    let kappa = mu - mu_plus - alpha;
    if sigma > 0.0 {
        let u = kappa / sigma;
        // EI >= max(κ, 0); the clamp only absorbs cancellation in the tails.
        (kappa * normal_cdf(u) + sigma * normal_pdf(u)).max(kappa.max(0.0))
    } else {
        kappa.max(0.0)
    }
}

/// IGP-UCB multiplier `B + R√(2(γ + 1 + log(1/δ)))`.
pub fn igp_ucb_beta(b: f64, r: f64, info_gain: f64, delta: f64) -> Result<f64> {
    chowdhury_beta(b, r, info_gain, delta)
}

/// `argmax σ²_n` over the grid.
pub fn mvr_select(post: &Posterior, grid: &CandidateSet) -> Result<usize> {
    CandidateScores::from_posterior(post, grid)?.max_variance()
}

/// `argmax μ_n` over the grid.
pub fn mvr_recommend(post: &Posterior, grid: &CandidateSet) -> Result<usize> {
    CandidateScores::from_posterior(post, grid)?.max_mean()
}

pub fn ucb_select(post: &Posterior, grid: &CandidateSet, beta_n: f64) -> Result<usize> {
    CandidateScores::from_posterior(post, grid)?.ucb(beta_n)
}

pub fn pi_select(post: &Posterior, grid: &CandidateSet, mu_plus: f64, alpha: f64) -> Result<usize> {
    CandidateScores::from_posterior(post, grid)?.probability_of_improvement(mu_plus, alpha)
}

pub fn ei_select(post: &Posterior, grid: &CandidateSet, mu_plus: f64, alpha: f64) -> Result<usize> {
    CandidateScores::from_posterior(post, grid)?.expected_improvement(mu_plus, alpha)
}

/// `μ⁺ = max_i μ_{i−1}(x_i)` over the posterior means recorded at each
/// past selection; `0 = μ₀(x₁)` before any selection.
pub fn incumbent(means_at_selection: &[f64]) -> f64 {
    means_at_selection
        .iter()
        .copied()
        .reduce(f64::max)
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    Mvr,
    IgpUcb,
    GpPi,
    GpEi,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Mvr, Policy::IgpUcb, Policy::GpPi, Policy::GpEi];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Mvr => "MVR",
            Policy::IgpUcb => "IGPUCB",
            Policy::GpPi => "GPPI",
            Policy::GpEi => "GPEI",
        }
    }

    pub fn ordinal(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_uppercase()
            .replace(['-', '_'], "")
            .as_str()
        {
            "MVR" => Ok(Policy::Mvr),
            "IGPUCB" => Ok(Policy::IgpUcb),
            "GPPI" | "PI" => Ok(Policy::GpPi),
            "GPEI" | "EI" => Ok(Policy::GpEi),
            other => Err(Error::InvalidInput(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Policy-specific hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    /// PI/EI improvement margin.
    pub alpha: f64,
    /// IGP-UCB confidence level.
    pub delta: f64,
    /// IGP-UCB RKHS norm bound.
    pub ucb_b: f64,
    /// IGP-UCB noise scale, in units of `λ`.
    pub ucb_r: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            delta: 0.05,
            ucb_b: 1.0,
            ucb_r: 1.0,
        }
    }
}

/// One executed run of a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub policy: Policy,
    /// Candidate index queried at each step.
    pub selected: Vec<usize>,
    pub observations: Vec<f64>,
    /// `μ_{n−1}(x_n)`.
    pub means_at_selection: Vec<f64>,
    /// `μ⁺` in effect when step `n` was chosen.
    pub incumbents: Vec<f64>,
    /// `σ_{n−1}(x_n)`.
    pub per_step_sigma: Vec<f64>,
    /// `argmax μ_n` after each step.
    pub recommendations: Vec<usize>,
    /// `argmax μ_N`.
    pub recommendation: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn selected_points(&self, grid: &CandidateSet) -> Vec<Point> {
        self.selected
            .iter()
            .map(|&i| grid.points()[i].clone())
            .collect()
    }

    pub fn cumulative_variance(&self) -> f64 {
        self.per_step_sigma.iter().map(|s| s * s).sum()
    }
}

/// Everything a run needs besides the objective, noise and grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSetup {
    pub policy: Policy,
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub budget: usize,
    pub params: PolicyParams,
}

/// Run `budget` select–observe–update rounds. Errors carry the step that
/// failed inside [`Error::Trajectory`].
pub fn run_policy<R: Rng + ?Sized>(
    setup: &RunSetup,
    objective: &Objective,
    noise: &NoiseModel,
    grid: &CandidateSet,
    rng: &mut R,
) -> Result<Trajectory> {
    if setup.budget == 0 {
        return Err(Error::InvalidInput("budget must be >= 1".into()));
    }
    if objective.grid_values().len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: objective.grid_values().len(),
        });
    }
    let wrap = |step: usize, e: Error| Error::Trajectory {
        algorithm: setup.policy.name().to_string(),
        trial: 0,
        step,
        source: Box::new(e),
    };
    let mut post = Posterior::prior(setup.kernel, setup.lambda).map_err(|e| wrap(0, e))?;
    let mut cache = CandidatePosterior::new(&post, grid.points()).map_err(|e| wrap(0, e))?;
    let n = setup.budget;
    let mut traj = Trajectory {
        policy: setup.policy,
        selected: Vec::with_capacity(n),
        observations: Vec::with_capacity(n),
        means_at_selection: Vec::with_capacity(n),
        incumbents: Vec::with_capacity(n),
        per_step_sigma: Vec::with_capacity(n),
        recommendations: Vec::with_capacity(n),
        recommendation: 0,
    };
    for step in 1..=n {
        let scores = CandidateScores {
            means: cache.means(&post),
            variances: cache.variances().map_err(|e| wrap(step, e))?,
        };
        let mu_plus = incumbent(&traj.means_at_selection);
        let p = &setup.params;
        let idx = match setup.policy {
            Policy::Mvr => scores.max_variance(),
            Policy::IgpUcb => igp_ucb_beta(p.ucb_b, p.ucb_r, post.information_gain(), p.delta)
                .and_then(|beta| scores.ucb(beta)),
            Policy::GpPi if step == 1 => Ok(0),
            Policy::GpEi if step == 1 => Ok(0),
            Policy::GpPi => scores.probability_of_improvement(mu_plus, p.alpha),
            Policy::GpEi => scores.expected_improvement(mu_plus, p.alpha),
        }
        .map_err(|e| wrap(step, e))?;
        let x = grid.points()[idx].clone();
        let y = objective.value_at(idx).map_err(|e| wrap(step, e))? + noise.sample(rng);
        traj.selected.push(idx);
        traj.observations.push(y);
        traj.means_at_selection.push(scores.means[idx]);
        traj.incumbents.push(mu_plus);
        traj.per_step_sigma.push(scores.variances[idx].sqrt());

        post = post.update(x, y).map_err(|e| wrap(step, e))?;
        cache.observe(&post).map_err(|e| wrap(step, e))?;
        traj.recommendations.push(argmax_first(&cache.means(&post)));
    }
    traj.recommendation = *traj.recommendations.last().expect("budget >= 1");
    Ok(traj)
}
