//! Multi-trial simple-regret experiments.
//!
//! Seeding: trial `t` builds its objective from `base_seed + t`, and the
//! noise stream of algorithm `a` in trial `t` is seeded with
//! `base_seed + t·10⁶ + ordinal(a)`. The two purposes use distinct ChaCha
//! streams, so equal seed values never share random numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::confidence::ConcentrationParams;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, NoiseChoice, ObjectiveChoice};
use crate::noise::{NoiseFamily, NoiseModel};
use crate::objectives::{lambda_from_range, standard_rkhs_objective, Objective, ObjectiveKind};
use crate::policies::{run_policy, CandidateSet, Policy, PolicyParams, RunSetup, Trajectory};

/// Stride between the noise seeds of consecutive trials.
pub const TRIAL_SEED_STRIDE: u64 = 1_000_000;
const OBJECTIVE_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Environment variable that sets the worker count.
pub const THREADS_ENV: &str = "GPBANDIT_THREADS";

pub fn objective_seed(cfg: &ExperimentConfig, trial: usize) -> u64 {
    cfg.base_seed.wrapping_add(trial as u64)
}

pub fn noise_seed(cfg: &ExperimentConfig, trial: usize, policy: Policy) -> u64 {
    cfg.base_seed
        .wrapping_add((trial as u64).wrapping_mul(TRIAL_SEED_STRIDE))
        .wrapping_add(policy.ordinal())
}

pub fn objective_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(OBJECTIVE_STREAM);
    rng
}

pub fn noise_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(NOISE_STREAM);
    rng
}

/// Candidate set implied by the config: evenly spaced in 1D, seeded
/// uniform points otherwise.
pub fn build_grid(cfg: &ExperimentConfig) -> Result<CandidateSet> {
    match cfg.objective_dim() {
        1 => CandidateSet::evenly_spaced(cfg.grid_size),
        d => CandidateSet::uniform_random(cfg.grid_size, d, cfg.grid_seed),
    }
}

/// Everything shared by the algorithms of one trial.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub trial: usize,
    pub objective_seed: u64,
    pub objective: Objective,
    pub lambda: f64,
    pub noise: NoiseModel,
}

impl TrialSetup {
    pub fn concentration(&self) -> ConcentrationParams {
        self.noise.concentration()
    }

    /// IGP-UCB parameters: `B` from the config, else the exact RKHS norm,
    /// else 1; `R` in units of `λ`.
    pub fn policy_params(&self, cfg: &ExperimentConfig) -> PolicyParams {
        PolicyParams {
            alpha: cfg.alpha,
            delta: cfg.delta,
            ucb_b: cfg.ucb_b.or(self.objective.rkhs_norm()).unwrap_or(1.0),
            ucb_r: self.concentration().scale() / self.lambda,
        }
    }
}

fn noise_model(cfg: &ExperimentConfig, lambda: f64) -> Result<NoiseModel> {
    match cfg.noise {
        NoiseChoice::Gaussian => NoiseModel::gaussian(lambda),
        NoiseChoice::Laplace => NoiseModel::laplace_with_h0_fraction(lambda, cfg.h0_fraction),
    }
}

pub fn prepare_trial(
    cfg: &ExperimentConfig,
    grid: &CandidateSet,
    trial: usize,
) -> Result<TrialSetup> {
    let seed = objective_seed(cfg, trial);
    let (objective, lambda) = match cfg.objective {
        ObjectiveChoice::Rkhs => {
            let mut rng = objective_rng(seed);
            standard_rkhs_objective(
                cfg.kernel_spec()?,
                cfg.anchors,
                grid,
                cfg.lambda_percent,
                &mut rng,
            )?
        }
        ObjectiveChoice::Hartman3 | ObjectiveChoice::Rosenbrock => {
            let kind = if cfg.objective == ObjectiveChoice::Hartman3 {
                ObjectiveKind::Hartman3
            } else {
                ObjectiveKind::Rosenbrock2D
            };
            let obj = Objective::new(kind, grid)?;
            let lambda = lambda_from_range(obj.range(), cfg.lambda_percent);
            (obj, lambda)
        }
    };
    Ok(TrialSetup {
        trial,
        objective_seed: seed,
        objective,
        lambda,
        noise: noise_model(cfg, lambda)?,
    })
}

pub fn run_trajectory(
    cfg: &ExperimentConfig,
    grid: &CandidateSet,
    setup: &TrialSetup,
    policy: Policy,
) -> Result<Trajectory> {
    let run = RunSetup {
        policy,
        kernel: cfg.kernel_spec()?,
        lambda: setup.lambda,
        budget: cfg.budget,
        params: setup.policy_params(cfg),
    };
    let mut rng = noise_rng(noise_seed(cfg, setup.trial, policy));
    run_policy(&run, &setup.objective, &setup.noise, grid, &mut rng).map_err(|e| match e {
        Error::Trajectory {
            algorithm,
            step,
            source,
            ..
        } => Error::Trajectory {
            algorithm,
            trial: setup.trial,
            step,
            source,
        },
        other => other,
    })
}

/// One (algorithm, trial, step) row.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretRecord {
    pub algorithm: String,
    pub trial: usize,
    pub n: usize,
    pub selected_index: usize,
    pub y_observed: f64,
    pub recommendation_index: usize,
    pub simple_regret: f64,
}

/// `f(x*) − f(x̂)` over the grid.
pub fn simple_regret(obj: &Objective, rec_index: usize) -> Result<f64> {
    Ok(obj.max_value() - obj.value_at(rec_index)?)
}

pub fn trajectory_records(setup: &TrialSetup, traj: &Trajectory) -> Result<Vec<RegretRecord>> {
    (0..traj.len())
        .map(|i| {
            let rec = traj.recommendations[i];
            Ok(RegretRecord {
                algorithm: traj.policy.name().to_string(),
                trial: setup.trial,
                n: i + 1,
                selected_index: traj.selected[i],
                y_observed: traj.observations[i],
                recommendation_index: rec,
                simple_regret: simple_regret(&setup.objective, rec)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Run {
    pub trial: usize,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub grid: CandidateSet,
    pub trials: Vec<TrialSetup>,
    /// Trial-major, then in configured algorithm order.
    pub runs: Vec<Run>,
    pub records: Vec<RegretRecord>,
}

impl ExperimentOutput {
    pub fn runs_of(&self, policy: Policy) -> impl Iterator<Item = &Run> {
        self.runs
            .iter()
            .filter(move |r| r.trajectory.policy == policy)
    }
}

/// Worker count from [`THREADS_ENV`], defaulting to the logical cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let grid = build_grid(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| {
        let trials = (0..cfg.trials)
            .into_par_iter()
            .map(|t| prepare_trial(cfg, &grid, t))
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(usize, Policy)> = (0..cfg.trials)
            .flat_map(|t| cfg.algorithms.iter().map(move |&p| (t, p)))
            .collect();
        let runs = jobs
            .par_iter()
            .map(|&(t, p)| {
                run_trajectory(cfg, &grid, &trials[t], p).map(|trajectory| Run {
                    trial: t,
                    trajectory,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut records = Vec::new();
        for run in &runs {
            records.extend(trajectory_records(&trials[run.trial], &run.trajectory)?);
        }
        Ok(ExperimentOutput {
            config: cfg.clone(),
            grid,
            trials,
            runs,
            records,
        })
    })
}

/// Derived parameters of every trial, as `key = value` lines.
pub fn meta_text(out: &ExperimentOutput) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let cfg = &out.config;
    let _ = writeln!(s, "# configuration");
    s.push_str(&cfg.to_text());
    let _ = writeln!(s, "# derived");
    let _ = writeln!(s, "grid_points = {}", out.grid.len());
    let _ = writeln!(s, "grid_provenance = {:?}", out.grid.provenance());
    let _ = writeln!(
        s,
        "noise_seed_rule = base_seed + trial*{TRIAL_SEED_STRIDE} + ordinal"
    );
    let ordinals: Vec<String> = cfg
        .algorithms
        .iter()
        .map(|p| format!("{}:{}", p.name(), p.ordinal()))
        .collect();
    let _ = writeln!(s, "algorithm_ordinals = {}", ordinals.join(","));
    match cfg.objective {
        ObjectiveChoice::Rosenbrock => {
            let _ = writeln!(
                s,
                "domain_mapping = x_raw = -2.048 + 4.096*u per coordinate"
            );
        }
        ObjectiveChoice::Hartman3 => {
            let _ = writeln!(s, "domain_mapping = identity on [0,1]^3");
        }
        ObjectiveChoice::Rkhs => {
            let _ = writeln!(
                s,
                "range_probe_lambda = {:e}",
                crate::objectives::RANGE_PROBE_LAMBDA
            );
        }
    }
    for t in &out.trials {
        let p = format!("trial.{}", t.trial);
        let _ = writeln!(s, "{p}.objective_seed = {}", t.objective_seed);
        let _ = writeln!(s, "{p}.lambda = {:.16e}", t.lambda);
        let _ = writeln!(s, "{p}.lambda_sq = {:.16e}", t.lambda * t.lambda);
        let _ = writeln!(s, "{p}.range = {:.16e}", t.objective.range());
        let _ = writeln!(s, "{p}.argmax_index = {}", t.objective.argmax_index());
        if let ObjectiveKind::RkhsSample(f) = t.objective.kind() {
            let _ = writeln!(s, "{p}.rkhs_norm = {:.16e}", f.rkhs_norm);
            let _ = writeln!(s, "{p}.lambda_gen = {:.16e}", f.lambda_gen);
        }
        match t.noise.family() {
            NoiseFamily::Gaussian { sigma } => {
                let _ = writeln!(s, "{p}.noise_sigma = {sigma:.16e}");
            }
            NoiseFamily::Laplace { scale } => {
                let _ = writeln!(s, "{p}.noise_scale = {scale:.16e}");
            }
        }
        match t.concentration() {
            ConcentrationParams::SubGaussian { r } => {
                let _ = writeln!(s, "{p}.R = {r:.16e}");
            }
            ConcentrationParams::LightTailed { xi0, h0 } => {
                let _ = writeln!(s, "{p}.xi0 = {xi0:.16e}");
                let _ = writeln!(s, "{p}.h0 = {h0:.16e}");
            }
        }
        let params = t.policy_params(cfg);
        let _ = writeln!(s, "{p}.ucb_b = {:.16e}", params.ucb_b);
        let _ = writeln!(s, "{p}.ucb_r_over_lambda = {:.16e}", params.ucb_r);
        for &a in &cfg.algorithms {
            let _ = writeln!(
                s,
                "{p}.noise_seed.{} = {}",
                a.name(),
                noise_seed(cfg, t.trial, a)
            );
        }
    }
    s
}
