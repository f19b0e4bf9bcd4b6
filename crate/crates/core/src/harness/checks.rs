//! Numerical checks of the analytical identities and bounds, each reporting
//! a measured value against a pinned threshold. `selfcheck` runs them all.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::confidence::{beta_subgaussian, chowdhury_beta, conf_bounds, mu_norm_bound};
use crate::error::Result;
use crate::gp::{information_gain, Posterior};
use crate::harness::config::{ExperimentConfig, NoiseChoice};
use crate::harness::experiment::{
    build_grid, noise_rng, prepare_trial, run_experiment, run_trajectory,
};
use crate::harness::report::{aggregate, write_csv};
use crate::kernels::{KernelSpec, Point};
use crate::noise::{laplace_lighttail_params, laplace_mgf, laplace_mgf_second, NoiseModel};
use crate::objectives::{standard_rkhs_objective, ObjectiveKind};
use crate::oracle::{ls_slope, normal_cdf_series, DensePosterior};
use crate::policies::{normal_cdf, run_policy, CandidateSet, Policy, PolicyParams, RunSetup};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, measured: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            measured,
            threshold,
            detail,
        }
    }

    /// Passes when `measured <= threshold`.
    fn at_most(name: &str, measured: f64, threshold: f64, detail: String) -> Self {
        Self::new(name, measured <= threshold, measured, threshold, detail)
    }

    fn failed(name: &str, err: crate::error::Error) -> Self {
        Self::new(name, false, f64::NAN, f64::NAN, format!("error: {err}"))
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<28} measured={:<12.4e} threshold={:<12.4e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold,
            self.detail
        )
    }
}

fn settle(name: &str, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::failed(name, e))
}

fn kernel_pair() -> [KernelSpec; 2] {
    [
        KernelSpec::se(0.2).expect("valid"),
        KernelSpec::matern(2.5, 0.2).expect("valid"),
    ]
}

fn uniform_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| vec![rng.random::<f64>()]).collect()
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `σ² = noise-free term + λ²‖z‖²` on random 1D instances cycling through
/// n ∈ {1, 5, 20, 50}, SE/Matérn-2.5 and λ² ∈ {1e-4, 1e-2, 1}.
pub fn variance_identity(instances: usize, seed: u64) -> CheckResult {
    const NAME: &str = "variance_identity";
    settle(
        NAME,
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes = [1usize, 5, 20, 50];
            let lambdas_sq = [1e-4, 1e-2, 1.0];
            let mut worst: f64 = 0.0;
            for i in 0..instances {
                let n = sizes[i % 4];
                let kernel = kernel_pair()[(i / 4) % 2];
                let lambda = f64::sqrt(lambdas_sq[(i / 8) % 3]);
                let xs = uniform_points(&mut rng, n);
                let ys = normals(&mut rng, n);
                let post = Posterior::fit(kernel, lambda, xs, ys)?;
                let x = [rng.random::<f64>()];
                let var = post.variance(&x)?;
                let d = post.variance_decomposition(&x)?;
                worst = worst.max((var - d.total()).abs() / var.max(1.0));
            }
            Ok(CheckResult::at_most(
                NAME,
                worst,
                1e-8,
                format!("{instances} instances"),
            ))
        })(),
    )
}

/// Cholesky posterior against an explicit-inverse oracle, and sequential
/// updates against a batch refit.
pub fn oracle_equivalence(instances: usize, seed: u64) -> CheckResult {
    const NAME: &str = "oracle_equivalence";
    settle(
        NAME,
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lambdas_sq = [1e-4, 1e-2, 1.0];
            let mut worst_batch: f64 = 0.0;
            for i in 0..instances {
                let n = 1 + rng.random_range(0..50);
                let kernel = kernel_pair()[i % 2];
                let lambda = f64::sqrt(lambdas_sq[(i / 2) % 3]);
                let xs = uniform_points(&mut rng, n);
                let ys = normals(&mut rng, n);
                let post = Posterior::fit(kernel, lambda, xs.clone(), ys.clone())?;
                let dense = DensePosterior::new(kernel, lambda, &xs, &ys)?;
                for _ in 0..5 {
                    let x = [rng.random::<f64>()];
                    let (m0, m1) = (post.mean(&x)?, dense.mean(&x)?);
                    let (v0, v1) = (post.variance(&x)?, dense.variance(&x)?);
                    worst_batch = worst_batch
                        .max((m0 - m1).abs() / m1.abs().max(1.0))
                        .max((v0 - v1).abs() / v1.abs().max(1.0));
                }
            }
            let mut worst_update: f64 = 0.0;
            for kernel in kernel_pair() {
                let xs = uniform_points(&mut rng, 20);
                let ys = normals(&mut rng, 20);
                let mut post = Posterior::prior(kernel, 0.1)?;
                for (x, y) in xs.iter().zip(&ys) {
                    post = post.update(x.clone(), *y)?;
                }
                let batch = Posterior::fit(kernel, 0.1, xs, ys)?;
                for _ in 0..50 {
                    let x = [rng.random::<f64>()];
                    worst_update = worst_update
                        .max((post.mean(&x)? - batch.mean(&x)?).abs())
                        .max((post.variance(&x)? - batch.variance(&x)?).abs());
                }
            }
            let passed = worst_batch <= 1e-10 && worst_update <= 1e-9;
            Ok(CheckResult::new(
                NAME,
                passed,
                worst_batch,
                1e-10,
                format!("update-vs-refit {worst_update:.3e} (threshold 1e-9)"),
            ))
        })(),
    )
}

/// `|f − μ_n| ≤ ‖f‖σ_n` for exact observations of RKHS functions with
/// known norm. Reports the worst excess over the bound.
pub fn noise_free_bound(functions: usize, probes: usize, seed: u64) -> CheckResult {
    const NAME: &str = "noise_free_prediction_bound";
    settle(
        NAME,
        (|| {
            let grid = CandidateSet::evenly_spaced(100)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = f64::NEG_INFINITY;
            for i in 0..functions {
                let kernel = kernel_pair()[i % 2];
                let (obj, lambda) = standard_rkhs_objective(kernel, 100, &grid, 1.0, &mut rng)?;
                let ObjectiveKind::RkhsSample(f) = obj.kind() else {
                    unreachable!()
                };
                for n in [5usize, 20, 50] {
                    let xs = uniform_points(&mut rng, n);
                    let ys = xs.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
                    let post = Posterior::fit(kernel, lambda, xs, ys)?;
                    for _ in 0..probes {
                        let x = [rng.random::<f64>()];
                        let excess = (f.eval(&x)? - post.mean(&x)?).abs()
                            - f.rkhs_norm * post.std_dev(&x)?;
                        worst = worst.max(excess);
                    }
                }
            }
            Ok(CheckResult::at_most(
            NAME,
            worst,
            1e-9,
            format!("{functions} functions x 3 sizes x {probes} probes; measured = max(|f-mu| - B*sigma)"),
        ))
        })(),
    )
}

/// `Σ σ²_{n−1}(x_n) ≤ 2/log(1+1/λ²) · I(Y_N; f̂)` on MVR trajectories.
pub fn cumulative_variance_bound(trajectories: usize, budget: usize, seed: u64) -> CheckResult {
    const NAME: &str = "cumulative_variance_bound";
    settle(
        NAME,
        (|| {
            let mut cfg = ExperimentConfig::standard(budget, trajectories, seed);
            cfg.algorithms = vec![Policy::Mvr];
            let out = run_experiment(&cfg)?;
            let kernel = cfg.kernel_spec()?;
            let mut violations = 0usize;
            let mut worst_ratio: f64 = 0.0;
            for run in &out.runs {
                let lambda = out.trials[run.trial].lambda;
                let pts = run.trajectory.selected_points(&out.grid);
                let bound = 2.0 / (1.0 + 1.0 / (lambda * lambda)).ln()
                    * information_gain(kernel, lambda, &pts)?;
                let lhs = run.trajectory.cumulative_variance();
                if lhs > bound {
                    violations += 1;
                }
                worst_ratio = worst_ratio.max(lhs / bound);
            }
            Ok(CheckResult::at_most(
                NAME,
                violations as f64,
                0.0,
                format!("{trajectories} trajectories, max lhs/bound {worst_ratio:.4}"),
            ))
        })(),
    )
}

/// Fraction of `reps` noisy datasets on a fixed evenly spaced design of
/// size `n` for which `f(x) > U_n^δ(x)`.
pub fn coverage(noise: NoiseChoice, reps: usize, n: usize, delta: f64, seed: u64) -> CheckResult {
    let name = match noise {
        NoiseChoice::Gaussian => "coverage_subgaussian",
        NoiseChoice::Laplace => "coverage_lighttailed",
    };
    settle(
        name,
        (|| {
            let grid = CandidateSet::evenly_spaced(100)?;
            let kernel = KernelSpec::se(0.2)?;
            let mut obj_rng = ChaCha8Rng::seed_from_u64(seed);
            let (obj, lambda) = standard_rkhs_objective(kernel, 100, &grid, 1.0, &mut obj_rng)?;
            let b = obj.rkhs_norm().expect("rkhs objective");
            let model = match noise {
                NoiseChoice::Gaussian => NoiseModel::gaussian(lambda)?,
                NoiseChoice::Laplace => NoiseModel::laplace(lambda)?,
            };
            let beta = model.concentration().beta(lambda, delta)?;
            let design: Vec<Point> = CandidateSet::evenly_spaced(n)?.points().to_vec();
            let fx_design = design
                .iter()
                .map(|x| obj.eval(x))
                .collect::<Result<Vec<_>>>()?;
            let x = [0.51];
            let fx = obj.eval(&x)?;
            let mut rng = noise_rng(seed);
            let (mut upper_viol, mut lower_viol) = (0usize, 0usize);
            for _ in 0..reps {
                let ys: Vec<f64> = fx_design
                    .iter()
                    .map(|f| f + model.sample(&mut rng))
                    .collect();
                let post = Posterior::fit(kernel, lambda, design.clone(), ys)?;
                let ci = conf_bounds(&post, &x, b, beta)?;
                upper_viol += usize::from(fx > ci.upper);
                lower_viol += usize::from(fx < ci.lower);
            }
            let m = reps as f64;
            let threshold = delta + 3.0 * (delta * (1.0 - delta) / m).sqrt();
            Ok(CheckResult::at_most(
                name,
                upper_viol as f64 / m,
                threshold,
                format!(
                    "beta={beta:.3}, lower-bound violations {:.4}, {reps} reps",
                    lower_viol as f64 / m
                ),
            ))
        })(),
    )
}

/// Multiplier of the fixed-point interval against the self-normalized one
/// along an MVR trajectory, for `from <= n <= to`. Both are in the same
/// units: the self-normalized noise scale is `R/λ`. Reports the largest
/// ratio, which must stay below 1.
pub fn width_comparison(from: usize, to: usize, seed: u64) -> CheckResult {
    const NAME: &str = "width_comparison";
    settle(
        NAME,
        (|| {
            let cfg = ExperimentConfig::standard(to, 1, seed);
            let grid = build_grid(&cfg)?;
            let setup = prepare_trial(&cfg, &grid, 0)?;
            let traj = run_trajectory(&cfg, &grid, &setup, Policy::Mvr)?;
            let b = setup.objective.rkhs_norm().expect("rkhs objective");
            let lambda = setup.lambda;
            let r = setup.concentration().scale();
            let ours = b + beta_subgaussian(r, lambda, cfg.delta)?;
            let mut post = Posterior::prior(cfg.kernel_spec()?, lambda)?;
            let mut worst: f64 = 0.0;
            for (i, (&idx, &y)) in traj.selected.iter().zip(&traj.observations).enumerate() {
                post = post.update(grid.points()[idx].clone(), y)?;
                let n = i + 1;
                if n >= from {
                    let theirs = chowdhury_beta(b, r / lambda, post.information_gain(), cfg.delta)?;
                    worst = worst.max(ours / theirs);
                }
            }
            Ok(CheckResult::new(
                NAME,
                worst < 1.0,
                worst,
                1.0,
                format!("max ratio of half-widths over {from}<=n<={to}"),
            ))
        })(),
    )
}

/// MVR's query sequence under `seeds` different noise streams.
pub fn mvr_noise_invariance(seeds: usize, budget: usize, seed: u64) -> CheckResult {
    const NAME: &str = "mvr_noise_invariance";
    settle(
        NAME,
        (|| {
            let cfg = ExperimentConfig::standard(budget, 1, seed);
            let grid = build_grid(&cfg)?;
            let setup = prepare_trial(&cfg, &grid, 0)?;
            let run = RunSetup {
                policy: Policy::Mvr,
                kernel: cfg.kernel_spec()?,
                lambda: setup.lambda,
                budget,
                params: PolicyParams::default(),
            };
            let mut first: Option<Vec<usize>> = None;
            let mut mismatches = 0usize;
            for s in 0..seeds {
                let mut rng = noise_rng(seed.wrapping_add(1000 + s as u64));
                let t = run_policy(&run, &setup.objective, &setup.noise, &grid, &mut rng)?;
                match &first {
                    None => first = Some(t.selected),
                    Some(f) => mismatches += usize::from(*f != t.selected),
                }
            }
            Ok(CheckResult::at_most(
                NAME,
                mismatches as f64,
                0.0,
                format!("{seeds} noise seeds, {budget} steps"),
            ))
        })(),
    )
}

/// Properties of the averaged regret curves of the standard experiment.
pub fn regret_experiment(trials: usize, budget: usize, seed: u64) -> Vec<CheckResult> {
    let mut cfg = ExperimentConfig::standard(budget, trials, seed);
    cfg.algorithms = Policy::ALL.to_vec();
    let out = match run_experiment(&cfg) {
        Ok(out) => out,
        Err(e) => {
            let err = e.to_string();
            return [
                "regret_decreases",
                "regret_running_min",
                "regret_final_vs_range",
            ]
            .iter()
            .map(|n| CheckResult::new(n, false, f64::NAN, f64::NAN, format!("error: {err}")))
            .collect();
        }
    };
    let curves = aggregate(&out.records);
    let mvr = &curves["MVR"];
    let at = |n: usize| mvr.iter().find(|p| p.n == n).map_or(f64::NAN, |p| p.mean);
    let early = at(budget.min(10));
    let last = at(budget);
    let others: Vec<String> = curves
        .iter()
        .map(|(alg, c)| format!("{alg}={:.4}", c.last().map_or(f64::NAN, |p| p.mean)))
        .collect();

    let mut running = f64::INFINITY;
    let mut increases = 0usize;
    for p in mvr {
        let next = running.min(p.mean);
        increases += usize::from(next > running);
        running = next;
    }
    let mean_range = out.trials.iter().map(|t| t.objective.range()).sum::<f64>() / trials as f64;
    vec![
        CheckResult::new(
            "regret_decreases",
            last < early,
            last,
            early,
            format!(
                "MVR mean regret at n={budget} vs n=10; final: {}",
                others.join(" ")
            ),
        ),
        CheckResult::at_most(
            "regret_running_min",
            increases as f64,
            0.0,
            "increases of the running minimum".into(),
        ),
        CheckResult::at_most(
            "regret_final_vs_range",
            last,
            0.1 * mean_range,
            format!("0.1 x mean function range {mean_range:.4}"),
        ),
    ]
}

/// Least-squares slope of log mean MVR regret against log n, `from <= n <= to`.
pub fn rate_slope(
    trials: usize,
    from: usize,
    to: usize,
    grid_size: usize,
    seed: u64,
) -> CheckResult {
    const NAME: &str = "regret_rate_slope";
    settle(
        NAME,
        (|| {
            let mut cfg = ExperimentConfig::standard(to, trials, seed);
            cfg.algorithms = vec![Policy::Mvr];
            cfg.grid_size = grid_size;
            let out = run_experiment(&cfg)?;
            let curve = &aggregate(&out.records)["MVR"];
            let pts: Vec<(f64, f64)> = curve
                .iter()
                .filter(|p| p.n >= from && p.n <= to)
                .map(|p| ((p.n as f64).ln(), p.mean.ln()))
                .collect();
            let zeros = pts.iter().filter(|p| !p.1.is_finite()).count();
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().filter(|p| p.1.is_finite()).unzip();
            let slope = if zeros == 0 {
                ls_slope(&x, &y)
            } else {
                f64::NAN
            };
            Ok(CheckResult::new(
            NAME,
            (-1.2..=-0.25).contains(&slope),
            slope,
            -0.25,
            format!("accepted range [-1.2, -0.25]; n in [{from},{to}], {trials} trials, grid {grid_size}, zero-regret steps {zeros}"),
        ))
        })(),
    )
}

/// Two runs of the same config produce identical CSV bytes.
pub fn reproducibility(cfg: &ExperimentConfig) -> CheckResult {
    const NAME: &str = "reproducibility";
    settle(
        NAME,
        (|| {
            let mut a = Vec::new();
            let mut b = Vec::new();
            write_csv(&run_experiment(cfg)?.records, &mut a)?;
            write_csv(&run_experiment(cfg)?.records, &mut b)?;
            Ok(CheckResult::new(
                NAME,
                a == b,
                (a != b) as u8 as f64,
                0.0,
                format!("{} bytes", a.len()),
            ))
        })(),
    )
}

/// `α` solves the ridge system and minimizes the kernel ridge objective
/// against random perturbations.
pub fn krr_equivalence(instances: usize, perturbations: usize, seed: u64) -> CheckResult {
    const NAME: &str = "krr_equivalence";
    settle(
        NAME,
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst_solve: f64 = 0.0;
            let mut beaten = 0usize;
            for i in 0..instances {
                let n = 2 + rng.random_range(0..30);
                let kernel = kernel_pair()[i % 2];
                let lambda = 0.1;
                let xs = uniform_points(&mut rng, n);
                let ys = normals(&mut rng, n);
                let post = Posterior::fit(kernel, lambda, xs.clone(), ys.clone())?;
                let dense = DensePosterior::new(kernel, lambda, &xs, &ys)?;
                for (a, b) in post.alpha().iter().zip(dense.alpha()) {
                    worst_solve = worst_solve.max((a - b).abs() / b.abs().max(1.0));
                }
                let gram = kernel.gram(&xs)?;
                let objective = |w: &[f64]| -> f64 {
                    let mut reg = 0.0;
                    let mut fit = 0.0;
                    for r in 0..n {
                        let kw: f64 = (0..n).map(|c| gram[r * n + c] * w[c]).sum();
                        reg += w[r] * kw;
                        fit += (kw - ys[r]).powi(2);
                    }
                    lambda * lambda * reg + fit
                };
                let best = objective(post.alpha());
                for _ in 0..perturbations {
                    let scale = 10f64.powf(rng.random_range(-4.0..0.0));
                    let w: Vec<f64> = post
                        .alpha()
                        .iter()
                        .map(|a| a + scale * rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    beaten += usize::from(objective(&w) < best - 1e-12 * best.abs().max(1.0));
                }
            }
            Ok(CheckResult::new(
                NAME,
                worst_solve <= 1e-10 && beaten == 0,
                worst_solve,
                1e-10,
                format!("perturbations beating alpha: {beaten}"),
            ))
        })(),
    )
}

/// `‖μ_n‖_{H_k} ≤ B + √n β(2δ/n)` over repeated noisy datasets; the
/// violation frequency must stay within `δ` plus Monte-Carlo slack.
pub fn mean_norm_bound(reps: usize, n: usize, delta: f64, seed: u64) -> CheckResult {
    const NAME: &str = "posterior_mean_norm_bound";
    settle(
        NAME,
        (|| {
            let grid = CandidateSet::evenly_spaced(100)?;
            let kernel = KernelSpec::se(0.2)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (obj, lambda) = standard_rkhs_objective(kernel, 100, &grid, 1.0, &mut rng)?;
            let b = obj.rkhs_norm().expect("rkhs objective");
            let bound = mu_norm_bound(b, |d| beta_subgaussian(lambda, lambda, d), n, delta)?;
            let design: Vec<Point> = CandidateSet::evenly_spaced(n)?.points().to_vec();
            let fx = design
                .iter()
                .map(|x| obj.eval(x))
                .collect::<Result<Vec<_>>>()?;
            let model = NoiseModel::gaussian(lambda)?;
            let mut noise = noise_rng(seed);
            let mut violations = 0usize;
            for _ in 0..reps {
                let ys: Vec<f64> = fx.iter().map(|f| f + model.sample(&mut noise)).collect();
                let post = Posterior::fit(kernel, lambda, design.clone(), ys)?;
                violations += usize::from(post.mean_rkhs_norm()? > bound);
            }
            let m = reps as f64;
            Ok(CheckResult::at_most(
                NAME,
                violations as f64 / m,
                delta + 3.0 * (delta * (1.0 - delta) / m).sqrt(),
                format!("bound {bound:.3}, B {b:.3}"),
            ))
        })(),
    )
}

/// `σ_n² ≤ σ_m² + 1e-10` for nested prefixes.
pub fn variance_monotonicity(instances: usize, seed: u64) -> CheckResult {
    const NAME: &str = "variance_monotonicity";
    settle(
        NAME,
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = f64::NEG_INFINITY;
            for i in 0..instances {
                let kernel = kernel_pair()[i % 2];
                let xs = uniform_points(&mut rng, 30);
                let ys = normals(&mut rng, 30);
                let mut post = Posterior::prior(kernel, 0.05)?;
                let probes = uniform_points(&mut rng, 10);
                let mut prev: Vec<f64> = probes
                    .iter()
                    .map(|p| post.variance(p))
                    .collect::<Result<_>>()?;
                for (x, y) in xs.into_iter().zip(ys) {
                    post = post.update(x, y)?;
                    for (p, old) in probes.iter().zip(prev.iter_mut()) {
                        let v = post.variance(p)?;
                        worst = worst.max(v - *old);
                        *old = v;
                    }
                }
            }
            Ok(CheckResult::at_most(
                NAME,
                worst,
                1e-10,
                "max increase".into(),
            ))
        })(),
    )
}

/// MGF conditions of both noise models on a grid of `h`; `measured` is the
/// largest relative excess of the MGF over its Gaussian envelope.
pub fn mgf_conditions() -> CheckResult {
    const NAME: &str = "noise_mgf_conditions";
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut sup_gap: f64 = 0.0;
    for b in [0.05, 0.1, 0.5, 1.0, 2.0] {
        let gaussian = NoiseModel::gaussian(b).expect("positive");
        for i in -200..=200 {
            let h = i as f64 * 0.05 / b;
            let bound = (h * h * b * b / 2.0).exp();
            worst = worst.max((gaussian.mgf(h) - bound) / bound);
        }
        let (h0, xi0) = laplace_lighttail_params(b).expect("positive");
        let mut sup: f64 = 0.0;
        for i in -1000..=1000 {
            let h = h0 * i as f64 / 1000.0;
            let bound = (xi0 * h * h / 2.0).exp();
            worst = worst.max((laplace_mgf(b, h) - bound) / bound);
            sup = sup.max(laplace_mgf_second(b, h));
        }
        sup_gap = sup_gap.max((sup - xi0).abs() / xi0);
    }
    CheckResult::new(
        NAME,
        worst <= 1e-12 && sup_gap <= 1e-8,
        worst,
        1e-12,
        format!("relative gap between grid sup of M'' and xi0: {sup_gap:.2e}"),
    )
}

/// Normal CDF against its power series.
pub fn normal_cdf_accuracy() -> CheckResult {
    const NAME: &str = "normal_cdf_accuracy";
    let worst = (-8000..=8000)
        .map(|i| {
            let x = i as f64 / 1000.0;
            (normal_cdf(x) - normal_cdf_series(x)).abs()
        })
        .fold(0.0, f64::max);
    CheckResult::at_most(NAME, worst, 1e-12, "x in [-8, 8]".into())
}

/// A non-positive `λ` must be rejected, not patched.
pub fn lambda_precondition() -> CheckResult {
    const NAME: &str = "lambda_precondition";
    let kernel = KernelSpec::se(0.2).expect("valid");
    let rejected = [0.0, -0.1, f64::NAN]
        .iter()
        .filter(|&&l| Posterior::fit(kernel, l, vec![vec![0.5]], vec![1.0]).is_err())
        .count();
    CheckResult::new(
        NAME,
        rejected == 3,
        rejected as f64,
        3.0,
        "rejected of 3 invalid lambdas".into(),
    )
}

/// Run every check. `fast` shrinks the Monte-Carlo and experiment sizes.
pub fn selfcheck(fast: bool) -> Vec<CheckResult> {
    let s = |full: usize, quick: usize| if fast { quick } else { full };
    let mut out = vec![
        variance_identity(s(500, 96), 11),
        oracle_equivalence(s(200, 40), 12),
        noise_free_bound(s(100, 10), s(200, 50), 13),
        cumulative_variance_bound(s(100, 10), 100, 14),
        coverage(NoiseChoice::Gaussian, s(5000, 500), 30, 0.05, 15),
        coverage(NoiseChoice::Laplace, s(5000, 500), 30, 0.05, 16),
        width_comparison(10, 100, 17),
        mvr_noise_invariance(10, 100, 18),
    ];
    out.extend(regret_experiment(s(25, 6), 100, 19));
    if !fast {
        out.push(rate_slope(50, 20, 200, 1000, 20));
    }
    let mut repro_cfg = ExperimentConfig::standard(20, 2, 21);
    repro_cfg.algorithms = Policy::ALL.to_vec();
    out.extend([
        reproducibility(&repro_cfg),
        krr_equivalence(s(50, 10), s(1000, 200), 22),
        mean_norm_bound(s(2000, 300), 20, 0.1, 23),
        variance_monotonicity(s(50, 10), 24),
        mgf_conditions(),
        normal_cdf_accuracy(),
        lambda_precondition(),
    ]);
    out
}
