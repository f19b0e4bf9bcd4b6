use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gpbandit::confidence::{regret_bound, BoundParams};
use gpbandit::gp::information_gain;
use gpbandit::harness::checks::selfcheck;
use gpbandit::harness::experiment::{
    build_grid, meta_text, prepare_trial, run_experiment, run_trajectory, simple_regret,
};
use gpbandit::harness::report::{aggregate, export_csv, parse_csv_file, render_svg};
use gpbandit::{Error, ExperimentConfig, Policy};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_SELFCHECK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gpbandit",
    version,
    about = "GP bandit simple-regret experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment; writes records.csv and meta.txt into --out.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plot mean simple regret ± standard error from a records CSV.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the numerical self-check suite.
    Selfcheck {
        #[arg(long)]
        fast: bool,
    },
    /// Print the MVR regret bound next to the realized information gain.
    Bound {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidInput(_) | Error::InvalidDelta(_) => EXIT_CONFIG,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_NUMERICAL,
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, ExitCode> {
    ExperimentConfig::from_file(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG)
    })
}

fn run(config: PathBuf, out: PathBuf) -> Result<(), ExitCode> {
    let cfg = load_config(&config)?;
    let fail = |e: Error| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    };
    let output = run_experiment(&cfg).map_err(fail)?;
    std::fs::create_dir_all(&out).map_err(|e| fail(e.into()))?;
    export_csv(&output.records, &out.join("records.csv")).map_err(fail)?;
    std::fs::write(out.join("meta.txt"), meta_text(&output)).map_err(|e| fail(e.into()))?;
    for (alg, curve) in aggregate(&output.records) {
        if let Some(last) = curve.last() {
            println!(
                "{alg:<7} n={:<5} mean simple regret {:.6e} ± {:.2e}",
                last.n, last.mean, last.stderr
            );
        }
    }
    Ok(())
}

fn report(input: PathBuf, out: PathBuf) -> Result<(), ExitCode> {
    let fail = |e: Error| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_CONFIG)
    };
    let records = parse_csv_file(&input).map_err(fail)?;
    render_svg(&aggregate(&records), &out).map_err(fail)
}

fn bound(config: PathBuf) -> Result<(), ExitCode> {
    let cfg = load_config(&config)?;
    let fail = |e: Error| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    };
    let go = || -> gpbandit::Result<()> {
        let grid = build_grid(&cfg)?;
        let kernel = cfg.kernel_spec()?;
        println!("trial,N,lambda,B,gamma_N_realized,bound,mvr_simple_regret");
        for trial in 0..cfg.trials {
            let setup = prepare_trial(&cfg, &grid, trial)?;
            let traj = run_trajectory(&cfg, &grid, &setup, Policy::Mvr)?;
            let gamma = information_gain(kernel, setup.lambda, &traj.selected_points(&grid))?;
            let b = cfg.ucb_b.or(setup.objective.rkhs_norm()).unwrap_or(1.0);
            let params = BoundParams::with_c(b, cfg.delta, cfg.bound_c, cfg.objective_dim())?;
            let value = regret_bound(
                cfg.budget,
                gamma,
                &params,
                &setup.concentration(),
                setup.lambda,
            )?;
            let regret = simple_regret(&setup.objective, traj.recommendation)?;
            println!(
                "{trial},{},{:.6e},{b:.6e},{gamma:.6e},{value:.6e},{regret:.6e}",
                cfg.budget, setup.lambda
            );
        }
        Ok(())
    };
    go().map_err(fail)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Report { input, out } => report(input, out),
        Command::Bound { config } => bound(config),
        Command::Selfcheck { fast } => {
            let results = selfcheck(fast);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            if failed > 0 {
                Err(ExitCode::from(EXIT_SELFCHECK))
            } else {
                Ok(())
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
