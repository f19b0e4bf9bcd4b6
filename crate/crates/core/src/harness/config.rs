//! `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment. Unknown keys are
//! rejected so that typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::noise::DEFAULT_H0_FRACTION;
use crate::policies::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Se,
    Matern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveChoice {
    Rkhs,
    Hartman3,
    Rosenbrock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseChoice {
    Gaussian,
    Laplace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: KernelKind,
    pub lengthscale: f64,
    pub nu: f64,
    pub objective: ObjectiveChoice,
    /// Anchor count of the RKHS generator.
    pub anchors: usize,
    /// Dimension of RKHS objectives; benchmarks fix their own.
    pub dim: usize,
    pub noise: NoiseChoice,
    pub grid_size: usize,
    pub grid_seed: u64,
    pub budget: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub delta: f64,
    pub algorithms: Vec<Policy>,
    pub alpha: f64,
    /// `λ² = lambda_percent% · range`.
    pub lambda_percent: f64,
    pub h0_fraction: f64,
    /// IGP-UCB norm bound; defaults to the exact RKHS norm when known, else 1.
    pub ucb_b: Option<f64>,
    /// Discretization constant of the regret bound.
    pub bound_c: f64,
}

const KEYS: &[&str] = &[
    "kernel",
    "lengthscale",
    "nu",
    "objective",
    "anchors",
    "dim",
    "noise",
    "grid_size",
    "grid_seed",
    "budget",
    "trials",
    "base_seed",
    "delta",
    "algorithms",
    "alpha",
    "lambda_percent",
    "h0_fraction",
    "ucb_b",
    "bound_c",
];

impl ExperimentConfig {
    /// The 1D RKHS setup: SE with lengthscale 0.2, 100 anchors, 100-point
    /// grid, Gaussian noise, `λ² = 1%` of the range.
    pub fn standard(budget: usize, trials: usize, base_seed: u64) -> Self {
        Self {
            kernel: KernelKind::Se,
            lengthscale: 0.2,
            nu: 2.5,
            objective: ObjectiveChoice::Rkhs,
            anchors: 100,
            dim: 1,
            noise: NoiseChoice::Gaussian,
            grid_size: 100,
            grid_seed: base_seed,
            budget,
            trials,
            base_seed,
            delta: 0.05,
            algorithms: Policy::ALL.to_vec(),
            alpha: 0.01,
            lambda_percent: 1.0,
            h0_fraction: DEFAULT_H0_FRACTION,
            ucb_b: None,
            bound_c: 1.0,
        }
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        match self.kernel {
            KernelKind::Se => KernelSpec::se(self.lengthscale),
            KernelKind::Matern => KernelSpec::matern(self.nu, self.lengthscale),
        }
    }

    pub fn objective_dim(&self) -> usize {
        match self.objective {
            ObjectiveChoice::Rkhs => self.dim,
            ObjectiveChoice::Hartman3 => 3,
            ObjectiveChoice::Rosenbrock => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config { line: 0, msg });
        if self.budget == 0 {
            return bad("budget must be >= 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must name at least one policy".into());
        }
        if self.grid_size == 0 {
            return bad("grid_size must be >= 1".into());
        }
        if self.anchors < 2 {
            return bad("anchors must be >= 2".into());
        }
        if self.dim == 0 {
            return bad("dim must be >= 1".into());
        }
        if !(self.alpha >= 0.0) {
            return bad("alpha must be >= 0".into());
        }
        if !(self.lambda_percent > 0.0) {
            return bad("lambda_percent must be > 0".into());
        }
        if !(self.h0_fraction > 0.0 && self.h0_fraction < 1.0) {
            return bad("h0_fraction must lie in (0, 1)".into());
        }
        if !(self.bound_c > 0.0) {
            return bad("bound_c must be > 0".into());
        }
        if let Some(b) = self.ucb_b {
            if !(b >= 0.0) {
                return bad("ucb_b must be >= 0".into());
            }
        }
        self.kernel_spec().map_err(|e| Error::Config {
            line: 0,
            msg: e.to_string(),
        })?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("unknown key {key:?}"),
                });
            }
            if map.insert(key, (line_no, value.trim())).is_some() {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("duplicate key {key:?}"),
                });
            }
        }
        let fields = Fields(map);

        let kernel = match fields.required("kernel")?.1.to_ascii_lowercase().as_str() {
            "se" => KernelKind::Se,
            "matern" => KernelKind::Matern,
            other => return fields.invalid("kernel", format!("unknown kernel {other:?}")),
        };
        let objective = match fields
            .required("objective")?
            .1
            .to_ascii_lowercase()
            .as_str()
        {
            "rkhs" => ObjectiveChoice::Rkhs,
            "hartman3" | "hartmann3" => ObjectiveChoice::Hartman3,
            "rosenbrock" => ObjectiveChoice::Rosenbrock,
            other => return fields.invalid("objective", format!("unknown objective {other:?}")),
        };
        let noise = match fields.required("noise")?.1.to_ascii_lowercase().as_str() {
            "gaussian" => NoiseChoice::Gaussian,
            "laplace" => NoiseChoice::Laplace,
            other => return fields.invalid("noise", format!("unknown noise {other:?}")),
        };
        let nu = match kernel {
            KernelKind::Matern => fields.parse("nu")?,
            KernelKind::Se => fields.parse_or("nu", 2.5)?,
        };
        let dim: usize = fields.parse_or("dim", 1)?;
        let objective_dim = match objective {
            ObjectiveChoice::Rkhs => dim,
            ObjectiveChoice::Hartman3 => 3,
            ObjectiveChoice::Rosenbrock => 2,
        };
        let base_seed: u64 = fields.parse("base_seed")?;
        let (line, algos) = fields.required("algorithms")?;
        let algorithms = algos
            .split(',')
            .map(|s| s.parse::<Policy>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Config {
                line,
                msg: e.to_string(),
            })?;
        let ucb_b = match fields.0.get("ucb_b") {
            Some(_) => Some(fields.parse("ucb_b")?),
            None => None,
        };
        let cfg = Self {
            kernel,
            lengthscale: fields.parse("lengthscale")?,
            nu,
            objective,
            anchors: fields.parse_or("anchors", 100)?,
            dim,
            noise,
            grid_size: fields.parse_or("grid_size", 100 * objective_dim)?,
            grid_seed: fields.parse_or("grid_seed", base_seed)?,
            budget: fields.parse("budget")?,
            trials: fields.parse("trials")?,
            base_seed,
            delta: fields.parse("delta")?,
            algorithms,
            alpha: fields.parse_or("alpha", 0.01)?,
            lambda_percent: fields.parse_or("lambda_percent", 1.0)?,
            h0_fraction: fields.parse_or("h0_fraction", DEFAULT_H0_FRACTION)?,
            ucb_b,
            bound_c: fields.parse_or("bound_c", 1.0)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serialize to the same format; `parse(to_text())` round-trips.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let kernel = match self.kernel {
            KernelKind::Se => "se",
            KernelKind::Matern => "matern",
        };
        let objective = match self.objective {
            ObjectiveChoice::Rkhs => "rkhs",
            ObjectiveChoice::Hartman3 => "hartman3",
            ObjectiveChoice::Rosenbrock => "rosenbrock",
        };
        let noise = match self.noise {
            NoiseChoice::Gaussian => "gaussian",
            NoiseChoice::Laplace => "laplace",
        };
        let algos: Vec<&str> = self.algorithms.iter().map(|p| p.name()).collect();
        let _ = writeln!(s, "kernel = {kernel}");
        let _ = writeln!(s, "lengthscale = {:?}", self.lengthscale);
        let _ = writeln!(s, "nu = {:?}", self.nu);
        let _ = writeln!(s, "objective = {objective}");
        let _ = writeln!(s, "anchors = {}", self.anchors);
        let _ = writeln!(s, "dim = {}", self.dim);
        let _ = writeln!(s, "noise = {noise}");
        let _ = writeln!(s, "grid_size = {}", self.grid_size);
        let _ = writeln!(s, "grid_seed = {}", self.grid_seed);
        let _ = writeln!(s, "budget = {}", self.budget);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "base_seed = {}", self.base_seed);
        let _ = writeln!(s, "delta = {:?}", self.delta);
        let _ = writeln!(s, "algorithms = {}", algos.join(","));
        let _ = writeln!(s, "alpha = {:?}", self.alpha);
        let _ = writeln!(s, "lambda_percent = {:?}", self.lambda_percent);
        let _ = writeln!(s, "h0_fraction = {:?}", self.h0_fraction);
        if let Some(b) = self.ucb_b {
            let _ = writeln!(s, "ucb_b = {b:?}");
        }
        let _ = writeln!(s, "bound_c = {:?}", self.bound_c);
        s
    }
}

struct Fields<'a>(BTreeMap<&'a str, (usize, &'a str)>);

impl<'a> Fields<'a> {
    fn required(&self, key: &str) -> Result<(usize, &'a str)> {
        self.0.get(key).copied().ok_or_else(|| Error::Config {
            line: 0,
            msg: format!("missing required key {key:?}"),
        })
    }

    fn invalid<T>(&self, key: &str, msg: String) -> Result<T> {
        Err(Error::Config {
            line: self.0.get(key).map_or(0, |v| v.0),
            msg,
        })
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.required(key)?;
        v.parse().map_err(|_| Error::Config {
            line,
            msg: format!("cannot parse {key} = {v:?}"),
        })
    }

    fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.0.contains_key(key) {
            self.parse(key)
        } else {
            Ok(default)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# standard setup
kernel = se
lengthscale = 0.2
objective = rkhs
noise = gaussian
budget = 100
trials = 25
base_seed = 1
delta = 0.05
algorithms = MVR, IGPUCB, GPPI, GPEI
";

    #[test]
    fn minimal_config_matches_standard() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg, ExperimentConfig::standard(100, 25, 1));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::standard(30, 2, 9);
        cfg.kernel = KernelKind::Matern;
        cfg.ucb_b = Some(2.5);
        cfg.noise = NoiseChoice::Laplace;
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_invalid_configs() {
        let cases = [
            MINIMAL.replace("budget = 100", "budget = 0"),
            MINIMAL.replace("delta = 0.05", "delta = 1.0"),
            MINIMAL.replace("base_seed = 1\n", ""),
            MINIMAL.replace("kernel = se", "kernel = matern"),
            MINIMAL.replace("kernel = se", "kernel = rq"),
            format!("{MINIMAL}bogus = 3\n"),
            format!("{MINIMAL}budget = 3\n"),
            format!("{MINIMAL}just some words\n"),
            MINIMAL.replace("GPEI", "GPTS"),
        ];
        for text in cases {
            assert!(
                matches!(ExperimentConfig::parse(&text), Err(Error::Config { .. })),
                "accepted:\n{text}"
            );
        }
    }

    #[test]
    fn benchmark_grid_default_scales_with_dim() {
        let text = MINIMAL.replace("objective = rkhs", "objective = hartman3");
        assert_eq!(ExperimentConfig::parse(&text).unwrap().grid_size, 300);
    }
}
