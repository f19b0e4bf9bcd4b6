//! Gaussian-process bandits over finite candidate sets.
//!
//! * [`kernels`]: SE and half-integer Matérn kernels.
//! * [`gp`]: exact posterior inference on a Cholesky factor, incremental
//!   updates, information gain and the variance decomposition.
//! * [`confidence`]: confidence intervals for RKHS functions under
//!   sub-Gaussian and light-tailed noise, and the MVR regret bound.
//! * [`policies`]: maximum variance reduction (MVR) and the IGP-UCB, GP-PI
//!   and GP-EI baselines.
//! * [`noise`], [`objectives`]: noise models and test functions.
//! * [`harness`]: seeded multi-trial experiments, CSV/SVG output and the
//!   self-check suite.

// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod confidence;
pub mod error;
pub mod gp;
pub mod harness;
pub mod kernels;
pub mod noise;
pub mod objectives;
pub mod oracle;
pub mod policies;

pub use confidence::{BoundParams, ConcentrationParams, ConfidenceInterval};
pub use error::{Error, Result};
pub use gp::{Posterior, VarianceDecomposition, WeightVector};
pub use harness::config::ExperimentConfig;
pub use harness::experiment::{run_experiment, RegretRecord};
pub use kernels::{KernelSpec, Point};
pub use noise::NoiseModel;
pub use objectives::Objective;
pub use policies::{CandidateSet, Policy, Trajectory};
