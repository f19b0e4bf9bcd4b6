//! Experiment configuration, execution, reporting and self-checks.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod report;
