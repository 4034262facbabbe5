//! Batch runner: reads a JSON run configuration, builds the scenario, runs
//! the requested checks and writes JSON / CSV reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod registry;
pub mod report;
pub mod run;

use std::path::PathBuf;

pub use config::{Check, CorollaryConfig, Format, RunConfig, ScenarioConfig};
pub use run::{evaluate, run, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

/// Failures that stop a run before a report exists.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Numeric(_) => EXIT_NUMERIC,
            RunError::Io(_) => EXIT_IO,
        }
    }
}

/// Flag values layered over a configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub tmax: Option<f64>,
    pub lambda_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

/// Fractions of `--tmax` forming the time grid.
pub const TMAX_FRACTIONS: [f64; 4] = [0.05, 0.25, 0.5, 1.0];
/// Fractions of `--lambda-max` forming the offsets above ω.
pub const LAMBDA_FRACTIONS: [f64; 4] = [0.1, 0.2, 0.5, 1.0];

impl Overrides {
    /// Resolves the configuration from an optional base document. A
    /// `--scenario` naming a different builder replaces the base scenario
    /// with that builder's defaults.
    pub fn resolve(&self, base: Option<RunConfig>) -> Result<RunConfig, RunError> {
        let mut cfg = match (base, &self.scenario) {
            (Some(cfg), None) => cfg,
            (Some(mut cfg), Some(name)) => {
                if cfg.scenario.name() != name {
                    cfg.scenario = ScenarioConfig::defaults(name)?;
                }
                cfg
            }
            (None, Some(name)) => RunConfig::for_scenario(ScenarioConfig::defaults(name)?),
            (None, None) => {
                return Err(RunError::Usage(
                    "either --config or --scenario is required".into(),
                ))
            }
        };
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(tol) = self.tol {
            cfg.tolerance = Some(tol);
        }
        if let Some(t) = self.tmax {
            if !(t > 0.0) || !t.is_finite() {
                return Err(RunError::Usage(format!("--tmax must be > 0, got {t}")));
            }
            cfg.t_grid = Some(TMAX_FRACTIONS.iter().map(|f| f * t).collect());
        }
        if let Some(l) = self.lambda_max {
            cfg.lambda_offsets = Some(LAMBDA_FRACTIONS.iter().map(|f| f * l).collect());
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(f) = &self.formats {
            cfg.formats = f.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
