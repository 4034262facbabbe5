//! Run configuration: a single JSON document, optionally overridden by flags.

use std::path::{Path, PathBuf};

use posperturb_core::verifier::{DEFAULT_LAMBDA_OFFSETS, DEFAULT_TIMES, LAMBDA_MARGIN};
use posperturb_core::Execution;
use serde::{Deserialize, Serialize};

use crate::RunError;

/// A constant or one value per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Values(Vec<f64>),
}

impl Profile {
    pub fn expand(&self, len: usize) -> Vec<f64> {
        match self {
            Profile::Constant(c) => vec![*c; len],
            Profile::Values(v) => v.clone(),
        }
    }
}

fn n4() -> usize {
    4
}
fn half() -> f64 {
    0.5
}
fn one() -> usize {
    1
}
fn four() -> f64 {
    4.0
}
fn nodes41() -> usize {
    41
}
fn t_ref() -> f64 {
    0.1
}
fn two() -> f64 {
    2.0
}
fn cells() -> usize {
    10
}
fn unit_weights() -> Vec<f64> {
    vec![1.0, 1.0]
}
fn a_s2() -> Vec<Vec<f64>> {
    vec![vec![-2.0, 0.5], vec![0.5, -2.0]]
}
fn a_t2() -> Vec<Vec<f64>> {
    vec![vec![-2.0, 1.0], vec![0.75, -2.0]]
}
fn a0() -> Vec<Vec<f64>> {
    vec![vec![-1.0]]
}
fn eta() -> Profile {
    Profile::Constant(0.5)
}
fn rho() -> Profile {
    Profile::Constant(1.0)
}
fn ones() -> Profile {
    Profile::Constant(1.0)
}

/// Builder selector and its parameters; `kind` names the builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    MetzlerRandom {
        #[serde(default = "n4")]
        n: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "half")]
        gap: f64,
    },
    HeatDrift {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default = "four")]
        extent: f64,
        #[serde(default = "nodes41")]
        nodes: usize,
        /// Drift magnitude per node, shared by every axis.
        #[serde(default = "eta")]
        drift: Profile,
        #[serde(default = "t_ref")]
        t_ref: f64,
    },
    RankOneLinfty {
        #[serde(default = "unit_weights")]
        weights: Vec<f64>,
        #[serde(default = "a_s2")]
        a_s: Vec<Vec<f64>>,
        #[serde(default = "a_t2")]
        a_t: Vec<Vec<f64>>,
    },
    RankOneLp {
        #[serde(default = "two")]
        p: f64,
        #[serde(default = "two")]
        q: f64,
        #[serde(default = "unit_weights")]
        weights: Vec<f64>,
        #[serde(default = "ones")]
        f: Profile,
        #[serde(default = "ones")]
        g: Profile,
        #[serde(default = "a_s2")]
        a_s: Vec<Vec<f64>>,
        #[serde(default = "a_t2")]
        a_t: Vec<Vec<f64>>,
    },
    Delay {
        #[serde(default = "a0")]
        a0: Vec<Vec<f64>>,
        #[serde(default = "eta")]
        eta: Profile,
        #[serde(default = "rho")]
        rho: Profile,
        #[serde(default = "two")]
        p: f64,
        #[serde(default = "two")]
        q: f64,
        #[serde(default = "cells")]
        m: usize,
    },
}

pub const SCENARIO_NAMES: [&str; 5] = [
    "metzler-random",
    "heat-drift",
    "rank-one-linfty",
    "rank-one-lp",
    "delay",
];

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::MetzlerRandom { .. } => SCENARIO_NAMES[0],
            ScenarioConfig::HeatDrift { .. } => SCENARIO_NAMES[1],
            ScenarioConfig::RankOneLinfty { .. } => SCENARIO_NAMES[2],
            ScenarioConfig::RankOneLp { .. } => SCENARIO_NAMES[3],
            ScenarioConfig::Delay { .. } => SCENARIO_NAMES[4],
        }
    }

    /// The builder's parameters with every default filled in.
    pub fn defaults(name: &str) -> Result<ScenarioConfig, RunError> {
        if !SCENARIO_NAMES.contains(&name) {
            return Err(RunError::Usage(format!(
                "unknown scenario '{name}' (known: {})",
                SCENARIO_NAMES.join(", ")
            )));
        }
        serde_json::from_value(serde_json::json!({ "kind": name }))
            .map_err(|e| RunError::Usage(e.to_string()))
    }

    fn default_checks(&self) -> Vec<Check> {
        match self {
            ScenarioConfig::Delay { .. } => vec![Check::Equivalence, Check::Strong, Check::Voc],
            _ => vec![Check::Equivalence],
        }
    }

    fn default_times(&self) -> Vec<f64> {
        match self {
            ScenarioConfig::HeatDrift { t_ref, .. } => vec![0.25 * t_ref, 0.5 * t_ref, *t_ref],
            _ => DEFAULT_TIMES.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Statements (a), (b), (c) and their agreement.
    Equivalence,
    /// The constant-tracking corollary; needs a `corollary` block.
    Corollary,
    /// The entrywise form of (a).
    Strong,
    /// The variation-of-constants identity (delay scenarios only).
    Voc,
    /// Invariance of `K` and `L` on the run grids.
    Invariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Constants for the corollary check. `c1` defaults to `m * c3` and `c2`
/// to `c1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorollaryConfig {
    pub m: f64,
    pub omega: f64,
    pub c3: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    /// Seed of the metzler-random builder, or of the cone samples otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    /// Resolvent points as offsets above the scenario's ω.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_offsets: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<Check>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<CorollaryConfig>,
    /// Where reports go; left out of the reports themselves.
    #[serde(default = "default_out", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub execution: Execution,
}

fn default_out() -> PathBuf {
    PathBuf::from("posperturb-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl RunConfig {
    pub fn for_scenario(scenario: ScenarioConfig) -> Self {
        RunConfig {
            scenario,
            seed: None,
            t_grid: None,
            lambda_offsets: None,
            tolerance: None,
            checks: None,
            corollary: None,
            output_dir: default_out(),
            formats: default_formats(),
            execution: Execution::default(),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| RunError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn t_grid(&self) -> Vec<f64> {
        self.t_grid
            .clone()
            .unwrap_or_else(|| self.scenario.default_times())
    }

    pub fn lambda_offsets(&self) -> Vec<f64> {
        self.lambda_offsets
            .clone()
            .unwrap_or_else(|| DEFAULT_LAMBDA_OFFSETS.to_vec())
    }

    pub fn checks(&self) -> Vec<Check> {
        self.checks
            .clone()
            .unwrap_or_else(|| self.scenario.default_checks())
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let usage = |m: String| Err(RunError::Usage(m));
        let t = self.t_grid();
        if t.is_empty() || t.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return usage(format!(
                "t grid must be nonempty with finite times >= 0, got {t:?}"
            ));
        }
        let l = self.lambda_offsets();
        if l.is_empty() || l.iter().any(|d| !(*d > LAMBDA_MARGIN) || !d.is_finite()) {
            return usage(format!(
                "lambda offsets must be nonempty and exceed {LAMBDA_MARGIN}, got {l:?}"
            ));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) || !tol.is_finite() {
                return usage(format!("tolerance must be > 0, got {tol}"));
            }
        }
        let checks = self.checks();
        if checks.is_empty() {
            return usage("no checks requested".into());
        }
        if checks.contains(&Check::Corollary) && self.corollary.is_none() {
            return usage("the corollary check needs a 'corollary' block".into());
        }
        if checks.contains(&Check::Voc) && !matches!(self.scenario, ScenarioConfig::Delay { .. }) {
            return usage("the voc check applies to delay scenarios only".into());
        }
        if self.formats.is_empty() {
            return usage("no output formats requested".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"scenario": {"kind": "delay"}}"#).unwrap();
        assert_eq!(
            c.checks(),
            vec![Check::Equivalence, Check::Strong, Check::Voc]
        );
        assert_eq!(c.formats, vec![Format::Json, Format::Csv]);
        assert_eq!(c.t_grid(), DEFAULT_TIMES.to_vec());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_fields_and_names_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"scenario": {"kind": "x"}}"#).is_err());
        assert!(
            serde_json::from_str::<RunConfig>(r#"{"scenario": {"kind": "delay"}, "tmax": 3}"#)
                .is_err()
        );
        assert!(matches!(
            ScenarioConfig::defaults("nope"),
            Err(RunError::Usage(_))
        ));
    }

    #[test]
    fn every_builder_has_defaults() {
        for name in SCENARIO_NAMES {
            let s = ScenarioConfig::defaults(name).unwrap();
            assert_eq!(s.name(), name);
        }
    }

    #[test]
    fn validation_catches_bad_grids() {
        let mut c = RunConfig::for_scenario(ScenarioConfig::defaults("metzler-random").unwrap());
        c.lambda_offsets = Some(vec![0.25]);
        assert!(c.validate().is_err());
        c.lambda_offsets = None;
        c.checks = Some(vec![Check::Voc]);
        assert!(c.validate().is_err());
        c.checks = Some(vec![Check::Corollary]);
        assert!(c.validate().is_err());
    }
}
