//! Report documents and their JSON / CSV encodings.

use std::io::Write;
use std::path::{Path, PathBuf};

use posperturb_core::scenarios::{HypothesisReport, InvarianceReport, Scenario, ScenarioKind};
use posperturb_core::verifier::{
    classify, CorollaryConstants, Statement, StatementReport, Verdict, VocReport,
};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::RunConfig;
use crate::RunError;

/// Slack values carry 17 significant digits; non-finite values become null.
fn sci<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        RawValue::from_string(format!("{x:.16e}"))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryOut {
    pub grid_index: Option<usize>,
    pub grid: Option<f64>,
    pub x_index: usize,
    pub vprime_index: usize,
    #[serde(serialize_with = "sci")]
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOut {
    pub x_index: usize,
    pub vprime_index: usize,
    pub grid: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatementOut {
    pub statement: Statement,
    #[serde(serialize_with = "sci")]
    pub min_slack: f64,
    pub argmin: Option<WitnessOut>,
    pub samples_evaluated: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub entries: Vec<EntryOut>,
}

impl From<&StatementReport> for StatementOut {
    fn from(r: &StatementReport) -> Self {
        StatementOut {
            statement: r.statement,
            min_slack: r.min_slack,
            argmin: r.argmin.map(|w| WitnessOut {
                x_index: w.x_index,
                vprime_index: w.v_index,
                grid: w.grid,
            }),
            samples_evaluated: r.samples_evaluated,
            tolerance: r.tolerance,
            verdict: r.verdict,
            entries: r
                .entries
                .iter()
                .map(|e| EntryOut {
                    grid_index: e.grid_index,
                    grid: e.grid,
                    x_index: e.x_index,
                    vprime_index: e.v_index,
                    slack: e.slack,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub label: String,
    pub kind: ScenarioKind,
    pub dim: usize,
    pub m: f64,
    pub omega: f64,
    pub tolerance: f64,
    pub sample_count: usize,
    pub sample_seed: u64,
}

impl From<&Scenario> for ScenarioInfo {
    fn from(s: &Scenario) -> Self {
        ScenarioInfo {
            label: s.label.clone(),
            kind: s.kind.clone(),
            dim: s.dim(),
            m: s.m,
            omega: s.omega,
            tolerance: s.tolerance,
            sample_count: s.sample_count,
            sample_seed: s.sample_seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Grids {
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceOut {
    pub agreement: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
    pub config: RunConfig,
    pub scenario: ScenarioInfo,
    pub grids: Grids,
    pub tolerance: f64,
    pub hypothesis: HypothesisReport,
    pub statements: Vec<StatementOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corollary_constants: Option<CorollaryConstants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voc: Option<VocReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub invariance: Vec<InvarianceReport>,
    pub errors: Vec<String>,
    pub status: &'static str,
    pub exit_code: i32,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per evaluated slack, in report order.
    pub fn to_csv(&self) -> String {
        csv_rows(&self.statements)
    }

    /// Base name for the report files.
    pub fn file_stem(&self) -> String {
        let mut out = String::new();
        for c in self.scenario.label.chars() {
            if c.is_ascii_alphanumeric() || c == '.' {
                out.push(c);
            } else if !out.ends_with('-') {
                out.push('-');
            }
        }
        out.trim_matches('-').to_string()
    }
}

pub const CSV_HEADER: [&str; 6] = [
    "statement",
    "t_or_lambda",
    "x_index",
    "vprime_index",
    "slack",
    "verdict",
];

pub fn csv_rows(statements: &[StatementOut]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for s in statements {
        for e in &s.entries {
            w.write_record([
                s.statement.to_string(),
                e.grid.map(|g| g.to_string()).unwrap_or_default(),
                e.x_index.to_string(),
                e.vprime_index.to_string(),
                format!("{:e}", e.slack),
                classify(e.slack, s.tolerance).as_str().to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<PathBuf, RunError> {
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(path.to_path_buf())
}
