use std::path::PathBuf;

use posperturb_core::scenarios::ConeRole;
use posperturb_core::verifier::{
    check_cone_invariance, check_corollary, check_equivalence, check_strong_inequality,
    check_voc_identity, CorollaryConstants, Verdict,
};
use posperturb_core::Error;

use crate::config::{Check, Format, RunConfig};
use crate::registry::build;
use crate::report::{write_atomic, EquivalenceOut, Grids, RunReport, ScenarioInfo, StatementOut};
use crate::{RunError, EXIT_FAIL, EXIT_NUMERIC, EXIT_PASS};

/// Numerical or hypothesis failures end up in the report; everything else
/// means the configuration asked for something the builders reject.
fn is_numeric(e: &Error) -> bool {
    matches!(
        e,
        Error::Precision { .. }
            | Error::Hypothesis(_)
            | Error::Singular { .. }
            | Error::Convergence { .. }
            | Error::Divergence { .. }
    )
}

fn classify_error(e: Error) -> RunError {
    if is_numeric(&e) {
        RunError::Numeric(e.to_string())
    } else {
        RunError::Usage(e.to_string())
    }
}

fn timestamp() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_default()
}

/// Builds the scenario and runs the requested checks. Nothing is written.
pub fn evaluate(config: &RunConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    let scn = build(&config.scenario, config.seed)
        .map_err(classify_error)?
        .with_execution(config.execution);
    let tol = config.tolerance.unwrap_or(scn.tolerance);
    let t_grid = config.t_grid();
    let lambdas: Vec<f64> = config
        .lambda_offsets()
        .iter()
        .map(|d| scn.omega + d)
        .collect();

    let mut statements = Vec::new();
    let mut equivalence = None;
    let mut corollary_constants = None;
    let mut voc = None;
    let mut invariance = Vec::new();
    let mut errors = Vec::new();
    for check in config.checks() {
        let outcome: posperturb_core::Result<()> = (|| {
            match check {
                Check::Equivalence => {
                    let v = check_equivalence(&scn, &t_grid, &lambdas, tol)?;
                    statements.extend(v.reports().map(StatementOut::from));
                    equivalence = Some(EquivalenceOut {
                        agreement: v.agreement,
                        notes: v.notes,
                    });
                }
                Check::Corollary => {
                    let c = config.corollary.expect("validated");
                    let c1 = c.c1.unwrap_or(c.m * c.c3);
                    let constants = CorollaryConstants {
                        m: c.m,
                        omega: c.omega,
                        c1,
                        c2: c.c2.unwrap_or(c1),
                        c3: c.c3,
                    };
                    corollary_constants = Some(constants);
                    let lam: Vec<f64> = config
                        .lambda_offsets()
                        .iter()
                        .map(|d| c.omega.max(scn.omega) + d)
                        .collect();
                    let r = check_corollary(&scn, constants, &t_grid, &lam, tol)?;
                    statements.extend([&r.extra, &r.a, &r.b, &r.c].map(StatementOut::from));
                }
                Check::Strong => {
                    statements.push(StatementOut::from(&check_strong_inequality(
                        &scn, &t_grid, tol,
                    )?));
                }
                Check::Voc => voc = Some(check_voc_identity(&scn, &t_grid, tol)?),
                Check::Invariance => {
                    let lam: Vec<f64> = config
                        .lambda_offsets()
                        .iter()
                        .map(|d| scn.omega.max(0.0) + d)
                        .collect();
                    for role in [ConeRole::K, ConeRole::L] {
                        invariance.push(check_cone_invariance(&scn, role, &t_grid, &lam, tol)?);
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            if !is_numeric(&e) {
                return Err(RunError::Usage(e.to_string()));
            }
            errors.push(format!(
                "{}: {e}",
                serde_json::to_value(check).unwrap().as_str().unwrap()
            ));
        }
    }

    let failed = statements.iter().any(|s| s.verdict == Verdict::Fail)
        || voc.as_ref().is_some_and(|v| !v.passed)
        || invariance.iter().any(|r| !r.passed);
    let (status, exit_code) = if !errors.is_empty() {
        ("error", EXIT_NUMERIC)
    } else if failed {
        ("fail", EXIT_FAIL)
    } else {
        ("pass", EXIT_PASS)
    };
    Ok(RunReport {
        tool: "posperturb",
        version: env!("CARGO_PKG_VERSION"),
        timestamp: timestamp(),
        config: config.clone(),
        scenario: ScenarioInfo::from(&scn),
        grids: Grids {
            t: t_grid,
            lambda: lambdas,
        },
        tolerance: tol,
        hypothesis: scn.hypothesis.clone(),
        statements,
        equivalence,
        corollary_constants,
        voc,
        invariance,
        errors,
        status,
        exit_code,
    })
}

pub struct Outcome {
    pub report: RunReport,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }
}

/// [`evaluate`] followed by writing the requested report files.
pub fn run(config: &RunConfig) -> Result<Outcome, RunError> {
    let report = evaluate(config)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let stem = report.file_stem();
    let mut written = Vec::new();
    for format in &config.formats {
        let (ext, body) = match format {
            Format::Json => ("json", report.to_json()),
            Format::Csv => ("csv", report.to_csv()),
        };
        let path = dir.join(format!("{stem}.{ext}"));
        if !written.contains(&path) {
            written.push(write_atomic(&path, &body)?);
        }
    }
    Ok(Outcome { report, written })
}
