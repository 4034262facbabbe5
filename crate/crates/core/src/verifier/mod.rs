//! Checks of the three equivalent perturbation inequalities (time domain,
//! resolvent, generator), their constant-tracking variants, the cone
//! invariances, the entrywise form and the delay identity.
//!
//! Every check evaluates a slack `rhs - lhs` over pairs of cone samples
//! `(x, v')` and grid points; a statement holds when the minimal slack is at
//! least `-tol`.

mod report;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    duhamel_block, laplace_quadrature, CompositeRule, Estimate, Matrix, QuadratureSpec,
};
use crate::parallel::Execution;
use crate::scenarios::{
    invariance_report, scenario_metzler_random, ConeRole, InvarianceReport, Scenario, ScenarioKind,
};
use crate::spaces::{weighted_adjoint, weighted_dot, Element};

pub use report::{classify, SlackEntry, StatementReport, Verdict, Witness};

/// Default time grid of statement (a).
pub const DEFAULT_TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
/// Default resolvent offsets above the scenario's growth bound.
pub const DEFAULT_LAMBDA_OFFSETS: [f64; 4] = [1.0, 2.0, 5.0, 10.0];
/// Resolvent parameters must exceed `max(ω_S, ω_T)` by this margin.
pub const LAMBDA_MARGIN: f64 = 0.5;
/// Panels of the composite rule for kernel-based Duhamel integrals.
pub const DUHAMEL_PANELS: usize = 64;
const DUHAMEL_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statement {
    A,
    B,
    C,
    CorollaryA,
    CorollaryB,
    CorollaryC,
    ExtraAssumption,
    Strong,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statement::A => "a",
            Statement::B => "b",
            Statement::C => "c",
            Statement::CorollaryA => "corollary-a",
            Statement::CorollaryB => "corollary-b",
            Statement::CorollaryC => "corollary-c",
            Statement::ExtraAssumption => "extra-assumption",
            Statement::Strong => "strong",
        })
    }
}

/// Slack entries `⟨D x_i, v_j⟩` for one operator `D` per grid point.
fn pairing_entries(
    exec: Execution,
    grid: &[f64],
    xs: &[Element],
    vs: &[Element],
    weights: &[f64],
    operator: impl Fn(f64) -> Result<Matrix> + Sync + Send,
) -> Result<Vec<SlackEntry>> {
    let per_point = exec.map_indexed(grid.len(), |g| -> Result<Vec<SlackEntry>> {
        let d = operator(grid[g])?;
        let mut out = Vec::with_capacity(xs.len() * vs.len());
        for (i, x) in xs.iter().enumerate() {
            let dx = d.mat_vec(x.values())?;
            for (j, v) in vs.iter().enumerate() {
                out.push(SlackEntry {
                    grid_index: Some(g),
                    grid: Some(grid[g]),
                    x_index: i,
                    v_index: j,
                    slack: weighted_dot(weights, &dx, v.values()),
                });
            }
        }
        Ok(out)
    });
    let mut entries = Vec::new();
    for part in per_point {
        entries.extend(part?);
    }
    Ok(entries)
}

/// `max |⟨E x, v⟩|` over the samples.
fn max_pairing(e: &Matrix, xs: &[Element], vs: &[Element], weights: &[f64]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in xs {
        let ex = e.mat_vec(x.values())?;
        for v in vs {
            worst = worst.max(weighted_dot(weights, &ex, v.values()).abs());
        }
    }
    Ok(worst)
}

fn check_times(grid: &[f64]) -> Result<()> {
    if let Some(t) = grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::Domain(format!(
            "times must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// `∫_0^t S_Y(t-s) B T_Z(s) ds` and, for quadrature, the difference to the
/// rule with half the panels.
fn duhamel_with_estimate(scn: &Scenario, t: f64) -> Result<(Matrix, Option<Matrix>)> {
    if scn.s_y.is_matrix_backend() && scn.t_z.is_matrix_backend() {
        let d = duhamel_block(scn.s_y.generator(), &scn.b, scn.t_z.generator(), t)?;
        return Ok((d, None));
    }
    let n = scn.dim();
    if t == 0.0 {
        return Ok((Matrix::zeros(n, n), Some(Matrix::zeros(n, n))));
    }
    // s = t - u^2 removes the t^{-1/2} behaviour of an unresolved kernel at s = t.
    let integrand = |u: f64| -> Vec<f64> {
        let inner = scn
            .t_z
            .evaluate(t - u * u)
            .and_then(|tz| scn.b.mul(&tz))
            .and_then(|btz| scn.s_y.evaluate(u * u)?.mul(&btz));
        match inner {
            Ok(m) => m.as_slice().iter().map(|v| 2.0 * u * v).collect(),
            Err(_) => vec![f64::NAN; n * n],
        }
    };
    let u_max = t.sqrt();
    let fine = CompositeRule::new(0.0, u_max, DUHAMEL_PANELS, DUHAMEL_POINTS)
        .integrate_vec(n * n, integrand);
    let coarse = CompositeRule::new(0.0, u_max, DUHAMEL_PANELS / 2, DUHAMEL_POINTS)
        .integrate_vec(n * n, integrand);
    let fine = Matrix::from_row_major(n, n, fine)?;
    let coarse = Matrix::from_row_major(n, n, coarse)?;
    let diff = fine.sub(&coarse)?;
    Ok((fine, Some(diff)))
}

/// The Duhamel operator `∫_0^t S_Y(t-s) B T_Z(s) ds`: the block-exponential
/// value for matrix backends, composite quadrature otherwise.
pub fn duhamel_term(scn: &Scenario, t: f64) -> Result<Matrix> {
    check_times(&[t])?;
    Ok(duhamel_with_estimate(scn, t)?.0)
}

/// `S(t) + ∫ S_Y(t-s) B T_Z(s) ds - T(t)`, refusing quadrature estimates
/// above `tol / 10` on the samples.
fn statement_a_operator(
    scn: &Scenario,
    t: f64,
    xs: &[Element],
    vs: &[Element],
    tol: f64,
) -> Result<Matrix> {
    let (duh, diff) = duhamel_with_estimate(scn, t)?;
    if let Some(diff) = diff {
        let estimate = max_pairing(&diff, xs, vs, scn.x.weights())?;
        if estimate > tol / 10.0 {
            return Err(Error::Precision {
                estimate,
                limit: tol / 10.0,
            });
        }
    }
    scn.s.evaluate(t)?.add(&duh)?.sub(&scn.t.evaluate(t)?)
}

/// Statement (a): `⟨T(t)x, v'⟩ <= ⟨S(t)x, v'⟩ + ∫_0^t ⟨S_Y(t-s) B T_Z(s) x, v'⟩ ds`.
pub fn check_statement_a(scn: &Scenario, t_grid: &[f64], tol: f64) -> Result<StatementReport> {
    check_times(t_grid)?;
    check_tol(tol)?;
    let (xs, vs) = (scn.k_samples(), scn.l_samples());
    let entries = pairing_entries(scn.execution, t_grid, &xs, &vs, scn.x.weights(), |t| {
        statement_a_operator(scn, t, &xs, &vs, tol)
    })?;
    Ok(StatementReport::from_entries(Statement::A, tol, entries))
}

/// Slack of statement (a) for one pair at one time.
pub fn slack_a_at(scn: &Scenario, t: f64, x: &Element, v: &Element) -> Result<f64> {
    check_times(&[t])?;
    let d = scn
        .s
        .evaluate(t)?
        .add(&duhamel_term(scn, t)?)?
        .sub(&scn.t.evaluate(t)?)?;
    Ok(weighted_dot(
        scn.x.weights(),
        &d.mat_vec(x.values())?,
        v.values(),
    ))
}

/// `∫_0^∞ e^{-λt} slack_a(t, x, v') dt`, which equals the statement (b)
/// slack at `λ`.
pub fn laplace_of_slack_a(
    scn: &Scenario,
    lambda: f64,
    x: &Element,
    v: &Element,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    laplace_quadrature(
        |t| slack_a_at(scn, t, x, v).unwrap_or(f64::NAN),
        lambda,
        scn.m,
        scn.omega,
        spec,
    )
}

fn require_lambda(scn: &Scenario, lambda: f64) -> Result<()> {
    let omega = scn.s.bound().omega.max(scn.t.bound().omega);
    if !(lambda > omega + LAMBDA_MARGIN) {
        return Err(Error::Divergence { lambda, omega });
    }
    Ok(())
}

/// Panel counts tried in turn for the weak Laplace transforms of statement
/// (b). Kernel backends need the finer rules at small `t`.
const RESOLVENT_PANELS: [usize; 5] = [32, 64, 128, 256, 512];

fn statement_b_operator(
    scn: &Scenario,
    lambda: f64,
    xs: &[Element],
    vs: &[Element],
    tol: f64,
) -> Result<Matrix> {
    let mass = |s: &[Element]| {
        s.iter()
            .map(|e| e.values().iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let wmax = scn.x.weights().iter().copied().fold(0.0, f64::max);
    let scale = mass(xs) * mass(vs) * wmax;
    let mut estimate = 0.0;
    for panels in RESOLVENT_PANELS {
        let spec = QuadratureSpec {
            panels,
            ..QuadratureSpec::default()
        };
        let rs = scn.s.resolvent(lambda, &spec)?;
        let rt = scn.t.resolvent(lambda, &spec)?;
        let rsy = scn.s_y.resolvent(lambda, &spec)?;
        let rtz = scn.t_z.resolvent(lambda, &spec)?;
        let b_rtz = scn.b.mul(&rtz.operator)?;
        let rsy_b = rsy.operator.mul(&scn.b)?;
        let entry_error =
            rs.error + rt.error + rsy.error * b_rtz.norm_1() + rsy_b.norm_inf() * rtz.error;
        estimate = entry_error * scale;
        if estimate <= tol / 10.0 {
            return rs
                .operator
                .add(&rsy.operator.mul(&b_rtz)?)?
                .sub(&rt.operator);
        }
    }
    Err(Error::Precision {
        estimate,
        limit: tol / 10.0,
    })
}

/// Statement (b): `⟨R_T x, v'⟩ <= ⟨R_S x, v'⟩ + ⟨R_{S_Y} B R_{T_Z} x, v'⟩` with
/// `R_•` the resolvent (or weak Laplace transform) at `λ`.
pub fn check_statement_b(scn: &Scenario, lambda_grid: &[f64], tol: f64) -> Result<StatementReport> {
    check_tol(tol)?;
    for &lambda in lambda_grid {
        require_lambda(scn, lambda)?;
    }
    let (xs, vs) = (scn.k_samples(), scn.l_samples());
    let entries = pairing_entries(
        scn.execution,
        lambda_grid,
        &xs,
        &vs,
        scn.x.weights(),
        |lambda| statement_b_operator(scn, lambda, &xs, &vs, tol),
    )?;
    Ok(StatementReport::from_entries(Statement::B, tol, entries))
}

fn generator_entries(scn: &Scenario, c: f64) -> Result<Vec<SlackEntry>> {
    let weights = scn.x.weights();
    let adjoint = weighted_adjoint(scn.s.generator(), weights)?;
    let (xs, vs) = (scn.k_samples(), scn.l_samples());
    let mut entries = Vec::with_capacity(xs.len() * vs.len());
    for (i, x) in xs.iter().enumerate() {
        let bx = scn.b.mat_vec(x.values())?;
        let ax = scn.t.generator().mat_vec(x.values())?;
        for (j, v) in vs.iter().enumerate() {
            let adj_v = adjoint.mat_vec(v.values())?;
            let slack = weighted_dot(weights, x.values(), &adj_v)
                + c * weighted_dot(weights, &bx, v.values())
                - weighted_dot(weights, &ax, v.values());
            entries.push(SlackEntry {
                grid_index: None,
                grid: None,
                x_index: i,
                v_index: j,
                slack,
            });
        }
    }
    Ok(entries)
}

/// Statement (c): `⟨A_T u, v'⟩ <= ⟨u, A_S' v'⟩ + ⟨Bu, v'⟩`, with `A_S'` the
/// adjoint under the weighted pairing.
pub fn check_statement_c(scn: &Scenario, tol: f64) -> Result<StatementReport> {
    check_tol(tol)?;
    Ok(StatementReport::from_entries(
        Statement::C,
        tol,
        generator_entries(scn, 1.0)?,
    ))
}

/// Verdicts of the three statements on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub a: StatementReport,
    pub b: StatementReport,
    pub c: StatementReport,
    /// All non-marginal verdicts coincide.
    pub agreement: bool,
    pub notes: Vec<String>,
}

impl EquivalenceVerdict {
    pub fn reports(&self) -> [&StatementReport; 3] {
        [&self.a, &self.b, &self.c]
    }
}

/// Runs (a), (b) and (c) and compares their verdicts.
pub fn check_equivalence(
    scn: &Scenario,
    t_grid: &[f64],
    lambda_grid: &[f64],
    tol: f64,
) -> Result<EquivalenceVerdict> {
    if !scn.hypothesis.passed {
        return Err(Error::Hypothesis(format!(
            "{} failed its invariant battery",
            scn.label
        )));
    }
    let a = check_statement_a(scn, t_grid, tol)?;
    let b = check_statement_b(scn, lambda_grid, tol)?;
    let c = check_statement_c(scn, tol)?;
    let decided: Vec<&StatementReport> = [&a, &b, &c]
        .into_iter()
        .filter(|r| r.verdict != Verdict::Marginal)
        .collect();
    let agreement = decided.windows(2).all(|w| w[0].verdict == w[1].verdict);
    let mut notes = Vec::new();
    if !agreement {
        for r in [&a, &b, &c] {
            notes.push(r.summary());
        }
    }
    for r in [&a, &b, &c] {
        if r.verdict == Verdict::Marginal {
            notes.push(format!(
                "statement {} is marginal and excluded",
                r.statement
            ));
        }
    }
    Ok(EquivalenceVerdict {
        a,
        b,
        c,
        agreement,
        notes,
    })
}

/// The bound `⟨S_Y(t-s) B T_Z(s) x, v'⟩ <= M e^{ωt} ⟨Bx, v'⟩` on `(s, t)` pairs.
pub fn check_extra_assumption(
    scn: &Scenario,
    m: f64,
    omega: f64,
    st_grid: &[(f64, f64)],
    tol: f64,
) -> Result<StatementReport> {
    check_tol(tol)?;
    if let Some((s, t)) = st_grid.iter().find(|(s, t)| !(0.0 <= *s && s <= t)) {
        return Err(Error::Domain(format!(
            "pairs need 0 <= s <= t, got ({s}, {t})"
        )));
    }
    let (xs, vs) = (scn.k_samples(), scn.l_samples());
    let ts: Vec<f64> = st_grid.iter().map(|p| p.1).collect();
    let mut entries = pairing_entries(
        scn.execution,
        &(0..st_grid.len()).map(|i| i as f64).collect::<Vec<_>>(),
        &xs,
        &vs,
        scn.x.weights(),
        |idx| {
            let (s, t) = st_grid[idx as usize];
            let inner = scn
                .s_y
                .evaluate(t - s)?
                .mul(&scn.b.mul(&scn.t_z.evaluate(s)?)?)?;
            scn.b.scale(m * (omega * t).exp()).sub(&inner)
        },
    )?;
    for e in &mut entries {
        e.grid = e.grid_index.map(|g| ts[g]);
    }
    Ok(StatementReport::from_entries(
        Statement::ExtraAssumption,
        tol,
        entries,
    ))
}

/// `(s, t)` pairs with `s ∈ {0, t/4, t/2, 3t/4, t}` for every `t`.
pub fn st_pairs(t_grid: &[f64]) -> Vec<(f64, f64)> {
    t_grid
        .iter()
        .flat_map(|&t| [0.0, 0.25, 0.5, 0.75, 1.0].map(|f| (f * t, t)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryConstants {
    pub m: f64,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub constants: CorollaryConstants,
    pub extra: StatementReport,
    pub a: StatementReport,
    pub b: StatementReport,
    pub c: StatementReport,
}

/// The constant-tracking statements under the extra assumption:
/// `T(t) <= S(t) + C1 t e^{ωt} B`, `R_T <= R_S + C2/(λ-ω)^2 B` and
/// `A_T <= A_S + C3 B`, each tested on cone samples. The extra assumption is
/// checked first on [`st_pairs`] of `t_grid`.
pub fn check_corollary(
    scn: &Scenario,
    constants: CorollaryConstants,
    t_grid: &[f64],
    lambda_grid: &[f64],
    tol: f64,
) -> Result<CorollaryReport> {
    check_times(t_grid)?;
    check_tol(tol)?;
    let CorollaryConstants {
        m,
        omega,
        c1,
        c2,
        c3,
    } = constants;
    if !(m >= 1.0) || [c1, c2, c3].iter().any(|c| !(*c >= 0.0)) {
        return Err(Error::Domain(
            "need M >= 1 and nonnegative constants".into(),
        ));
    }
    let extra = check_extra_assumption(scn, m, omega, &st_pairs(t_grid), tol)?;
    if !extra.holds() {
        return Err(Error::Hypothesis(format!(
            "extra assumption fails for M = {m}, omega = {omega}: {}",
            extra.summary()
        )));
    }
    for &lambda in lambda_grid {
        if !(lambda > omega) {
            return Err(Error::Divergence { lambda, omega });
        }
        require_lambda(scn, lambda)?;
    }
    let (xs, vs) = (scn.k_samples(), scn.l_samples());
    let w = scn.x.weights();
    let a_entries = pairing_entries(scn.execution, t_grid, &xs, &vs, w, |t| {
        scn.s
            .evaluate(t)?
            .add(&scn.b.scale(c1 * t * (omega * t).exp()))?
            .sub(&scn.t.evaluate(t)?)
    })?;
    let spec = QuadratureSpec::default();
    let b_entries = pairing_entries(scn.execution, lambda_grid, &xs, &vs, w, |lambda| {
        scn.s
            .resolvent(lambda, &spec)?
            .operator
            .add(&scn.b.scale(c2 / (lambda - omega).powi(2)))?
            .sub(&scn.t.resolvent(lambda, &spec)?.operator)
    })?;
    Ok(CorollaryReport {
        constants,
        extra,
        a: StatementReport::from_entries(Statement::CorollaryA, tol, a_entries),
        b: StatementReport::from_entries(Statement::CorollaryB, tol, b_entries),
        c: StatementReport::from_entries(Statement::CorollaryC, tol, generator_entries(scn, c3)?),
    })
}

/// Invariance of `K` (under `T` and `λ(λ - A_T)^{-1}`) or `L` (under the
/// adjoints of `S` and `λ R_S(λ)`), both families reported.
pub fn check_cone_invariance(
    scn: &Scenario,
    which: ConeRole,
    t_grid: &[f64],
    lambda_grid: &[f64],
    tol: f64,
) -> Result<InvarianceReport> {
    check_times(t_grid)?;
    check_tol(tol)?;
    match which {
        ConeRole::K => invariance_report(
            which,
            &scn.k,
            &scn.t,
            &scn.k_samples(),
            t_grid,
            lambda_grid,
            tol,
        ),
        ConeRole::L => invariance_report(
            which,
            &scn.l,
            &scn.s,
            &scn.l_samples(),
            t_grid,
            lambda_grid,
            tol,
        ),
    }
}

/// Entrywise form `T(t)u <= S(t)u + ∫_0^t S(t-s) B T_Z(s) u ds` for cone
/// samples `u`; `v_index` of each entry is the coordinate. Requires `L` to
/// be the full orthant, which detects positivity coordinatewise.
pub fn check_strong_inequality(
    scn: &Scenario,
    t_grid: &[f64],
    tol: f64,
) -> Result<StatementReport> {
    check_times(t_grid)?;
    check_tol(tol)?;
    if !scn.l.is_full_orthant() {
        return Err(Error::Inapplicable(
            "L does not detect positivity coordinatewise".into(),
        ));
    }
    let xs = scn.k_samples();
    let n = scn.dim();
    let vs: Vec<Element> = (0..n).map(|i| scn.e.basis(i)).collect();
    let per_point = scn
        .execution
        .map_indexed(t_grid.len(), |g| -> Result<Vec<SlackEntry>> {
            let d = statement_a_operator(scn, t_grid[g], &xs, &vs, tol)?;
            let mut out = Vec::with_capacity(xs.len() * n);
            for (i, x) in xs.iter().enumerate() {
                for (j, slack) in d.mat_vec(x.values())?.into_iter().enumerate() {
                    out.push(SlackEntry {
                        grid_index: Some(g),
                        grid: Some(t_grid[g]),
                        x_index: i,
                        v_index: j,
                        slack,
                    });
                }
            }
            Ok(out)
        });
    let mut entries = Vec::new();
    for part in per_point {
        entries.extend(part?);
    }
    Ok(StatementReport::from_entries(
        Statement::Strong,
        tol,
        entries,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocReport {
    /// `(t, max |T(t) - S(t) - ∫ S(t-s) B̃ T(s) ds|)` per grid point.
    pub residuals: Vec<(f64, f64)>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `T(t) = S(t) + ∫_0^t S(t-s) B̃ T(s) ds` for delay scenarios, with the
/// integral from the block exponential.
pub fn check_voc_identity(scn: &Scenario, t_grid: &[f64], tol: f64) -> Result<VocReport> {
    check_times(t_grid)?;
    let ScenarioKind::Delay { b_tilde, .. } = &scn.kind else {
        return Err(Error::Inapplicable(format!(
            "{} is not a delay scenario",
            scn.label
        )));
    };
    let residuals = scn
        .execution
        .map_indexed(t_grid.len(), |g| -> Result<(f64, f64)> {
            let t = t_grid[g];
            let duh = duhamel_block(scn.s.generator(), b_tilde, scn.t.generator(), t)?;
            let r = scn.t.evaluate(t)?.sub(&scn.s.evaluate(t)?)?.sub(&duh)?;
            Ok((t, r.max_abs()))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(VocReport {
        residuals,
        max_residual,
        tolerance: tol,
        passed: max_residual <= tol,
    })
}

/// Parameters of a seeded sweep over random positive instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub n_min: usize,
    pub n_max: usize,
    pub gap: f64,
    pub t_grid: Vec<f64>,
    pub lambda_offsets: Vec<f64>,
    pub tol: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            n_min: 2,
            n_max: 6,
            gap: 0.5,
            t_grid: DEFAULT_TIMES.to_vec(),
            lambda_offsets: DEFAULT_LAMBDA_OFFSETS.to_vec(),
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub seed: u64,
    pub n: usize,
    pub constructed_true: bool,
    pub verdict: EquivalenceVerdict,
}

/// Builds `scenario_metzler_random(n, seed, gap)` with
/// `n = n_min + seed mod (n_max - n_min + 1)` for every seed and runs
/// [`check_equivalence`] on the grid `ω + offsets`. Instances run under
/// `exec`; the checks inside each instance run sequentially.
pub fn equivalence_sweep(
    seeds: &[u64],
    settings: &SweepSettings,
    exec: Execution,
) -> Result<Vec<SweepOutcome>> {
    if settings.n_min > settings.n_max {
        return Err(Error::Domain("n_min exceeds n_max".into()));
    }
    let span = (settings.n_max - settings.n_min + 1) as u64;
    exec.map(seeds, |&seed| -> Result<SweepOutcome> {
        let n = settings.n_min + (seed % span) as usize;
        let scn =
            scenario_metzler_random(n, seed, settings.gap)?.with_execution(Execution::Sequential);
        let lambdas: Vec<f64> = settings
            .lambda_offsets
            .iter()
            .map(|d| scn.omega + d)
            .collect();
        let verdict = check_equivalence(&scn, &settings.t_grid, &lambdas, settings.tol)?;
        Ok(SweepOutcome {
            seed,
            n,
            constructed_true: scn.constructed_flag().unwrap_or(false),
            verdict,
        })
    })
    .into_iter()
    .collect()
}
