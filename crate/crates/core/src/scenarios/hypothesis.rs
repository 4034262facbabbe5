//! The invariant battery every scenario runs at build time: consistency of
//! the paired semigroups and invariance of `K` and `L` under the semigroup
//! and resolvent families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, QuadratureSpec};
use crate::semigroups::{check_consistency, ConsistencyReport, GrowthBound, SemigroupHandle};
use crate::spaces::{weighted_adjoint, Cone, Element};

/// Which cone an invariance report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeRole {
    K,
    L,
}

/// Images of cone samples under one family of maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub checked: usize,
    pub failures: usize,
    /// Smallest normalized membership margin; negative means outside.
    pub worst_margin: f64,
    /// Grid value (time or λ) of the worst image.
    pub worst_at: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub cone: ConeRole,
    pub semigroup: FamilyReport,
    pub resolvent: FamilyReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub consistency_s: ConsistencyReport,
    pub consistency_t: ConsistencyReport,
    pub k_invariance: InvarianceReport,
    pub l_invariance: InvarianceReport,
    pub bounds: Vec<(String, GrowthBound)>,
    pub passed: bool,
}

/// Times and resolvent offsets above `max(omega, 0)` used by the build-time
/// battery.
pub const HYPOTHESIS_TIMES: [f64; 3] = [0.05, 0.25, 1.0];
pub const HYPOTHESIS_LAMBDA_OFFSETS: [f64; 2] = [1.0, 10.0];
const CONSISTENCY_TOL: f64 = 1e-12;

fn margin(cone: &Cone, values: &[f64]) -> f64 {
    let scale = 1.0 + values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if cone.is_full_orthant() {
        values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .min(0.0)
            / scale
    } else {
        -cone.distance(values) / scale
    }
}

fn family(
    name: &str,
    cone: &Cone,
    samples: &[Element],
    maps: &[(f64, Matrix)],
    tol: f64,
) -> Result<FamilyReport> {
    let mut checked = 0;
    let mut failures = 0;
    let mut worst_margin = f64::INFINITY;
    let mut worst_at = None;
    for (at, m) in maps {
        for u in samples {
            let image = m.mat_vec(u.values())?;
            checked += 1;
            if !cone.contains_values(&image, tol) {
                failures += 1;
            }
            let mg = margin(cone, &image);
            if mg < worst_margin {
                worst_margin = mg;
                worst_at = Some(*at);
            }
        }
    }
    Ok(FamilyReport {
        family: name.to_string(),
        checked,
        failures,
        worst_margin,
        worst_at,
        passed: failures == 0,
    })
}

/// Invariance of `K` under `T(t)` and `λ(λ - A_T)^{-1}`, or of `L` under the
/// weighted adjoints of `S(t)` and `λ R_S(λ)`. Every `λ` must be positive.
#[allow(clippy::too_many_arguments)]
pub fn invariance_report(
    role: ConeRole,
    cone: &Cone,
    semigroup: &SemigroupHandle,
    samples: &[Element],
    times: &[f64],
    lambdas: &[f64],
    tol: f64,
) -> Result<InvarianceReport> {
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::Domain(format!(
            "lambda R(lambda) needs lambda > 0, got {l}"
        )));
    }
    let weights = cone.space().weights();
    let spec = QuadratureSpec::default();
    let dualize = |m: Matrix| -> Result<Matrix> {
        match role {
            ConeRole::K => Ok(m),
            ConeRole::L => weighted_adjoint(&m, weights),
        }
    };
    let mut sg = Vec::with_capacity(times.len());
    for &t in times {
        sg.push((t, dualize(semigroup.evaluate(t)?)?));
    }
    let mut rs = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let r = semigroup.resolvent(lambda, &spec)?;
        rs.push((lambda, dualize(r.operator.scale(lambda))?));
    }
    let (sg_name, rs_name) = match role {
        ConeRole::K => ("T(t)", "lambda (lambda - A_T)^-1"),
        ConeRole::L => ("S(t)'", "lambda R_S(lambda)'"),
    };
    let semigroup = family(sg_name, cone, samples, &sg, tol)?;
    let resolvent = family(rs_name, cone, samples, &rs, tol)?;
    Ok(InvarianceReport {
        cone: role,
        passed: semigroup.passed && resolvent.passed,
        semigroup,
        resolvent,
    })
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn battery(
    s: &SemigroupHandle,
    s_y: &SemigroupHandle,
    t: &SemigroupHandle,
    t_z: &SemigroupHandle,
    k: &Cone,
    l: &Cone,
    k_samples: &[Element],
    l_samples: &[Element],
    omega: f64,
) -> Result<HypothesisReport> {
    let lambdas: Vec<f64> = HYPOTHESIS_LAMBDA_OFFSETS
        .iter()
        .map(|d| omega.max(0.0) + d)
        .collect();
    let consistency_s = check_consistency(s, s_y, k_samples, &HYPOTHESIS_TIMES, CONSISTENCY_TOL)?;
    let consistency_t = check_consistency(t, t_z, k_samples, &HYPOTHESIS_TIMES, CONSISTENCY_TOL)?;
    let k_invariance = invariance_report(
        ConeRole::K,
        k,
        t,
        k_samples,
        &HYPOTHESIS_TIMES,
        &lambdas,
        k.tolerance(),
    )?;
    let l_invariance = invariance_report(
        ConeRole::L,
        l,
        s,
        l_samples,
        &HYPOTHESIS_TIMES,
        &lambdas,
        l.tolerance(),
    )?;
    let bounds = [s, s_y, t, t_z]
        .iter()
        .map(|h| (h.label().to_string(), h.bound()))
        .collect();
    Ok(HypothesisReport {
        passed: consistency_s.passed
            && consistency_t.passed
            && k_invariance.passed
            && l_invariance.passed,
        consistency_s,
        consistency_t,
        k_invariance,
        l_invariance,
        bounds,
    })
}
