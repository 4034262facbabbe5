//! The registered scenario builders and their parameter schemas.

use std::sync::Arc;

use posperturb_core::numerics::Matrix;
use posperturb_core::scenarios::{
    scenario_delay, scenario_heat_drift, scenario_metzler_random, scenario_rank_one_linfty,
    scenario_rank_one_lp, Scenario,
};
use posperturb_core::spaces::{Exponent, GridSpace};
use serde::Serialize;

use crate::config::{ScenarioConfig, SCENARIO_NAMES};

#[derive(Debug, Clone, Serialize)]
pub struct Param {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    pub default: serde_json::Value,
    pub description: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuilderInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<Param>,
}

fn describe(
    name: &str,
) -> (
    &'static str,
    Vec<(&'static str, &'static str, &'static str)>,
) {
    match name {
        "metzler-random" => (
            "seeded random Metzler pair on a weighted l2 grid; a coin decides whether A_T <= A_S + B holds",
            vec![
                ("n", "integer in [2, 8]", "matrix size"),
                ("seed", "integer", "RNG seed (overridden by --seed)"),
                ("gap", "real >= 0", "diagonal dominance margin"),
            ],
        ),
        "heat-drift" => (
            "Gaussian kernel semigroup against the discrete heat flow with upwind drift",
            vec![
                ("dim", "1 or 2", "spatial dimension"),
                ("extent", "real > 0", "half width of the box [-extent, extent]^dim"),
                ("nodes", "integer >= 16", "nodes per axis"),
                ("drift", "real or list", "drift b >= 0, constant or one value per node"),
                ("t_ref", "real > 0", "reference time; default t grid is t_ref * {1/4, 1/2, 1}"),
            ],
        ),
        "rank-one-linfty" => (
            "perturbation B = 1 (x) w into an l-infinity range space",
            vec![
                ("weights", "list of reals > 0", "grid weights"),
                ("a_s", "matrix (list of rows)", "Metzler generator of S"),
                ("a_t", "matrix (list of rows)", "Metzler generator of T"),
            ],
        ),
        "rank-one-lp" => (
            "perturbation B = f (x) g' between lp-type spaces",
            vec![
                ("p", "real >= 1", "exponent of Y"),
                ("q", "real >= 1", "exponent of Z"),
                ("weights", "list of reals > 0", "grid weights"),
                ("f", "real or list >= 0", "range vector"),
                ("g", "real or list >= 0", "functional density"),
                ("a_s", "matrix (list of rows)", "Metzler generator of S"),
                ("a_t", "matrix (list of rows)", "Metzler generator of T"),
            ],
        ),
        _ => (
            "delay equation x' = A0 x + <eta, x_t> against the free shift, history on m cells",
            vec![
                ("a0", "square matrix", "instantaneous part"),
                ("eta", "real or list of m", "history density of the delay term"),
                ("rho", "real or list of m", "dominating density, rho >= eta"),
                ("p", "real >= 1", "exponent of X and Y"),
                ("q", "real >= 1", "exponent of Z"),
                ("m", "integer >= 4", "history cells"),
            ],
        ),
    }
}

pub fn builders() -> Vec<BuilderInfo> {
    SCENARIO_NAMES
        .iter()
        .map(|&name| {
            let defaults = serde_json::to_value(ScenarioConfig::defaults(name).unwrap()).unwrap();
            let (description, params) = describe(name);
            BuilderInfo {
                name,
                description,
                params: params
                    .into_iter()
                    .map(|(p, ty, description)| Param {
                        name: p,
                        ty,
                        default: defaults[p].clone(),
                        description,
                    })
                    .collect(),
            }
        })
        .collect()
}

pub fn listing_text() -> String {
    let mut out = String::new();
    for b in builders() {
        out.push_str(&format!("{}\n  {}\n", b.name, b.description));
        for p in &b.params {
            out.push_str(&format!(
                "    {:<8} {:<22} default {:<26} {}\n",
                p.name,
                p.ty,
                p.default.to_string(),
                p.description
            ));
        }
    }
    out
}

fn matrix(rows: &[Vec<f64>]) -> posperturb_core::Result<Matrix> {
    Matrix::from_rows(rows)
}

/// Runs the selected builder. `seed` replaces the metzler seed, or the cone
/// sample seed of the other builders.
pub fn build(cfg: &ScenarioConfig, seed: Option<u64>) -> posperturb_core::Result<Scenario> {
    let mut scn = match cfg {
        ScenarioConfig::MetzlerRandom { n, seed: s, gap } => {
            return scenario_metzler_random(*n, seed.unwrap_or(*s), *gap)
        }
        ScenarioConfig::HeatDrift {
            dim,
            extent,
            nodes,
            drift,
            t_ref,
        } => {
            let len = nodes.pow(*dim as u32);
            let b = drift.expand(len);
            scenario_heat_drift(*dim, *extent, *nodes, &vec![b; *dim], *t_ref)?
        }
        ScenarioConfig::RankOneLinfty { weights, a_s, a_t } => {
            scenario_rank_one_linfty(weights, &matrix(a_s)?, &matrix(a_t)?)?
        }
        ScenarioConfig::RankOneLp {
            p,
            q,
            weights,
            f,
            g,
            a_s,
            a_t,
        } => {
            let n = weights.len();
            let sp = Arc::new(GridSpace::new("X", weights.clone(), Exponent::Finite(2.0))?);
            let f = sp.element(f.expand(n))?;
            let g = sp.element(g.expand(n))?;
            scenario_rank_one_lp(*p, *q, &f, &g, &matrix(a_s)?, &matrix(a_t)?)?
        }
        ScenarioConfig::Delay {
            a0,
            eta,
            rho,
            p,
            q,
            m,
        } => scenario_delay(&matrix(a0)?, &eta.expand(*m), &rho.expand(*m), *p, *q, *m)?,
    };
    if let Some(s) = seed {
        scn.sample_seed = s;
    }
    Ok(scn)
}
