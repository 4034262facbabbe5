use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{Lu, Matrix};

use super::{Element, GridSpace};

/// Default relative membership tolerance.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Finitely generated convex cone `{Σ c_k g_k : c_k >= 0}`.
#[derive(Debug, Clone)]
pub struct Cone {
    space: Arc<GridSpace>,
    generators: Vec<Vec<f64>>,
    tol: f64,
}

impl Cone {
    pub fn new(space: Arc<GridSpace>, generators: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Domain("a cone needs at least one generator".into()));
        }
        for g in &generators {
            if g.len() != space.dim() {
                return Err(Error::Dimension(format!(
                    "generator of length {} in a space of dimension {}",
                    g.len(),
                    space.dim()
                )));
            }
            if g.iter().all(|v| *v == 0.0) || g.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(
                    "generators must be finite and nonzero".into(),
                ));
            }
        }
        if !(tol > 0.0) {
            return Err(Error::Domain("membership tolerance must be > 0".into()));
        }
        Ok(Cone {
            space,
            generators,
            tol,
        })
    }

    /// The nonnegative orthant, generated by the standard basis.
    pub fn orthant(space: Arc<GridSpace>) -> Self {
        let n = space.dim();
        let generators = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        Cone {
            space,
            generators,
            tol: DEFAULT_MEMBERSHIP_TOL,
        }
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Whether the generators are exactly the standard basis, in which case
    /// the cone detects positivity coordinatewise.
    pub fn is_full_orthant(&self) -> bool {
        let n = self.space.dim();
        self.generators.len() == n
            && self.generators.iter().enumerate().all(|(i, g)| {
                g.iter()
                    .enumerate()
                    .all(|(j, v)| if i == j { *v > 0.0 } else { *v == 0.0 })
            })
    }

    /// Weighted-`l_2` distance from `values` to the cone.
    pub fn distance(&self, values: &[f64]) -> f64 {
        let sq: Vec<f64> = self.space.weights().iter().map(|w| w.sqrt()).collect();
        let n = values.len();
        let a = Matrix::from_fn(n, self.generators.len(), |i, k| {
            sq[i] * self.generators[k][i]
        });
        let b: Vec<f64> = values.iter().zip(&sq).map(|(v, s)| v * s).collect();
        nnls(&a, &b).residual
    }

    /// Membership up to `tol * (1 + ‖u‖)`.
    pub fn contains_values(&self, values: &[f64], tol: f64) -> bool {
        if self.is_full_orthant() {
            let scale = 1.0 + values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            return values.iter().all(|v| *v >= -tol * scale);
        }
        let norm = weighted_l2(self.space.weights(), values);
        self.distance(values) <= tol * (1.0 + norm)
    }

    /// Nonnegative combinations: all generators first, then `count - #generators`
    /// random combinations with seeded uniform `[0, 1]` coefficients.
    /// Returns just the generators when `count` is smaller.
    pub fn samples(&self, count: usize, seed: u64) -> Vec<Element> {
        let n = self.space.dim();
        let mut out: Vec<Element> = self
            .generators
            .iter()
            .map(|g| Element::new(Arc::clone(&self.space), g.clone()).expect("validated generator"))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < count {
            let mut v = vec![0.0; n];
            for g in &self.generators {
                let c: f64 = rng.random();
                for (a, b) in v.iter_mut().zip(g) {
                    *a += c * b;
                }
            }
            out.push(Element::new(Arc::clone(&self.space), v).expect("finite combination"));
        }
        out
    }
}

fn weighted_l2(weights: &[f64], values: &[f64]) -> f64 {
    weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

/// `cone_contains` with the cone's own tolerance.
pub fn cone_contains(cone: &Cone, u: &Element) -> bool {
    cone.contains_values(u.values(), cone.tolerance())
}

/// Seeded samples of a cone.
pub fn cone_samples(cone: &Cone, count: usize, seed: u64) -> Vec<Element> {
    cone.samples(count, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Lawson–Hanson active-set solution of `min ‖A c - b‖_2` subject to `c >= 0`.
pub fn nnls(a: &Matrix, b: &[f64]) -> NnlsSolution {
    let (m, k) = (a.rows(), a.cols());
    let at = a.transpose();
    let scale = b
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(a.max_abs())
        .max(1.0);
    let eps = 1e-13 * scale * scale * (m.max(k) as f64);
    let mut c = vec![0.0; k];
    let mut passive = vec![false; k];
    let mut excluded = vec![false; k];
    let residual_of = |c: &[f64]| -> Vec<f64> {
        let ac = a.mat_vec_unchecked(c);
        b.iter().zip(ac).map(|(bi, ai)| bi - ai).collect()
    };

    for _ in 0..3 * k + 10 {
        let r = residual_of(&c);
        let grad = at.mat_vec_unchecked(&r);
        let candidate = (0..k)
            .filter(|&j| !passive[j] && !excluded[j] && grad[j] > eps)
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;

        for _ in 0..3 * k + 10 {
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let Some(z_sub) = least_squares_subset(a, b, &idx) else {
                // Dependent column: drop it for the rest of the solve.
                passive[j] = false;
                excluded[j] = true;
                break;
            };
            let mut z = vec![0.0; k];
            for (&i, &v) in idx.iter().zip(&z_sub) {
                z[i] = v;
            }
            if idx.iter().all(|&i| z[i] > 0.0) {
                c = z;
                break;
            }
            let alpha = idx
                .iter()
                .filter(|&&i| z[i] <= 0.0)
                .map(|&i| c[i] / (c[i] - z[i]))
                .fold(f64::INFINITY, f64::min);
            for i in 0..k {
                c[i] += alpha * (z[i] - c[i]);
                if passive[i] && c[i] <= 1e-15 * scale {
                    passive[i] = false;
                    c[i] = 0.0;
                }
            }
        }
    }
    let r = residual_of(&c);
    NnlsSolution {
        residual: r.iter().map(|v| v * v).sum::<f64>().sqrt(),
        coefficients: c,
    }
}

fn least_squares_subset(a: &Matrix, b: &[f64], idx: &[usize]) -> Option<Vec<f64>> {
    let p = idx.len();
    let m = a.rows();
    let gram = Matrix::from_fn(p, p, |r, s| {
        (0..m).map(|i| a[(i, idx[r])] * a[(i, idx[s])]).sum()
    });
    let rhs: Vec<f64> = idx
        .iter()
        .map(|&r| (0..m).map(|i| a[(i, r)] * b[i]).sum())
        .collect();
    let lu = Lu::factor(&gram).ok()??;
    let inv_norm = lu.inverse().norm_1();
    if gram.norm_1() * inv_norm > 1e12 {
        return None;
    }
    Some(lu.solve_vec(&rhs))
}
