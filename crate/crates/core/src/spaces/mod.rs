//! Finite weighted discrete measure spaces standing in for the `L_p(μ)`
//! scale, together with the dual pairing and finitely generated cones.
//!
//! All spaces of one scenario share a node set and weight vector and differ
//! only in their exponent, so intersections, sums and the agreement of the
//! various dual pairings are literal at the discrete level.

mod cone;
mod norms;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub use cone::{cone_contains, cone_samples, nnls, Cone, NnlsSolution, DEFAULT_MEMBERSHIP_TOL};
pub use norms::{dual_norm, intersection_norm, operator_norm, p_norm, sum_norm};

/// Exponent `p ∈ [1, ∞]` of a grid space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::Domain(format!(
                "exponent must lie in [1, ∞], got {p}"
            )))
        }
    }

    /// `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Weighted `l_p` space on `n` nodes; the `p = ∞` norm ignores the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    label: String,
    weights: Arc<[f64]>,
    exponent: Exponent,
}

impl GridSpace {
    pub fn new(label: impl Into<String>, weights: Vec<f64>, exponent: Exponent) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        if let Exponent::Finite(p) = exponent {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(Error::Domain(format!(
                    "exponent must lie in [1, ∞], got {p}"
                )));
            }
        }
        Ok(GridSpace {
            label: label.into(),
            weights: weights.into(),
            exponent,
        })
    }

    pub fn uniform(label: impl Into<String>, n: usize, exponent: Exponent) -> Result<Self> {
        GridSpace::new(label, vec![1.0; n], exponent)
    }

    /// Same nodes and weights under a different exponent.
    pub fn with_exponent(&self, label: impl Into<String>, exponent: Exponent) -> GridSpace {
        GridSpace {
            label: label.into(),
            weights: Arc::clone(&self.weights),
            exponent,
        }
    }

    /// The conjugate-exponent space; its norm is the dual norm under the
    /// weighted pairing.
    pub fn dual(&self) -> GridSpace {
        self.with_exponent(format!("{}'", self.label), self.exponent.conjugate())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn shares_weights(&self, other: &GridSpace) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }

    pub fn element(self: &Arc<Self>, values: Vec<f64>) -> Result<Element> {
        Element::new(Arc::clone(self), values)
    }

    pub fn basis(self: &Arc<Self>, i: usize) -> Element {
        let mut v = vec![0.0; self.dim()];
        v[i] = 1.0;
        Element {
            space: Arc::clone(self),
            values: v,
        }
    }
}

/// A vector of a grid space.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    space: Arc<GridSpace>,
    values: Vec<f64>,
}

impl Element {
    pub fn new(space: Arc<GridSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} values for a space of dimension {}",
                values.len(),
                space.dim()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("element values must be finite".into()));
        }
        Ok(Element { space, values })
    }

    pub fn zeros(space: Arc<GridSpace>) -> Self {
        let n = space.dim();
        Element {
            space,
            values: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same coordinates viewed in another space of equal dimension.
    pub fn in_space(&self, space: Arc<GridSpace>) -> Result<Element> {
        Element::new(space, self.values.clone())
    }
}

/// Norm of raw coordinates under the norm of `space`.
pub fn norm_values_of(space: &GridSpace, values: &[f64]) -> f64 {
    norms::norm_values(space, values)
}

/// `Σ w_i a_i b_i` on raw coordinate slices.
pub fn weighted_dot(weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    weights
        .iter()
        .zip(a)
        .zip(b)
        .map(|((w, x), y)| w * x * y)
        .sum()
}

/// The bilinear form `Σ w_i u_i v_i` shared by every space of the scale.
pub fn dual_pair(u: &Element, v: &Element) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "pairing elements of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    if !u.space.shares_weights(&v.space) {
        return Err(Error::Pairing(format!(
            "spaces {} and {} carry different weights",
            u.space.label, v.space.label
        )));
    }
    Ok(weighted_dot(u.space.weights(), &u.values, &v.values))
}

/// Adjoint of `m` with respect to the weighted pairing: `W^{-1} m^T W`, so
/// that `⟨m u, v⟩ = ⟨u, adjoint v⟩` for every pair of vectors.
pub fn weighted_adjoint(m: &Matrix, weights: &[f64]) -> Result<Matrix> {
    if !m.is_square() || m.rows() != weights.len() {
        return Err(Error::Dimension(format!(
            "adjoint of a {}x{} matrix with {} weights",
            m.rows(),
            m.cols(),
            weights.len()
        )));
    }
    Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        m[(j, i)] * weights[j] / weights[i]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(weights: Vec<f64>, p: f64) -> Arc<GridSpace> {
        Arc::new(GridSpace::new("X", weights, Exponent::new(p).unwrap()).unwrap())
    }

    #[test]
    fn p_norm_examples() {
        let s = space(vec![1.0, 1.0], 2.0);
        assert_eq!(p_norm(&Element::zeros(s.clone())), 0.0);
        assert_eq!(p_norm(&s.element(vec![3.0, 4.0]).unwrap()), 5.0);
        let s1 = space(vec![0.5, 0.5], 1.0);
        assert_eq!(p_norm(&s1.element(vec![2.0, 2.0]).unwrap()), 2.0);
        let sinf = space(vec![0.1, 7.0], f64::INFINITY);
        assert_eq!(p_norm(&sinf.element(vec![-3.0, 2.0]).unwrap()), 3.0);
        let s3 = space(vec![1.0, 1.0], 3.0);
        let v = p_norm(&s3.element(vec![1.0, 1.0]).unwrap());
        assert!((v - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn dual_pair_examples() {
        let s = space(vec![1.0, 2.0], 2.0);
        let one = s.element(vec![1.0, 1.0]).unwrap();
        assert_eq!(dual_pair(&one, &Element::zeros(s.clone())).unwrap(), 0.0);
        assert_eq!(dual_pair(&one, &one).unwrap(), 3.0);
        assert_eq!(dual_pair(&s.basis(0), &s.basis(1)).unwrap(), 0.0);
    }

    #[test]
    fn dual_pair_rejects_mismatched_weights() {
        let a = space(vec![1.0, 2.0], 2.0);
        let b = space(vec![1.0, 3.0], 2.0);
        let err = dual_pair(&a.basis(0), &b.basis(0));
        assert!(matches!(err, Err(Error::Pairing(_))));
    }

    #[test]
    fn intersection_norm_examples() {
        let x = GridSpace::new("X", vec![1.0, 1.0], Exponent::Finite(1.0)).unwrap();
        let y = x.with_exponent("Y", Exponent::Infinity);
        let sx = Arc::new(x.clone());
        let u = sx.element(vec![1.0, 1.0]).unwrap();
        assert_eq!(intersection_norm(&u, &x, &y).unwrap(), 2.0);
        assert_eq!(
            intersection_norm(&Element::zeros(sx.clone()), &x, &y).unwrap(),
            0.0
        );
        assert_eq!(intersection_norm(&u, &x, &x).unwrap(), p_norm(&u));
    }

    #[test]
    fn sum_norm_basic_cases() {
        let x = GridSpace::new("X", vec![1.0, 1.0], Exponent::Finite(1.0)).unwrap();
        let y = x.with_exponent("Y", Exponent::Infinity);
        let sx = Arc::new(x.clone());
        assert_eq!(
            sum_norm(&Element::zeros(sx.clone()), &x, &y, 1e-8).unwrap(),
            0.0
        );
        let v = sx.element(vec![1.0, 0.0]).unwrap();
        assert!((sum_norm(&v, &x, &y, 1e-6).unwrap() - 1.0).abs() < 1e-6);
        let w = sx.element(vec![0.3, -2.0]).unwrap();
        assert!((sum_norm(&w, &x, &x, 1e-8).unwrap() - p_norm(&w)).abs() < 1e-8);
    }

    #[test]
    fn adjoint_moves_operator_across_pairing() {
        let s = space(vec![0.5, 2.0, 1.5], 2.0);
        let m = Matrix::from_rows(&[
            vec![1.0, -2.0, 0.3],
            vec![0.5, 3.0, 1.0],
            vec![-1.0, 0.0, 2.0],
        ])
        .unwrap();
        let adj = weighted_adjoint(&m, s.weights()).unwrap();
        let u = s.element(vec![0.2, -1.0, 3.0]).unwrap();
        let v = s.element(vec![1.0, 0.5, -0.7]).unwrap();
        let mu = s.element(m.mat_vec(u.values()).unwrap()).unwrap();
        let av = s.element(adj.mat_vec(v.values()).unwrap()).unwrap();
        let lhs = dual_pair(&mu, &v).unwrap();
        let rhs = dual_pair(&u, &av).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
        assert_eq!(Exponent::Finite(2.0).conjugate(), Exponent::Finite(2.0));
        assert_eq!(
            Exponent::Finite(4.0).conjugate(),
            Exponent::Finite(4.0 / 3.0)
        );
        assert!(Exponent::new(0.5).is_err());
    }

    #[test]
    fn operator_norms_match_definitions() {
        let m = crate::numerics::Matrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]).unwrap();
        let w = vec![1.0, 2.0];
        let s1 = GridSpace::new("X", w.clone(), Exponent::Finite(1.0)).unwrap();
        // Column j: Σ_i w_i |m_ij| / w_j.
        let expected = ((1.0 + 2.0 * 0.5) / 1.0f64).max((2.0 + 2.0 * 3.0) / 2.0);
        assert!((operator_norm(&m, &s1).unwrap() - expected).abs() < 1e-14);
        let sinf = s1.with_exponent("Y", Exponent::Infinity);
        assert_eq!(operator_norm(&m, &sinf).unwrap(), 3.5);
        let s2 = GridSpace::uniform("Z", 2, Exponent::Finite(2.0)).unwrap();
        let d = crate::numerics::Matrix::from_diag(&[-3.0, 2.0]);
        assert!((operator_norm(&d, &s2).unwrap() - 3.0).abs() < 1e-7);
    }
}
