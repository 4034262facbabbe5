//! Semigroup handles with three backends (matrix exponential, Gauss–Weierstraß
//! convolution, delay block), growth bounds, weak Laplace transforms and the
//! consistency and semigroup-law checks.

mod delay;
mod lattice;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{laplace_quadrature_vec, mat_exp, solve_resolvent, Matrix, QuadratureSpec};
use crate::spaces::{norm_values_of, operator_norm, weighted_dot, Element, GridSpace};

pub use delay::{
    build_delay_generator, delay_weights, history_quadrature_weights, scalar_history_functional,
};
pub use lattice::Lattice;

/// Default time grid for growth-bound estimation.
pub const BOUND_GRID: [f64; 9] = [0.0, 0.125, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];

/// Constants of `‖S(t)‖ <= M e^{ωt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub m: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Backend {
    MatrixExp,
    GaussKernel { lattice: Lattice },
    DelayBlock { head_dim: usize, cells: usize },
}

/// An evaluatable semigroup `t ↦ S(t)` on the coordinates of a grid space.
///
/// Every backend carries a generator matrix: the generator itself for the
/// matrix backends, and the discrete Laplacian for the Gauss–Weierstraß
/// backend (whose evaluations use the closed-form kernel instead).
#[derive(Debug, Clone)]
pub struct SemigroupHandle {
    label: String,
    backend: Backend,
    generator: Matrix,
    space: Arc<GridSpace>,
    bound: GrowthBound,
    memo: Option<Arc<Mutex<HashMap<u64, Matrix>>>>,
}

impl SemigroupHandle {
    fn build(
        label: impl Into<String>,
        backend: Backend,
        generator: Matrix,
        space: Arc<GridSpace>,
    ) -> Result<Self> {
        if !generator.is_square() || generator.rows() != space.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} generator on a space of dimension {}",
                generator.rows(),
                generator.cols(),
                space.dim()
            )));
        }
        let mut handle = SemigroupHandle {
            label: label.into(),
            backend,
            generator,
            space,
            bound: GrowthBound { m: 1.0, omega: 0.0 },
            memo: None,
        };
        handle.bound = estimate_bound(&handle, &BOUND_GRID)?;
        Ok(handle)
    }

    /// `t ↦ e^{tA}`.
    pub fn matrix_exp(
        label: impl Into<String>,
        generator: Matrix,
        space: Arc<GridSpace>,
    ) -> Result<Self> {
        SemigroupHandle::build(label, Backend::MatrixExp, generator, space)
    }

    /// Convolution with the Gauss–Weierstraß kernel on a lattice.
    pub fn gauss_kernel(
        label: impl Into<String>,
        lattice: Lattice,
        space: Arc<GridSpace>,
    ) -> Result<Self> {
        let generator = lattice.laplacian();
        SemigroupHandle::build(label, Backend::GaussKernel { lattice }, generator, space)
    }

    /// Exponential of a block generator from [`build_delay_generator`].
    pub fn delay_block(
        label: impl Into<String>,
        generator: Matrix,
        head_dim: usize,
        cells: usize,
        space: Arc<GridSpace>,
    ) -> Result<Self> {
        if generator.rows() != head_dim * (cells + 1) {
            return Err(Error::Dimension(format!(
                "delay generator of size {} does not match {head_dim} x ({cells} + 1)",
                generator.rows()
            )));
        }
        SemigroupHandle::build(
            label,
            Backend::DelayBlock { head_dim, cells },
            generator,
            space,
        )
    }

    /// Same semigroup, measured in another space over the same nodes.
    pub fn on_space(&self, label: impl Into<String>, space: Arc<GridSpace>) -> Result<Self> {
        SemigroupHandle::build(label, self.backend.clone(), self.generator.clone(), space)
    }

    /// Enables the evaluation memo. Cached and uncached evaluations agree.
    pub fn with_memo(mut self) -> Self {
        self.memo = Some(Arc::new(Mutex::new(HashMap::new())));
        self
    }

    pub fn with_bound(mut self, bound: GrowthBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    pub fn bound(&self) -> GrowthBound {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    /// True when `S(t) = e^{tA}` exactly for the stored generator.
    pub fn is_matrix_backend(&self) -> bool {
        !matches!(self.backend, Backend::GaussKernel { .. })
    }

    /// The matrix of `S(t)`.
    pub fn evaluate(&self, t: f64) -> Result<Matrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "time must be finite and >= 0, got {t}"
            )));
        }
        if let Some(memo) = &self.memo {
            if let Some(m) = memo.lock().expect("memo lock").get(&t.to_bits()) {
                return Ok(m.clone());
            }
        }
        let value = match &self.backend {
            Backend::GaussKernel { lattice } => gauss_weierstrass_matrix(t, lattice)?,
            _ => mat_exp(&self.generator, t)?,
        };
        if let Some(memo) = &self.memo {
            memo.lock()
                .expect("memo lock")
                .insert(t.to_bits(), value.clone());
        }
        Ok(value)
    }

    /// `(λ - A)^{-1}` for matrix backends, the weak Laplace transform otherwise.
    pub fn resolvent(&self, lambda: f64, spec: &QuadratureSpec) -> Result<ResolventValue> {
        if self.is_matrix_backend() {
            Ok(ResolventValue {
                operator: solve_resolvent(&self.generator, lambda)?,
                error: 0.0,
            })
        } else {
            let w = weak_resolvent(self, lambda, spec)?;
            Ok(ResolventValue {
                operator: w.operator,
                error: w.error,
            })
        }
    }

    /// Rows on which truncation-sensitive checks are evaluated for times up
    /// to `t_max`: all rows for matrix backends, nodes at distance
    /// `>= 4 sqrt(t_max)` from the boundary for the kernel backend.
    pub fn trusted_rows(&self, t_max: f64) -> Vec<usize> {
        match &self.backend {
            Backend::GaussKernel { lattice } => lattice.interior(4.0 * t_max.max(0.0).sqrt()),
            _ => (0..self.dim()).collect(),
        }
    }
}

/// A resolvent operator together with its quadrature error estimate
/// (zero for direct solves).
#[derive(Debug, Clone)]
pub struct ResolventValue {
    pub operator: Matrix,
    pub error: f64,
}

/// `(4πt)^{-d/2} e^{-‖x‖²/(4t)}`.
pub fn gauss_weierstrass_kernel(t: f64, x: [f64; 2], dim: usize) -> f64 {
    let r2 = x[0] * x[0] + if dim == 2 { x[1] * x[1] } else { 0.0 };
    (4.0 * std::f64::consts::PI * t).powf(-(dim as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
}

/// Matrix of `f ↦ k_t * f` on a lattice: entries `w_j k_t(x_i - x_j)` with
/// zero extension outside the box, and the identity at `t = 0`.
pub fn gauss_weierstrass_matrix(t: f64, lattice: &Lattice) -> Result<Matrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    let n = lattice.len();
    if t == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let w = lattice.spacing().powi(lattice.dim() as i32);
    let coords: Vec<[f64; 2]> = (0..n).map(|i| lattice.coords(i)).collect();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let d = [coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]];
        w * gauss_weierstrass_kernel(t, d, lattice.dim())
    }))
}

/// Result of [`check_semigroup_law`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub max_residual: f64,
    pub worst_pair: Option<(f64, f64)>,
    pub tolerance: f64,
    pub passed: bool,
}

/// `max ‖S(t)S(s) - S(t+s)‖` over all pairs of `times`, measured as the
/// largest absolute row sum over the trusted rows.
pub fn check_semigroup_law(s: &SemigroupHandle, times: &[f64], tol: f64) -> Result<LawReport> {
    let t_max = 2.0 * times.iter().copied().fold(0.0, f64::max);
    let rows = s.trusted_rows(t_max);
    let mut cache = HashMap::new();
    let mut eval = |t: f64| -> Result<Matrix> {
        if let Some(m) = cache.get(&t.to_bits()) {
            return Ok(Matrix::clone(m));
        }
        let m = s.evaluate(t)?;
        cache.insert(t.to_bits(), m.clone());
        Ok(m)
    };
    let mut max_residual = 0.0;
    let mut worst_pair = None;
    for (i, &t) in times.iter().enumerate() {
        for &u in &times[i..] {
            let lhs = eval(t)?.mul(&eval(u)?)?;
            let rhs = eval(t + u)?;
            let res = rows
                .iter()
                .map(|&r| {
                    lhs.row(r)
                        .iter()
                        .zip(rhs.row(r))
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            if res > max_residual || worst_pair.is_none() {
                max_residual = res.max(max_residual);
                worst_pair = Some((t, u));
            }
        }
    }
    Ok(LawReport {
        max_residual,
        worst_pair,
        tolerance: tol,
        passed: max_residual <= tol,
    })
}

/// Fits `ln ‖S(t)‖ ≈ ln M + ωt` by least squares and raises `M` until the
/// bound holds on every grid point. A fitted `M` above 1 is inflated by 5%.
pub fn estimate_bound(s: &SemigroupHandle, t_grid: &[f64]) -> Result<GrowthBound> {
    if t_grid.is_empty() {
        return Err(Error::Domain(
            "bound estimation needs a nonempty grid".into(),
        ));
    }
    let mut pts = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let norm = operator_norm(&s.evaluate(t)?, s.space())?;
        pts.push((t, norm.max(f64::MIN_POSITIVE).ln()));
    }
    let k = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let var_t: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let omega = if var_t > 0.0 {
        pts.iter()
            .map(|p| (p.0 - mean_t) * (p.1 - mean_y))
            .sum::<f64>()
            / var_t
    } else {
        0.0
    };
    let fitted = pts
        .iter()
        .map(|(t, y)| (y - omega * t).exp())
        .fold(0.0, f64::max);
    let m = if fitted <= 1.0 + 1e-9 {
        1.0
    } else {
        1.05 * fitted
    };
    Ok(GrowthBound { m, omega })
}

/// Weak Laplace transform `R_S(λ)` with its quadrature error estimate.
#[derive(Debug, Clone)]
pub struct WeakResolvent {
    pub lambda: f64,
    pub operator: Matrix,
    pub error: f64,
}

/// Entrywise `∫_0^∞ e^{-λt} S(t) dt` by [`laplace_quadrature_vec`].
pub fn weak_resolvent(
    s: &SemigroupHandle,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<WeakResolvent> {
    let GrowthBound { m, omega } = s.bound();
    if !(lambda > omega) {
        return Err(Error::Divergence { lambda, omega });
    }
    let n = s.dim();
    let entries = laplace_quadrature_vec(
        |t| {
            s.evaluate(t)
                .map(|m| m.as_slice().to_vec())
                .unwrap_or_else(|_| vec![f64::NAN; n * n])
        },
        n * n,
        lambda,
        m,
        omega,
        spec,
    )?;
    let error = entries.iter().map(|e| e.error).fold(0.0, f64::max);
    let operator = Matrix::from_row_major(n, n, entries.into_iter().map(|e| e.value).collect())?;
    Ok(WeakResolvent {
        lambda,
        operator,
        error,
    })
}

/// Result of [`check_resolvent_convergence`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventConvergence {
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
    /// Every error is at most 1.1 times its predecessor.
    pub monotone: bool,
    /// Least-squares slope of `ln error` against `ln λ` over positive errors.
    pub log_log_slope: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// `|⟨λ R_S(λ) y, e⟩ - ⟨y, e⟩|` along an increasing λ sequence.
pub fn check_resolvent_convergence(
    s: &SemigroupHandle,
    y: &Element,
    e: &Element,
    lambdas: &[f64],
    tol: f64,
) -> Result<ResolventConvergence> {
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("lambdas must be strictly increasing".into()));
    }
    if y.len() != s.dim() || e.len() != s.dim() {
        return Err(Error::Dimension(
            "test vectors do not match the semigroup".into(),
        ));
    }
    let weights = s.space().weights();
    let base = weighted_dot(weights, y.values(), e.values());
    let spec = QuadratureSpec::default();
    let mut errors = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let r = s.resolvent(lambda, &spec)?;
        let ry = r.operator.mat_vec(y.values())?;
        errors.push((lambda * weighted_dot(weights, &ry, e.values()) - base).abs());
    }
    let monotone = errors.windows(2).all(|w| w[1] <= 1.1 * w[0] + 1e-15);
    let pts: Vec<(f64, f64)> = lambdas
        .iter()
        .zip(&errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(l, e)| (l.ln(), e.ln()))
        .collect();
    let log_log_slope = (pts.len() >= 2).then(|| {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx
    });
    let last = errors.last().copied().unwrap_or(0.0);
    Ok(ResolventConvergence {
        lambdas: lambdas.to_vec(),
        passed: monotone && last <= tol,
        errors,
        monotone,
        log_log_slope,
        tolerance: tol,
    })
}

/// Result of [`check_consistency`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `max ‖S_A(t)u - S_B(t)u‖` over samples and times, in `S_A`'s norm.
pub fn check_consistency(
    a: &SemigroupHandle,
    b: &SemigroupHandle,
    samples: &[Element],
    times: &[f64],
    tol: f64,
) -> Result<ConsistencyReport> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "semigroups act on {} and {} coordinates",
            a.dim(),
            b.dim()
        )));
    }
    let mut max_residual = 0.0_f64;
    for &t in times {
        let (ma, mb) = (a.evaluate(t)?, b.evaluate(t)?);
        for u in samples {
            let da = ma.mat_vec(u.values())?;
            let db = mb.mat_vec(u.values())?;
            let diff: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x - y).collect();
            max_residual = max_residual.max(norm_values_of(a.space(), &diff));
        }
    }
    Ok(ConsistencyReport {
        max_residual,
        tolerance: tol,
        passed: max_residual <= tol,
    })
}
