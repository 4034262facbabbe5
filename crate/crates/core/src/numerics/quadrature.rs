//! Composite Gauss–Legendre rules and truncated Laplace-transform quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent of the truncation rule: the tail beyond `T_max` is below
/// `e^{-36.8}` (about 1e-16) relative to `M / (lambda - omega)`.
const TAIL_EXPONENT: f64 = 36.8;

/// Parameters of the composite Gauss–Legendre rule used for Laplace transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub points: usize,
    /// Overrides the automatic truncation point when set.
    pub t_max: Option<f64>,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panels: 32,
            points: 8,
            t_max: None,
            rel_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 || self.points < 1 {
            return Err(Error::Domain(
                "quadrature needs >= 1 panel and point".into(),
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerance must be > 0".into()));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Domain(format!("T_max must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    /// Truncation point `max(1, (ln M + 36.8)/(lambda - omega))` unless overridden.
    pub fn truncation(&self, lambda: f64, m: f64, omega: f64) -> f64 {
        self.t_max
            .unwrap_or_else(|| ((m.max(1.0).ln() + TAIL_EXPONENT) / (lambda - omega)).max(1.0))
    }
}

/// Value of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// A composite Gauss–Legendre rule, reusable across integrands.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, points: usize) -> Self {
        let (x, w) = gauss_legendre(points);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points);
        let mut weights = Vec::with_capacity(panels * points);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrates a vector-valued function of fixed length `len`.
    pub fn integrate_vec(&self, len: usize, f: impl Fn(f64) -> Vec<f64>) -> Vec<f64> {
        let mut acc = vec![0.0; len];
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            for (a, v) in acc.iter_mut().zip(f(x)) {
                *a += w * v;
            }
        }
        acc
    }
}

/// Composite Gauss–Legendre approximation of `∫_a^b f`.
pub fn composite_gauss_legendre(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    points: usize,
) -> f64 {
    CompositeRule::new(a, b, panels, points).integrate(f)
}

/// `∫_0^∞ e^{-lambda t} f(t) dt` for `|f(t)| <= M e^{omega t}`.
///
/// The integral is truncated at `T_max` and evaluated in the variable
/// `u = sqrt(t)`, which keeps integrands with an integrable `t^{-1/2}`
/// endpoint behaviour (unresolved discrete kernels) smooth. The error
/// estimate is the difference to the rule with half the panels plus the
/// tail bound.
pub fn laplace_quadrature(
    f: impl Fn(f64) -> f64,
    lambda: f64,
    m: f64,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let out = laplace_quadrature_vec(|t| vec![f(t)], 1, lambda, m, omega, spec)?;
    Ok(out[0])
}

/// Entrywise Laplace quadrature of a vector-valued function of length `len`.
pub fn laplace_quadrature_vec(
    f: impl Fn(f64) -> Vec<f64>,
    len: usize,
    lambda: f64,
    m: f64,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Estimate>> {
    spec.validate()?;
    if !(lambda > omega) {
        return Err(Error::Divergence { lambda, omega });
    }
    let t_max = spec.truncation(lambda, m, omega);
    let tail = m.max(1.0) * (-(lambda - omega) * t_max).exp() / (lambda - omega);
    let u_max = t_max.sqrt();
    let integrand = |u: f64| {
        let t = u * u;
        let k = 2.0 * u * (-lambda * t).exp();
        f(t).into_iter().map(|v| k * v).collect::<Vec<_>>()
    };
    let fine =
        CompositeRule::new(0.0, u_max, spec.panels, spec.points).integrate_vec(len, integrand);
    let coarse_panels = (spec.panels / 2).max(1);
    let coarse = if coarse_panels == spec.panels {
        CompositeRule::new(
            0.0,
            u_max,
            spec.panels,
            spec.points.saturating_sub(1).max(1),
        )
        .integrate_vec(len, integrand)
    } else {
        CompositeRule::new(0.0, u_max, coarse_panels, spec.points).integrate_vec(len, integrand)
    };
    Ok(fine
        .into_iter()
        .zip(coarse)
        .map(|(v, c)| Estimate {
            value: v,
            error: (v - c).abs() + tail,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_high_degree_polynomials() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let v = composite_gauss_legendre(f64::exp, 0.0, 2.0, 4, 8);
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn laplace_of_constant() {
        let e = laplace_quadrature(|_| 1.0, 1.0, 1.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value - 1.0).abs() <= e.error.max(1e-12));
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn laplace_of_bound_function() {
        let (m, omega) = (2.0, 1.0);
        let e = laplace_quadrature(
            |t: f64| m * (omega * t).exp(),
            3.0,
            m,
            omega,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((e.value - 1.0).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn laplace_of_ramp() {
        let e = laplace_quadrature(|t| t, 2.0, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn divergent_lambda_is_rejected() {
        let err = laplace_quadrature(|_| 1.0, 1.0, 1.0, 1.0, &QuadratureSpec::default());
        assert!(matches!(err, Err(Error::Divergence { .. })));
    }

    #[test]
    fn truncation_rule() {
        let spec = QuadratureSpec::default();
        assert_eq!(spec.truncation(100.0, 1.0, 0.0), 1.0);
        let t = spec.truncation(3.0, 2.0, 1.0);
        assert!((t - (2f64.ln() + 36.8) / 2.0).abs() < 1e-14);
    }
}
