//! Norms on grid spaces: weighted `l_p`, intersection and sum norms, and
//! induced operator norms.

use crate::error::{Error, Result};
use crate::numerics::Matrix;

use super::{Element, Exponent, GridSpace};

pub(crate) fn norm_values(space: &GridSpace, values: &[f64]) -> f64 {
    match space.exponent() {
        Exponent::Infinity => values.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        Exponent::Finite(p) if p == 1.0 => space
            .weights()
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.abs())
            .sum(),
        Exponent::Finite(p) if p == 2.0 => space
            .weights()
            .iter()
            .zip(values)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt(),
        Exponent::Finite(p) => {
            let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let s: f64 = space
                .weights()
                .iter()
                .zip(values)
                .map(|(w, v)| w * (v.abs() / scale).powf(p))
                .sum();
            scale * s.powf(1.0 / p)
        }
    }
}

/// `(Σ w_i |u_i|^p)^{1/p}`, or `max_i |u_i|` for `p = ∞`.
pub fn p_norm(u: &Element) -> f64 {
    norm_values(u.space(), u.values())
}

/// Norm of `u`'s values in the conjugate-exponent space (the dual norm
/// with respect to the weighted pairing).
pub fn dual_norm(u: &Element) -> f64 {
    norm_values(&u.space().dual(), u.values())
}

fn check_dims(n: usize, x: &GridSpace, y: &GridSpace) -> Result<()> {
    if x.dim() != n || y.dim() != n {
        return Err(Error::Dimension(format!(
            "element of length {n} measured in spaces of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

/// `max(‖u‖_X, ‖u‖_Y)`.
pub fn intersection_norm(u: &Element, x: &GridSpace, y: &GridSpace) -> Result<f64> {
    check_dims(u.len(), x, y)?;
    Ok(norm_values(x, u.values()).max(norm_values(y, u.values())))
}

const SUM_NORM_MAX_ITER: usize = 500;
const SMOOTHING_STAGES: [f64; 10] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 1e-6];

/// `inf { ‖x‖_X + ‖v - x‖_Y }` over all splittings of `v`.
///
/// Minimizes smoothed versions of the convex objective with accelerated
/// gradient steps under decreasing smoothing. Every iterate's value is an
/// upper bound; functionals `g` give lower bounds
/// `⟨v, g⟩ / max(‖g‖_{X'}, ‖g‖_{Y'})`. Returns once the gap is below `tol`.
pub fn sum_norm(v: &Element, x: &GridSpace, y: &GridSpace, tol: f64) -> Result<f64> {
    let n = v.len();
    check_dims(n, x, y)?;
    if x.weights() != y.weights() {
        return Err(Error::Pairing(
            "sum norm needs a shared weight vector".into(),
        ));
    }
    let vals = v.values();
    let scale = vals.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let (xd, yd) = (x.dual(), y.dual());
    let objective = |z: &[f64]| {
        let rest: Vec<f64> = vals.iter().zip(z).map(|(a, b)| a - b).collect();
        norm_values(x, z) + norm_values(y, &rest)
    };
    let weights = x.weights();
    let lower_bound = |grad: &[f64]| {
        // Euclidean gradient -> representative under the weighted pairing.
        let g: Vec<f64> = grad.iter().zip(weights).map(|(g, w)| g / w).collect();
        let denom = norm_values(&xd, &g).max(norm_values(&yd, &g));
        if denom == 0.0 {
            return 0.0;
        }
        let pairing: f64 = weights
            .iter()
            .zip(vals)
            .zip(&g)
            .map(|((w, a), b)| w * a * b)
            .sum();
        pairing / denom
    };

    let zero = vec![0.0; n];
    let (mut best_x, mut upper) = {
        let at_zero = objective(&zero);
        let at_v = objective(vals);
        if at_zero <= at_v {
            (zero.clone(), at_zero)
        } else {
            (vals.to_vec(), at_v)
        }
    };
    let mut lower = [x, y]
        .iter()
        .map(|s| smoothed_norm_grad(s, vals, 1e-12 * scale).1)
        .map(|g| lower_bound(&g))
        .fold(0.0, f64::max);
    if upper - lower <= tol {
        return Ok(upper);
    }

    let per_stage = SUM_NORM_MAX_ITER / SMOOTHING_STAGES.len();
    let mut iterations = 0;
    for &rel_mu in &SMOOTHING_STAGES {
        let mu = rel_mu * scale;
        let smooth = |z: &[f64]| -> (f64, Vec<f64>) {
            let rest: Vec<f64> = vals.iter().zip(z).map(|(a, b)| a - b).collect();
            let (fx, gx) = smoothed_norm_grad(x, z, mu);
            let (fy, gy) = smoothed_norm_grad(y, &rest, mu);
            (fx + fy, gx.iter().zip(&gy).map(|(a, b)| a - b).collect())
        };
        let mut z = best_x.clone();
        let mut z_prev = z.clone();
        let mut step = mu / (weights.iter().sum::<f64>().max(1.0));
        let mut momentum = 1.0_f64;
        for _ in 0..per_stage {
            iterations += 1;
            let next_m = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
            let beta = (momentum - 1.0) / next_m;
            momentum = next_m;
            let probe: Vec<f64> = z
                .iter()
                .zip(&z_prev)
                .map(|(a, b)| a + beta * (a - b))
                .collect();
            let (f_probe, g_probe) = smooth(&probe);
            let g2: f64 = g_probe.iter().map(|g| g * g).sum();
            // Backtracking on the sufficient-decrease condition.
            let mut trial;
            loop {
                trial = probe
                    .iter()
                    .zip(&g_probe)
                    .map(|(a, g)| a - step * g)
                    .collect::<Vec<_>>();
                if smooth(&trial).0 <= f_probe - 0.5 * step * g2 || step < 1e-300 {
                    break;
                }
                step *= 0.5;
            }
            step *= 1.5;
            z_prev = std::mem::replace(&mut z, trial);
            let f_true = objective(&z);
            if f_true < upper {
                upper = f_true;
                best_x = z.clone();
            }
            let (_, g_now) = smooth(&z);
            let rest: Vec<f64> = vals.iter().zip(&z).map(|(a, b)| a - b).collect();
            let (_, gx) = smoothed_norm_grad(x, &z, mu);
            let (_, gy) = smoothed_norm_grad(y, &rest, mu);
            lower = lower.max(lower_bound(&gx)).max(lower_bound(&gy));
            let mid: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| 0.5 * (a + b)).collect();
            lower = lower.max(lower_bound(&mid));
            if upper - lower <= tol {
                return Ok(upper);
            }
            if g_now.iter().all(|g| g.abs() < 1e-14) {
                break;
            }
        }
    }
    Err(Error::Convergence {
        best: upper,
        gap: upper - lower,
        iterations,
    })
}

/// Smoothed norm `N_mu` (with `|s|` replaced by `sqrt(s^2 + mu^2)` and, for
/// `p = ∞`, the max replaced by a log-sum-exp) and its Euclidean gradient.
fn smoothed_norm_grad(space: &GridSpace, z: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let phi: Vec<f64> = z.iter().map(|s| (s * s + mu * mu).sqrt()).collect();
    let dphi: Vec<f64> = z.iter().zip(&phi).map(|(s, f)| s / f).collect();
    match space.exponent() {
        Exponent::Infinity => {
            let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ex: Vec<f64> = phi.iter().map(|f| ((f - top) / mu).exp()).collect();
            let total: f64 = ex.iter().sum();
            let value = top + mu * total.ln();
            let grad = ex.iter().zip(&dphi).map(|(e, d)| e / total * d).collect();
            (value, grad)
        }
        Exponent::Finite(p) => {
            let w = space.weights();
            let top = phi.iter().copied().fold(0.0, f64::max);
            let s: f64 = w.iter().zip(&phi).map(|(w, f)| w * (f / top).powf(p)).sum();
            let value = top * s.powf(1.0 / p);
            let grad = w
                .iter()
                .zip(&phi)
                .zip(&dphi)
                .map(|((w, f), d)| w * (f / value).powf(p - 1.0) * d)
                .collect();
            (value, grad)
        }
    }
}

/// Norm of `m` as an operator on `space`, exact for `p ∈ {1, ∞}`.
///
/// For `p = 2` power iteration on the weighted Gram matrix is used; other
/// exponents get the Riesz–Thorin bound `‖m‖_1^{1/p} ‖m‖_∞^{1-1/p}`.
pub fn operator_norm(m: &Matrix, space: &GridSpace) -> Result<f64> {
    let n = space.dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} operator on a space of dimension {n}",
            m.rows(),
            m.cols()
        )));
    }
    let w = space.weights();
    let one = || {
        (0..n)
            .map(|j| (0..n).map(|i| w[i] * m[(i, j)].abs()).sum::<f64>() / w[j])
            .fold(0.0, f64::max)
    };
    Ok(match space.exponent() {
        Exponent::Infinity => m.norm_inf(),
        Exponent::Finite(p) if p == 1.0 => one(),
        Exponent::Finite(p) if p == 2.0 => weighted_spectral_norm(m, w),
        Exponent::Finite(p) => one().powf(1.0 / p) * m.norm_inf().powf(1.0 - 1.0 / p),
    })
}

fn weighted_spectral_norm(m: &Matrix, w: &[f64]) -> f64 {
    let n = w.len();
    let sq: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    // C = W^{1/2} M W^{-1/2}; ‖M‖ = largest singular value of C.
    let c = Matrix::from_fn(n, n, |i, j| sq[i] * m[(i, j)] / sq[j]);
    let gram = c.transpose().mul_unchecked(&c);
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut estimate = 0.0;
    for _ in 0..200 {
        let y = gram.mat_vec_unchecked(&x);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        x = y.into_iter().map(|v| v / norm).collect();
        let converged = (norm - estimate).abs() <= 1e-8 * norm;
        estimate = norm;
        if converged {
            break;
        }
    }
    estimate.sqrt()
}
