//! Discretized generator of the delay semigroup on `X_s × L_p((-1, 0); X_s)`.
//!
//! The history segment is sampled at `s_j = -1 + j/m`, `j = 0..m`, and the
//! point `s = 0` is the head variable itself, which realizes the boundary
//! condition `f(0) = x`. The state vector is laid out as
//! `[x, f(s_0), f(s_1), ..., f(s_{m-1})]`, each block of length `n`.

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// `[[A0, Φ], [0, ∂]]` with first-order upwind transport toward `-1`.
///
/// `phi_weights` is the `n x (n m)` matrix of the history functional acting
/// on the blocks `f(s_0), ..., f(s_{m-1})`.
pub fn build_delay_generator(a0: &Matrix, phi_weights: &Matrix, m: usize) -> Result<Matrix> {
    if !a0.is_square() {
        return Err(Error::Dimension("A0 must be square".into()));
    }
    if m < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 history cells, got {m}"
        )));
    }
    let n = a0.rows();
    if phi_weights.rows() != n || phi_weights.cols() != n * m {
        return Err(Error::Dimension(format!(
            "history functional is {}x{}, expected {n}x{}",
            phi_weights.rows(),
            phi_weights.cols(),
            n * m
        )));
    }
    let size = n * (m + 1);
    let inv_h = m as f64;
    let mut g = Matrix::zeros(size, size);
    g.set_block(0, 0, a0);
    g.set_block(0, n, phi_weights);
    // f_j' = (f_{j+1} - f_j) / h, where f_m is the head.
    for j in 0..m {
        let row = n * (j + 1);
        let next = if j + 1 == m { 0 } else { n * (j + 2) };
        for k in 0..n {
            g[(row + k, row + k)] -= inv_h;
            g[(row + k, next + k)] += inv_h;
        }
    }
    Ok(g)
}

/// Measure weights of the discretized product space: 1 per head coordinate
/// and the cell width `1/m` per history coordinate.
pub fn delay_weights(n: usize, m: usize) -> Vec<f64> {
    let mut w = vec![1.0; n];
    w.extend(std::iter::repeat_n(1.0 / m as f64, n * m));
    w
}

/// Quadrature weights on the history nodes `s_0, ..., s_{m-1}` for
/// `∫_{-1}^0 g(s) ds`: trapezoid on `[-1, -1/m]`, with the last interval
/// `[-1/m, 0]` evaluated at its left node. The weights are positive and
/// sum to 1.
pub fn history_quadrature_weights(m: usize) -> Vec<f64> {
    let h = 1.0 / m as f64;
    let mut w = vec![h; m];
    w[0] = 0.5 * h;
    w[m - 1] += 0.5 * h;
    w
}

/// History functional `f ↦ Σ_j q_j d_j f(s_j)` for scalar densities `d_j`
/// acting diagonally on `X_s = R^n`.
pub fn scalar_history_functional(n: usize, density: &[f64]) -> Matrix {
    let m = density.len();
    let q = history_quadrature_weights(m);
    let mut phi = Matrix::zeros(n, n * m);
    for j in 0..m {
        for k in 0..n {
            phi[(k, n * j + k)] = q[j] * density[j];
        }
    }
    phi
}
