//! Dense real matrix kernels: exponential, resolvent, Duhamel integral and
//! Laplace quadrature.

mod expm;
mod linsolve;
mod matrix;
mod quadrature;

pub use expm::{expm, mat_exp};
pub use linsolve::{checked_inverse, solve_resolvent, Lu, SINGULARITY_THRESHOLD};
pub use matrix::Matrix;
pub use quadrature::{
    composite_gauss_legendre, gauss_legendre, laplace_quadrature, laplace_quadrature_vec,
    CompositeRule, Estimate, QuadratureSpec,
};

use crate::error::{Error, Result};

/// `∫_0^t e^{(t-s) A_S} B e^{s A_T} ds`, read off the upper-right block of
/// `exp(t [[A_S, B], [0, A_T]])` (Van Loan).
pub fn duhamel_block(a_s: &Matrix, b: &Matrix, a_t: &Matrix, t: f64) -> Result<Matrix> {
    if !a_s.is_square() || !a_t.is_square() {
        return Err(Error::Dimension("Duhamel generators must be square".into()));
    }
    let (n, m) = (a_s.rows(), a_t.rows());
    if b.rows() != n || b.cols() != m {
        return Err(Error::Dimension(format!(
            "perturbation is {}x{}, generators need {n}x{m}",
            b.rows(),
            b.cols()
        )));
    }
    let mut big = Matrix::zeros(n + m, n + m);
    big.set_block(0, 0, a_s);
    big.set_block(0, n, b);
    big.set_block(n, n, a_t);
    let e = mat_exp(&big, t)?;
    Ok(e.block(0, n, n, m))
}
