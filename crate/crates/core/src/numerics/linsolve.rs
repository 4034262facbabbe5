//! LU factorization with partial pivoting and the resolvent solve built on it.

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Condition number above which `(lambda - A)` is reported as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e12;

/// Packed LU factors of a square matrix, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a`. Returns `None` when an exactly zero pivot is hit.
    pub fn factor(a: &Matrix) -> Result<Option<Lu>> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot == 0.0 {
                return Ok(None);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Some(Lu { n, lu, perm }))
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.n {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, system has {}",
                b.rows(),
                self.n
            )));
        }
        let bt = b.transpose();
        let mut cols = Vec::with_capacity(b.cols() * self.n);
        for j in 0..b.cols() {
            cols.extend(self.solve_vec(bt.row(j)));
        }
        Ok(Matrix::from_row_major(b.cols(), self.n, cols)?.transpose())
    }

    pub fn inverse(&self) -> Matrix {
        self.solve(&Matrix::identity(self.n))
            .expect("identity has matching dimension")
    }
}

/// Inverts `a`, failing when its 1-norm condition number exceeds the threshold.
///
/// The condition number is computed exactly from the inverse; the matrices
/// handled here are small and dense.
pub fn checked_inverse(a: &Matrix, lambda: f64) -> Result<Matrix> {
    let lu = Lu::factor(a)?.ok_or(Error::Singular {
        lambda,
        condition: f64::INFINITY,
    })?;
    let inv = lu.inverse();
    let condition = a.norm_1() * inv.norm_1();
    if !condition.is_finite() || condition > SINGULARITY_THRESHOLD {
        return Err(Error::Singular { lambda, condition });
    }
    Ok(inv)
}

/// `(lambda I - A)^{-1}` by direct solve.
pub fn solve_resolvent(a: &Matrix, lambda: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "resolvent of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let shifted = Matrix::identity(a.rows()).scale(lambda).sub(a)?;
    checked_inverse(&shifted, lambda)
}
