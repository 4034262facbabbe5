//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13, selected from the 1-norm of the argument
//! (Higham 2005).

use crate::error::{Error, Result};
use crate::numerics::linsolve::Lu;
use crate::numerics::Matrix;

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const PADE_9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `e^{tA}` for square `a` and `t >= 0`. Returns the identity exactly at `t = 0`.
pub fn mat_exp(a: &Matrix, t: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "exponential of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(Matrix::identity(a.rows()));
    }
    expm(&a.scale(t))
}

/// `e^{A}` for a square matrix.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = a.norm_1();
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let id = Matrix::identity(n);
    let a2 = a.mul_unchecked(a);

    let low: [(f64, &[f64]); 4] = [
        (THETA_3, &PADE_3),
        (THETA_5, &PADE_5),
        (THETA_7, &PADE_7),
        (THETA_9, &PADE_9),
    ];
    for (theta, coeffs) in low {
        if norm <= theta {
            let (u, v) = pade_low(a, &a2, &id, coeffs);
            return pade_quotient(&u, &v);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let scale = 2f64.powi(-s);
    let a = a.scale(scale);
    let a2 = a2.scale(scale * scale);
    let a4 = a2.mul_unchecked(&a2);
    let a6 = a4.mul_unchecked(&a2);
    let b = &PADE_13;

    let mut inner_u = a6.scale(b[13]);
    inner_u.axpy_in_place(b[11], &a4);
    inner_u.axpy_in_place(b[9], &a2);
    let mut u_poly = a6.mul_unchecked(&inner_u);
    u_poly.axpy_in_place(b[7], &a6);
    u_poly.axpy_in_place(b[5], &a4);
    u_poly.axpy_in_place(b[3], &a2);
    u_poly.axpy_in_place(b[1], &id);
    let u = a.mul_unchecked(&u_poly);

    let mut inner_v = a6.scale(b[12]);
    inner_v.axpy_in_place(b[10], &a4);
    inner_v.axpy_in_place(b[8], &a2);
    let mut v = a6.mul_unchecked(&inner_v);
    v.axpy_in_place(b[6], &a6);
    v.axpy_in_place(b[4], &a4);
    v.axpy_in_place(b[2], &a2);
    v.axpy_in_place(b[0], &id);

    let mut r = pade_quotient(&u, &v)?;
    for _ in 0..s {
        r = r.mul_unchecked(&r);
    }
    Ok(r)
}

fn pade_low(a: &Matrix, a2: &Matrix, id: &Matrix, b: &[f64]) -> (Matrix, Matrix) {
    // Powers A^0, A^2, A^4, ... up to the degree of the approximant.
    let m = b.len() - 1;
    let mut even = vec![id.clone(), a2.clone()];
    while 2 * (even.len() - 1) < m - 1 {
        let next = even.last().expect("nonempty").mul_unchecked(a2);
        even.push(next);
    }
    let n = a.rows();
    let mut u_poly = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for (k, p) in even.iter().enumerate() {
        if 2 * k < m {
            u_poly.axpy_in_place(b[2 * k + 1], p);
        }
        if 2 * k <= m {
            v.axpy_in_place(b[2 * k], p);
        }
    }
    (a.mul_unchecked(&u_poly), v)
}

fn pade_quotient(u: &Matrix, v: &Matrix) -> Result<Matrix> {
    let p = v.add(u)?;
    let q = v.sub(u)?;
    let lu = Lu::factor(&q)?
        .ok_or_else(|| Error::Domain("singular Pade denominator in matrix exponential".into()))?;
    lu.solve(&p)
}
